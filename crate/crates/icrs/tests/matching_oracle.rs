//! Redex enumeration against a brute-force first-order matcher.
//!
//! On finite terms without abstractions, matching a pattern is plain
//! first-order matching with equality constraints for repeated
//! meta-variables. The enumerator must agree with trying every rule at
//! every position, and every redex it reports must reproduce the matched
//! subterm when its valuation is applied to the left-hand side.

use std::collections::HashMap;

use proptest::prelude::*;

use icrs::alpha::subterm_at;
use icrs::matching::find_redexes;
use icrs::position::Position;
use icrs::rules::{Rule, RuleSystem};
use icrs::signature::{Signature, SymbolId};
use icrs::term::{MetaName, Term, TermNode};
use icrs::valuation::apply_valuation;

fn system() -> (RuleSystem, SymbolId, SymbolId, SymbolId, SymbolId) {
    let mut sig = Signature::new();
    let f = sig.declare("f", 2).unwrap();
    let g = sig.declare("g", 1).unwrap();
    let a = sig.declare("a", 0).unwrap();
    let b = sig.declare("b", 0).unwrap();
    let meta = |n: &str| Term::meta(MetaName::new(n), vec![]);
    let rules = vec![
        Rule::new("second", Term::fun(f, vec![meta("Z"), meta("W")]), meta("W")),
        Rule::new(
            "unwrap",
            Term::fun(g, vec![Term::fun(g, vec![meta("Z")])]),
            meta("Z"),
        ),
        Rule::new("diag", Term::fun(f, vec![meta("Z"), meta("Z")]), meta("Z")),
        Rule::new("swap", Term::fun(g, vec![Term::constant(a)]), Term::constant(b)),
    ];
    let sys = RuleSystem::new(sig, rules);
    sys.validate().unwrap();
    (sys, f, g, a, b)
}

/// Naive first-order matcher: metas bind subterms, repeats must be equal.
fn naive_match(lhs: &Term, s: &Term, binds: &mut HashMap<MetaName, Term>) -> bool {
    match (lhs.node(), s.node()) {
        (TermNode::Meta(n, _), _) => match binds.get(n) {
            Some(prev) => prev == s,
            None => {
                binds.insert(n.clone(), s.clone());
                true
            }
        },
        (TermNode::Fun(x, xs), TermNode::Fun(y, ys)) => {
            x == y
                && xs.len() == ys.len()
                && xs.iter().zip(ys).all(|(l, t)| naive_match(l, t, binds))
        }
        _ => false,
    }
}

fn oracle_redexes(s: &Term, sys: &RuleSystem, bound: usize) -> Vec<(Position, usize)> {
    fn positions(t: &Term, cur: &mut Vec<usize>, bound: usize, out: &mut Vec<(Position, Term)>) {
        out.push((Position(cur.clone()), t.clone()));
        if cur.len() == bound {
            return;
        }
        if let TermNode::Fun(_, args) = t.node() {
            for (i, a) in args.iter().enumerate() {
                cur.push(i + 1);
                positions(a, cur, bound, out);
                cur.pop();
            }
        }
    }
    let mut all = Vec::new();
    positions(s, &mut Vec::new(), bound, &mut all);
    let mut out = Vec::new();
    for (pos, sub) in all {
        for (i, rule) in sys.rules.iter().enumerate() {
            if naive_match(&rule.lhs, &sub, &mut HashMap::new()) {
                out.push((pos.clone(), i));
            }
        }
    }
    out
}

fn term_strategy(f: SymbolId, g: SymbolId, a: SymbolId, b: SymbolId) -> BoxedStrategy<Term> {
    let leaf = prop_oneof![Just(Term::constant(a)), Just(Term::constant(b))];
    leaf.prop_recursive(4, 24, 2, move |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(move |(s, t)| Term::fun(f, vec![s, t])),
            inner.prop_map(move |s| Term::fun(g, vec![s])),
        ]
    })
    .boxed()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn enumeration_agrees_with_brute_force(
        t in {
            let (_, f, g, a, b) = system();
            term_strategy(f, g, a, b)
        },
        bound in 0usize..4,
    ) {
        let (sys, ..) = system();
        let redexes = find_redexes(&t, &sys, bound);
        let got: Vec<(Position, usize)> =
            redexes.iter().map(|r| (r.position.clone(), r.rule_index)).collect();
        let want = oracle_redexes(&t, &sys, bound);
        prop_assert_eq!(&got, &want);

        // Soundness: each valuation rebuilds the matched subterm exactly.
        for r in &redexes {
            let lhs = &sys.rules[r.rule_index].lhs;
            let rebuilt = apply_valuation(&r.valuation, lhs).unwrap();
            prop_assert_eq!(&rebuilt, &subterm_at(&t, &r.position).unwrap());
        }
    }
}
