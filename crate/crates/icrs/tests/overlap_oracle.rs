//! Overlap detection against a brute-force first-order oracle.
//!
//! On rule systems without abstractions, meta-variables of arity zero act as
//! plain first-order variables, so overlap detection must agree with
//! textbook syntactic unification tried at every non-variable position.

use std::collections::HashMap;

use proptest::prelude::*;

use icrs::position::Position;
use icrs::rules::Rule;
use icrs::signature::{Signature, SymbolId};
use icrs::term::{MetaName, Term, TermNode};
use icrs::unify::find_overlap;

fn sig() -> (Signature, SymbolId, SymbolId, SymbolId, SymbolId) {
    let mut sig = Signature::new();
    let f = sig.declare("f", 2).unwrap();
    let g = sig.declare("g", 1).unwrap();
    let a = sig.declare("a", 0).unwrap();
    let b = sig.declare("b", 0).unwrap();
    (sig, f, g, a, b)
}

/// Robinson unification with occurs check; metas are variables.
fn oracle_unify(a: &Term, b: &Term, subst: &mut HashMap<MetaName, Term>) -> bool {
    fn resolve(t: &Term, subst: &HashMap<MetaName, Term>) -> Term {
        let mut t = t.clone();
        while let TermNode::Meta(n, _) = t.node() {
            match subst.get(n) {
                Some(u) => t = u.clone(),
                None => break,
            }
        }
        t
    }
    fn occurs(name: &MetaName, t: &Term, subst: &HashMap<MetaName, Term>) -> bool {
        match resolve(t, subst).node() {
            TermNode::Meta(n, _) => n == name,
            TermNode::Fun(_, args) => args.iter().any(|a| occurs(name, a, subst)),
            _ => false,
        }
    }
    let a = resolve(a, subst);
    let b = resolve(b, subst);
    match (a.node(), b.node()) {
        (TermNode::Meta(n, _), TermNode::Meta(m, _)) if n == m => true,
        (TermNode::Meta(n, _), _) => {
            if occurs(n, &b, subst) {
                return false;
            }
            subst.insert(n.clone(), b.clone());
            true
        }
        (_, TermNode::Meta(m, _)) => {
            if occurs(m, &a, subst) {
                return false;
            }
            subst.insert(m.clone(), a.clone());
            true
        }
        (TermNode::Fun(x, xs), TermNode::Fun(y, ys)) => {
            x == y
                && xs.len() == ys.len()
                && xs.iter().zip(ys).all(|(s, t)| oracle_unify(s, t, subst))
        }
        _ => false,
    }
}

fn rename_apart(t: &Term) -> Term {
    match t.node() {
        TermNode::Meta(n, _) => Term::meta(MetaName::new(&format!("{n}~other")), vec![]),
        TermNode::Fun(f, args) => Term::fun(*f, args.iter().map(rename_apart).collect()),
        _ => t.clone(),
    }
}

/// First non-variable position of `l1` whose subterm unifies with `l2`.
fn oracle_overlap(l1: &Term, l2: &Term, skip_root: bool) -> Option<Position> {
    fn positions(t: &Term, cur: &mut Vec<usize>, out: &mut Vec<(Position, Term, bool)>) {
        let meta = matches!(t.node(), TermNode::Meta(..));
        out.push((Position(cur.clone()), t.clone(), meta));
        if let TermNode::Fun(_, args) = t.node() {
            for (i, a) in args.iter().enumerate() {
                cur.push(i + 1);
                positions(a, cur, out);
                cur.pop();
            }
        }
    }
    let l2 = rename_apart(l2);
    let mut all = Vec::new();
    positions(l1, &mut Vec::new(), &mut all);
    for (pos, sub, meta) in all {
        if meta || (skip_root && pos.is_root()) {
            continue;
        }
        let mut subst = HashMap::new();
        if oracle_unify(&sub, &l2, &mut subst) {
            return Some(pos);
        }
    }
    None
}

fn lhs_strategy(f: SymbolId, g: SymbolId, a: SymbolId, b: SymbolId) -> BoxedStrategy<Term> {
    let leaf = prop_oneof![
        Just(Term::constant(a)),
        Just(Term::constant(b)),
        (0..3u8).prop_map(|i| Term::meta(MetaName::new(&format!("Z{i}")), vec![])),
    ];
    let tree = leaf.prop_recursive(3, 16, 2, move |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(move |(s, t)| Term::fun(f, vec![s, t])),
            inner.prop_map(move |s| Term::fun(g, vec![s])),
        ]
    });
    // A left-hand side needs a function symbol at the root.
    let pair = (tree.clone(), tree.clone());
    prop_oneof![
        pair.prop_map(move |(s, t)| Term::fun(f, vec![s, t])),
        tree.prop_map(move |s| Term::fun(g, vec![s])),
    ]
    .boxed()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn first_order_overlap_matches_the_oracle(
        seed in any::<u64>(),
        (l1, l2) in {
            let (_, f, g, a, b) = sig();
            (lhs_strategy(f, g, a, b), lhs_strategy(f, g, a, b))
        }
    ) {
        let _ = seed;
        let (_, _, _, a_sym, _) = sig();
        let rhs = Term::constant(a_sym);
        let r1 = Rule::new("one", l1.clone(), rhs.clone());
        let r2 = Rule::new("two", l2.clone(), rhs.clone());

        let got = find_overlap(&r1, &r2).map(|o| o.position);
        let want = oracle_overlap(&l1, &l2, false);
        prop_assert_eq!(&got, &want, "distinct rules disagree with the oracle");

        // Against its own copy the root is excluded.
        let self_got = find_overlap(&r1, &r1).map(|o| o.position);
        let self_want = oracle_overlap(&l1, &l1, true);
        prop_assert_eq!(self_got, self_want, "self overlap disagrees with the oracle");

        // Root overlaps are symmetric for distinct rules.
        let back = find_overlap(&r2, &r1).map(|o| o.position);
        prop_assert_eq!(
            got == Some(Position::root()),
            back == Some(Position::root()),
            "root overlap must be symmetric"
        );
    }
}
