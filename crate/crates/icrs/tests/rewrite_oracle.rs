//! Residual theory checked by brute force.
//!
//! Complete developments of a finite redex set in an orthogonal system end
//! in the same term no matter which residual is contracted first. The
//! checks here enumerate every contraction order and compare the results,
//! verify that descendants of disjoint positions stay disjoint, and audit
//! the wiring of completed tiling diagrams edge by edge.

use proptest::prelude::*;

use icrs::alpha::{alpha_eq, positions_up_to};
use icrs::matching::{find_redexes, Redex};
use icrs::position::Position;
use icrs::rewrite::{
    apply_step, descendants, develop, reduce, residuals, tile, Reduction,
    Strategy as ReduceStrategy, TilingDiagram, TilingStatus,
};
use icrs::rules::{Rule, RuleSystem};
use icrs::signature::{Signature, SymbolId};
use icrs::term::{MetaName, Term};
use icrs::valuation::Valuation;

/// An orthogonal system exercising duplication, erasure, and collapse.
/// Right-hand side meta-variables never nest inside one another, so the
/// classical parallelism properties of descendants apply.
fn system() -> (RuleSystem, [SymbolId; 6]) {
    let mut sig = Signature::new();
    let f = sig.declare("f", 1).unwrap();
    let g = sig.declare("g", 1).unwrap();
    let h = sig.declare("h", 1).unwrap();
    let pair = sig.declare("pair", 2).unwrap();
    let a = sig.declare("a", 0).unwrap();
    let c = sig.declare("c", 0).unwrap();
    let meta = |n: &str| Term::meta(MetaName::new(n), vec![]);
    let rules = vec![
        Rule::new("col", Term::fun(f, vec![meta("Z")]), meta("Z")),
        Rule::new(
            "dup",
            Term::fun(g, vec![meta("Z")]),
            Term::fun(pair, vec![meta("Z"), meta("Z")]),
        ),
        Rule::new("drop", Term::fun(h, vec![meta("Z")]), Term::constant(c)),
    ];
    let sys = RuleSystem::new(sig, rules);
    sys.validate().unwrap();
    (sys, [f, g, h, pair, a, c])
}

fn term_strategy() -> BoxedStrategy<Term> {
    let (_, [f, g, h, pair, a, c]) = system();
    let leaf = prop_oneof![Just(Term::constant(a)), Just(Term::constant(c))];
    leaf.prop_recursive(3, 14, 2, move |inner| {
        prop_oneof![
            inner.clone().prop_map(move |s| Term::fun(f, vec![s])),
            inner.clone().prop_map(move |s| Term::fun(g, vec![s])),
            inner.clone().prop_map(move |s| Term::fun(h, vec![s])),
            (inner.clone(), inner)
                .prop_map(move |(s, t)| Term::fun(pair, vec![s, t])),
        ]
    })
    .boxed()
}

fn placeholder(pos: Position, rule_index: usize) -> Redex {
    Redex { position: pos, rule_index, valuation: Valuation::new() }
}

/// Develops `pending` in every possible order, collecting the end terms.
fn all_orders(
    t: &Term,
    pending: &[(Position, usize)],
    sys: &RuleSystem,
    depth: usize,
    finals: &mut Vec<Term>,
) {
    assert!(depth < 24, "development did not terminate");
    if pending.is_empty() {
        finals.push(t.clone());
        return;
    }
    for k in 0..pending.len() {
        let (pos, ri) = pending[k].clone();
        let step = apply_step(t, &placeholder(pos, ri), sys).unwrap();
        let rest: Vec<Redex> = pending
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != k)
            .map(|(_, (p, r))| placeholder(p.clone(), *r))
            .collect();
        let next: Vec<(Position, usize)> =
            residuals(&rest, &Reduction::single(step.clone()), sys)
                .unwrap()
                .into_iter()
                .map(|r| (r.position, r.rule_index))
                .collect();
        all_orders(&step.target, &next, sys, depth + 1, finals);
    }
}

/// Checks that every edge of the diagram runs between its grid endpoints.
fn audit_edges(d: &TilingDiagram) {
    for (i, row) in d.vertical.iter().enumerate() {
        for (j, edge) in row.iter().enumerate() {
            if let Some(red) = edge {
                let from = d.grid[i][j].as_ref().expect("edge origin exists");
                let to = d.grid[i + 1][j].as_ref().expect("edge end exists");
                match red.source() {
                    Some(src) => {
                        assert!(alpha_eq(src, from));
                        assert!(alpha_eq(red.target().unwrap(), to));
                    }
                    None => assert!(alpha_eq(from, to), "empty developments keep the term"),
                }
            }
        }
    }
    for (i, row) in d.horizontal.iter().enumerate() {
        for (j, edge) in row.iter().enumerate() {
            if let Some(red) = edge {
                let from = d.grid[i][j].as_ref().expect("edge origin exists");
                let to = d.grid[i][j + 1].as_ref().expect("edge end exists");
                match red.source() {
                    Some(src) => {
                        assert!(alpha_eq(src, from));
                        assert!(alpha_eq(red.target().unwrap(), to));
                    }
                    None => assert!(alpha_eq(from, to), "empty developments keep the term"),
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// Every contraction order of a redex set of size at most three ends
    /// in the same term, and `develop` reaches exactly that term.
    #[test]
    fn developments_are_order_independent(
        t in term_strategy(),
        picks in prop::collection::vec(any::<prop::sample::Index>(), 1..=3),
    ) {
        let (sys, _) = system();
        let found = find_redexes(&t, &sys, 4);
        let mut u: Vec<(Position, usize)> = Vec::new();
        for ix in &picks {
            if found.is_empty() {
                break;
            }
            let r = &found[ix.index(found.len())];
            if !u.contains(&(r.position.clone(), r.rule_index)) {
                u.push((r.position.clone(), r.rule_index));
            }
        }

        let mut finals = Vec::new();
        all_orders(&t, &u, &sys, 0, &mut finals);
        prop_assert!(!finals.is_empty());
        for other in &finals[1..] {
            prop_assert!(alpha_eq(&finals[0], other));
        }

        let redexes: Vec<Redex> =
            u.into_iter().map(|(p, r)| placeholder(p, r)).collect();
        let dev = develop(&t, &redexes, &sys).unwrap();
        prop_assert!(alpha_eq(&dev.target, &finals[0]));
        // Nothing of the developed set survives its own development.
        prop_assert!(residuals(&dev.developed, &dev.reduction, &sys).unwrap().is_empty());
    }

    /// Descendants of disjoint positions are pairwise disjoint (or gone).
    #[test]
    fn descendants_preserve_parallelism(
        t in term_strategy(),
        step_pick in any::<prop::sample::Index>(),
        pair_pick in any::<prop::sample::Index>(),
    ) {
        let (sys, _) = system();
        let found = find_redexes(&t, &sys, 4);
        prop_assume!(!found.is_empty());
        let redex = &found[step_pick.index(found.len())];
        let step = apply_step(&t, redex, &sys).unwrap();

        let all = positions_up_to(&t, 4);
        let mut disjoint_pairs = Vec::new();
        for (i, p) in all.iter().enumerate() {
            for q in &all[i + 1..] {
                if p.is_disjoint_from(q) {
                    disjoint_pairs.push((p.clone(), q.clone()));
                }
            }
        }
        prop_assume!(!disjoint_pairs.is_empty());
        let (p, q) = disjoint_pairs[pair_pick.index(disjoint_pairs.len())].clone();

        let dp = descendants(std::slice::from_ref(&p), &step, &sys).unwrap();
        let dq = descendants(std::slice::from_ref(&q), &step, &sys).unwrap();
        for x in &dp {
            for y in &dq {
                prop_assert!(
                    x.is_disjoint_from(y),
                    "images {:?} and {:?} of disjoint {:?}, {:?} overlap",
                    x, y, p, q
                );
            }
        }
    }

    /// Tiling two reductions from a common source completes on this
    /// orthogonal system and produces a diagram whose every edge matches
    /// its grid endpoints; in particular both borders meet at one corner.
    #[test]
    fn completed_tilings_close(
        t in term_strategy(),
        t_picks in prop::collection::vec(any::<prop::sample::Index>(), 0..=2),
        s_len in 0usize..=3,
    ) {
        let (sys, _) = system();
        let s_red = reduce(&t, &sys, ReduceStrategy::LeftmostOutermost, s_len, 8).reduction;

        let mut t_steps = Vec::new();
        let mut cur = t.clone();
        for ix in &t_picks {
            let found = find_redexes(&cur, &sys, 4);
            if found.is_empty() {
                break;
            }
            let step = apply_step(&cur, &found[ix.index(found.len())], &sys).unwrap();
            cur = step.target.clone();
            t_steps.push(step);
        }
        let t_red = Reduction::from_steps(t_steps).unwrap();
        prop_assume!(!s_red.is_empty() || !t_red.is_empty());

        let diagram = tile(&s_red, &t_red, &sys, 512).unwrap();
        prop_assert_eq!(&diagram.status, &TilingStatus::Completed);
        for row in &diagram.grid {
            for cell in row {
                prop_assert!(cell.is_some());
            }
        }
        audit_edges(&diagram);
        // Borders reproduce the two reductions.
        prop_assert!(alpha_eq(
            diagram.grid[s_red.len()][0].as_ref().unwrap(),
            s_red.target().unwrap_or(&t),
        ));
        prop_assert!(alpha_eq(
            diagram.grid[0][t_red.len()].as_ref().unwrap(),
            t_red.target().unwrap_or(&t),
        ));
    }
}
