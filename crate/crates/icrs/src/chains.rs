//! The finite chains property of meta-terms.
//!
//! A chain is a sequence of meta-variable occurrences in which each next
//! occurrence is the root of an argument of the previous one: nested
//! meta-variable applications with nothing in between. Valuation replaces
//! every link of a chain without emitting a single node of the result, so a
//! meta-term with an infinite chain, such as `mu a. Z(a)` read as
//! `Z(Z(Z(...)))`, has no well-defined image under a valuation. Infinitary
//! rewriting therefore restricts rules and valuations to meta-terms whose
//! chains are all finite, and this module decides that property.
//!
//! In the rational representation an infinite chain exists precisely when
//! the syntax graph has a cycle consisting of meta-variable states only,
//! since any infinite path of the finite graph eventually cycles.

use crate::graph::build_graph;
use crate::term::{MetaName, Term, TermNode};

/// Outcome of the chain analysis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChainsCheck {
    /// All chains are finite; `longest` is the maximal number of
    /// meta-variables in a chain (0 for a plain term).
    Finite { longest: usize },
    /// An infinite chain exists; `cycle` names the meta-variables along one
    /// repeating segment of it.
    Infinite { cycle: Vec<MetaName> },
}

pub fn satisfies_finite_chains(t: &Term) -> bool {
    matches!(check_meta_chains(t), ChainsCheck::Finite { .. })
}

pub fn check_meta_chains(t: &Term) -> ChainsCheck {
    let g = build_graph(t);
    let n = g.states.len();
    let is_meta: Vec<bool> =
        g.states.iter().map(|s| matches!(s.node.node(), TermNode::Meta(..))).collect();
    let meta_name = |i: usize| match g.states[i].node.node() {
        TermNode::Meta(m, _) => m.clone(),
        _ => unreachable!(),
    };

    // Depth-first search over the meta-only subgraph: grey nodes are on the
    // current chain, so reaching one closes an infinite chain. Finished
    // nodes memoise the longest chain hanging off them.
    const WHITE: u8 = 0;
    const GREY: u8 = 1;
    const BLACK: u8 = 2;
    let mut colour = vec![WHITE; n];
    let mut longest_from = vec![0usize; n];
    let mut overall = 0usize;

    for start in 0..n {
        if !is_meta[start] || colour[start] != WHITE {
            continue;
        }
        // Iterative DFS; each frame tracks which successor to try next.
        let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
        colour[start] = GREY;
        while let Some(frame) = stack.last_mut() {
            let state = frame.0;
            let succs: Vec<usize> = g.states[state]
                .children
                .iter()
                .map(|&(_, tgt)| tgt)
                .filter(|&tgt| is_meta[tgt])
                .collect();
            if frame.1 < succs.len() {
                let tgt = succs[frame.1];
                frame.1 += 1;
                match colour[tgt] {
                    WHITE => {
                        colour[tgt] = GREY;
                        stack.push((tgt, 0));
                    }
                    GREY => {
                        let from = stack.iter().position(|&(s, _)| s == tgt).unwrap();
                        let cycle = stack[from..].iter().map(|&(s, _)| meta_name(s)).collect();
                        return ChainsCheck::Infinite { cycle };
                    }
                    _ => {}
                }
            } else {
                colour[state] = BLACK;
                let best = succs.iter().map(|&s| longest_from[s]).max().unwrap_or(0);
                longest_from[state] = 1 + best;
                overall = overall.max(longest_from[state]);
                stack.pop();
            }
        }
    }
    ChainsCheck::Finite { longest: overall }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::Signature;

    fn meta(name: &str, args: Vec<Term>) -> Term {
        Term::meta(MetaName::new(name), args)
    }

    #[test]
    fn plain_terms_have_no_chains() {
        let mut sig = Signature::new();
        let f = sig.declare("f", 1).unwrap();
        let t = Term::rec("a", Term::fun(f, vec![Term::recref(0)]));
        assert_eq!(check_meta_chains(&t), ChainsCheck::Finite { longest: 0 });
    }

    #[test]
    fn nested_metas_count_as_one_chain() {
        let mut sig = Signature::new();
        let f = sig.declare("f", 1).unwrap();
        // Z(f(W(X))): Z alone, then W and X adjacent.
        let t = meta("Z", vec![Term::fun(f, vec![meta("W", vec![meta("X", vec![])])])]);
        assert_eq!(check_meta_chains(&t), ChainsCheck::Finite { longest: 2 });
    }

    #[test]
    fn meta_cycle_is_an_infinite_chain() {
        let t = Term::rec("a", meta("Z", vec![Term::recref(0)]));
        assert_eq!(
            check_meta_chains(&t),
            ChainsCheck::Infinite { cycle: vec![MetaName::new("Z")] }
        );
        assert!(!satisfies_finite_chains(&t));
    }

    #[test]
    fn guarded_meta_cycle_is_fine() {
        let mut sig = Signature::new();
        let f = sig.declare("f", 1).unwrap();
        // mu a. Z(f(a)): every second link is a function symbol.
        let t = Term::rec("a", meta("Z", vec![Term::fun(f, vec![Term::recref(0)])]));
        t.validate(&sig).unwrap();
        assert_eq!(check_meta_chains(&t), ChainsCheck::Finite { longest: 1 });
    }

    #[test]
    fn two_meta_cycle_reports_both() {
        // mu a. Z(W(a))
        let t = Term::rec("a", meta("Z", vec![meta("W", vec![Term::recref(0)])]));
        match check_meta_chains(&t) {
            ChainsCheck::Infinite { cycle } => {
                assert_eq!(cycle.len(), 2);
                assert!(cycle.contains(&MetaName::new("Z")));
                assert!(cycle.contains(&MetaName::new("W")));
            }
            other => panic!("expected infinite chain, got {other:?}"),
        }
    }
}
