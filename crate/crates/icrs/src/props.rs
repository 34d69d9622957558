//! Normal-form properties over bounded reduction graphs.
//!
//! Three classical properties are checked for a rule system on the graph
//! reachable from a set of seed terms:
//!
//! * NF: every term convertible with a normal form reduces to it.
//! * UN: convertible normal forms are equal.
//! * UN→: no term reduces to two distinct normal forms.
//!
//! NF implies UN implies UN→, and the implications are strict; the checker
//! reports each verdict separately with a concrete counterexample on
//! failure. Verdicts are relative to the explored graph: when a budget cap
//! cuts the exploration short the report is flagged as bounded.

use crate::hc::{Explorer, SearchBudget};
use crate::rewrite::is_normal_form;
use crate::rules::RuleSystem;
use crate::term::Term;

/// Outcome of one property check. A failing verdict carries the terms that
/// witness the violation, in the order described on [`check_nf_properties`].
#[derive(Debug, Clone)]
pub enum PropertyVerdict {
    Holds,
    Fails { witness: Vec<Term> },
}

impl PropertyVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, PropertyVerdict::Holds)
    }
}

/// Report of the three normal-form properties over one explored graph.
#[derive(Debug, Clone)]
pub struct NfReport {
    pub nf: PropertyVerdict,
    pub un: PropertyVerdict,
    pub un_arrow: PropertyVerdict,
    /// True when a budget cap cut the exploration short, in which case the
    /// verdicts only speak about the explored part of the graph.
    pub bounded: bool,
    pub state_count: usize,
}

/// Explores the reduction graph from `seeds` within `budget` and checks the
/// normal-form properties on it. Witnesses: NF fails with `[s, t]` where
/// `s` is convertible with the normal form `t` but does not reduce to it;
/// UN fails with `[t, t']`, two distinct convertible normal forms; UN→
/// fails with `[s, t, t']` where `s` reduces to both distinct normal forms.
/// Scanning is deterministic in discovery order, so the first witness in
/// that order is reported.
pub fn check_nf_properties(sys: &RuleSystem, seeds: &[Term], budget: &SearchBudget) -> NfReport {
    let mut ex = Explorer::new(budget);
    for seed in seeds {
        ex.add_root(seed);
    }
    ex.explore(sys);
    let n = ex.states.len();
    let nf_state: Vec<bool> = ex.states.iter().map(|t| is_normal_form(t, sys)).collect();
    // A state that is not a normal form but shows no outgoing edges has all
    // its redexes beyond the depth cap, so the graph is under-explored.
    let bounded = !ex.complete
        || (0..n).any(|i| ex.edges[i].is_empty() && !nf_state[i]);

    // Forward reachability, reflexive-transitive.
    let mut reach: Vec<Vec<bool>> = vec![vec![false; n]; n];
    for (start, row) in reach.iter_mut().enumerate() {
        let mut queue = vec![start];
        row[start] = true;
        while let Some(u) = queue.pop() {
            for (v, _) in &ex.edges[u] {
                if !row[*v] {
                    row[*v] = true;
                    queue.push(*v);
                }
            }
        }
    }

    // Convertibility: connected components of the undirected graph.
    let mut component = vec![usize::MAX; n];
    let mut undirected: Vec<Vec<usize>> = vec![Vec::new(); n];
    for u in 0..n {
        for (v, _) in &ex.edges[u] {
            undirected[u].push(*v);
            undirected[*v].push(u);
        }
    }
    for start in 0..n {
        if component[start] != usize::MAX {
            continue;
        }
        let mut queue = vec![start];
        component[start] = start;
        while let Some(u) = queue.pop() {
            for &v in &undirected[u] {
                if component[v] == usize::MAX {
                    component[v] = start;
                    queue.push(v);
                }
            }
        }
    }

    let mut nf = PropertyVerdict::Holds;
    'nf: for t in 0..n {
        if !nf_state[t] {
            continue;
        }
        for s in 0..n {
            if component[s] == component[t] && !reach[s][t] {
                nf = PropertyVerdict::Fails {
                    witness: vec![ex.states[s].clone(), ex.states[t].clone()],
                };
                break 'nf;
            }
        }
    }

    let mut un = PropertyVerdict::Holds;
    'un: for t in 0..n {
        if !nf_state[t] {
            continue;
        }
        for u in t + 1..n {
            if nf_state[u] && component[t] == component[u] {
                un = PropertyVerdict::Fails {
                    witness: vec![ex.states[t].clone(), ex.states[u].clone()],
                };
                break 'un;
            }
        }
    }

    let mut un_arrow = PropertyVerdict::Holds;
    'un_arrow: for s in 0..n {
        let mut first: Option<usize> = None;
        for t in 0..n {
            if !nf_state[t] || !reach[s][t] {
                continue;
            }
            match first {
                None => first = Some(t),
                Some(prev) => {
                    un_arrow = PropertyVerdict::Fails {
                        witness: vec![
                            ex.states[s].clone(),
                            ex.states[prev].clone(),
                            ex.states[t].clone(),
                        ],
                    };
                    break 'un_arrow;
                }
            }
        }
    }

    NfReport { nf, un, un_arrow, bounded, state_count: n }
}
