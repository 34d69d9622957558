//! Reachable-state graph of a term's folded syntax.
//!
//! Vertices are resolver states: a syntax node together with the chain of
//! enclosing fixed-point binders its back-references may consult. For a
//! validated term the graph is finite, and it is exact in the following
//! sense: every node of the unfolded tree corresponds to a vertex, and the
//! subtree structure below a tree node (symbols, node kinds, child shape) is
//! fully determined by its vertex. Only binder instances vary between
//! visits, so structural analyses that do not depend on binder identity can
//! run on this graph instead of the infinite tree.

use std::collections::HashMap;

use crate::term::{Term, TermNode};

pub(crate) struct SyntaxGraph {
    pub states: Vec<SyntaxState>,
    pub root: usize,
}

pub(crate) struct SyntaxState {
    /// The resolved node; never `Rec` or `RecRef`.
    pub node: Term,
    /// Pairs of child position index (0 for an abstraction body, 1-based
    /// for arguments) and target state.
    pub children: Vec<(usize, usize)>,
}

type Key = (*const TermNode, Vec<*const TermNode>);

fn resolve(mut node: Term, recs: &mut Vec<Term>) -> Term {
    loop {
        let next = match node.node() {
            TermNode::Rec(_, body) => {
                recs.push(node.clone());
                body.clone()
            }
            TermNode::RecRef(k) => {
                let idx = recs.len().checked_sub(k + 1).expect("validated term");
                recs.truncate(idx + 1);
                match recs[idx].node() {
                    TermNode::Rec(_, body) => body.clone(),
                    _ => unreachable!("rec chain holds Rec nodes only"),
                }
            }
            _ => return node,
        };
        node = next;
    }
}

fn key_of(node: &Term, recs: &[Term]) -> Key {
    (
        node.node() as *const TermNode,
        recs.iter().map(|r| r.node() as *const TermNode).collect(),
    )
}

pub(crate) fn build_graph(t: &Term) -> SyntaxGraph {
    let mut states: Vec<SyntaxState> = Vec::new();
    let mut rec_chains: Vec<Vec<Term>> = Vec::new();
    let mut index: HashMap<Key, usize> = HashMap::new();

    let intern = |node: Term,
                      mut recs: Vec<Term>,
                      states: &mut Vec<SyntaxState>,
                      rec_chains: &mut Vec<Vec<Term>>,
                      index: &mut HashMap<Key, usize>|
     -> usize {
        let node = resolve(node, &mut recs);
        let key = key_of(&node, &recs);
        if let Some(&i) = index.get(&key) {
            return i;
        }
        let i = states.len();
        states.push(SyntaxState { node, children: Vec::new() });
        rec_chains.push(recs);
        index.insert(key, i);
        i
    };

    let root = intern(t.clone(), Vec::new(), &mut states, &mut rec_chains, &mut index);
    let mut next = root;
    while next < states.len() {
        let i = next;
        next += 1;
        let node = states[i].node.clone();
        let recs = rec_chains[i].clone();
        let kids: Vec<(usize, Term)> = match node.node() {
            TermNode::Abs(_, body) => vec![(0, body.clone())],
            TermNode::Fun(_, args) | TermNode::Meta(_, args) => {
                args.iter().cloned().enumerate().map(|(j, a)| (j + 1, a)).collect()
            }
            _ => Vec::new(),
        };
        for (pos, child) in kids {
            let target =
                intern(child, recs.clone(), &mut states, &mut rec_chains, &mut index);
            states[i].children.push((pos, target));
        }
    }
    SyntaxGraph { states, root }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::Signature;

    #[test]
    fn cycle_folds_to_finitely_many_states() {
        let mut sig = Signature::new();
        let f = sig.declare("f", 1).unwrap();
        let g = sig.declare("g", 2).unwrap();
        // mu p. g(f(p), mu q. g(p, q))
        let t = Term::rec(
            "p",
            Term::fun(
                g,
                vec![
                    Term::fun(f, vec![Term::recref(0)]),
                    Term::rec("q", Term::fun(g, vec![Term::recref(1), Term::recref(0)])),
                ],
            ),
        );
        t.validate(&sig).unwrap();
        let gr = build_graph(&t);
        // Outer g, f, inner g: three distinct states, all edges closed.
        assert_eq!(gr.states.len(), 3);
        for s in &gr.states {
            for &(_, tgt) in &s.children {
                assert!(tgt < gr.states.len());
            }
        }
        // The f state loops back to the outer g state.
        let f_state = gr.states.iter().position(|s| matches!(s.node.node(), TermNode::Fun(sym, _) if *sym == f)).unwrap();
        assert_eq!(gr.states[f_state].children, vec![(1, gr.root)]);
    }
}
