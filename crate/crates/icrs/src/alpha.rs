//! Tree-level relations on rational terms: alpha equivalence, the depth
//! ultrametric, truncation, position enumeration and subterm extraction.
//!
//! All functions here work on the unfolded tree, so differently folded
//! representations of the same infinite term are interchangeable. Bound
//! variables are compared through their de Bruijn index in the tree, which
//! makes alpha equivalence a plain bisimulation between cursor states. The
//! bisimulations terminate because a state is determined by the focused
//! syntax nodes plus the order pattern of the visible binder instances, and
//! both components range over finite sets for rational terms.

use std::collections::{HashSet, VecDeque};

use crate::cursor::{markers_to_named, reconstruct, Cursor};
use crate::position::{Distance, Position, PositionError};
use crate::signature::TOP;
use crate::term::{Term, TermNode};

type PairKey = (*const TermNode, *const TermNode, Vec<u16>, Vec<u16>);

/// Memo key for a pair of cursor states. Binder instances enter through the
/// rank pattern of their tree indices, merged across both sides: future
/// comparisons only ever test equality of one tree index from each side, and
/// both sides cross abstractions in lockstep, so the pattern determines every
/// future outcome while keeping the key space finite.
fn pair_key(a: &Cursor, b: &Cursor) -> PairKey {
    let la: Vec<u64> = a.abs_entries().iter().map(|e| a.rel_level(e.birth)).collect();
    let lb: Vec<u64> = b.abs_entries().iter().map(|e| b.rel_level(e.birth)).collect();
    let mut all: Vec<u64> = la.iter().chain(lb.iter()).copied().collect();
    all.sort_unstable();
    all.dedup();
    let rank = |v: &u64| all.binary_search(v).unwrap() as u16;
    (a.node_ptr(), b.node_ptr(), la.iter().map(rank).collect(), lb.iter().map(rank).collect())
}

/// Tree-level de Bruijn index of a variable at the focus; indices that
/// dangle below the cursor root (substitute parameters) are offset past all
/// crossed abstractions so they compare stably.
fn tree_index(c: &Cursor, i: usize) -> u64 {
    match c.var_entry(i) {
        Some(e) => c.rel_level(e.birth),
        None => c.crossed() + (i - c.abs_entries().len()) as u64,
    }
}

fn heads_match(a: &Cursor, b: &Cursor) -> bool {
    match (a.node(), b.node()) {
        (TermNode::Var(i), TermNode::Var(j)) => {
            let da = a.var_entry(*i).is_none();
            let db = b.var_entry(*j).is_none();
            da == db && tree_index(a, *i) == tree_index(b, *j)
        }
        (TermNode::Free(x), TermNode::Free(y)) => x == y,
        (TermNode::Abs(..), TermNode::Abs(..)) => true,
        (TermNode::Fun(f, xs), TermNode::Fun(g, ys)) => f == g && xs.len() == ys.len(),
        (TermNode::Meta(m, xs), TermNode::Meta(n, ys)) => m == n && xs.len() == ys.len(),
        _ => false,
    }
}

/// Alpha equivalence of the unfolded trees.
pub fn alpha_eq(s: &Term, t: &Term) -> bool {
    let mut seen: HashSet<PairKey> = HashSet::new();
    let mut stack = vec![(Cursor::new(s), Cursor::new(t))];
    while let Some((a, b)) = stack.pop() {
        if !heads_match(&a, &b) {
            return false;
        }
        if a.is_leaf() {
            continue;
        }
        if !seen.insert(pair_key(&a, &b)) {
            continue;
        }
        for i in a.child_positions() {
            stack.push((a.child(i).unwrap(), b.child(i).unwrap()));
        }
    }
    true
}

/// Distance in the complete ultrametric: `2^-k` with `k` the least depth at
/// which the unfolded trees differ (up to alpha), `Zero` if they never do.
/// Breadth-first order makes the first mismatch the minimal one; revisited
/// state pairs are pruned, which cannot hide a mismatch because the earlier
/// visit was at most as deep.
pub fn distance(s: &Term, t: &Term) -> Distance {
    let mut seen: HashSet<PairKey> = HashSet::new();
    let mut q = VecDeque::new();
    q.push_back((Cursor::new(s), Cursor::new(t), 0u32));
    while let Some((a, b, d)) = q.pop_front() {
        if !heads_match(&a, &b) {
            return Distance::Exponent(d);
        }
        if a.is_leaf() {
            continue;
        }
        if !seen.insert(pair_key(&a, &b)) {
            continue;
        }
        for i in a.child_positions() {
            q.push_back((a.child(i).unwrap(), b.child(i).unwrap(), d + 1));
        }
    }
    Distance::Zero
}

/// Replaces every subterm at depth exactly `depth` by the filler `⊤`,
/// yielding a finite term that agrees with `t` strictly above that depth.
pub fn truncate(t: &Term, depth: usize) -> Term {
    truncate_with(t, depth, &Term::constant(TOP))
}

pub fn truncate_with(t: &Term, depth: usize, filler: &Term) -> Term {
    fn go(c: &Cursor, remaining: usize, filler: &Term) -> Term {
        if remaining == 0 {
            return filler.clone();
        }
        match c.node() {
            TermNode::Var(i) => Term::var(tree_index(c, *i) as usize),
            TermNode::Free(n) => Term::free(n.clone()),
            TermNode::Abs(hint, _) => {
                Term::abs(hint, go(&c.child(0).unwrap(), remaining - 1, filler))
            }
            TermNode::Fun(f, args) => Term::fun(
                *f,
                (1..=args.len())
                    .map(|i| go(&c.child(i).unwrap(), remaining - 1, filler))
                    .collect(),
            ),
            TermNode::Meta(m, args) => Term::meta(
                m.clone(),
                (1..=args.len())
                    .map(|i| go(&c.child(i).unwrap(), remaining - 1, filler))
                    .collect(),
            ),
            TermNode::Rec(..) | TermNode::RecRef(_) => unreachable!("cursor is resolved"),
        }
    }
    go(&Cursor::new(t), depth, filler)
}

/// All positions of the unfolded tree with depth at most `depth`, in
/// lexicographic order.
pub fn positions_up_to(t: &Term, depth: usize) -> Vec<Position> {
    fn go(c: &Cursor, pos: &mut Vec<usize>, remaining: usize, out: &mut Vec<Position>) {
        out.push(Position(pos.clone()));
        if remaining == 0 {
            return;
        }
        for i in c.child_positions() {
            pos.push(i);
            go(&c.child(i).unwrap(), pos, remaining - 1, out);
            pos.pop();
        }
    }
    let mut out = Vec::new();
    go(&Cursor::new(t), &mut Vec::new(), depth, &mut out);
    out
}

/// The subterm of the unfolded tree at `pos`, extracted as a standalone
/// term. Bound variables whose binders lie above `pos` become free variables
/// named after their binders (primed where needed); cycles through `pos` are
/// re-tied with fresh `mu` binders.
pub fn subterm_at(t: &Term, pos: &Position) -> Result<Term, PositionError> {
    let c = Cursor::at(t, pos)?;
    let r = reconstruct(&c, None).expect("extraction without capture cannot fail");
    Ok(markers_to_named(&r))
}
