//! Matching rule left-hand sides against term positions and enumerating
//! redexes.
//!
//! Matching walks the finite pattern and the term in lockstep, unfolding
//! fixed-point binders lazily; a match never unfolds deeper than the pattern
//! height. Meta-variables capture the subterm below them as a substitute:
//! pattern binders listed as arguments become substitute parameters, other
//! pattern binders must not escape (a failed capture is a failed match), and
//! binders belonging to the surrounding context are kept as instance markers
//! per the fixed-representative convention. Since patterns apply every
//! meta-variable to distinct bound variables, the resulting valuation is
//! unique up to alpha equivalence.

use std::collections::HashMap;

use crate::alpha::alpha_eq;
use crate::cursor::{reconstruct, CaptureParams, Cursor};
use crate::position::Position;
use crate::rules::{Rule, RuleSystem};
use crate::term::{Term, TermNode};
use crate::valuation::{Substitute, Valuation};

/// A rule instance found in a term.
#[derive(Debug, Clone)]
pub struct Redex {
    pub position: Position,
    pub rule_index: usize,
    pub valuation: Valuation,
}

impl Redex {
    /// The depth of the redex is the length of its position.
    pub fn depth(&self) -> usize {
        self.position.depth()
    }
}

/// The positions a rule occupies in any of its redexes, relative to the
/// redex root: every position of the left-hand side not at or below a
/// meta-variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RedexPatternFootprint {
    pub positions: Vec<Position>,
}

impl RedexPatternFootprint {
    pub fn contains(&self, relative: &Position) -> bool {
        self.positions.contains(relative)
    }
}

pub fn footprint(rule: &Rule) -> RedexPatternFootprint {
    fn go(t: &Term, cur: &mut Vec<usize>, out: &mut Vec<Position>) {
        if matches!(t.node(), TermNode::Meta(..)) {
            return;
        }
        out.push(Position(cur.clone()));
        match t.node() {
            TermNode::Abs(_, b) => {
                cur.push(0);
                go(b, cur, out);
                cur.pop();
            }
            TermNode::Fun(_, args) => {
                for (i, a) in args.iter().enumerate() {
                    cur.push(i + 1);
                    go(a, cur, out);
                    cur.pop();
                }
            }
            _ => {}
        }
    }
    let mut positions = Vec::new();
    go(&rule.lhs, &mut Vec::new(), &mut positions);
    RedexPatternFootprint { positions }
}

/// Matches `rule.lhs` against the subterm of `s` at `p`, returning the
/// unique valuation if the position is a redex of the rule.
pub fn match_at(rule: &Rule, s: &Term, p: &Position) -> Option<Valuation> {
    let cursor = Cursor::at(s, p).ok()?;
    match_cursor(rule, &cursor)
}

fn match_cursor(rule: &Rule, cursor: &Cursor) -> Option<Valuation> {
    let mut valuation = Valuation::new();
    let root_birth = cursor.crossed();
    if walk(&rule.lhs, cursor, &mut Vec::new(), root_birth, &mut valuation) {
        Some(valuation)
    } else {
        None
    }
}

/// Synchronized descent. `binders` holds the births of the term binders
/// matched against the pattern binders, in crossing order.
fn walk(
    lhs: &Term,
    cursor: &Cursor,
    binders: &mut Vec<u64>,
    root_birth: u64,
    out: &mut Valuation,
) -> bool {
    match lhs.node() {
        TermNode::Fun(f, args) => match cursor.node() {
            TermNode::Fun(g, sargs) if f == g && args.len() == sargs.len() => {
                args.iter().enumerate().all(|(i, a)| {
                    let child = cursor.child(i + 1).expect("argument checked");
                    walk(a, &child, binders, root_birth, out)
                })
            }
            _ => false,
        },
        TermNode::Abs(_, body) => match cursor.node() {
            TermNode::Abs(..) => {
                // The birth the crossing mints is the parent's counter; it
                // cannot be read back off the child's stack because a
                // back-reference jump directly under the binder drops the
                // entry again.
                let birth = cursor.crossed();
                let child = cursor.child(0).expect("abstraction body");
                binders.push(birth);
                let ok = walk(body, &child, binders, root_birth, out);
                binders.pop();
                ok
            }
            _ => false,
        },
        TermNode::Var(i) => match cursor.node() {
            TermNode::Var(j) => {
                let pattern_birth = binders.len().checked_sub(i + 1).map(|k| binders[k]);
                let term_birth = cursor.var_entry(*j).map(|e| e.birth);
                pattern_birth.is_some() && pattern_birth == term_birth
            }
            _ => false,
        },
        TermNode::Meta(name, args) => {
            let mut by_birth = HashMap::new();
            for (k, a) in args.iter().enumerate() {
                let TermNode::Var(i) = a.node() else { return false };
                let Some(pos) = binders.len().checked_sub(i + 1) else { return false };
                by_birth.insert(binders[pos], k);
            }
            let params = CaptureParams { by_birth, arity: args.len(), root_birth };
            let Ok(body) = reconstruct(cursor, Some(&params)) else { return false };
            let sub = Substitute::new(args.len(), body);
            match out.get(name) {
                Some(prev) => {
                    prev.arity() == sub.arity() && alpha_eq(prev.body(), sub.body())
                }
                None => {
                    out.insert(name.clone(), sub);
                    true
                }
            }
        },
        // Left-hand sides are finite and closed; anything else cannot match.
        TermNode::Free(_) | TermNode::Rec(..) | TermNode::RecRef(_) => false,
    }
}

/// Enumerates every redex at depth at most `depth_bound`, in leftmost-
/// outermost order: positions lexicographically, rules by index at equal
/// positions. The enumeration is deterministic.
pub fn find_redexes(s: &Term, sys: &RuleSystem, depth_bound: usize) -> Vec<Redex> {
    fn dfs(
        cursor: &Cursor,
        pos: &mut Vec<usize>,
        bound: usize,
        sys: &RuleSystem,
        out: &mut Vec<Redex>,
    ) {
        for (rule_index, rule) in sys.rules.iter().enumerate() {
            if let Some(valuation) = match_cursor(rule, cursor) {
                out.push(Redex { position: Position(pos.clone()), rule_index, valuation });
            }
        }
        if pos.len() == bound {
            return;
        }
        for i in cursor.child_positions() {
            let child = cursor.child(i).expect("enumerated child");
            pos.push(i);
            dfs(&child, pos, bound, sys, out);
            pos.pop();
        }
    }
    let mut out = Vec::new();
    dfs(&Cursor::new(s), &mut Vec::new(), depth_bound, sys, &mut out);
    out
}
