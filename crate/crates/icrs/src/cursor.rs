//! A movable focus into the unfolded tree of a rational (meta-)term.
//!
//! The cursor realises the view of a term as its possibly infinite unfolded
//! tree. Moving to a child resolves `Rec` binders and back-references on the
//! fly, so client code only ever sees variable, free, abstraction, function
//! and meta-variable nodes. Termination of that resolution is exactly what
//! [`Term::validate`](crate::term::Term::validate) guarantees with its
//! guardedness check; cursors require validated terms.
//!
//! The cursor tracks every abstraction crossed since its creation. Each
//! crossing mints an [`AbsEntry`] with a fresh `birth` number; the entry
//! stack always mirrors the chain of abstractions that bind at the current
//! node (crossings that a back-reference jump unwinds are dropped from the
//! stack, since the new instance of the binder body cannot see them). For a
//! bound variable the quantity `crossed - birth - 1` of its entry is its
//! de Bruijn index in the unfolded tree, which is the coordinate all
//! tree-level operations work with.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::position::{Position, PositionError};
use crate::term::{prune_unused_recs, FreeName, Term, TermNode};

/// One abstraction crossed by a cursor, identified by the value of the
/// crossing counter at the time (`birth`). The hint is carried for
/// reconstruction output only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct AbsEntry {
    pub birth: u64,
    pub hint: Arc<str>,
}

#[derive(Debug, Clone)]
struct RecEntry {
    rec: Term,
    abs_len: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct Cursor {
    node: Term,
    abs: Vec<AbsEntry>,
    recs: Vec<RecEntry>,
    crossed: u64,
}

impl Cursor {
    pub fn new(root: &Term) -> Cursor {
        let mut c = Cursor { node: root.clone(), abs: Vec::new(), recs: Vec::new(), crossed: 0 };
        c.resolve();
        c
    }

    /// Positions the cursor at `pos` in the unfolded tree of `root`.
    pub fn at(root: &Term, pos: &Position) -> Result<Cursor, PositionError> {
        let mut c = Cursor::new(root);
        for (step, &i) in pos.0.iter().enumerate() {
            if !c.descend(i) {
                return Err(PositionError { position: pos.clone(), valid_steps: step });
            }
        }
        Ok(c)
    }

    /// Chases `Rec` introductions and back-reference jumps until the focus is
    /// a proper node. A jump to a binder discards the abstractions crossed
    /// between that binder and the reference: the fresh copy of its body can
    /// only see the binders that enclosed the `Rec` itself.
    fn resolve(&mut self) {
        loop {
            let next = match self.node.node() {
                TermNode::Rec(_, body) => {
                    self.recs.push(RecEntry { rec: self.node.clone(), abs_len: self.abs.len() });
                    body.clone()
                }
                TermNode::RecRef(k) => {
                    let idx = self
                        .recs
                        .len()
                        .checked_sub(k + 1)
                        .expect("back-reference out of scope; validate the term first");
                    self.abs.truncate(self.recs[idx].abs_len);
                    self.recs.truncate(idx + 1);
                    match self.recs[idx].rec.node() {
                        TermNode::Rec(_, body) => body.clone(),
                        _ => unreachable!("rec stack holds Rec nodes only"),
                    }
                }
                _ => return,
            };
            self.node = next;
        }
    }

    /// The focused node. Never `Rec` or `RecRef`.
    pub fn node(&self) -> &TermNode {
        self.node.node()
    }

    pub fn node_ptr(&self) -> *const TermNode {
        self.node.node() as *const TermNode
    }

    pub fn crossed(&self) -> u64 {
        self.crossed
    }

    pub fn abs_entries(&self) -> &[AbsEntry] {
        &self.abs
    }

    /// The entry binding `Var(index)` at the focus, if in scope.
    pub fn var_entry(&self, index: usize) -> Option<&AbsEntry> {
        self.abs.len().checked_sub(index + 1).map(|p| &self.abs[p])
    }

    /// De Bruijn index in the unfolded tree of a variable bound by the entry
    /// with the given birth.
    pub fn rel_level(&self, birth: u64) -> u64 {
        self.crossed - birth - 1
    }

    /// Child position indices valid at the focus: `[0]` for an abstraction
    /// body, `[1..=n]` for application arguments, empty at leaves.
    pub fn child_positions(&self) -> Vec<usize> {
        match self.node() {
            TermNode::Abs(..) => vec![0],
            TermNode::Fun(_, args) | TermNode::Meta(_, args) => (1..=args.len()).collect(),
            _ => Vec::new(),
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.child_positions().is_empty()
    }

    /// Moves to child `i`, returning false (cursor unchanged) if no such
    /// child exists.
    pub fn descend(&mut self, i: usize) -> bool {
        let next = match self.node.node() {
            TermNode::Abs(hint, body) if i == 0 => {
                self.abs.push(AbsEntry { birth: self.crossed, hint: hint.clone() });
                self.crossed += 1;
                body.clone()
            }
            TermNode::Fun(_, args) | TermNode::Meta(_, args) if (1..=args.len()).contains(&i) => {
                args[i - 1].clone()
            }
            _ => return false,
        };
        self.node = next;
        self.resolve();
        true
    }

    pub fn child(&self, i: usize) -> Option<Cursor> {
        let mut c = self.clone();
        if c.descend(i) {
            Some(c)
        } else {
            None
        }
    }
}

/// Parameter mapping for extracting a substitute body during matching.
pub(crate) struct CaptureParams {
    /// Births of the binder instances that are the meta-variable's argument
    /// variables, mapped to parameter positions `0..arity`.
    pub by_birth: HashMap<u64, usize>,
    pub arity: usize,
    /// Crossing count at the root of the pattern match. Escaping instances
    /// born at or after it are pattern-local binders; they must be parameters
    /// or the capture fails. Older instances belong to the surrounding
    /// context and become instance markers.
    pub root_birth: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub(crate) enum CaptureError {
    #[error("captured subterm uses bound variable {hint} which is not an argument of the meta-variable")]
    NotAParameter { hint: Arc<str> },
}

/// Extracts the unfolded tree under `start` as a standalone term.
///
/// Cycles are re-tied: when a path revisits a focus state it already passed
/// through (same node, same visible binder instances), a fresh fixed-point
/// binder is introduced at the earlier visit and a back-reference emitted at
/// the later one. Every validated rational term admits such a revisit on
/// each infinite path, so the extraction terminates.
///
/// Bound variables whose binder lies inside the extracted region keep their
/// tree-level index. Variables whose binder lies outside are mapped by
/// `capture`: with `None`, each becomes an instance marker carrying its
/// binder's birth, to be re-bound or renamed by the caller; with
/// `Some(params)`, parameter instances become dangling indices addressing
/// substitute parameters (innermost dangling index 0 is the last parameter)
/// and context instances become markers as before.
pub(crate) fn reconstruct(
    start: &Cursor,
    capture: Option<&CaptureParams>,
) -> Result<Term, CaptureError> {
    struct Reb<'a> {
        start_crossed: u64,
        capture: Option<&'a CaptureParams>,
        on_path: HashMap<(*const TermNode, Vec<u64>), usize>,
    }

    impl Reb<'_> {
        fn escaped(&self, entry: &AbsEntry, cur: &Cursor) -> Result<Term, CaptureError> {
            let marker = || {
                Term::free(FreeName::Inst { id: entry.birth, hint: entry.hint.clone() })
            };
            match self.capture {
                None => Ok(marker()),
                Some(cp) => {
                    if let Some(&j) = cp.by_birth.get(&entry.birth) {
                        let local = (cur.crossed() - self.start_crossed) as usize;
                        Ok(Term::var(local + (cp.arity - 1 - j)))
                    } else if entry.birth < cp.root_birth {
                        Ok(marker())
                    } else {
                        Err(CaptureError::NotAParameter { hint: entry.hint.clone() })
                    }
                }
            }
        }

        fn go(&mut self, cur: &Cursor, depth: usize) -> Result<Term, CaptureError> {
            match cur.node() {
                TermNode::Var(i) => {
                    let entry = cur.var_entry(*i).expect("validated term");
                    if entry.birth >= self.start_crossed {
                        Ok(Term::var(cur.rel_level(entry.birth) as usize))
                    } else {
                        self.escaped(&entry.clone(), cur)
                    }
                }
                TermNode::Free(name) => Ok(Term::free(name.clone())),
                TermNode::Fun(..) | TermNode::Meta(..) | TermNode::Abs(..) => {
                    let key =
                        (cur.node_ptr(), cur.abs_entries().iter().map(|e| e.birth).collect());
                    if let Some(&target_depth) = self.on_path.get(&key) {
                        return Ok(Term::recref(depth - 1 - target_depth));
                    }
                    let shadowed = self.on_path.insert(key.clone(), depth);
                    let built = match cur.node() {
                        TermNode::Abs(hint, _) => {
                            let body =
                                self.go(&cur.child(0).expect("abs body"), depth + 1)?;
                            Term::abs(hint, body)
                        }
                        TermNode::Fun(f, args) => {
                            let mut out = Vec::with_capacity(args.len());
                            for i in 1..=args.len() {
                                out.push(self.go(&cur.child(i).expect("arg"), depth + 1)?);
                            }
                            Term::fun(*f, out)
                        }
                        TermNode::Meta(m, args) => {
                            let mut out = Vec::with_capacity(args.len());
                            for i in 1..=args.len() {
                                out.push(self.go(&cur.child(i).expect("arg"), depth + 1)?);
                            }
                            Term::meta(m.clone(), out)
                        }
                        _ => unreachable!(),
                    };
                    match shadowed {
                        Some(d) => {
                            self.on_path.insert(key, d);
                        }
                        None => {
                            self.on_path.remove(&key);
                        }
                    }
                    // Wrap unconditionally; unused binders are pruned below.
                    // Emitted back-reference levels assume one binder per
                    // enclosing node on the path, which this establishes.
                    Ok(Term::rec("r", built))
                }
                TermNode::Rec(..) | TermNode::RecRef(_) => unreachable!("cursor is resolved"),
            }
        }
    }

    let mut reb =
        Reb { start_crossed: start.crossed(), capture, on_path: HashMap::new() };
    let out = reb.go(start, 0)?;
    Ok(prune_unused_recs(&out))
}

/// Renames instance markers to plain named free variables, deterministically
/// by birth order, priming hints as needed to avoid clashes with existing
/// names. Used when handing an extracted subterm to the outside world.
pub(crate) fn markers_to_named(t: &Term) -> Term {
    use std::collections::{BTreeMap, HashSet};
    let mut taken: HashSet<Arc<str>> = t.named_frees().into_iter().collect();
    let mut markers: BTreeMap<u64, Arc<str>> = BTreeMap::new();
    fn collect(t: &Term, markers: &mut BTreeMap<u64, Arc<str>>) {
        match t.node() {
            TermNode::Free(FreeName::Inst { id, hint }) => {
                markers.entry(*id).or_insert_with(|| hint.clone());
            }
            TermNode::Abs(_, b) | TermNode::Rec(_, b) => collect(b, markers),
            TermNode::Fun(_, args) | TermNode::Meta(_, args) => {
                args.iter().for_each(|a| collect(a, markers))
            }
            _ => {}
        }
    }
    collect(t, &mut markers);
    if markers.is_empty() {
        return t.clone();
    }
    let mut assigned: HashMap<u64, Arc<str>> = HashMap::new();
    for (id, hint) in &markers {
        let mut name: Arc<str> = hint.clone();
        while taken.contains(&name) {
            name = Arc::from(format!("{}'", name));
        }
        taken.insert(name.clone());
        assigned.insert(*id, name);
    }
    fn rewrite(t: &Term, assigned: &HashMap<u64, Arc<str>>) -> Term {
        match t.node() {
            TermNode::Free(FreeName::Inst { id, .. }) => {
                Term::free(FreeName::Named(assigned[id].clone()))
            }
            TermNode::Abs(h, b) => Term::abs(h, rewrite(b, assigned)),
            TermNode::Rec(h, b) => Term::rec(h, rewrite(b, assigned)),
            TermNode::Fun(f, args) => {
                Term::fun(*f, args.iter().map(|a| rewrite(a, assigned)).collect())
            }
            TermNode::Meta(m, args) => {
                Term::meta(m.clone(), args.iter().map(|a| rewrite(a, assigned)).collect())
            }
            _ => t.clone(),
        }
    }
    rewrite(t, &assigned)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::Signature;

    fn sig2() -> (Signature, crate::signature::SymbolId, crate::signature::SymbolId) {
        let mut s = Signature::new();
        let f = s.declare("f", 1).unwrap();
        let g = s.declare("g", 2).unwrap();
        (s, f, g)
    }

    #[test]
    fn cursor_unrolls_a_cycle() {
        let (sig, f, _) = sig2();
        let t = Term::rec("a", Term::fun(f, vec![Term::recref(0)]));
        t.validate(&sig).unwrap();
        let mut c = Cursor::new(&t);
        for _ in 0..50 {
            assert!(matches!(c.node(), TermNode::Fun(sym, _) if *sym == f));
            assert!(c.descend(1));
        }
    }

    #[test]
    fn jump_discards_crossed_binders() {
        let (sig, _, g) = sig2();
        // [y] mu p. g(y, [x] p): the tree is [y] g(y, [x] g(y, [x] ...)).
        // Every occurrence of y must keep resolving to the same outer binder.
        let t = Term::abs(
            "y",
            Term::rec("p", Term::fun(g, vec![Term::var(0), Term::abs("x", Term::recref(0))])),
        );
        t.validate(&sig).unwrap();
        let mut c = Cursor::new(&t);
        assert!(c.descend(0));
        let y_birth = c.abs_entries()[0].birth;
        // Walk g -> arg2 -> abs body -> (jump) g -> arg1 = y, twice around.
        for round in 0..2 {
            assert!(c.descend(2), "round {round}");
            assert!(c.descend(0), "round {round}");
            let mut probe = c.clone();
            assert!(probe.descend(1));
            match probe.node() {
                TermNode::Var(i) => {
                    let e = probe.var_entry(*i).unwrap();
                    assert_eq!(e.birth, y_birth);
                    // Tree index grows by one per crossed [x].
                    assert_eq!(probe.rel_level(e.birth), 1 + round as u64);
                }
                n => panic!("expected variable, got {n:?}"),
            }
        }
    }

    #[test]
    fn reconstruct_reties_the_cycle() {
        let (sig, f, _) = sig2();
        let t = Term::rec("a", Term::fun(f, vec![Term::recref(0)]));
        t.validate(&sig).unwrap();
        // From one step inside the cycle, the subtree is the whole term again.
        let c = Cursor::at(&t, &vec![1].into()).unwrap();
        let r = reconstruct(&c, None).unwrap();
        assert_eq!(r, Term::rec("r", Term::fun(f, vec![Term::recref(0)])));
    }

    #[test]
    fn reconstruct_escaping_variable_becomes_marker() {
        let (sig, _, g) = sig2();
        // [y] mu p. g(y, [x] p), extract at 0 1 0 (under [y], then inside).
        let t = Term::abs(
            "y",
            Term::rec("p", Term::fun(g, vec![Term::var(0), Term::abs("x", Term::recref(0))])),
        );
        t.validate(&sig).unwrap();
        let c = Cursor::at(&t, &vec![0, 2, 0].into()).unwrap();
        let r = reconstruct(&c, None).unwrap();
        let named = markers_to_named(&r);
        // g(y, [x] g(y, [x] ...)) with y free, folded back into one mu.
        let expect = Term::rec(
            "r",
            Term::fun(g, vec![Term::free_named("y"), Term::abs("x", Term::recref(0))]),
        );
        assert_eq!(named, expect);
    }

    #[test]
    fn reconstruct_finite_subterm_is_plain() {
        let (sig, f, g) = sig2();
        let t = Term::fun(g, vec![Term::fun(f, vec![Term::free_named("x")]), Term::free_named("y")]);
        t.validate(&sig).unwrap();
        let c = Cursor::at(&t, &vec![1].into()).unwrap();
        let r = reconstruct(&c, None).unwrap();
        assert_eq!(r, Term::fun(f, vec![Term::free_named("x")]));
    }

    #[test]
    fn marker_renaming_avoids_existing_names() {
        let t = Term::fun(
            crate::signature::SymbolId(3),
            vec![
                Term::free(FreeName::Inst { id: 0, hint: Arc::from("x") }),
                Term::free(FreeName::Inst { id: 1, hint: Arc::from("x") }),
                Term::free_named("x"),
            ],
        );
        let named = markers_to_named(&t);
        match named.node() {
            TermNode::Fun(_, args) => {
                assert_eq!(args[0], Term::free_named("x'"));
                assert_eq!(args[1], Term::free_named("x''"));
                assert_eq!(args[2], Term::free_named("x"));
            }
            _ => unreachable!(),
        }
    }
}
