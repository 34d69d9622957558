//! Terms and meta-terms.
//!
//! A meta-term is built from variables, abstractions `[x] s`, function
//! applications `f(s1, ..., sn)` and meta-variable applications
//! `Z(s1, ..., sn)`. A term is a meta-term without meta-variable nodes.
//! Both kinds share one node type here; operations that require plain terms
//! check [`Term::is_term`] at their boundary.
//!
//! Infinite terms are restricted to the rational fragment: a term denotes a
//! possibly infinite tree with finitely many distinct subtrees, written down
//! finitely with an explicit fixed-point binder `mu a. s` ([`TermNode::Rec`])
//! whose bound name recurs as a back-reference ([`TermNode::RecRef`]).
//! `mu a. f(a)` is the infinite term `f(f(f(...)))`.
//!
//! Binders are nameless. `Var(i)` counts enclosing [`TermNode::Abs`] nodes
//! only and `RecRef(k)` counts enclosing [`TermNode::Rec`] nodes only; the two
//! index spaces do not interact, which keeps unfolding arithmetic local to
//! one of them. The names stored on binders are display hints and carry no
//! meaning: equality and hashing ignore them.
//!
//! Free variables are explicit [`TermNode::Free`] leaves. A free variable is
//! either user-named, or an instance marker minted by traversal when a bound
//! variable escapes the subterm being extracted. Instance markers compare by
//! identity, never by their display hint; they are how rewrite steps plug
//! results back under the binders of a surrounding context without renaming
//! (the fixed-representative convention for contexts).

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

use crate::signature::{Signature, SymbolId};

/// Name of a meta-variable, e.g. `Z` or `XS`. Compared by spelling.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MetaName(pub Arc<str>);

impl MetaName {
    pub fn new(name: &str) -> Self {
        MetaName(Arc::from(name))
    }
}

impl fmt::Display for MetaName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Identity of a free variable.
#[derive(Debug, Clone)]
pub enum FreeName {
    /// A user-written free variable, compared by name.
    Named(Arc<str>),
    /// A bound-variable instance that escaped the subterm it was extracted
    /// from. Compared by `id`; the hint only affects printing. Ids are minted
    /// by traversal and are stable across traversals of the same term along
    /// the same path.
    Inst { id: u64, hint: Arc<str> },
}

impl FreeName {
    pub fn named(name: &str) -> Self {
        FreeName::Named(Arc::from(name))
    }

    pub fn hint(&self) -> &str {
        match self {
            FreeName::Named(n) => n,
            FreeName::Inst { hint, .. } => hint,
        }
    }
}

impl PartialEq for FreeName {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (FreeName::Named(a), FreeName::Named(b)) => a == b,
            (FreeName::Inst { id: a, .. }, FreeName::Inst { id: b, .. }) => a == b,
            _ => false,
        }
    }
}

impl Eq for FreeName {}

impl Hash for FreeName {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            FreeName::Named(n) => {
                0u8.hash(state);
                n.hash(state);
            }
            FreeName::Inst { id, .. } => {
                1u8.hash(state);
                id.hash(state);
            }
        }
    }
}

/// One node of a (meta-)term. See the module docs for the binder conventions.
#[derive(Debug, Clone)]
pub enum TermNode {
    Var(usize),
    Free(FreeName),
    Abs(Arc<str>, Term),
    Fun(SymbolId, Vec<Term>),
    Meta(MetaName, Vec<Term>),
    Rec(Arc<str>, Term),
    RecRef(usize),
}

/// A shared, immutable (meta-)term. Cloning is cheap and thread-safe.
#[derive(Debug, Clone)]
pub struct Term(Arc<TermNode>);

impl Term {
    pub fn node(&self) -> &TermNode {
        &self.0
    }

    fn ptr(&self) -> *const TermNode {
        Arc::as_ptr(&self.0)
    }

    pub fn var(i: usize) -> Term {
        Term(Arc::new(TermNode::Var(i)))
    }

    pub fn free(name: FreeName) -> Term {
        Term(Arc::new(TermNode::Free(name)))
    }

    pub fn free_named(name: &str) -> Term {
        Term::free(FreeName::named(name))
    }

    pub fn abs(hint: &str, body: Term) -> Term {
        Term(Arc::new(TermNode::Abs(Arc::from(hint), body)))
    }

    pub fn fun(sym: SymbolId, args: Vec<Term>) -> Term {
        Term(Arc::new(TermNode::Fun(sym, args)))
    }

    pub fn constant(sym: SymbolId) -> Term {
        Term::fun(sym, Vec::new())
    }

    pub fn meta(name: MetaName, args: Vec<Term>) -> Term {
        Term(Arc::new(TermNode::Meta(name, args)))
    }

    pub fn rec(hint: &str, body: Term) -> Term {
        Term(Arc::new(TermNode::Rec(Arc::from(hint), body)))
    }

    pub fn recref(k: usize) -> Term {
        Term(Arc::new(TermNode::RecRef(k)))
    }

    /// True if no meta-variable node occurs, i.e. this meta-term is a term.
    pub fn is_term(&self) -> bool {
        match self.node() {
            TermNode::Var(_) | TermNode::Free(_) | TermNode::RecRef(_) => true,
            TermNode::Abs(_, b) | TermNode::Rec(_, b) => b.is_term(),
            TermNode::Fun(_, args) => args.iter().all(Term::is_term),
            TermNode::Meta(..) => false,
        }
    }

    /// True if the syntax contains a `Rec` binder. Absence of `Rec` means the
    /// term is finite.
    pub fn has_rec(&self) -> bool {
        match self.node() {
            TermNode::Var(_) | TermNode::Free(_) => false,
            TermNode::RecRef(_) => true,
            TermNode::Abs(_, b) | TermNode::Rec(_, b) => {
                matches!(self.node(), TermNode::Rec(..)) || b.has_rec()
            }
            TermNode::Fun(_, args) | TermNode::Meta(_, args) => args.iter().any(Term::has_rec),
        }
    }

    /// Collects the user-named free variables.
    pub fn named_frees(&self) -> Vec<Arc<str>> {
        let mut out = Vec::new();
        fn go(t: &Term, out: &mut Vec<Arc<str>>) {
            match t.node() {
                TermNode::Free(FreeName::Named(n)) => {
                    if !out.contains(n) {
                        out.push(n.clone());
                    }
                }
                TermNode::Abs(_, b) | TermNode::Rec(_, b) => go(b, out),
                TermNode::Fun(_, args) | TermNode::Meta(_, args) => {
                    args.iter().for_each(|a| go(a, out))
                }
                _ => {}
            }
        }
        go(self, &mut out);
        out
    }

    /// True if neither named free variables nor instance markers occur.
    pub fn is_closed(&self) -> bool {
        fn go(t: &Term) -> bool {
            match t.node() {
                TermNode::Free(_) => false,
                TermNode::Abs(_, b) | TermNode::Rec(_, b) => go(b),
                TermNode::Fun(_, args) | TermNode::Meta(_, args) => args.iter().all(go),
                _ => true,
            }
        }
        go(self)
    }

    /// Meta-variable names with their arities, or an arity clash.
    pub fn meta_arities(&self) -> Result<std::collections::BTreeMap<MetaName, usize>, TermError> {
        let mut map = std::collections::BTreeMap::new();
        fn go(
            t: &Term,
            map: &mut std::collections::BTreeMap<MetaName, usize>,
        ) -> Result<(), TermError> {
            match t.node() {
                TermNode::Meta(name, args) => {
                    match map.insert(name.clone(), args.len()) {
                        Some(old) if old != args.len() => {
                            return Err(TermError::MetaArityClash {
                                name: name.clone(),
                                first: old,
                                second: args.len(),
                            })
                        }
                        _ => {}
                    }
                    args.iter().try_for_each(|a| go(a, map))
                }
                TermNode::Abs(_, b) | TermNode::Rec(_, b) => go(b, map),
                TermNode::Fun(_, args) => args.iter().try_for_each(|a| go(a, map)),
                _ => Ok(()),
            }
        }
        go(self, &mut map)?;
        Ok(map)
    }
}

// Equality is structural and ignores binder hints. It is not alpha
// equivalence: distinct foldings of the same rational term compare unequal
// here. Use `alpha_eq` for the semantic relation.
impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        if self.ptr() == other.ptr() {
            return true;
        }
        match (self.node(), other.node()) {
            (TermNode::Var(a), TermNode::Var(b)) => a == b,
            (TermNode::Free(a), TermNode::Free(b)) => a == b,
            (TermNode::Abs(_, a), TermNode::Abs(_, b)) => a == b,
            (TermNode::Rec(_, a), TermNode::Rec(_, b)) => a == b,
            (TermNode::RecRef(a), TermNode::RecRef(b)) => a == b,
            (TermNode::Fun(f, a), TermNode::Fun(g, b)) => f == g && a == b,
            (TermNode::Meta(f, a), TermNode::Meta(g, b)) => f == g && a == b,
            _ => false,
        }
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self.node() {
            TermNode::Var(i) => {
                0u8.hash(state);
                i.hash(state);
            }
            TermNode::Free(n) => {
                1u8.hash(state);
                n.hash(state);
            }
            TermNode::Abs(_, b) => {
                2u8.hash(state);
                b.hash(state);
            }
            TermNode::Fun(f, args) => {
                3u8.hash(state);
                f.hash(state);
                args.hash(state);
            }
            TermNode::Meta(m, args) => {
                4u8.hash(state);
                m.hash(state);
                args.hash(state);
            }
            TermNode::Rec(_, b) => {
                5u8.hash(state);
                b.hash(state);
            }
            TermNode::RecRef(k) => {
                6u8.hash(state);
                k.hash(state);
            }
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum TermError {
    #[error("bound variable index {index} exceeds the {depth} enclosing abstractions")]
    UnboundVar { index: usize, depth: usize },
    #[error("back-reference level {level} exceeds the {depth} enclosing mu binders")]
    UnboundRecRef { level: usize, depth: usize },
    #[error("mu binder is unguarded: a back-reference is reachable without passing a proper node")]
    Unguarded,
    #[error("symbol {name} applied to {got} arguments, arity is {want}")]
    ArityMismatch { name: String, want: usize, got: usize },
    #[error("unknown symbol id {0:?}")]
    UnknownSymbol(SymbolId),
    #[error("meta-variable {name} used with arities {first} and {second}")]
    MetaArityClash { name: MetaName, first: usize, second: usize },
}

impl Term {
    /// Checks well-formedness against a signature: variable and
    /// back-reference scoping, symbol arities, meta-variable arity
    /// consistency, and guardedness of every `mu` binder.
    ///
    /// Guardedness requires each cycle through a `Rec` binder to pass at
    /// least one Abs, Fun or Meta node, so that the denoted tree is
    /// productive. Meta nodes count as guards: `mu a. Z(a)` denotes the
    /// legitimate (if degenerate) meta-term `Z(Z(Z(...)))`, which later
    /// analyses must be able to name and reject on their own grounds.
    pub fn validate(&self, sig: &Signature) -> Result<(), TermError> {
        self.meta_arities()?;
        // unguarded[j] is true while the j-th enclosing Rec binder has not
        // yet been separated from the current node by a proper node.
        fn go(
            t: &Term,
            sig: &Signature,
            abs_depth: usize,
            unguarded: &mut Vec<bool>,
        ) -> Result<(), TermError> {
            match t.node() {
                TermNode::Var(i) => {
                    if *i >= abs_depth {
                        return Err(TermError::UnboundVar { index: *i, depth: abs_depth });
                    }
                    Ok(())
                }
                TermNode::Free(_) => Ok(()),
                TermNode::RecRef(k) => {
                    if *k >= unguarded.len() {
                        return Err(TermError::UnboundRecRef {
                            level: *k,
                            depth: unguarded.len(),
                        });
                    }
                    if unguarded[unguarded.len() - 1 - k] {
                        return Err(TermError::Unguarded);
                    }
                    Ok(())
                }
                TermNode::Abs(_, b) => {
                    let saved = unguarded.clone();
                    unguarded.iter_mut().for_each(|g| *g = false);
                    let r = go(b, sig, abs_depth + 1, unguarded);
                    *unguarded = saved;
                    r
                }
                TermNode::Rec(_, b) => {
                    unguarded.push(true);
                    let r = go(b, sig, abs_depth, unguarded);
                    unguarded.pop();
                    r
                }
                TermNode::Fun(f, args) => {
                    if !sig.contains(*f) {
                        return Err(TermError::UnknownSymbol(*f));
                    }
                    if sig.arity(*f) != args.len() {
                        return Err(TermError::ArityMismatch {
                            name: sig.name(*f).to_string(),
                            want: sig.arity(*f),
                            got: args.len(),
                        });
                    }
                    let saved = unguarded.clone();
                    unguarded.iter_mut().for_each(|g| *g = false);
                    for a in args {
                        let mut inner = unguarded.clone();
                        go(a, sig, abs_depth, &mut inner)?;
                    }
                    *unguarded = saved;
                    Ok(())
                }
                TermNode::Meta(_, args) => {
                    let saved = unguarded.clone();
                    unguarded.iter_mut().for_each(|g| *g = false);
                    for a in args {
                        let mut inner = unguarded.clone();
                        go(a, sig, abs_depth, &mut inner)?;
                    }
                    *unguarded = saved;
                    Ok(())
                }
            }
        }
        go(self, sig, 0, &mut Vec::new())
    }
}

/// Shifts bound-variable indices that point outside the term (dangling
/// indices at or above `cutoff`) up by `by`. Back-reference levels are a
/// separate index space and are untouched.
pub(crate) fn shift_free_vars(t: &Term, by: usize, cutoff: usize) -> Term {
    if by == 0 {
        return t.clone();
    }
    match t.node() {
        TermNode::Var(i) => {
            if *i >= cutoff {
                Term::var(i + by)
            } else {
                t.clone()
            }
        }
        TermNode::Free(_) | TermNode::RecRef(_) => t.clone(),
        TermNode::Abs(h, b) => Term::abs(h, shift_free_vars(b, by, cutoff + 1)),
        TermNode::Rec(h, b) => Term::rec(h, shift_free_vars(b, by, cutoff)),
        TermNode::Fun(f, args) => {
            Term::fun(*f, args.iter().map(|a| shift_free_vars(a, by, cutoff)).collect())
        }
        TermNode::Meta(m, args) => {
            Term::meta(m.clone(), args.iter().map(|a| shift_free_vars(a, by, cutoff)).collect())
        }
    }
}

/// Shifts dangling bound-variable indices (at or above `abs_cut`) by
/// `abs_by` and dangling back-reference levels (at or above `rec_cut`) by
/// `rec_by`. Used when a subterm is moved under additional binders of either
/// kind, so that references out of the subterm keep their targets.
pub(crate) fn shift_dangling(
    t: &Term,
    abs_by: usize,
    abs_cut: usize,
    rec_by: usize,
    rec_cut: usize,
) -> Term {
    if abs_by == 0 && rec_by == 0 {
        return t.clone();
    }
    match t.node() {
        TermNode::Var(i) => {
            if *i >= abs_cut {
                Term::var(i + abs_by)
            } else {
                t.clone()
            }
        }
        TermNode::RecRef(k) => {
            if *k >= rec_cut {
                Term::recref(k + rec_by)
            } else {
                t.clone()
            }
        }
        TermNode::Free(_) => t.clone(),
        TermNode::Abs(h, b) => {
            Term::abs(h, shift_dangling(b, abs_by, abs_cut + 1, rec_by, rec_cut))
        }
        TermNode::Rec(h, b) => {
            Term::rec(h, shift_dangling(b, abs_by, abs_cut, rec_by, rec_cut + 1))
        }
        TermNode::Fun(f, args) => Term::fun(
            *f,
            args.iter().map(|a| shift_dangling(a, abs_by, abs_cut, rec_by, rec_cut)).collect(),
        ),
        TermNode::Meta(m, args) => Term::meta(
            m.clone(),
            args.iter().map(|a| shift_dangling(a, abs_by, abs_cut, rec_by, rec_cut)).collect(),
        ),
    }
}

/// One syntactic unfolding of a root `Rec` binder: `mu a. B` becomes
/// `B[a := mu a. B]`. Dangling variable indices of the copied binder are
/// shifted past any abstractions crossed on the way to each back-reference,
/// which keeps them pointing at the binders they pointed at before.
/// Non-`Rec` roots are returned unchanged.
pub fn unfold_root(t: &Term) -> Term {
    let body = match t.node() {
        TermNode::Rec(_, b) => b,
        _ => return t.clone(),
    };
    fn go(s: &Term, level: usize, abs: usize, rec_term: &Term) -> Term {
        match s.node() {
            TermNode::RecRef(k) if *k == level => shift_free_vars(rec_term, abs, 0),
            TermNode::RecRef(_) | TermNode::Var(_) | TermNode::Free(_) => s.clone(),
            TermNode::Abs(h, b) => Term::abs(h, go(b, level, abs + 1, rec_term)),
            TermNode::Rec(h, b) => Term::rec(h, go(b, level + 1, abs, rec_term)),
            TermNode::Fun(f, args) => {
                Term::fun(*f, args.iter().map(|a| go(a, level, abs, rec_term)).collect())
            }
            TermNode::Meta(m, args) => {
                Term::meta(m.clone(), args.iter().map(|a| go(a, level, abs, rec_term)).collect())
            }
        }
    }
    go(body, 0, 0, t)
}

/// Drops `Rec` binders whose bound name is never referenced. Valuation can
/// orphan a binder when a substitute discards the argument holding the only
/// back-reference.
pub(crate) fn prune_unused_recs(t: &Term) -> Term {
    fn uses_level(t: &Term, level: usize) -> bool {
        match t.node() {
            TermNode::RecRef(k) => *k == level,
            TermNode::Var(_) | TermNode::Free(_) => false,
            TermNode::Abs(_, b) => uses_level(b, level),
            TermNode::Rec(_, b) => uses_level(b, level + 1),
            TermNode::Fun(_, args) | TermNode::Meta(_, args) => {
                args.iter().any(|a| uses_level(a, level))
            }
        }
    }
    fn drop_level(t: &Term, level: usize) -> Term {
        match t.node() {
            TermNode::RecRef(k) if *k > level => Term::recref(k - 1),
            TermNode::RecRef(_) | TermNode::Var(_) | TermNode::Free(_) => t.clone(),
            TermNode::Abs(h, b) => Term::abs(h, drop_level(b, level)),
            TermNode::Rec(h, b) => Term::rec(h, drop_level(b, level + 1)),
            TermNode::Fun(f, args) => {
                Term::fun(*f, args.iter().map(|a| drop_level(a, level)).collect())
            }
            TermNode::Meta(m, args) => {
                Term::meta(m.clone(), args.iter().map(|a| drop_level(a, level)).collect())
            }
        }
    }
    match t.node() {
        TermNode::Var(_) | TermNode::Free(_) | TermNode::RecRef(_) => t.clone(),
        TermNode::Abs(h, b) => Term::abs(h, prune_unused_recs(b)),
        TermNode::Fun(f, args) => Term::fun(*f, args.iter().map(prune_unused_recs).collect()),
        TermNode::Meta(m, args) => {
            Term::meta(m.clone(), args.iter().map(prune_unused_recs).collect())
        }
        TermNode::Rec(h, b) => {
            let b = prune_unused_recs(b);
            if uses_level(&b, 0) {
                Term::rec(h, b)
            } else {
                drop_level(&b, 0)
            }
        }
    }
}
