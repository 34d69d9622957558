//! Valuations: assignments of substitutes to meta-variables, and their
//! application to meta-terms.
//!
//! A substitute of arity `n` is an `n`-parameter abstraction over terms. Its
//! body stores parameter references as dangling de Bruijn indices: at a
//! point of the body under `l` abstractions, index `l + d` with `d < n`
//! refers to a parameter, with `d = 0` naming the last parameter and
//! `d = n - 1` the first. This convention lets a body be carried around
//! without any binder nodes of its own, which keeps captured subterms from
//! pattern matching directly usable as substitutes.
//!
//! Applying a valuation replaces every meta-variable application `Z(s1, ...,
//! sn)` by the substitute body with the (recursively rewritten) arguments
//! plugged in for the parameters. The application is total only on meta
//! terms with finite chains of meta-variables; an infinite chain like
//! `Z(Z(Z(...)))` would demand infinitely much substitution before the first
//! output symbol, and is rejected up front.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::chains::{check_meta_chains, ChainsCheck};
use crate::term::{prune_unused_recs, shift_dangling, FreeName, MetaName, Term, TermNode};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Substitute {
    arity: usize,
    body: Term,
}

impl Substitute {
    /// Wraps a body already in the dangling-index convention.
    pub fn new(arity: usize, body: Term) -> Substitute {
        Substitute { arity, body }
    }

    /// A substitute that ignores its (zero) parameters.
    pub fn constant(t: Term) -> Substitute {
        Substitute { arity: 0, body: t }
    }

    /// Builds a substitute from a body whose parameter occurrences are free
    /// variables with the given names, in parameter order.
    pub fn from_named(params: &[&str], body: &Term) -> Substitute {
        let n = params.len();
        fn go(t: &Term, params: &[&str], depth: usize) -> Term {
            match t.node() {
                TermNode::Free(FreeName::Named(name)) => {
                    match params.iter().position(|p| *p == name.as_ref()) {
                        Some(j) => Term::var(depth + params.len() - 1 - j),
                        None => t.clone(),
                    }
                }
                TermNode::Var(_) | TermNode::Free(_) | TermNode::RecRef(_) => t.clone(),
                TermNode::Abs(h, b) => Term::abs(h, go(b, params, depth + 1)),
                TermNode::Rec(h, b) => Term::rec(h, go(b, params, depth)),
                TermNode::Fun(f, args) => {
                    Term::fun(*f, args.iter().map(|a| go(a, params, depth)).collect())
                }
                TermNode::Meta(m, args) => {
                    Term::meta(m.clone(), args.iter().map(|a| go(a, params, depth)).collect())
                }
            }
        }
        Substitute { arity: n, body: go(body, params, 0) }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn body(&self) -> &Term {
        &self.body
    }

    /// The substitute as a closed term with one abstraction per parameter,
    /// outermost binder first. Dangling indices of the body become bound
    /// occurrences of these binders under the same convention, so this is a
    /// faithful rendering for printing and comparison.
    pub fn as_abs_term(&self) -> Term {
        let mut t = self.body.clone();
        for j in (0..self.arity).rev() {
            let hint = format!("z{}", j + 1);
            t = Term::abs(&hint, t);
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValuationError {
    #[error("meta-variable {name} has no substitute in the valuation")]
    UnboundMeta { name: MetaName },
    #[error("meta-variable {name} applied to {got} arguments, substitute takes {want}")]
    ArityMismatch { name: MetaName, want: usize, got: usize },
    #[error("meta-term has an infinite chain of meta-variables ({})", cycle_names(.cycle))]
    InfiniteChains { cycle: Vec<MetaName> },
}

fn cycle_names(cycle: &[MetaName]) -> String {
    cycle.iter().map(|m| m.0.as_ref()).collect::<Vec<_>>().join(", ")
}

/// A finite assignment of substitutes to meta-variable names.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Valuation {
    map: BTreeMap<MetaName, Substitute>,
}

impl Valuation {
    pub fn new() -> Valuation {
        Valuation::default()
    }

    pub fn insert(&mut self, name: MetaName, sub: Substitute) -> Option<Substitute> {
        self.map.insert(name, sub)
    }

    pub fn get(&self, name: &MetaName) -> Option<&Substitute> {
        self.map.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MetaName, &Substitute)> {
        self.map.iter()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Plugs `args` into the parameters of `sub`. Arguments are shifted past the
/// binders (of both kinds) they come to sit under, so references that point
/// out of an argument keep their targets.
pub fn apply_substitute(sub: &Substitute, args: &[Term]) -> Term {
    assert_eq!(args.len(), sub.arity, "substitute arity mismatch");
    fn go(t: &Term, abs_depth: usize, rec_depth: usize, arity: usize, args: &[Term]) -> Term {
        match t.node() {
            TermNode::Var(i) => {
                if *i >= abs_depth && *i - abs_depth < arity {
                    let d = *i - abs_depth;
                    shift_dangling(&args[arity - 1 - d], abs_depth, 0, rec_depth, 0)
                } else {
                    debug_assert!(*i < abs_depth, "index beyond the parameters");
                    t.clone()
                }
            }
            TermNode::Free(_) | TermNode::RecRef(_) => t.clone(),
            TermNode::Abs(h, b) => Term::abs(h, go(b, abs_depth + 1, rec_depth, arity, args)),
            TermNode::Rec(h, b) => Term::rec(h, go(b, abs_depth, rec_depth + 1, arity, args)),
            TermNode::Fun(f, xs) => Term::fun(
                *f,
                xs.iter().map(|a| go(a, abs_depth, rec_depth, arity, args)).collect(),
            ),
            TermNode::Meta(m, xs) => Term::meta(
                m.clone(),
                xs.iter().map(|a| go(a, abs_depth, rec_depth, arity, args)).collect(),
            ),
        }
    }
    if sub.arity == 0 {
        return sub.body.clone();
    }
    go(&sub.body, 0, 0, sub.arity, args)
}

/// Applies a valuation to a meta-term, rewriting innermost arguments first.
/// Rejects meta-terms with infinite meta-variable chains and fixed-point
/// binders orphaned by discarding substitutes are pruned from the result.
pub fn apply_valuation(v: &Valuation, t: &Term) -> Result<Term, ValuationError> {
    if let ChainsCheck::Infinite { cycle } = check_meta_chains(t) {
        return Err(ValuationError::InfiniteChains { cycle });
    }
    fn go(v: &Valuation, t: &Term) -> Result<Term, ValuationError> {
        match t.node() {
            TermNode::Meta(name, args) => {
                let sub = v
                    .get(name)
                    .ok_or_else(|| ValuationError::UnboundMeta { name: name.clone() })?;
                if sub.arity() != args.len() {
                    return Err(ValuationError::ArityMismatch {
                        name: name.clone(),
                        want: sub.arity(),
                        got: args.len(),
                    });
                }
                let args: Vec<Term> =
                    args.iter().map(|a| go(v, a)).collect::<Result<_, _>>()?;
                Ok(apply_substitute(sub, &args))
            }
            TermNode::Var(_) | TermNode::Free(_) | TermNode::RecRef(_) => Ok(t.clone()),
            TermNode::Abs(h, b) => Ok(Term::abs(h, go(v, b)?)),
            TermNode::Rec(h, b) => Ok(Term::rec(h, go(v, b)?)),
            TermNode::Fun(f, args) => Ok(Term::fun(
                *f,
                args.iter().map(|a| go(v, a)).collect::<Result<Vec<_>, _>>()?,
            )),
        }
    }
    Ok(prune_unused_recs(&go(v, t)?))
}

/// Replaces every occurrence of the named free variable by `r`. Bound
/// variables are nameless, so no capture is possible and `r` needs no
/// adjustment (it must be a self-contained term, as all public terms are).
pub fn substitute_named(t: &Term, name: &str, r: &Term) -> Term {
    fn go(t: &Term, name: &str, r: &Term) -> Term {
        match t.node() {
            TermNode::Free(FreeName::Named(n)) if n.as_ref() == name => r.clone(),
            TermNode::Var(_) | TermNode::Free(_) | TermNode::RecRef(_) => t.clone(),
            TermNode::Abs(h, b) => Term::abs(h, go(b, name, r)),
            TermNode::Rec(h, b) => Term::rec(h, go(b, name, r)),
            TermNode::Fun(f, args) => {
                Term::fun(*f, args.iter().map(|a| go(a, name, r)).collect())
            }
            TermNode::Meta(m, args) => {
                Term::meta(m.clone(), args.iter().map(|a| go(a, name, r)).collect())
            }
        }
    }
    go(t, name, r)
}
