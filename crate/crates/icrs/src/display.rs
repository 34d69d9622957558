//! Printing terms in the concrete syntax.
//!
//! Binder hints are freshened with primes so that the output is free of
//! shadowing and of clashes with free variables, symbol names and the `mu`
//! keyword. Printing a public term and parsing the result yields an alpha
//! equivalent term. Instance markers print as `hint?id`, which deliberately
//! does not reparse: markers are internal and a marker in printed output
//! should be loud.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::signature::Signature;
use crate::term::{FreeName, Term, TermNode};

pub struct TermDisplay<'a> {
    term: &'a Term,
    sig: &'a Signature,
}

impl Term {
    pub fn display<'a>(&'a self, sig: &'a Signature) -> TermDisplay<'a> {
        TermDisplay { term: self, sig }
    }
}

struct Printer<'a> {
    sig: &'a Signature,
    taken: HashSet<Arc<str>>,
    vars: Vec<Arc<str>>,
    recs: Vec<Arc<str>>,
}

impl Printer<'_> {
    fn fresh(&self, hint: &Arc<str>) -> Arc<str> {
        let mut name: Arc<str> =
            if hint.is_empty() { Arc::from("x") } else { hint.clone() };
        loop {
            let clash = self.taken.contains(&name)
                || self.vars.contains(&name)
                || self.recs.contains(&name);
            if !clash {
                return name;
            }
            name = Arc::from(format!("{}'", name));
        }
    }

    fn go(&mut self, t: &Term, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match t.node() {
            TermNode::Var(i) => match self.vars.len().checked_sub(i + 1) {
                Some(p) => write!(f, "{}", self.vars[p]),
                // Dangling index of a substitute body; internal-only output.
                None => write!(f, "^{}", i - self.vars.len()),
            },
            TermNode::Free(FreeName::Named(n)) => write!(f, "{}", n),
            TermNode::Free(FreeName::Inst { id, hint }) => write!(f, "{}?{}", hint, id),
            TermNode::Abs(hint, body) => {
                let name = self.fresh(hint);
                write!(f, "[{}] ", name)?;
                self.vars.push(name);
                let r = self.go(body, f);
                self.vars.pop();
                r
            }
            TermNode::Rec(hint, body) => {
                let name = self.fresh(hint);
                write!(f, "mu {}. ", name)?;
                self.recs.push(name);
                let r = self.go(body, f);
                self.recs.pop();
                r
            }
            TermNode::RecRef(k) => match self.recs.len().checked_sub(k + 1) {
                Some(p) => write!(f, "{}", self.recs[p]),
                None => write!(f, "^mu{}", k - self.recs.len()),
            },
            TermNode::Fun(sym, args) => {
                let name =
                    if self.sig.contains(*sym) { self.sig.name(*sym) } else { "?sym" };
                write!(f, "{}", name)?;
                self.args(args, f)
            }
            TermNode::Meta(m, args) => {
                write!(f, "{}", m)?;
                self.args(args, f)
            }
        }
    }

    fn args(&mut self, args: &[Term], f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if args.is_empty() {
            return Ok(());
        }
        write!(f, "(")?;
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            self.go(a, f)?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut taken: HashSet<Arc<str>> = HashSet::new();
        taken.insert(Arc::from("mu"));
        for name in self.term.named_frees() {
            taken.insert(name);
        }
        for id in self.sig.user_symbols() {
            taken.insert(Arc::from(self.sig.name(id)));
        }
        if let Ok(metas) = self.term.meta_arities() {
            for name in metas.keys() {
                taken.insert(name.0.clone());
            }
        }
        let mut p = Printer { sig: self.sig, taken, vars: Vec::new(), recs: Vec::new() };
        p.go(self.term, f)
    }
}
