//! Rewrite rules and systems of rules.
//!
//! A rule `l -> r` pairs a finite left-hand side pattern, rooted at a
//! function symbol, with a possibly infinite right-hand side. Validation
//! enforces the standard requirements: the left-hand side is a pattern
//! (every meta-variable is applied to distinct bound variables), both sides
//! are closed, every meta-variable of the right-hand side occurs on the
//! left, and the right-hand side has only finite chains of meta-variables.
//!
//! The classification predicates used by the confluence analyses live here
//! as well: left-linearity, collapsing rules, fully-extended patterns and
//! almost non-collapsingness.

use std::cell::OnceCell;
use std::collections::BTreeMap;

use thiserror::Error;

use crate::chains::{check_meta_chains, ChainsCheck};
use crate::position::Position;
use crate::signature::{Signature, RESERVED};
use crate::term::{FreeName, MetaName, Term, TermError, TermNode};
use crate::unify::{find_overlap, Overlap};

#[derive(Debug, Clone)]
pub struct Rule {
    pub name: String,
    pub lhs: Term,
    pub rhs: Term,
}

#[derive(Debug, Clone)]
pub struct RuleSystem {
    pub signature: Signature,
    pub rules: Vec<Rule>,
    analysis: OnceCell<Analysis>,
}

/// Static classifications of a rule system, computed once on first use.
/// Compute them only after `validate` has passed; mutating `rules`
/// afterwards does not refresh the cache.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub left_linear: bool,
    pub fully_extended: bool,
    pub orthogonal: bool,
    pub collapsing_rules: Vec<usize>,
    pub almost_non_collapsing: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("left-hand side is not finite: fixed-point binders cannot occur in patterns")]
    LhsNotFinite,
    #[error("left-hand side must have a function symbol at its root")]
    LhsRootNotFunction,
    #[error("not a pattern: meta-variable {name} at {at} must be applied to distinct bound variables")]
    LhsNotPattern { name: MetaName, at: Position },
    #[error("{side} is not closed: free variable {name}")]
    NotClosed { side: Side, name: String },
    #[error("meta-variable {name} occurs only in the right-hand side")]
    RhsMetaNotInLhs { name: MetaName },
    #[error("right-hand side has an infinite chain of meta-variables")]
    RhsInfiniteChains { cycle: Vec<MetaName> },
    #[error("meta-variable {name} has arity {lhs} on the left but {rhs} on the right")]
    MetaArityClash { name: MetaName, lhs: usize, rhs: usize },
    #[error("{side} uses the reserved symbol {name}")]
    ReservedSymbol { side: Side, name: String },
    #[error("malformed {side}: {source}")]
    Term { side: Side, source: TermError },
    #[error("duplicate rule name {0}")]
    DuplicateName(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Lhs,
    Rhs,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::Lhs => write!(f, "left-hand side"),
            Side::Rhs => write!(f, "right-hand side"),
        }
    }
}

fn first_reserved_symbol(t: &Term) -> Option<&'static str> {
    match t.node() {
        TermNode::Fun(sym, args) => {
            if let Some(&(name, _)) = RESERVED.get(sym.0 as usize) {
                return Some(name);
            }
            args.iter().find_map(first_reserved_symbol)
        }
        TermNode::Abs(_, b) | TermNode::Rec(_, b) => first_reserved_symbol(b),
        TermNode::Meta(_, args) => args.iter().find_map(first_reserved_symbol),
        _ => None,
    }
}

fn first_free(t: &Term) -> Option<String> {
    match t.node() {
        TermNode::Free(FreeName::Named(n)) => Some(n.to_string()),
        TermNode::Free(FreeName::Inst { hint, id }) => Some(format!("{hint}?{id}")),
        TermNode::Abs(_, b) | TermNode::Rec(_, b) => first_free(b),
        TermNode::Fun(_, args) | TermNode::Meta(_, args) => args.iter().find_map(first_free),
        _ => None,
    }
}

/// True if the finite meta-term is a pattern: every meta-variable is applied
/// to pairwise distinct bound variables.
pub fn is_pattern(l: &Term) -> bool {
    !l.has_rec() && pattern_violation(l).is_none()
}

/// Checks that every meta-variable application in the finite meta-term takes
/// distinct bound variables; returns the offending occurrence otherwise.
fn pattern_violation(t: &Term) -> Option<(MetaName, Position)> {
    fn go(t: &Term, pos: &mut Vec<usize>) -> Option<(MetaName, Position)> {
        match t.node() {
            TermNode::Meta(name, args) => {
                let mut seen = Vec::new();
                for a in args {
                    match a.node() {
                        TermNode::Var(i) if !seen.contains(i) => seen.push(*i),
                        _ => return Some((name.clone(), Position(pos.clone()))),
                    }
                }
                for (j, a) in args.iter().enumerate() {
                    pos.push(j + 1);
                    if let Some(w) = go(a, pos) {
                        return Some(w);
                    }
                    pos.pop();
                }
                None
            }
            TermNode::Abs(_, b) => {
                pos.push(0);
                let r = go(b, pos);
                pos.pop();
                r
            }
            TermNode::Fun(_, args) => {
                for (j, a) in args.iter().enumerate() {
                    pos.push(j + 1);
                    if let Some(w) = go(a, pos) {
                        return Some(w);
                    }
                    pos.pop();
                }
                None
            }
            _ => None,
        }
    }
    go(t, &mut Vec::new())
}

impl Rule {
    pub fn new(name: &str, lhs: Term, rhs: Term) -> Rule {
        Rule { name: name.to_string(), lhs, rhs }
    }

    pub fn validate(&self, sig: &Signature) -> Result<(), RuleError> {
        match self.validate_report(sig).into_iter().next() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    /// Checks every well-formedness condition and reports all failures, each
    /// with its witness. An empty report means the rule is valid.
    pub fn validate_report(&self, sig: &Signature) -> Vec<RuleError> {
        let mut out = Vec::new();
        if self.lhs.has_rec() {
            out.push(RuleError::LhsNotFinite);
        }
        if !matches!(self.lhs.node(), TermNode::Fun(..)) {
            out.push(RuleError::LhsRootNotFunction);
        }
        let mut sides_ok = true;
        for (side, t) in [(Side::Lhs, &self.lhs), (Side::Rhs, &self.rhs)] {
            if let Err(source) = t.validate(sig) {
                sides_ok = false;
                out.push(RuleError::Term { side, source });
            }
            if let Some(name) = first_reserved_symbol(t) {
                out.push(RuleError::ReservedSymbol { side, name: name.to_string() });
            }
            if let Some(name) = first_free(t) {
                out.push(RuleError::NotClosed { side, name });
            }
        }
        if !self.lhs.has_rec() {
            if let Some((name, at)) = pattern_violation(&self.lhs) {
                out.push(RuleError::LhsNotPattern { name, at });
            }
        }
        if sides_ok {
            let lhs_metas = self.lhs.meta_arities().expect("side validated");
            let rhs_metas = self.rhs.meta_arities().expect("side validated");
            for (name, arity) in &rhs_metas {
                match lhs_metas.get(name) {
                    None => out.push(RuleError::RhsMetaNotInLhs { name: name.clone() }),
                    Some(a) if a != arity => out.push(RuleError::MetaArityClash {
                        name: name.clone(),
                        lhs: *a,
                        rhs: *arity,
                    }),
                    _ => {}
                }
            }
            if let ChainsCheck::Infinite { cycle } = check_meta_chains(&self.rhs) {
                out.push(RuleError::RhsInfiniteChains { cycle });
            }
        }
        out
    }

    /// Meta-variable names of the left-hand side with arities.
    pub fn lhs_metas(&self) -> BTreeMap<MetaName, usize> {
        self.lhs.meta_arities().expect("validated rule")
    }

    /// Meta-variables occurring more than once in the left-hand side.
    pub fn nonlinear_metas(&self) -> Vec<MetaName> {
        fn count(t: &Term, name_counts: &mut BTreeMap<MetaName, usize>) {
            match t.node() {
                TermNode::Meta(name, args) => {
                    *name_counts.entry(name.clone()).or_insert(0) += 1;
                    args.iter().for_each(|a| count(a, name_counts));
                }
                TermNode::Abs(_, b) | TermNode::Rec(_, b) => count(b, name_counts),
                TermNode::Fun(_, args) => args.iter().for_each(|a| count(a, name_counts)),
                _ => {}
            }
        }
        let mut counts = BTreeMap::new();
        count(&self.lhs, &mut counts);
        counts.into_iter().filter(|&(_, c)| c > 1).map(|(n, _)| n).collect()
    }

    pub fn is_left_linear(&self) -> bool {
        self.nonlinear_metas().is_empty()
    }

    pub fn is_collapsing(&self) -> bool {
        matches!(self.rhs.node(), TermNode::Meta(..))
    }

    /// Meta-variable occurrences of the pattern that miss some variable
    /// bound above them.
    pub fn fully_extended_witnesses(&self) -> Vec<(MetaName, Position)> {
        fn go(t: &Term, depth: usize, pos: &mut Vec<usize>, out: &mut Vec<(MetaName, Position)>) {
            match t.node() {
                TermNode::Meta(name, args) => {
                    let mut present = vec![false; depth];
                    for a in args {
                        if let TermNode::Var(i) = a.node() {
                            if *i < depth {
                                present[*i] = true;
                            }
                        }
                    }
                    if !present.into_iter().all(|p| p) {
                        out.push((name.clone(), Position(pos.clone())));
                    }
                }
                TermNode::Abs(_, b) => {
                    pos.push(0);
                    go(b, depth + 1, pos, out);
                    pos.pop();
                }
                TermNode::Fun(_, args) => {
                    for (i, a) in args.iter().enumerate() {
                        pos.push(i + 1);
                        go(a, depth, pos, out);
                        pos.pop();
                    }
                }
                _ => {}
            }
        }
        let mut out = Vec::new();
        go(&self.lhs, 0, &mut Vec::new(), &mut out);
        out
    }

    /// True if every meta-variable occurrence of the pattern is applied to
    /// all variables bound above it.
    pub fn is_fully_extended(&self) -> bool {
        self.fully_extended_witnesses().is_empty()
    }
}

impl RuleSystem {
    pub fn new(signature: Signature, rules: Vec<Rule>) -> RuleSystem {
        RuleSystem { signature, rules, analysis: OnceCell::new() }
    }

    pub fn validate(&self) -> Result<(), RuleError> {
        let mut names = std::collections::HashSet::new();
        for rule in &self.rules {
            if !names.insert(rule.name.as_str()) {
                return Err(RuleError::DuplicateName(rule.name.clone()));
            }
            rule.validate(&self.signature)?;
        }
        Ok(())
    }

    pub fn rule(&self, index: usize) -> &Rule {
        &self.rules[index]
    }

    /// The cached classification flags. Call on validated systems only.
    pub fn analysis(&self) -> &Analysis {
        self.analysis.get_or_init(|| Analysis {
            left_linear: self.is_left_linear(),
            fully_extended: self.is_fully_extended(),
            orthogonal: self.is_left_linear() && self.overlap_witnesses().is_empty(),
            collapsing_rules: self.collapsing_rules(),
            almost_non_collapsing: self.is_almost_non_collapsing(),
        })
    }

    pub fn is_left_linear(&self) -> bool {
        self.rules.iter().all(Rule::is_left_linear)
    }

    pub fn is_fully_extended(&self) -> bool {
        self.rules.iter().all(Rule::is_fully_extended)
    }

    /// Rules whose left-hand side repeats a meta-variable.
    pub fn nonlinear_witnesses(&self) -> Vec<(usize, MetaName)> {
        let mut out = Vec::new();
        for (i, rule) in self.rules.iter().enumerate() {
            out.extend(rule.nonlinear_metas().into_iter().map(|n| (i, n)));
        }
        out
    }

    /// Meta-variable occurrences violating fully-extendedness, per rule.
    pub fn fully_extended_witnesses(&self) -> Vec<(usize, MetaName, Position)> {
        let mut out = Vec::new();
        for (i, rule) in self.rules.iter().enumerate() {
            out.extend(rule.fully_extended_witnesses().into_iter().map(|(n, p)| (i, n, p)));
        }
        out
    }

    /// The first overlap of each ordered pair of rules, a rule against its
    /// own copy included (root overlaps of a rule with itself do not count).
    pub fn overlap_witnesses(&self) -> Vec<(usize, usize, Overlap)> {
        let mut out = Vec::new();
        for (i, r1) in self.rules.iter().enumerate() {
            for (j, r2) in self.rules.iter().enumerate() {
                if let Some(overlap) = find_overlap(r1, r2) {
                    out.push((i, j, overlap));
                }
            }
        }
        out
    }

    /// Left-linear and without overlaps.
    pub fn is_orthogonal(&self) -> bool {
        self.analysis().orthogonal
    }

    pub fn collapsing_rules(&self) -> Vec<usize> {
        (0..self.rules.len()).filter(|&i| self.rules[i].is_collapsing()).collect()
    }

    /// At most one collapsing rule, whose root meta-variable is the only
    /// meta-variable of its left-hand side.
    pub fn is_almost_non_collapsing(&self) -> bool {
        let collapsing = self.collapsing_rules();
        match collapsing.as_slice() {
            [] => true,
            [i] => {
                let rule = &self.rules[*i];
                let root = match rule.rhs.node() {
                    TermNode::Meta(name, _) => name.clone(),
                    _ => unreachable!("collapsing rule"),
                };
                let metas = rule.lhs_metas();
                metas.len() == 1 && metas.contains_key(&root)
            }
            _ => false,
        }
    }

    pub fn render_rule(&self, index: usize) -> String {
        let r = &self.rules[index];
        format!(
            "{}: {} -> {}",
            r.name,
            r.lhs.display(&self.signature),
            r.rhs.display(&self.signature)
        )
    }
}
