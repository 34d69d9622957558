//! Overlap detection between rule left-hand sides via pattern unification.
//!
//! Left-hand sides are finite patterns: every meta-variable is applied to
//! distinct bound variables. Unification of such meta-terms is decidable and
//! yields a unique most general unifier, computed here by the standard
//! transformation rules. Abstractions are crossed in lockstep, opening the
//! bound variable into a fresh atom on both sides, so the solver only deals
//! with variable-closed meta-terms over atoms.
//!
//! A subterm of a left-hand side keeps the variables bound above the chosen
//! position as free atoms. Those atoms act as constants: the substitutes
//! found by the solver may mention them, because valuations may map
//! meta-variables to open terms. Atoms minted at a synchronized crossing are
//! different: a substitute mentioning one of those would be captured, so
//! they must be reachable through the meta-variable's own parameters.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use crate::cursor::{markers_to_named, reconstruct, Cursor};
use crate::position::Position;
use crate::rules::Rule;
use crate::term::{FreeName, MetaName, Term, TermNode};

/// Witness that one left-hand side overlaps another.
#[derive(Debug, Clone)]
pub struct Overlap {
    /// A non-meta-variable position of the first left-hand side: the subterm
    /// there unifies with the (renamed-apart) second left-hand side.
    pub position: Position,
    /// Most general unifier, restricted to the meta-variables of the two
    /// sides. Bodies are wrapped in one abstraction per parameter; variables
    /// of the first side that are bound above `position` show up as free
    /// variables.
    pub unifier: BTreeMap<MetaName, Term>,
}

/// Searches the non-meta-variable positions of `r1.lhs` in preorder for a
/// subterm that unifies with `r2.lhs`, renaming meta-variables apart first.
/// The root position is skipped when the two rules are copies of the same
/// rule (detected by name). Left-hand sides must be finite patterns; rules
/// that have not passed validation simply yield no overlap.
pub fn find_overlap(r1: &Rule, r2: &Rule) -> Option<Overlap> {
    if r1.lhs.has_rec() || r2.lhs.has_rec() {
        return None;
    }
    let same_rule = r1.name == r2.name;

    let metas1 = meta_names(&r1.lhs);
    let mut universe: HashSet<MetaName> = metas1.clone().into_iter().collect();
    universe.extend(meta_names(&r2.lhs));
    let mut renames: HashMap<MetaName, MetaName> = HashMap::new();
    for m in meta_names(&r2.lhs) {
        if metas1.contains(&m) {
            let mut fresh = format!("{m}'");
            while universe.contains(&MetaName::new(&fresh)) {
                fresh.push('\'');
            }
            let fresh = MetaName::new(&fresh);
            universe.insert(fresh.clone());
            renames.insert(m, fresh);
        }
    }
    let rhs_side = rename_metas(&r2.lhs, &renames);

    for (pos, meta_root) in positions(&r1.lhs) {
        if meta_root || (same_rule && pos.is_root()) {
            continue;
        }
        let cursor = Cursor::at(&r1.lhs, &pos).expect("enumerated position");
        let sub = reconstruct(&cursor, None).expect("marker policy never fails");
        let mut solver = Solver::new(universe.clone(), next_atom_id(&sub));
        if solver.solve(vec![(sub, rhs_side.clone())]) {
            let mut names: Vec<MetaName> = universe.iter().cloned().collect();
            names.sort();
            return Some(Overlap { position: pos, unifier: solver.render(&names) });
        }
    }
    None
}

fn meta_names(t: &Term) -> Vec<MetaName> {
    let mut out = Vec::new();
    fn go(t: &Term, out: &mut Vec<MetaName>) {
        match t.node() {
            TermNode::Meta(n, args) => {
                if !out.contains(n) {
                    out.push(n.clone());
                }
                args.iter().for_each(|a| go(a, out));
            }
            TermNode::Abs(_, b) | TermNode::Rec(_, b) => go(b, out),
            TermNode::Fun(_, args) => args.iter().for_each(|a| go(a, out)),
            _ => {}
        }
    }
    go(t, &mut out);
    out
}

fn rename_metas(t: &Term, map: &HashMap<MetaName, MetaName>) -> Term {
    if map.is_empty() {
        return t.clone();
    }
    match t.node() {
        TermNode::Meta(n, args) => {
            let name = map.get(n).unwrap_or(n).clone();
            Term::meta(name, args.iter().map(|a| rename_metas(a, map)).collect())
        }
        TermNode::Abs(h, b) => Term::abs(h, rename_metas(b, map)),
        TermNode::Rec(h, b) => Term::rec(h, rename_metas(b, map)),
        TermNode::Fun(f, args) => {
            Term::fun(*f, args.iter().map(|a| rename_metas(a, map)).collect())
        }
        _ => t.clone(),
    }
}

/// All positions of a finite meta-term in preorder, flagging those whose
/// subterm is rooted at a meta-variable.
fn positions(t: &Term) -> Vec<(Position, bool)> {
    fn go(t: &Term, cur: &mut Vec<usize>, out: &mut Vec<(Position, bool)>) {
        out.push((Position(cur.clone()), matches!(t.node(), TermNode::Meta(..))));
        match t.node() {
            TermNode::Abs(_, b) => {
                cur.push(0);
                go(b, cur, out);
                cur.pop();
            }
            TermNode::Fun(_, args) | TermNode::Meta(_, args) => {
                for (i, a) in args.iter().enumerate() {
                    cur.push(i + 1);
                    go(a, cur, out);
                    cur.pop();
                }
            }
            _ => {}
        }
    }
    let mut out = Vec::new();
    go(t, &mut Vec::new(), &mut out);
    out
}

fn next_atom_id(t: &Term) -> u64 {
    fn go(t: &Term, max: &mut u64) {
        match t.node() {
            TermNode::Free(FreeName::Inst { id, .. }) => *max = (*max).max(id + 1),
            TermNode::Abs(_, b) | TermNode::Rec(_, b) => go(b, max),
            TermNode::Fun(_, args) | TermNode::Meta(_, args) => {
                args.iter().for_each(|a| go(a, max))
            }
            _ => {}
        }
    }
    let mut max = 0;
    go(t, &mut max);
    max
}

fn atom_id(t: &Term) -> Option<u64> {
    match t.node() {
        TermNode::Free(FreeName::Inst { id, .. }) => Some(*id),
        _ => None,
    }
}

/// Replaces the bound variable of a dropped abstraction by `atom` inside
/// `body`. Inputs are variable-closed, so only the opened index occurs.
fn open_abs(body: &Term, atom: &Term) -> Term {
    fn go(t: &Term, depth: usize, atom: &Term) -> Term {
        match t.node() {
            TermNode::Var(i) if *i == depth => atom.clone(),
            TermNode::Var(_) | TermNode::Free(_) => t.clone(),
            TermNode::Abs(h, b) => Term::abs(h, go(b, depth + 1, atom)),
            TermNode::Fun(f, args) => {
                Term::fun(*f, args.iter().map(|a| go(a, depth, atom)).collect())
            }
            TermNode::Meta(n, args) => {
                Term::meta(n.clone(), args.iter().map(|a| go(a, depth, atom)).collect())
            }
            TermNode::Rec(..) | TermNode::RecRef(_) => unreachable!("patterns are finite"),
        }
    }
    go(body, 0, atom)
}

fn subst_atoms(t: &Term, map: &HashMap<u64, Term>) -> Term {
    match t.node() {
        TermNode::Free(FreeName::Inst { id, .. }) => {
            map.get(id).cloned().unwrap_or_else(|| t.clone())
        }
        TermNode::Abs(h, b) => Term::abs(h, subst_atoms(b, map)),
        TermNode::Fun(f, args) => {
            Term::fun(*f, args.iter().map(|a| subst_atoms(a, map)).collect())
        }
        TermNode::Meta(n, args) => {
            Term::meta(n.clone(), args.iter().map(|a| subst_atoms(a, map)).collect())
        }
        _ => t.clone(),
    }
}

/// A solved meta-variable: the body mentions the parameter atoms, outer
/// atoms acting as constants, and other meta-variables.
struct Binding {
    params: Vec<Term>,
    body: Term,
}

struct Solver {
    bindings: HashMap<MetaName, Binding>,
    /// Atoms minted at synchronized crossings; all others are constants.
    inner: HashSet<u64>,
    next_atom: u64,
    next_meta: u64,
    universe: HashSet<MetaName>,
    minted: Vec<MetaName>,
}

impl Solver {
    fn new(universe: HashSet<MetaName>, next_atom: u64) -> Solver {
        Solver {
            bindings: HashMap::new(),
            inner: HashSet::new(),
            next_atom,
            next_meta: 0,
            universe,
            minted: Vec::new(),
        }
    }

    fn fresh_atom(&mut self, hint: &str) -> Term {
        let id = self.next_atom;
        self.next_atom += 1;
        Term::free(FreeName::Inst { id, hint: Arc::from(hint) })
    }

    fn fresh_meta(&mut self) -> MetaName {
        loop {
            let name = MetaName::new(&format!("#{}", self.next_meta));
            self.next_meta += 1;
            if !self.universe.contains(&name) {
                self.universe.insert(name.clone());
                self.minted.push(name.clone());
                return name;
            }
        }
    }

    /// Expands bound meta-variables at the root.
    fn deref(&self, t: &Term) -> Term {
        let mut t = t.clone();
        while let TermNode::Meta(n, args) = t.node() {
            let Some(binding) = self.bindings.get(n) else { break };
            let map: HashMap<u64, Term> = binding
                .params
                .iter()
                .map(|p| atom_id(p).expect("params are atoms"))
                .zip(args.iter().cloned())
                .collect();
            t = subst_atoms(&binding.body, &map);
        }
        t
    }

    fn occurs(&self, name: &MetaName, t: &Term) -> bool {
        match t.node() {
            TermNode::Meta(n, args) => {
                if n == name {
                    return true;
                }
                if let Some(binding) = self.bindings.get(n) {
                    if self.occurs(name, &binding.body) {
                        return true;
                    }
                }
                args.iter().any(|a| self.occurs(name, a))
            }
            TermNode::Abs(_, b) => self.occurs(name, b),
            TermNode::Fun(_, args) => args.iter().any(|a| self.occurs(name, a)),
            _ => false,
        }
    }

    fn solve(&mut self, mut eqs: Vec<(Term, Term)>) -> bool {
        while let Some((a, b)) = eqs.pop() {
            let a = self.deref(&a);
            let b = self.deref(&b);
            match (a.node(), b.node()) {
                (TermNode::Meta(n1, as1), TermNode::Meta(n2, as2)) => {
                    if !self.flex_flex(n1, as1, n2, as2) {
                        return false;
                    }
                }
                (TermNode::Meta(n, args), _) => {
                    if !self.flex_rigid(n, args, &b) {
                        return false;
                    }
                }
                (_, TermNode::Meta(n, args)) => {
                    if !self.flex_rigid(n, args, &a) {
                        return false;
                    }
                }
                (TermNode::Abs(h, b1), TermNode::Abs(_, b2)) => {
                    let atom = self.fresh_atom(h);
                    self.inner.insert(atom_id(&atom).unwrap());
                    eqs.push((open_abs(b1, &atom), open_abs(b2, &atom)));
                }
                (TermNode::Fun(f, as1), TermNode::Fun(g, as2)) => {
                    if f != g || as1.len() != as2.len() {
                        return false;
                    }
                    eqs.extend(as1.iter().cloned().zip(as2.iter().cloned()));
                }
                (TermNode::Free(x), TermNode::Free(y)) => {
                    if x != y {
                        return false;
                    }
                }
                _ => return false,
            }
        }
        true
    }

    /// Binds `name` to the rigid term, abstracting its parameter atoms.
    /// Inner atoms of the body that are not parameters cannot appear in any
    /// substitute, so meta-variables mentioning them are pruned and literal
    /// occurrences fail the unification.
    fn flex_rigid(&mut self, name: &MetaName, args: &[Term], rigid: &Term) -> bool {
        if self.occurs(name, rigid) {
            return false;
        }
        let params: HashSet<u64> = args.iter().map(|a| atom_id(a).expect("flex args")).collect();
        debug_assert_eq!(params.len(), args.len(), "pattern arguments are distinct");
        let Some(body) = self.abstract_body(rigid, &params, 0) else { return false };
        self.bindings.insert(name.clone(), Binding { params: args.to_vec(), body });
        true
    }

    fn abstract_body(&mut self, t: &Term, params: &HashSet<u64>, depth: usize) -> Option<Term> {
        match t.node() {
            TermNode::Free(FreeName::Inst { id, .. }) => {
                if self.inner.contains(id) && !params.contains(id) {
                    None
                } else {
                    Some(t.clone())
                }
            }
            TermNode::Free(FreeName::Named(_)) => Some(t.clone()),
            TermNode::Var(i) => {
                debug_assert!(*i < depth, "equation terms are variable-closed");
                Some(t.clone())
            }
            TermNode::Abs(h, b) => Some(Term::abs(h, self.abstract_body(b, params, depth + 1)?)),
            TermNode::Fun(f, fargs) => {
                let mut out = Vec::with_capacity(fargs.len());
                for a in fargs {
                    out.push(self.abstract_body(a, params, depth)?);
                }
                Some(Term::fun(*f, out))
            }
            TermNode::Meta(n, margs) => {
                if self.bindings.contains_key(n) {
                    let expanded = self.deref(t);
                    return self.abstract_body(&expanded, params, depth);
                }
                // Keep arguments that remain visible: bound variables of the
                // body, constants, and the parameters themselves.
                let keep: Vec<bool> = margs
                    .iter()
                    .map(|a| match atom_id(a) {
                        Some(id) => !self.inner.contains(&id) || params.contains(&id),
                        None => true,
                    })
                    .collect();
                if keep.iter().all(|&k| k) {
                    let mut out = Vec::with_capacity(margs.len());
                    for a in margs {
                        out.push(self.abstract_body(a, params, depth)?);
                    }
                    return Some(Term::meta(n.clone(), out));
                }
                // Prune the hidden arguments behind a fresh meta-variable.
                let fresh = self.fresh_meta();
                let ps: Vec<Term> =
                    (0..margs.len()).map(|_| self.fresh_atom("p")).collect();
                let kept: Vec<Term> = ps
                    .iter()
                    .zip(&keep)
                    .filter(|(_, &k)| k)
                    .map(|(p, _)| p.clone())
                    .collect();
                let body = Term::meta(fresh.clone(), kept);
                self.bindings.insert(n.clone(), Binding { params: ps, body });
                let expanded = self.deref(t);
                self.abstract_body(&expanded, params, depth)
            }
            TermNode::Rec(..) | TermNode::RecRef(_) => None,
        }
    }

    fn flex_flex(&mut self, n1: &MetaName, as1: &[Term], n2: &MetaName, as2: &[Term]) -> bool {
        let ids1: Vec<u64> = as1.iter().map(|a| atom_id(a).expect("flex args")).collect();
        let ids2: Vec<u64> = as2.iter().map(|a| atom_id(a).expect("flex args")).collect();
        if n1 == n2 {
            if ids1.len() != ids2.len() {
                return false;
            }
            // Keep the argument positions on which both occurrences agree.
            let fresh = self.fresh_meta();
            let ps: Vec<Term> = (0..ids1.len()).map(|_| self.fresh_atom("p")).collect();
            let kept: Vec<Term> = ps
                .iter()
                .enumerate()
                .filter(|(i, _)| ids1[*i] == ids2[*i])
                .map(|(_, p)| p.clone())
                .collect();
            let body = Term::meta(fresh, kept);
            self.bindings.insert(n1.clone(), Binding { params: ps, body });
            return true;
        }
        // Solutions can only depend on the arguments common to both sides.
        let fresh = self.fresh_meta();
        let common: Vec<u64> = ids1.iter().copied().filter(|i| ids2.contains(i)).collect();
        for (name, args, ids) in [(n1, as1, &ids1), (n2, as2, &ids2)] {
            let ps: Vec<Term> = (0..args.len()).map(|_| self.fresh_atom("p")).collect();
            let kept: Vec<Term> = common
                .iter()
                .map(|c| ps[ids.iter().position(|i| i == c).unwrap()].clone())
                .collect();
            let body = Term::meta(fresh.clone(), kept);
            self.bindings.insert(name.clone(), Binding { params: ps, body });
        }
        true
    }

    /// Fully expands a body, leaving only unbound meta-variables.
    fn expand(&self, t: &Term) -> Term {
        match t.node() {
            TermNode::Meta(n, _) if self.bindings.contains_key(n) => self.expand(&self.deref(t)),
            TermNode::Meta(n, args) => {
                Term::meta(n.clone(), args.iter().map(|a| self.expand(a)).collect())
            }
            TermNode::Abs(h, b) => Term::abs(h, self.expand(b)),
            TermNode::Fun(f, args) => {
                Term::fun(*f, args.iter().map(|a| self.expand(a)).collect())
            }
            _ => t.clone(),
        }
    }

    /// Renders the unifier for the given meta-variables: parameters become
    /// abstractions, leftover markers become readable free variables and
    /// minted meta-variables get presentable names.
    fn render(&self, metas: &[MetaName]) -> BTreeMap<MetaName, Term> {
        // Presentable names for the meta-variables minted while solving.
        let mut display: HashMap<MetaName, MetaName> = HashMap::new();
        for minted in &self.minted {
            let mut candidate = "U".to_string();
            loop {
                let name = MetaName::new(&candidate);
                if !self.universe.contains(&name)
                    && !display.values().any(|d| *d == name)
                {
                    display.insert(minted.clone(), name);
                    break;
                }
                candidate.push('\'');
            }
        }
        let mut out = BTreeMap::new();
        for name in metas {
            let Some(binding) = self.bindings.get(name) else { continue };
            let body = self.expand(&binding.body);
            // Parameter atoms become bound variables under one abstraction
            // per parameter, outermost first.
            let n = binding.params.len();
            let map: HashMap<u64, usize> = binding
                .params
                .iter()
                .enumerate()
                .map(|(j, p)| (atom_id(p).expect("params are atoms"), j))
                .collect();
            fn close(t: &Term, map: &HashMap<u64, usize>, n: usize, depth: usize) -> Term {
                match t.node() {
                    TermNode::Free(FreeName::Inst { id, .. }) if map.contains_key(id) => {
                        Term::var(depth + (n - 1 - map[id]))
                    }
                    TermNode::Abs(h, b) => Term::abs(h, close(b, map, n, depth + 1)),
                    TermNode::Fun(f, args) => {
                        Term::fun(*f, args.iter().map(|a| close(a, map, n, depth)).collect())
                    }
                    TermNode::Meta(m, args) => Term::meta(
                        m.clone(),
                        args.iter().map(|a| close(a, map, n, depth)).collect(),
                    ),
                    _ => t.clone(),
                }
            }
            let mut wrapped = close(&body, &map, n, 0);
            for p in binding.params.iter().rev() {
                let hint = match p.node() {
                    TermNode::Free(f) => f.hint().to_string(),
                    _ => "z".to_string(),
                };
                wrapped = Term::abs(&hint, wrapped);
            }
            let renamed = rename_metas(&wrapped, &display);
            out.insert(name.clone(), markers_to_named(&renamed));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::Signature;

    fn meta(name: &str, args: Vec<Term>) -> Term {
        Term::meta(MetaName::new(name), args)
    }

    fn rule(name: &str, lhs: Term, rhs: Term) -> Rule {
        Rule::new(name, lhs, rhs)
    }

    #[test]
    fn first_order_overlap_is_found() {
        let mut sig = Signature::new();
        let f = sig.declare("f", 1).unwrap();
        let g = sig.declare("g", 1).unwrap();
        let a = sig.declare("a", 0).unwrap();
        // f(g(Z)) -> Z and g(a) -> a overlap at position 1.
        let r1 = rule("outer", Term::fun(f, vec![Term::fun(g, vec![meta("Z", vec![])])]), meta("Z", vec![]));
        let r2 = rule("inner", Term::fun(g, vec![Term::constant(a)]), Term::constant(a));
        let overlap = find_overlap(&r1, &r2).expect("overlap");
        assert_eq!(overlap.position, Position(vec![1]));
        // The unifier instantiates Z with a.
        assert_eq!(overlap.unifier.get(&MetaName::new("Z")), Some(&Term::constant(a)));
        // The relation is symmetric at the root of the second rule.
        let back = find_overlap(&r2, &r1);
        assert!(back.is_none(), "g(a) has no subterm unifying with f(g(Z))");
    }

    #[test]
    fn identical_shapes_overlap_at_the_root_across_rules() {
        let mut sig = Signature::new();
        let k = sig.declare("k", 1).unwrap();
        let r1 = rule("one", Term::fun(k, vec![meta("Z", vec![])]), meta("Z", vec![]));
        let r2 = rule("two", Term::fun(k, vec![meta("W", vec![])]), Term::fun(k, vec![meta("W", vec![])]));
        let overlap = find_overlap(&r1, &r2).expect("root overlap");
        assert!(overlap.position.is_root());
        // Against its own copy the root is excluded and nothing remains.
        assert!(find_overlap(&r1, &r1).is_none());
    }

    #[test]
    fn map_system_has_no_overlaps() {
        let mut sig = Signature::new();
        let map = sig.declare("map", 2).unwrap();
        let cons = sig.declare("cons", 2).unwrap();
        let nil = sig.declare("nil", 0).unwrap();
        let hd = sig.declare("hd", 1).unwrap();
        let tl = sig.declare("tl", 1).unwrap();
        let fz = Term::abs("z", meta("F", vec![Term::var(0)]));
        let rules = vec![
            rule(
                "map-cons",
                Term::fun(map, vec![fz.clone(), Term::fun(cons, vec![meta("X", vec![]), meta("XS", vec![])])]),
                Term::fun(cons, vec![meta("F", vec![meta("X", vec![])]), Term::fun(map, vec![fz.clone(), meta("XS", vec![])])]),
            ),
            rule(
                "map-nil",
                Term::fun(map, vec![fz.clone(), Term::constant(nil)]),
                Term::constant(nil),
            ),
            rule(
                "hd",
                Term::fun(hd, vec![Term::fun(cons, vec![meta("X", vec![]), meta("XS", vec![])])]),
                meta("X", vec![]),
            ),
            rule(
                "tl",
                Term::fun(tl, vec![Term::fun(cons, vec![meta("X", vec![]), meta("XS", vec![])])]),
                meta("XS", vec![]),
            ),
        ];
        for r1 in &rules {
            for r2 in &rules {
                assert!(
                    find_overlap(r1, r2).is_none(),
                    "{} should not overlap {}",
                    r1.name,
                    r2.name
                );
            }
        }
    }

    #[test]
    fn abstraction_bodies_unify_through_binders() {
        let mut sig = Signature::new();
        let g = sig.declare("g", 1).unwrap();
        let h = sig.declare("h", 1).unwrap();
        // g([x] h(Z(x))) overlaps h(W) strictly inside the binder.
        let r1 = rule(
            "outer",
            Term::fun(g, vec![Term::abs("x", Term::fun(h, vec![meta("Z", vec![Term::var(0)])]))]),
            meta("Z", vec![Term::fun(g, vec![Term::abs("x", Term::var(0))])]),
        );
        let r2 = rule("inner", Term::fun(h, vec![meta("W", vec![])]), meta("W", vec![]));
        let overlap = find_overlap(&r1, &r2).expect("overlap under the binder");
        assert_eq!(overlap.position, Position(vec![1, 0]));
    }

    #[test]
    fn bound_variables_do_not_unify_with_function_symbols() {
        let mut sig = Signature::new();
        let g = sig.declare("g", 1).unwrap();
        let h = sig.declare("h", 1).unwrap();
        let a = sig.declare("a", 0).unwrap();
        // g([x] h(x)) against h(a): the bound x cannot become a.
        let r1 = rule(
            "outer",
            Term::fun(g, vec![Term::abs("x", Term::fun(h, vec![Term::var(0)]))]),
            Term::constant(a),
        );
        let r2 = rule("inner", Term::fun(h, vec![Term::constant(a)]), Term::constant(a));
        assert!(find_overlap(&r1, &r2).is_none());
        // Against h(W) the same subterm does unify: W picks up the escaped
        // variable as an open substitute.
        let r3 = rule("flex", Term::fun(h, vec![meta("W", vec![])]), meta("W", vec![]));
        let overlap = find_overlap(&r1, &r3).expect("open substitute");
        assert_eq!(overlap.position, Position(vec![1, 0]));
        let w = overlap.unifier.get(&MetaName::new("W")).expect("W bound");
        assert_eq!(w, &Term::free_named("x"), "W maps to the escaped variable");
    }

    #[test]
    fn repeated_meta_variables_unify_by_agreement() {
        let mut sig = Signature::new();
        let f = sig.declare("f", 2).unwrap();
        let r1 = rule(
            "dup",
            Term::fun(f, vec![meta("Z", vec![]), meta("Z", vec![])]),
            meta("Z", vec![]),
        );
        let r2 = rule(
            "pair",
            Term::fun(f, vec![meta("W", vec![]), meta("V", vec![])]),
            meta("W", vec![]),
        );
        let overlap = find_overlap(&r1, &r2).expect("constant substitutes agree");
        assert!(overlap.position.is_root());
    }

    #[test]
    fn occurs_check_rejects_cyclic_equations() {
        let mut sig = Signature::new();
        let f = sig.declare("f", 2).unwrap();
        let g = sig.declare("g", 1).unwrap();
        // f(Z, Z) against f(W, g(W)) forces W = g(W).
        let r1 = rule(
            "dup",
            Term::fun(f, vec![meta("Z", vec![]), meta("Z", vec![])]),
            meta("Z", vec![]),
        );
        let r2 = rule(
            "grow",
            Term::fun(f, vec![meta("W", vec![]), Term::fun(g, vec![meta("W", vec![])])]),
            meta("W", vec![]),
        );
        assert!(find_overlap(&r1, &r2).is_none());
    }

    #[test]
    fn hidden_arguments_are_pruned() {
        let mut sig = Signature::new();
        let p = sig.declare("p", 1).unwrap();
        let f = sig.declare("f", 2).unwrap();
        let g = sig.declare("g", 1).unwrap();
        // p([x] f(Z, x)) vs p([x] f(g(W(x)), x)): Z cannot see x, so W must
        // drop its argument; the overlap still exists.
        let r1 = rule(
            "blind",
            Term::fun(p, vec![Term::abs("x", Term::fun(f, vec![meta("Z", vec![]), Term::var(0)]))]),
            meta("Z", vec![]),
        );
        let r2 = rule(
            "seeing",
            Term::fun(
                p,
                vec![Term::abs(
                    "x",
                    Term::fun(
                        f,
                        vec![Term::fun(g, vec![meta("W", vec![Term::var(0)])]), Term::var(0)],
                    ),
                )],
            ),
            meta("W", vec![Term::fun(p, vec![Term::abs("x", Term::var(0))])]),
        );
        let overlap = find_overlap(&r1, &r2).expect("prunable overlap");
        assert!(overlap.position.is_root());
        let w = overlap.unifier.get(&MetaName::new("W")).expect("W bound");
        // W discards its parameter: [x] U for some fresh U.
        match w.node() {
            TermNode::Abs(_, b) => assert!(matches!(b.node(), TermNode::Meta(..))),
            other => panic!("expected abstraction, got {other:?}"),
        }
    }

    #[test]
    fn beta_like_rule_has_no_self_overlap() {
        let mut sig = Signature::new();
        let f = sig.declare("f", 2).unwrap();
        let r = rule(
            "apply",
            Term::fun(f, vec![Term::abs("x", meta("Z", vec![Term::var(0)])), meta("Z'", vec![])]),
            meta("Z", vec![meta("Z'", vec![])]),
        );
        assert!(find_overlap(&r, &r).is_none());
    }
}
