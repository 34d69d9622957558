//! Hypercollapsing-subterm analysis.
//!
//! A term is hypercollapsing when every reduct of it can be reduced further
//! to a term with a collapsing redex at the root; such terms admit no stable
//! root and behave as "meaningless" for infinitary confluence. Deciding the
//! property is impossible in general, so everything here is a bounded
//! semi-decision over the reduction graph of rational terms:
//!
//! * [`detect_hypercollapsing`] searches for a lasso, a finite reduction into
//!   a cycle that passes through a root-collapsing step. Such a cycle unrolls
//!   into an infinite reduction with infinitely many root-collapsing steps,
//!   which certifies the property, so a `Hypercollapsing` verdict is exact
//!   and carries a replayable [`Lasso`] witness. The negative verdicts are
//!   honest about their scope: `NotWithinBounds` means the bounded graph was
//!   exhausted without finding a witness, `Unknown` means a budget cap cut
//!   the search short.
//! * [`hc_normalize`] replaces maximal hypercollapsing subterms with the
//!   reserved bottom symbol, and [`hc_equiv`] compares terms modulo that
//!   replacement, three-valued.
//! * [`classify_out_step`] checks whether a step avoids hypercollapsing
//!   subterms, and [`strip_restricted`] / [`join_modulo`] provide the
//!   bounded projection and joinability searches built on top.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::hash::{Hash, Hasher};

use crate::alpha::{alpha_eq, positions_up_to, subterm_at, truncate};
use crate::cursor::{markers_to_named, Cursor};
use crate::matching::{find_redexes, Redex};
use crate::position::Position;
use crate::rewrite::{apply_step, splice, tile, Reduction, RewriteError, Step, TilingStatus};
use crate::rules::RuleSystem;
use crate::signature::BOTTOM;
use crate::term::{Term, TermNode};

/// Caps for the bounded searches. Every search below respects all three:
/// `max_steps` bounds the number of rewrite steps applied, `max_depth`
/// bounds the redex depth considered in each state, and `max_states` bounds
/// the number of distinct states (up to alpha-equivalence) kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_steps: usize,
    pub max_depth: usize,
    pub max_states: usize,
}

impl SearchBudget {
    /// Builds a budget, clamping each cap to at least one.
    pub fn new(max_steps: usize, max_depth: usize, max_states: usize) -> SearchBudget {
        SearchBudget {
            max_steps: max_steps.max(1),
            max_depth: max_depth.max(1),
            max_states: max_states.max(1),
        }
    }
}

impl Default for SearchBudget {
    fn default() -> SearchBudget {
        SearchBudget { max_steps: 512, max_depth: 12, max_states: 256 }
    }
}

/// Result of a bounded three-valued check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThreeValued {
    Yes,
    No,
    Unknown,
}

/// Which subterm occurrences count when looking for hypercollapsing
/// subterms around a position.
///
/// The notion "the redex occurs inside a hypercollapsing subterm of s" can
/// be read with or without the whole term as one of its own subterms. The
/// readings only differ at the root: under `ProperSubterms` a root step of a
/// hypercollapsing term still counts as an outside step and the whole term
/// is never replaced by bottom, under `WholeTerm` it is. `ProperSubterms`
/// is the default; it keeps distinct root-active terms observably distinct.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HcScope {
    #[default]
    ProperSubterms,
    WholeTerm,
}

/// A reduction into a cycle that contains at least one root-collapsing
/// step. `stem` leads from the inspected term to the cycle entry; `cycle`
/// leads from the entry back to an alpha-equivalent term. Unrolling the
/// cycle forever yields a reduction with infinitely many root-collapsing
/// steps, so the witness certifies hypercollapsingness.
#[derive(Debug, Clone)]
pub struct Lasso {
    pub stem: Reduction,
    pub cycle: Reduction,
}

/// Verdict of the bounded hypercollapsing search.
#[derive(Debug, Clone)]
pub enum HcVerdict {
    /// A lasso witness was found; the verdict is exact.
    Hypercollapsing(Lasso),
    /// The reachable graph was exhausted within the budget without finding
    /// a root-collapsing cycle.
    NotWithinBounds,
    /// A budget cap interrupted the search before it was exhaustive.
    Unknown,
}

impl HcVerdict {
    pub fn is_hypercollapsing(&self) -> bool {
        matches!(self, HcVerdict::Hypercollapsing(_))
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, HcVerdict::Unknown)
    }
}

const FINGERPRINT_DEPTH: usize = 6;

/// Bounded exploration of the reduction graph, with states identified up to
/// alpha-equivalence. Shared by the hypercollapsing search, the joinability
/// search and the normal-form property checks.
pub(crate) struct Explorer {
    pub(crate) states: Vec<Term>,
    pub(crate) edges: Vec<Vec<(usize, Step)>>,
    parent: Vec<Option<(usize, usize)>>,
    expanded: Vec<bool>,
    buckets: HashMap<u64, Vec<usize>>,
    pub(crate) complete: bool,
    steps_used: usize,
    budget: SearchBudget,
}

fn fingerprint(t: &Term) -> u64 {
    let mut h = DefaultHasher::new();
    truncate(t, FINGERPRINT_DEPTH).hash(&mut h);
    h.finish()
}

impl Explorer {
    pub(crate) fn new(budget: &SearchBudget) -> Explorer {
        Explorer {
            states: Vec::new(),
            edges: Vec::new(),
            parent: Vec::new(),
            expanded: Vec::new(),
            buckets: HashMap::new(),
            complete: true,
            steps_used: 0,
            budget: *budget,
        }
    }

    /// Interns a term as a state, returning its index, or `None` when the
    /// state cap prevents adding a new one.
    fn intern(&mut self, t: Term) -> Option<(usize, bool)> {
        let fp = fingerprint(&t);
        if let Some(bucket) = self.buckets.get(&fp) {
            for &i in bucket {
                if alpha_eq(&self.states[i], &t) {
                    return Some((i, false));
                }
            }
        }
        if self.states.len() >= self.budget.max_states {
            self.complete = false;
            return None;
        }
        let i = self.states.len();
        self.states.push(t);
        self.edges.push(Vec::new());
        self.parent.push(None);
        self.expanded.push(false);
        self.buckets.entry(fp).or_default().push(i);
        Some((i, true))
    }

    pub(crate) fn add_root(&mut self, t: &Term) -> usize {
        self.intern(markers_to_named(t)).expect("the state cap is at least one").0
    }

    /// Expands one state: applies every redex up to the depth cap and
    /// records the resulting edges, new targets ordered by `rank` (stable).
    /// Returns false when the step cap interrupted the expansion.
    pub(crate) fn expand_ordered(
        &mut self,
        i: usize,
        sys: &RuleSystem,
        rank: &mut dyn FnMut(&Step) -> usize,
    ) -> bool {
        if self.expanded[i] {
            return true;
        }
        let term = self.states[i].clone();
        let mut steps = Vec::new();
        for redex in find_redexes(&term, sys, self.budget.max_depth) {
            if self.steps_used >= self.budget.max_steps {
                self.complete = false;
                return false;
            }
            self.steps_used += 1;
            let step = apply_step(&term, &redex, sys).expect("enumerated redexes apply");
            steps.push(step);
        }
        steps.sort_by_key(|s| rank(s));
        for step in steps {
            let Some((j, created)) = self.intern(step.target.clone()) else {
                continue;
            };
            let edge = self.edges[i].len();
            self.edges[i].push((j, step));
            if created {
                self.parent[j] = Some((i, edge));
            }
        }
        self.expanded[i] = true;
        true
    }

    /// Breadth-first exploration until the graph closes or a cap bites.
    pub(crate) fn explore(&mut self, sys: &RuleSystem) {
        let mut next = 0;
        while next < self.states.len() {
            if !self.expand_ordered(next, sys, &mut |_| 0) {
                return;
            }
            next += 1;
        }
    }

    /// Shortest edge path between two explored states, deterministic in the
    /// discovery order. `from == to` yields the empty path.
    pub(crate) fn path(&self, from: usize, to: usize) -> Option<Vec<Step>> {
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; self.states.len()];
        let mut seen = vec![false; self.states.len()];
        let mut queue = VecDeque::from([from]);
        seen[from] = true;
        while let Some(u) = queue.pop_front() {
            if u == to {
                let mut rev = Vec::new();
                let mut at = to;
                while at != from {
                    let (p, e) = prev[at].expect("interior nodes have predecessors");
                    rev.push(self.edges[p][e].1.clone());
                    at = p;
                }
                rev.reverse();
                return Some(rev);
            }
            for (e, (v, _)) in self.edges[u].iter().enumerate() {
                if !seen[*v] {
                    seen[*v] = true;
                    prev[*v] = Some((u, e));
                    queue.push_back(*v);
                }
            }
        }
        None
    }

    /// Steps from the first root to `i` along the discovery tree.
    pub(crate) fn path_from_root(&self, i: usize) -> Vec<Step> {
        let mut rev = Vec::new();
        let mut at = i;
        while let Some((p, e)) = self.parent[at] {
            rev.push(self.edges[p][e].1.clone());
            at = p;
        }
        rev.reverse();
        rev
    }
}

/// Bounded search for a hypercollapsing witness.
///
/// Explores the reduction graph of `s` breadth-first up to the budget,
/// identifying states up to alpha-equivalence, and looks for a reachable
/// cycle through a root-collapsing step. The verdicts are exact for
/// `Hypercollapsing`, exhaustive-within-bounds for `NotWithinBounds`, and
/// honest about interruption for `Unknown`. Terms whose root is not a
/// function symbol can never develop a root redex and are decided
/// immediately.
pub fn detect_hypercollapsing(s: &Term, sys: &RuleSystem, budget: &SearchBudget) -> HcVerdict {
    if !matches!(Cursor::new(s).node(), TermNode::Fun(..)) {
        return HcVerdict::NotWithinBounds;
    }
    if sys.collapsing_rules().is_empty() {
        return HcVerdict::NotWithinBounds;
    }
    let mut ex = Explorer::new(budget);
    ex.add_root(s);
    ex.explore(sys);
    for i in 0..ex.states.len() {
        for (j, step) in &ex.edges[i] {
            if !step.flags.root_collapsing {
                continue;
            }
            let Some(back) = ex.path(*j, i) else {
                continue;
            };
            let stem = Reduction::from_steps(ex.path_from_root(i)).expect("stem steps chain");
            let mut steps = vec![step.clone()];
            steps.extend(back);
            let cycle = Reduction::from_steps(steps).expect("cycle steps chain");
            return HcVerdict::Hypercollapsing(Lasso { stem, cycle });
        }
    }
    if ex.complete {
        HcVerdict::NotWithinBounds
    } else {
        HcVerdict::Unknown
    }
}

/// Replays a lasso witness: runs the stem once and the cycle `laps` times,
/// re-matching every recorded redex. The result is a valid reduction from
/// the witnessed term with at least `laps` root-collapsing steps.
pub fn unroll_lasso(lasso: &Lasso, sys: &RuleSystem, laps: usize) -> Result<Reduction, RewriteError> {
    let mut out = lasso.stem.clone();
    let mut current = match (out.target(), lasso.cycle.source()) {
        (Some(t), _) => t.clone(),
        (None, Some(t)) => t.clone(),
        (None, None) => return Ok(Reduction::empty()),
    };
    for _ in 0..laps {
        for step in lasso.cycle.steps() {
            let applied = apply_step(&current, &step.redex, sys)?;
            current = applied.target.clone();
            out.push(applied)?;
        }
    }
    Ok(out)
}

/// Detection results cached up to alpha-equivalence, so that rational terms
/// whose subterms repeat are only searched once.
struct DetectCache {
    entries: HashMap<u64, Vec<(Term, HcVerdict)>>,
}

impl DetectCache {
    fn new() -> DetectCache {
        DetectCache { entries: HashMap::new() }
    }

    fn verdict(&mut self, t: &Term, sys: &RuleSystem, budget: &SearchBudget) -> HcVerdict {
        let fp = fingerprint(t);
        if let Some(bucket) = self.entries.get(&fp) {
            for (key, verdict) in bucket {
                if alpha_eq(key, t) {
                    return verdict.clone();
                }
            }
        }
        let verdict = detect_hypercollapsing(t, sys, budget);
        self.entries.entry(fp).or_default().push((t.clone(), verdict.clone()));
        verdict
    }
}

/// A term with its hypercollapsing subterms replaced by the reserved bottom
/// symbol, together with the replaced positions and the positions where the
/// bounded search returned no verdict.
#[derive(Debug, Clone)]
pub struct HcNormalForm {
    pub term: Term,
    pub substituted_positions: BTreeSet<Position>,
    pub unknown_positions: BTreeSet<Position>,
}

/// Replaces every maximal hypercollapsing subterm at depth at most `depth`
/// with bottom, scanning outermost-first so that nothing is replaced inside
/// an already replaced subterm. Subterms with an `Unknown` verdict are left
/// intact and recorded. With `HcScope::ProperSubterms` the root position is
/// never considered for replacement.
pub fn hc_normalize(
    s: &Term,
    sys: &RuleSystem,
    budget: &SearchBudget,
    depth: usize,
    scope: HcScope,
) -> HcNormalForm {
    let mut substituted = BTreeSet::new();
    let mut unknown = BTreeSet::new();
    if !sys.collapsing_rules().is_empty() {
        let mut cache = DetectCache::new();
        for p in positions_up_to(s, depth) {
            if scope == HcScope::ProperSubterms && p.is_root() {
                continue;
            }
            if substituted.iter().any(|q: &Position| q.suffix_of(&p).is_some()) {
                continue;
            }
            let sub = subterm_at(s, &p).expect("scanned positions are valid");
            match cache.verdict(&sub, sys, budget) {
                HcVerdict::Hypercollapsing(_) => {
                    substituted.insert(p);
                }
                HcVerdict::Unknown => {
                    unknown.insert(p);
                }
                HcVerdict::NotWithinBounds => {}
            }
        }
    }
    let bottom = Term::fun(BOTTOM, vec![]);
    let mut term = s.clone();
    for p in &substituted {
        term = splice(&term, p, &bottom).expect("substituted positions are valid");
    }
    HcNormalForm { term, substituted_positions: substituted, unknown_positions: unknown }
}

/// The two normal forms behind an equivalence verdict.
#[derive(Debug, Clone)]
pub struct HcEquivEvidence {
    pub left: HcNormalForm,
    pub right: HcNormalForm,
    pub depth: usize,
}

fn bounded_alpha(a: &Cursor, b: &Cursor, remaining: usize) -> bool {
    if remaining == 0 {
        return true;
    }
    match (a.node(), b.node()) {
        (TermNode::Var(i), TermNode::Var(j)) => i == j,
        (TermNode::Free(x), TermNode::Free(y)) => x == y,
        (TermNode::Abs(_, _), TermNode::Abs(_, _)) => {
            bounded_alpha(&a.child(0).unwrap(), &b.child(0).unwrap(), remaining - 1)
        }
        (TermNode::Fun(f, xs), TermNode::Fun(g, ys)) => {
            f == g
                && xs.len() == ys.len()
                && (1..=xs.len())
                    .all(|i| bounded_alpha(&a.child(i).unwrap(), &b.child(i).unwrap(), remaining - 1))
        }
        (TermNode::Meta(m, xs), TermNode::Meta(n, ys)) => {
            m == n
                && xs.len() == ys.len()
                && (1..=xs.len())
                    .all(|i| bounded_alpha(&a.child(i).unwrap(), &b.child(i).unwrap(), remaining - 1))
        }
        _ => false,
    }
}

/// Compares two normal forms up to `depth`. A mismatch below an
/// unknown-verdict position is not decisive (the unresolved subterm could
/// still be hypercollapsing on both sides), so it degrades the verdict to
/// `Unknown` instead of `No`; unknown positions whose subtrees agree on
/// both sides are immaterial.
fn compare_modulo(left: &HcNormalForm, right: &HcNormalForm, depth: usize) -> ThreeValued {
    fn walk(
        a: &Cursor,
        b: &Cursor,
        pos: &mut Vec<usize>,
        remaining: usize,
        lu: &BTreeSet<Position>,
        ru: &BTreeSet<Position>,
    ) -> ThreeValued {
        if remaining == 0 {
            return ThreeValued::Yes;
        }
        let here = Position(pos.clone());
        if lu.contains(&here) || ru.contains(&here) {
            return if bounded_alpha(a, b, remaining) { ThreeValued::Yes } else { ThreeValued::Unknown };
        }
        let children: Vec<usize> = match (a.node(), b.node()) {
            (TermNode::Var(i), TermNode::Var(j)) => {
                return if i == j { ThreeValued::Yes } else { ThreeValued::No };
            }
            (TermNode::Free(x), TermNode::Free(y)) => {
                return if x == y { ThreeValued::Yes } else { ThreeValued::No };
            }
            (TermNode::Abs(_, _), TermNode::Abs(_, _)) => vec![0],
            (TermNode::Fun(f, xs), TermNode::Fun(g, ys)) if f == g && xs.len() == ys.len() => {
                (1..=xs.len()).collect()
            }
            (TermNode::Meta(m, xs), TermNode::Meta(n, ys)) if m == n && xs.len() == ys.len() => {
                (1..=xs.len()).collect()
            }
            _ => return ThreeValued::No,
        };
        let mut acc = ThreeValued::Yes;
        for i in children {
            pos.push(i);
            let sub = walk(&a.child(i).unwrap(), &b.child(i).unwrap(), pos, remaining - 1, lu, ru);
            pos.pop();
            match sub {
                ThreeValued::No => return ThreeValued::No,
                ThreeValued::Unknown => acc = ThreeValued::Unknown,
                ThreeValued::Yes => {}
            }
        }
        acc
    }
    walk(
        &Cursor::new(&left.term),
        &Cursor::new(&right.term),
        &mut Vec::new(),
        depth,
        &left.unknown_positions,
        &right.unknown_positions,
    )
}

/// Three-valued equivalence modulo hypercollapsing subterms: yes when the
/// normal forms agree up to `depth` and no unresolved subterm could change
/// that, no on a definite mismatch, unknown otherwise.
pub fn hc_equiv(
    a: &Term,
    b: &Term,
    sys: &RuleSystem,
    budget: &SearchBudget,
    depth: usize,
    scope: HcScope,
) -> ThreeValued {
    hc_equiv_with(a, b, sys, budget, depth, scope).0
}

/// Like [`hc_equiv`], also returning the normal forms behind the verdict.
pub fn hc_equiv_with(
    a: &Term,
    b: &Term,
    sys: &RuleSystem,
    budget: &SearchBudget,
    depth: usize,
    scope: HcScope,
) -> (ThreeValued, HcEquivEvidence) {
    let left = hc_normalize(a, sys, budget, depth, scope);
    let right = hc_normalize(b, sys, budget, depth, scope);
    let verdict = compare_modulo(&left, &right, depth);
    (verdict, HcEquivEvidence { left, right, depth })
}

fn classify_with_cache(
    step: &Step,
    sys: &RuleSystem,
    budget: &SearchBudget,
    scope: HcScope,
    cache: &mut DetectCache,
) -> ThreeValued {
    let p = &step.redex.position;
    let mut saw_unknown = false;
    let start = match scope {
        HcScope::ProperSubterms => 1,
        HcScope::WholeTerm => 0,
    };
    for k in start..=p.0.len() {
        let q = Position(p.0[..k].to_vec());
        let sub = subterm_at(&step.source, &q).expect("redex prefixes are valid positions");
        match cache.verdict(&sub, sys, budget) {
            HcVerdict::Hypercollapsing(_) => return ThreeValued::No,
            HcVerdict::Unknown => saw_unknown = true,
            HcVerdict::NotWithinBounds => {}
        }
    }
    if saw_unknown {
        ThreeValued::Unknown
    } else {
        ThreeValued::Yes
    }
}

/// Classifies a step as an outside step: yes when no subterm containing the
/// redex has a hypercollapsing verdict, no when one does, unknown when the
/// bounded searches were inconclusive. Under the default scope a root step
/// is always outside, because only proper subterms are inspected.
pub fn classify_out_step(
    step: &Step,
    sys: &RuleSystem,
    budget: &SearchBudget,
    scope: HcScope,
) -> ThreeValued {
    classify_with_cache(step, sys, budget, scope, &mut DetectCache::new())
}

/// Classifies a step and records the verdict in its flags (`None` when the
/// classification was inconclusive).
pub fn annotate_out_step(
    step: &mut Step,
    sys: &RuleSystem,
    budget: &SearchBudget,
    scope: HcScope,
) -> ThreeValued {
    let verdict = classify_out_step(step, sys, budget, scope);
    step.flags.out_step = match verdict {
        ThreeValued::Yes => Some(true),
        ThreeValued::No => Some(false),
        ThreeValued::Unknown => None,
    };
    verdict
}

/// Outcome of the bounded projection of a reduction over a single step.
#[derive(Debug, Clone)]
pub enum StripOutcome {
    /// Both projections completed and their final terms agree up to
    /// truncation at the budget depth; the common corner is returned.
    Joined(Term),
    /// A development diverged or the total work exceeded the step budget.
    Diverged,
}

/// Projects `s_red` over the step contracting `u` and vice versa by tiling,
/// within the budget: the tile's developments are capped by `max_steps`
/// each, and the total number of steps across the diagram must stay within
/// `max_steps` too. This is the workhorse behind the claim that outside
/// reductions can be stripped off a projection; calling it with reductions
/// that step inside hypercollapsing subterms typically diverges, which is
/// exactly why the outside restriction matters.
pub fn strip_restricted(
    s_red: &Reduction,
    u: &Redex,
    sys: &RuleSystem,
    budget: &SearchBudget,
) -> Result<StripOutcome, RewriteError> {
    let source = match s_red.source() {
        Some(t) => t.clone(),
        None => return Err(RewriteError::EmptyTiling),
    };
    let ustep = apply_step(&source, u, sys)?;
    let ured = Reduction::single(ustep);
    let diagram = match tile(s_red, &ured, sys, budget.max_steps) {
        Ok(d) => d,
        Err(RewriteError::InfiniteDescendants) => return Ok(StripOutcome::Diverged),
        Err(e) => return Err(e),
    };
    if let TilingStatus::Diverged { .. } = diagram.status {
        return Ok(StripOutcome::Diverged);
    }
    let total: usize = diagram
        .vertical
        .iter()
        .chain(diagram.horizontal.iter())
        .flat_map(|row| row.iter())
        .filter_map(|edge| edge.as_ref())
        .map(|red| red.len())
        .sum();
    if total > budget.max_steps {
        return Ok(StripOutcome::Diverged);
    }
    let rows = diagram.grid.len() - 1;
    let cols = diagram.grid[0].len() - 1;
    let corner = diagram.grid[rows][cols].clone().expect("completed tilings fill the grid");
    let via_bottom = if cols >= 1 {
        edge_target(&diagram.horizontal[rows][cols - 1], &diagram.grid[rows][cols - 1])
    } else {
        corner.clone()
    };
    let via_right = if rows >= 1 {
        edge_target(&diagram.vertical[rows - 1][cols], &diagram.grid[rows - 1][cols])
    } else {
        corner.clone()
    };
    let d = budget.max_depth;
    if alpha_eq(&truncate(&via_bottom, d), &truncate(&via_right, d)) {
        Ok(StripOutcome::Joined(corner))
    } else {
        Ok(StripOutcome::Diverged)
    }
}

fn edge_target(edge: &Option<Reduction>, from: &Option<Term>) -> Term {
    match edge {
        Some(red) if !red.is_empty() => red.target().expect("nonempty reduction").clone(),
        _ => from.clone().expect("completed tilings fill the grid"),
    }
}

/// One side of the joinability search.
struct Side {
    ex: Explorer,
    normal: Vec<Option<HcNormalForm>>,
    next_expand: usize,
}

impl Side {
    fn new(root: &Term, budget: &SearchBudget) -> Side {
        let mut ex = Explorer::new(budget);
        ex.add_root(root);
        Side { ex, normal: Vec::new(), next_expand: 0 }
    }

    fn normal_form(
        &mut self,
        i: usize,
        sys: &RuleSystem,
        budget: &SearchBudget,
        depth: usize,
        scope: HcScope,
    ) -> HcNormalForm {
        if self.normal.len() <= i {
            self.normal.resize(i + 1, None);
        }
        if self.normal[i].is_none() {
            self.normal[i] = Some(hc_normalize(&self.ex.states[i], sys, budget, depth, scope));
        }
        self.normal[i].clone().expect("just computed")
    }
}

/// Bounded search for a join modulo hypercollapsing subterms: extends the
/// targets of `s_red` and `t_red` breadth-first (outside steps first) until
/// two reachable terms are equivalent under [`hc_equiv`] at `depth`.
/// Returns the two full reductions and the equivalence evidence, or `None`
/// when the budget is exhausted or both reachable sets close without a
/// match. `s` seeds the endpoints for empty reductions.
pub fn join_modulo(
    s: &Term,
    s_red: &Reduction,
    t_red: &Reduction,
    sys: &RuleSystem,
    budget: &SearchBudget,
    depth: usize,
    scope: HcScope,
) -> Result<Option<(Reduction, Reduction, HcEquivEvidence)>, RewriteError> {
    let a0 = s_red.target().cloned().unwrap_or_else(|| s.clone());
    let b0 = t_red.target().cloned().unwrap_or_else(|| s.clone());
    let mut cache = DetectCache::new();
    let mut left = Side::new(&a0, budget);
    let mut right = Side::new(&b0, budget);
    let mut pending: VecDeque<(usize, usize)> = VecDeque::from([(0, 0)]);
    let mut expand_left = true;
    loop {
        while let Some((i, j)) = pending.pop_front() {
            let ln = left.normal_form(i, sys, budget, depth, scope);
            let rn = right.normal_form(j, sys, budget, depth, scope);
            if compare_modulo(&ln, &rn, depth) == ThreeValued::Yes {
                let mut from_s = s_red.steps().to_vec();
                from_s.extend(left.ex.path_from_root(i));
                let mut from_t = t_red.steps().to_vec();
                from_t.extend(right.ex.path_from_root(j));
                let evidence = HcEquivEvidence { left: ln, right: rn, depth };
                return Ok(Some((
                    Reduction::from_steps(from_s).expect("extension steps chain"),
                    Reduction::from_steps(from_t).expect("extension steps chain"),
                    evidence,
                )));
            }
        }
        let mut progressed = false;
        for _ in 0..2 {
            let (side, other_len, swap) = if expand_left {
                (&mut left, right.ex.states.len(), false)
            } else {
                (&mut right, left.ex.states.len(), true)
            };
            expand_left = !expand_left;
            if side.next_expand >= side.ex.states.len() {
                continue;
            }
            let i = side.next_expand;
            side.next_expand += 1;
            let before = side.ex.states.len();
            let mut rank = |step: &Step| match classify_with_cache(step, sys, budget, scope, &mut cache) {
                ThreeValued::Yes => 0,
                ThreeValued::Unknown => 1,
                ThreeValued::No => 2,
            };
            side.ex.expand_ordered(i, sys, &mut rank);
            for new_state in before..side.ex.states.len() {
                for other in 0..other_len {
                    pending.push_back(if swap { (other, new_state) } else { (new_state, other) });
                }
            }
            progressed = true;
            break;
        }
        if !progressed {
            return Ok(None);
        }
    }
}
