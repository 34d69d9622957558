//! Rewrite steps and finite reductions.
//!
//! A step contracts a redex: the subterm at the redex position is replaced
//! by the instantiated right-hand side. Replacement uses the fixed
//! representative of the context, so bound variables of the surroundings
//! that occur in the contracted subterm are captured by the binders they
//! came from rather than renamed apart. On rational terms the spine from
//! the root to the redex is unfolded as far as the position requires and
//! everything off the spine keeps its cyclic form.
//!
//! On top of single steps this module provides position tracking across
//! steps (descendants and residuals), complete developments of finite
//! redex sets, projection of a development over a step, tiling diagrams,
//! and bounded reduction under the two strategies used by the toolkit.

use std::collections::{BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::alpha::{alpha_eq, truncate};
use crate::cursor::{reconstruct, Cursor};
use crate::graph::build_graph;
use crate::matching::{match_at, Redex};
use crate::position::{Position, PositionError};
use crate::rules::{Rule, RuleSystem};
use crate::signature::TRACER;
use crate::term::{unfold_root, FreeName, MetaName, Term, TermNode};
use crate::valuation::{apply_valuation, Substitute, ValuationError};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum RewriteError {
    /// The rule no longer matches at the recorded position.
    #[error("rule {rule} does not match at {position}: the redex is stale")]
    StaleRedex { rule: String, position: Position },
    #[error(transparent)]
    Position(#[from] PositionError),
    #[error(transparent)]
    Valuation(#[from] ValuationError),
    /// A tracked position was duplicated into a cycle of the contractum, so
    /// it has infinitely many descendants. The set cannot be returned; the
    /// caller must bound the depth of interest first.
    #[error("the position has infinitely many descendants inside a cycle")]
    InfiniteDescendants,
    /// A reduction was assembled from steps whose endpoints do not chain.
    #[error("step {at} does not start at the previous step's target")]
    BrokenChain { at: usize },
    #[error("cannot tile two empty reductions: no common source is known")]
    EmptyTiling,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum DevelopError {
    #[error("development exceeded {budget} steps without completing")]
    Diverged { budget: usize },
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
}

/// Classification flags of a single step. `out_step` is filled in by the
/// hypercollapsing analysis when the step is classified against the
/// hypercollapsing subterms of its source; it stays `None` until then.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StepFlags {
    pub collapsing: bool,
    pub root_collapsing: bool,
    pub out_step: Option<bool>,
}

/// One rewrite step `source -> target`, contracting `redex`.
#[derive(Debug, Clone)]
pub struct Step {
    pub source: Term,
    pub target: Term,
    pub redex: Redex,
    pub flags: StepFlags,
}

/// A finite sequence of steps with chained endpoints.
#[derive(Debug, Clone, Default)]
pub struct Reduction {
    steps: Vec<Step>,
}

impl Reduction {
    pub fn empty() -> Reduction {
        Reduction::default()
    }

    pub fn single(step: Step) -> Reduction {
        Reduction { steps: vec![step] }
    }

    pub fn from_steps(steps: Vec<Step>) -> Result<Reduction, RewriteError> {
        for i in 1..steps.len() {
            if !alpha_eq(&steps[i - 1].target, &steps[i].source) {
                return Err(RewriteError::BrokenChain { at: i });
            }
        }
        Ok(Reduction { steps })
    }

    pub fn push(&mut self, step: Step) -> Result<(), RewriteError> {
        if let Some(last) = self.steps.last() {
            if !alpha_eq(&last.target, &step.source) {
                return Err(RewriteError::BrokenChain { at: self.steps.len() });
            }
        }
        self.steps.push(step);
        Ok(())
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn source(&self) -> Option<&Term> {
        self.steps.first().map(|s| &s.source)
    }

    pub fn target(&self) -> Option<&Term> {
        self.steps.last().map(|s| &s.target)
    }

    /// The redex depth of each step, in order.
    pub fn depth_profile(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.redex.depth()).collect()
    }
}

/// Contracts `redex` in `s`. The rule is re-matched at the position, so the
/// valuation carried by `redex` may be a placeholder; an error is returned
/// if the rule does not match there (the redex is stale).
pub fn apply_step(s: &Term, redex: &Redex, sys: &RuleSystem) -> Result<Step, RewriteError> {
    let rule = sys.rule(redex.rule_index);
    let valuation = match_at(rule, s, &redex.position).ok_or_else(|| {
        RewriteError::StaleRedex { rule: rule.name.clone(), position: redex.position.clone() }
    })?;
    let instance = apply_valuation(&valuation, &rule.rhs)?;
    let target = splice(s, &redex.position, &instance)?;
    let collapsing = rule.is_collapsing();
    Ok(Step {
        source: s.clone(),
        target,
        redex: Redex {
            position: redex.position.clone(),
            rule_index: redex.rule_index,
            valuation,
        },
        flags: StepFlags {
            collapsing,
            root_collapsing: collapsing && redex.position.is_root(),
            out_step: None,
        },
    })
}

/// Rebuilds `s` with `replacement` plugged in at `p`.
///
/// The spine from the root to `p` is rebuilt from the resolved view, which
/// unfolds any fixed-point binders the path passes through. Subtrees
/// hanging off the spine are extracted with their cycles re-tied, and every
/// instance marker (in them and in the replacement) is bound back to the
/// spine binder it came from by its tree-level index.
pub(crate) fn splice(s: &Term, p: &Position, replacement: &Term) -> Result<Term, PositionError> {
    let mut spine: Vec<Cursor> = Vec::with_capacity(p.0.len() + 1);
    let mut c = Cursor::new(s);
    spine.push(c.clone());
    for (k, &i) in p.0.iter().enumerate() {
        if !c.descend(i) {
            return Err(PositionError { position: p.clone(), valid_steps: k });
        }
        spine.push(c.clone());
    }

    let mut out = bind_markers(replacement, spine.last().expect("root is present"));
    for k in (0..p.0.len()).rev() {
        let i = p.0[k];
        let cur = &spine[k];
        out = match cur.node() {
            TermNode::Abs(hint, _) => Term::abs(hint, out),
            TermNode::Fun(f, args) => {
                let rebuilt = (1..=args.len())
                    .map(|j| if j == i { out.clone() } else { sibling(cur, j) })
                    .collect();
                Term::fun(*f, rebuilt)
            }
            TermNode::Meta(m, args) => {
                let rebuilt = (1..=args.len())
                    .map(|j| if j == i { out.clone() } else { sibling(cur, j) })
                    .collect();
                Term::meta(m.clone(), rebuilt)
            }
            _ => unreachable!("the path descended through this node"),
        };
    }
    Ok(out)
}

fn sibling(cur: &Cursor, j: usize) -> Term {
    let c = cur.child(j).expect("sibling index from the node's own arity");
    let t = reconstruct(&c, None).expect("extraction without parameters cannot fail");
    bind_markers(&t, &c)
}

/// Replaces instance markers by variables bound at the binders the cursor
/// has in scope. The index of a binder is its tree-level distance from the
/// cursor (`crossed - birth - 1`), which counts every abstraction on the
/// unfolded spine, including ones a back-reference jump removed from scope;
/// those are physically present in the rebuilt term and must be skipped.
fn bind_markers(t: &Term, cur: &Cursor) -> Term {
    let map: HashMap<u64, usize> = cur
        .abs_entries()
        .iter()
        .map(|e| (e.birth, cur.rel_level(e.birth) as usize))
        .collect();
    if map.is_empty() {
        return t.clone();
    }
    fn go(t: &Term, map: &HashMap<u64, usize>, local: usize) -> Term {
        match t.node() {
            TermNode::Free(FreeName::Inst { id, .. }) => match map.get(id) {
                Some(&d) => Term::var(local + d),
                None => t.clone(),
            },
            TermNode::Abs(h, b) => Term::abs(h, go(b, map, local + 1)),
            TermNode::Rec(h, b) => Term::rec(h, go(b, map, local)),
            TermNode::Fun(f, args) => {
                Term::fun(*f, args.iter().map(|a| go(a, map, local)).collect())
            }
            TermNode::Meta(m, args) => {
                Term::meta(m.clone(), args.iter().map(|a| go(a, map, local)).collect())
            }
            _ => t.clone(),
        }
    }
    go(t, &map, 0)
}

/// The descendants of the given source positions across `step`.
///
/// Positions disjoint from the redex, or strictly above it, persist
/// unchanged. Positions in the pattern of the redex (including the redex
/// root and the pattern's bound variables) have no descendants. A position
/// inside the instance of a matched meta-variable maps to the image of
/// that point of the substitute under every occurrence the right-hand side
/// gives it, which may be none, one, or many.
pub fn descendants(
    ps: &[Position],
    step: &Step,
    sys: &RuleSystem,
) -> Result<Vec<Position>, RewriteError> {
    let rule = sys.rule(step.redex.rule_index);
    let p = &step.redex.position;
    let mut out: BTreeSet<Position> = BTreeSet::new();
    for q in ps {
        Cursor::at(&step.source, q)?;
        match p.suffix_of(q) {
            None => {
                out.insert(q.clone());
            }
            Some(w) => {
                if let Some((meta, b)) = pattern_exit(&rule.lhs, &w) {
                    for rel in instance_descendants(step, rule, &meta, &b)? {
                        out.insert(p.concat(&rel));
                    }
                }
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// Walks the left-hand side along `w`. If the walk passes into (or ends at)
/// a meta-variable, returns its name and the remaining path, which is a
/// position of the meta-variable's substitute body. If the walk stays on
/// pattern structure the position is consumed by the step.
fn pattern_exit(lhs: &Term, w: &Position) -> Option<(MetaName, Position)> {
    let mut node = lhs;
    for (k, &i) in w.0.iter().enumerate() {
        match node.node() {
            TermNode::Meta(m, _) => return Some((m.clone(), Position(w.0[k..].to_vec()))),
            TermNode::Abs(_, b) if i == 0 => node = b,
            TermNode::Fun(_, args) if (1..=args.len()).contains(&i) => node = &args[i - 1],
            _ => return None,
        }
    }
    match node.node() {
        TermNode::Meta(m, _) => Some((m.clone(), Position::root())),
        _ => None,
    }
}

/// Positions of the image of body position `b` of `meta`'s substitute in
/// the contractum, relative to the redex root. Computed by wrapping the
/// body point in a tracer node, instantiating the right-hand side with the
/// wrapped substitute, and collecting where the tracers surface.
fn instance_descendants(
    step: &Step,
    rule: &Rule,
    meta: &MetaName,
    b: &Position,
) -> Result<Vec<Position>, RewriteError> {
    let sub = step.redex.valuation.get(meta).expect("matched redexes instantiate their metas");
    let traced = wrap_at(sub.body(), &b.0);
    let mut val = step.redex.valuation.clone();
    val.insert(meta.clone(), Substitute::new(sub.arity(), traced));
    let instance = apply_valuation(&val, &rule.rhs)?;
    trace_positions(&instance)
}

/// Wraps the subterm of `t` at `w` in a tracer node, unrolling fixed-point
/// binders the path passes through so that exactly one point of the
/// unfolded tree is marked.
fn wrap_at(t: &Term, w: &[usize]) -> Term {
    if w.is_empty() {
        return Term::fun(TRACER, vec![t.clone()]);
    }
    match t.node() {
        TermNode::Rec(..) => wrap_at(&unfold_root(t), w),
        TermNode::Abs(h, b) if w[0] == 0 => Term::abs(h, wrap_at(b, &w[1..])),
        TermNode::Fun(f, args) if (1..=args.len()).contains(&w[0]) => {
            let mut out = args.clone();
            out[w[0] - 1] = wrap_at(&args[w[0] - 1], &w[1..]);
            Term::fun(*f, out)
        }
        TermNode::Meta(m, args) if (1..=args.len()).contains(&w[0]) => {
            let mut out = args.clone();
            out[w[0] - 1] = wrap_at(&args[w[0] - 1], &w[1..]);
            Term::meta(m.clone(), out)
        }
        _ => unreachable!("descendant paths are valid positions of the substitute body"),
    }
}

/// Positions of tracer nodes in the unfolded tree of `t`, expressed in the
/// coordinates of the term with the tracers removed. Errs if a tracer lies
/// inside or below a cycle, in which case it has infinitely many positions.
fn trace_positions(t: &Term) -> Result<Vec<Position>, RewriteError> {
    let g = build_graph(t);
    let n = g.states.len();
    let is_trace: Vec<bool> = g
        .states
        .iter()
        .map(|s| matches!(s.node.node(), TermNode::Fun(f, _) if *f == TRACER))
        .collect();
    let mut reach = is_trace.clone();
    loop {
        let mut changed = false;
        for i in 0..n {
            if !reach[i] && g.states[i].children.iter().any(|&(_, t)| reach[t]) {
                reach[i] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    if !reach[g.root] {
        return Ok(Vec::new());
    }

    // A cycle among tracer-reaching states pumps some tracer to infinitely
    // many tree positions. Colour-marking DFS restricted to those states.
    let mut colour = vec![0u8; n];
    let mut stack: Vec<(usize, usize)> = vec![(g.root, 0)];
    colour[g.root] = 1;
    while let Some(&(i, next)) = stack.last() {
        let kids = &g.states[i].children;
        if next >= kids.len() {
            colour[i] = 2;
            stack.pop();
            continue;
        }
        stack.last_mut().expect("just inspected").1 += 1;
        let (_, tgt) = kids[next];
        if !reach[tgt] {
            continue;
        }
        match colour[tgt] {
            1 => return Err(RewriteError::InfiniteDescendants),
            0 => {
                colour[tgt] = 1;
                stack.push((tgt, 0));
            }
            _ => {}
        }
    }

    let mut out = Vec::new();
    fn walk(
        i: usize,
        pos: Position,
        g: &crate::graph::SyntaxGraph,
        reach: &[bool],
        is_trace: &[bool],
        out: &mut Vec<Position>,
    ) {
        if is_trace[i] {
            out.push(pos.clone());
        }
        for &(step, tgt) in &g.states[i].children {
            if reach[tgt] {
                // A tracer is transparent for coordinates: its child sits at
                // the tracer's own position once the wrapper is dropped.
                let next = if is_trace[i] { pos.clone() } else { pos.child(step) };
                walk(tgt, next, g, reach, is_trace, out);
            }
        }
    }
    walk(g.root, Position::root(), &g, &reach, &is_trace, &mut out);
    Ok(out)
}

/// The residuals of the redexes `u` across the reduction `d`: redexes of
/// the target found at descendant positions that still match their
/// original rule, tracked step by step.
pub fn residuals(
    u: &[Redex],
    d: &Reduction,
    sys: &RuleSystem,
) -> Result<Vec<Redex>, RewriteError> {
    let set: Vec<(Position, usize)> =
        u.iter().map(|r| (r.position.clone(), r.rule_index)).collect();
    let survivors = residual_positions(&set, d.steps(), sys)?;
    let Some(target) = d.target() else {
        // Empty reduction: everything is its own residual.
        return Ok(u.to_vec());
    };
    let mut out = Vec::new();
    for (pos, ri) in survivors {
        let val = match_at(sys.rule(ri), target, &pos).expect("survivors re-matched");
        out.push(Redex { position: pos, rule_index: ri, valuation: val });
    }
    Ok(out)
}

fn residual_positions(
    set: &[(Position, usize)],
    steps: &[Step],
    sys: &RuleSystem,
) -> Result<Vec<(Position, usize)>, RewriteError> {
    let mut cur: Vec<(Position, usize)> = Vec::new();
    for item in set {
        if !cur.contains(item) {
            cur.push(item.clone());
        }
    }
    for step in steps {
        let mut next: Vec<(Position, usize)> = Vec::new();
        for (pos, ri) in &cur {
            for q in descendants(std::slice::from_ref(pos), step, sys)? {
                if match_at(sys.rule(*ri), &step.target, &q).is_some()
                    && !next.contains(&(q.clone(), *ri))
                {
                    next.push((q, *ri));
                }
            }
        }
        cur = next;
    }
    Ok(cur)
}

/// A complete development: a reduction contracting residuals of a fixed
/// redex set until none remain.
#[derive(Debug, Clone)]
pub struct Development {
    pub source: Term,
    pub target: Term,
    /// The set that was developed, as redexes of `source`.
    pub developed: Vec<Redex>,
    pub reduction: Reduction,
}

const DEVELOP_BUDGET: usize = 4096;

/// Completely develops the redexes `u` of `s`, contracting an outermost
/// residual at each step. Terminates for every finite set in an orthogonal
/// system; the internal budget guards against pathological inputs.
pub fn develop(s: &Term, u: &[Redex], sys: &RuleSystem) -> Result<Development, DevelopError> {
    try_develop(s, u, sys, DEVELOP_BUDGET)
}

pub fn try_develop(
    s: &Term,
    u: &[Redex],
    sys: &RuleSystem,
    budget: usize,
) -> Result<Development, DevelopError> {
    let mut developed = Vec::new();
    let mut pending: Vec<(Position, usize)> = Vec::new();
    for r in u {
        let val = match_at(sys.rule(r.rule_index), s, &r.position).ok_or_else(|| {
            RewriteError::StaleRedex {
                rule: sys.rule(r.rule_index).name.clone(),
                position: r.position.clone(),
            }
        })?;
        if !pending.contains(&(r.position.clone(), r.rule_index)) {
            pending.push((r.position.clone(), r.rule_index));
            developed.push(Redex {
                position: r.position.clone(),
                rule_index: r.rule_index,
                valuation: val,
            });
        }
    }

    let mut current = s.clone();
    let mut steps: Vec<Step> = Vec::new();
    while !pending.is_empty() {
        if steps.len() >= budget {
            return Err(DevelopError::Diverged { budget });
        }
        let k = (0..pending.len())
            .min_by_key(|&k| {
                let (p, ri) = &pending[k];
                (p.depth(), p.clone(), *ri)
            })
            .expect("pending is nonempty");
        let (pos, ri) = pending.remove(k);
        let step = apply_step(
            &current,
            &Redex { position: pos, rule_index: ri, valuation: Default::default() },
            sys,
        )
        .map_err(DevelopError::Rewrite)?;
        pending = residual_positions(&pending, std::slice::from_ref(&step), sys)
            .map_err(DevelopError::Rewrite)?;
        current = step.target.clone();
        steps.push(step);
    }
    Ok(Development {
        source: s.clone(),
        target: current,
        developed,
        reduction: Reduction::from_steps(steps).expect("steps chain by construction"),
    })
}

/// Projects a complete development over a single step `v` of its source:
/// returns the complete development of the residuals of the developed set
/// across `v`, starting from `v`'s target. Together with the development
/// of `v`'s residuals across `d` this closes a commuting square.
pub fn project_over_step(
    d: &Development,
    v: &Redex,
    sys: &RuleSystem,
) -> Result<Development, DevelopError> {
    let vstep = apply_step(&d.source, v, sys).map_err(DevelopError::Rewrite)?;
    let after = residuals(&d.developed, &Reduction::single(vstep.clone()), sys)
        .map_err(DevelopError::Rewrite)?;
    try_develop(&vstep.target, &after, sys, DEVELOP_BUDGET)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TilingStatus {
    Completed,
    /// The development of the cell at this row and column exceeded the
    /// step budget, witnessing a failure of strong convergence within it.
    Diverged { row: usize, col: usize },
}

/// A rectangular arrangement of developments closing two reductions from
/// a common source. `grid[i][j]` is the term after `i` vertical and `j`
/// horizontal edges; `vertical[i][j]` runs from `grid[i][j]` down to
/// `grid[i+1][j]`, `horizontal[i][j]` from `grid[i][j]` right to
/// `grid[i][j+1]`. Entries stay `None` past a divergent cell.
#[derive(Debug, Clone)]
pub struct TilingDiagram {
    pub grid: Vec<Vec<Option<Term>>>,
    pub vertical: Vec<Vec<Option<Reduction>>>,
    pub horizontal: Vec<Vec<Option<Reduction>>>,
    pub status: TilingStatus,
}

/// Tiles the square spanned by the reductions `s_red` (leftmost column)
/// and `t_red` (top row) cell by cell. Every edge is a complete
/// development; a cell whose development needs more than `step_budget`
/// steps stops the construction with a divergence status.
pub fn tile(
    s_red: &Reduction,
    t_red: &Reduction,
    sys: &RuleSystem,
    step_budget: usize,
) -> Result<TilingDiagram, RewriteError> {
    let source = s_red
        .source()
        .or_else(|| t_red.source())
        .ok_or(RewriteError::EmptyTiling)?
        .clone();
    let rows = s_red.len();
    let cols = t_red.len();

    let mut grid: Vec<Vec<Option<Term>>> = vec![vec![None; cols + 1]; rows + 1];
    let mut vertical: Vec<Vec<Option<Reduction>>> = vec![vec![None; cols + 1]; rows];
    let mut horizontal: Vec<Vec<Option<Reduction>>> = vec![vec![None; cols]; rows + 1];
    // Redex sets labelling the edges still to develop, as (position, rule).
    let mut v_sets: Vec<Vec<Option<Vec<(Position, usize)>>>> = vec![vec![None; cols + 1]; rows];
    let mut h_sets: Vec<Vec<Option<Vec<(Position, usize)>>>> = vec![vec![None; cols]; rows + 1];

    grid[0][0] = Some(source);
    for i in 0..rows {
        let r = &s_red.steps()[i].redex;
        v_sets[i][0] = Some(vec![(r.position.clone(), r.rule_index)]);
    }
    for j in 0..cols {
        let r = &t_red.steps()[j].redex;
        h_sets[0][j] = Some(vec![(r.position.clone(), r.rule_index)]);
    }

    for i in 0..=rows {
        for j in 0..=cols {
            let Some(term) = grid[i][j].clone() else { continue };
            if i < rows {
                let set = v_sets[i][j].clone().expect("left-to-right fill order");
                match develop_set(&term, &set, sys, step_budget) {
                    Ok(dev) => {
                        grid[i + 1][j] = Some(dev.target.clone());
                        vertical[i][j] = Some(dev.reduction);
                    }
                    Err(DevelopError::Diverged { .. }) => {
                        return Ok(TilingDiagram {
                            grid,
                            vertical,
                            horizontal,
                            status: TilingStatus::Diverged { row: i, col: j },
                        });
                    }
                    Err(DevelopError::Rewrite(e)) => return Err(e),
                }
            }
            if j < cols {
                let set = h_sets[i][j].clone().expect("top-to-bottom fill order");
                match develop_set(&term, &set, sys, step_budget) {
                    Ok(dev) => {
                        grid[i][j + 1] = Some(dev.target.clone());
                        horizontal[i][j] = Some(dev.reduction);
                    }
                    Err(DevelopError::Diverged { .. }) => {
                        return Ok(TilingDiagram {
                            grid,
                            vertical,
                            horizontal,
                            status: TilingStatus::Diverged { row: i, col: j },
                        });
                    }
                    Err(DevelopError::Rewrite(e)) => return Err(e),
                }
            }
            if i < rows && j < cols {
                let vert = vertical[i][j].as_ref().expect("just built");
                let horz = horizontal[i][j].as_ref().expect("just built");
                h_sets[i + 1][j] = Some(residual_positions(
                    h_sets[i][j].as_ref().expect("seeded or filled"),
                    vert.steps(),
                    sys,
                )?);
                v_sets[i][j + 1] = Some(residual_positions(
                    v_sets[i][j].as_ref().expect("seeded or filled"),
                    horz.steps(),
                    sys,
                )?);
            }
        }
    }
    Ok(TilingDiagram { grid, vertical, horizontal, status: TilingStatus::Completed })
}

fn develop_set(
    term: &Term,
    set: &[(Position, usize)],
    sys: &RuleSystem,
    budget: usize,
) -> Result<Development, DevelopError> {
    let redexes: Vec<Redex> = set
        .iter()
        .map(|(p, ri)| Redex {
            position: p.clone(),
            rule_index: *ri,
            valuation: Default::default(),
        })
        .collect();
    try_develop(term, &redexes, sys, budget)
}

/// Scan of the distinct resolver states of a term: which rules match at
/// each state and which states can reach a matching one. Matching at a
/// position depends only on its state, since the folded structure below
/// and the relative binder references a match inspects are determined by
/// it; so the scan decides redex existence exactly, cycles included.
struct StateScan {
    graph: crate::graph::SyntaxGraph,
    matching: Vec<Vec<usize>>,
    reach: Vec<bool>,
}

fn state_scan(t: &Term, sys: &RuleSystem) -> StateScan {
    let graph = build_graph(t);
    let n = graph.states.len();
    // Breadth-first representatives: the lexicographically least among the
    // shortest-path positions of each state.
    let mut rep: Vec<Option<Position>> = vec![None; n];
    rep[graph.root] = Some(Position::root());
    let mut queue = VecDeque::from([graph.root]);
    while let Some(i) = queue.pop_front() {
        let here = rep[i].clone().expect("enqueued with a representative");
        for &(step, tgt) in &graph.states[i].children {
            if rep[tgt].is_none() {
                rep[tgt] = Some(here.child(step));
                queue.push_back(tgt);
            }
        }
    }
    let mut matching: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let p = rep[i].as_ref().expect("graph explores from the root");
        for ri in 0..sys.rules.len() {
            if match_at(sys.rule(ri), t, p).is_some() {
                matching[i].push(ri);
            }
        }
    }
    let mut reach: Vec<bool> = matching.iter().map(|m| !m.is_empty()).collect();
    loop {
        let mut changed = false;
        for i in 0..n {
            if !reach[i] && graph.states[i].children.iter().any(|&(_, t)| reach[t]) {
                reach[i] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    StateScan { graph, matching, reach }
}

/// Exact normal-form check: no rule matches at any position, however deep.
pub fn is_normal_form(t: &Term, sys: &RuleSystem) -> bool {
    state_scan(t, sys).matching.iter().all(|m| m.is_empty())
}

/// The redex minimal in (depth, position, rule index) order, which is
/// always an outermost one. Exact on rational terms: the search descends
/// only towards states that can reach a match, level by level.
fn leftmost_outermost(t: &Term, sys: &RuleSystem) -> Option<Redex> {
    let scan = state_scan(t, sys);
    if !scan.reach[scan.graph.root] {
        return None;
    }
    let mut frontier: Vec<(Position, usize)> = vec![(Position::root(), scan.graph.root)];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for (pos, st) in frontier {
            if let Some(&ri) = scan.matching[st].first() {
                let valuation = match_at(sys.rule(ri), t, &pos).expect("state matches");
                return Some(Redex { position: pos, rule_index: ri, valuation });
            }
            for &(step, tgt) in &scan.graph.states[st].children {
                if scan.reach[tgt] {
                    next.push((pos.child(step), tgt));
                }
            }
        }
        frontier = next;
    }
    None
}

/// All outermost redexes up to the depth bound, in (depth, position)
/// order, one per position (first matching rule). The bound is needed
/// because a cycle above a redex spawns outermost redexes at unboundedly
/// many depths.
fn outermost_redexes(t: &Term, sys: &RuleSystem, bound: usize) -> Vec<Redex> {
    let scan = state_scan(t, sys);
    let mut out = Vec::new();
    if !scan.reach[scan.graph.root] {
        return out;
    }
    let mut frontier: Vec<(Position, usize)> = vec![(Position::root(), scan.graph.root)];
    for _ in 0..=bound {
        let mut next = Vec::new();
        for (pos, st) in frontier {
            if let Some(&ri) = scan.matching[st].first() {
                let valuation = match_at(sys.rule(ri), t, &pos).expect("state matches");
                out.push(Redex { position: pos, rule_index: ri, valuation });
                continue;
            }
            for &(step, tgt) in &scan.graph.states[st].children {
                if scan.reach[tgt] {
                    next.push((pos.child(step), tgt));
                }
            }
        }
        frontier = next;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Contract the (depth, position, rule) minimal redex each step.
    LeftmostOutermost,
    /// Round-robin over the outermost redexes by age: the longest-waiting
    /// outermost redex is contracted first. Positions inherit their age
    /// through descendants, so no outermost redex is starved.
    OutermostFair,
}

/// Result of a bounded reduction.
#[derive(Debug, Clone)]
pub struct ReduceOutcome {
    pub reduction: Reduction,
    pub final_term: Term,
    /// Exact: no rule matches anywhere in the final term.
    pub normal_form: bool,
    /// All fuel was spent with the term still reducible.
    pub fuel_exhausted: bool,
    /// Depth below which the suffix of the reduction no longer moved,
    /// capped by the requested depth. On a normal form this is the full
    /// requested depth.
    pub stable_depth: usize,
    /// The final term truncated at `stable_depth`, approximating the limit
    /// of a strongly convergent reduction.
    pub stable_prefix: Term,
}

/// Reduces `s` for up to `fuel` steps under the given strategy and reports
/// the stable prefix up to `depth`. The fair strategy scans for outermost
/// redexes up to depth `depth + fuel + 8`; a term whose only redexes lie
/// deeper is reported as stuck rather than reduced.
pub fn reduce(
    s: &Term,
    sys: &RuleSystem,
    strategy: Strategy,
    fuel: usize,
    depth: usize,
) -> ReduceOutcome {
    let bound = depth + fuel + 8;
    let mut current = s.clone();
    let mut steps: Vec<Step> = Vec::new();
    // Fair bookkeeping: (position, rule, age) of known outermost redexes.
    let mut ages: Vec<(Position, usize, u64)> = Vec::new();
    let mut next_age: u64 = 0;

    while steps.len() < fuel {
        let picked = match strategy {
            Strategy::LeftmostOutermost => leftmost_outermost(&current, sys),
            Strategy::OutermostFair => {
                let outer = outermost_redexes(&current, sys, bound);
                if outer.is_empty() {
                    None
                } else {
                    let mut refreshed = Vec::with_capacity(outer.len());
                    for r in &outer {
                        let known = ages
                            .iter()
                            .find(|(p, ri, _)| p == &r.position && *ri == r.rule_index)
                            .map(|&(_, _, a)| a);
                        let age = match known {
                            Some(a) => a,
                            None => {
                                let a = next_age;
                                next_age += 1;
                                a
                            }
                        };
                        refreshed.push((r.position.clone(), r.rule_index, age));
                    }
                    ages = refreshed;
                    let (pos, ri, _) = ages
                        .iter()
                        .min_by_key(|&&(_, _, a)| a)
                        .expect("nonempty outermost set")
                        .clone();
                    outer
                        .into_iter()
                        .find(|r| r.position == pos && r.rule_index == ri)
                }
            }
        };
        let Some(redex) = picked else { break };
        let step = apply_step(&current, &redex, sys).expect("picked redexes match");
        if matches!(strategy, Strategy::OutermostFair) {
            let mut mapped = Vec::new();
            for (p, ri, age) in &ages {
                if p == &redex.position && *ri == redex.rule_index {
                    continue;
                }
                // A lineage with infinitely many descendants is dropped;
                // the next scan rediscovers its redexes with fresh ages.
                if let Ok(images) = descendants(std::slice::from_ref(p), &step, sys) {
                    for q in images {
                        mapped.push((q, *ri, *age));
                    }
                }
            }
            ages = mapped;
        }
        current = step.target.clone();
        steps.push(step);
    }

    let normal_form = is_normal_form(&current, sys);
    let fuel_exhausted = steps.len() == fuel && !normal_form;
    let stable_depth = if normal_form || steps.is_empty() {
        depth
    } else {
        // The longest suffix that stayed at or below no depth d is the
        // final step alone; its depth caps the claimed stable prefix.
        depth.min(steps.last().expect("nonempty").redex.depth())
    };
    let stable_prefix = truncate(&current, stable_depth);
    ReduceOutcome {
        reduction: Reduction::from_steps(steps).expect("steps chain by construction"),
        final_term: current,
        normal_form,
        fuel_exhausted,
        stable_depth,
        stable_prefix,
    }
}

/// A finite, prefix-closed set of positions.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PrefixSet {
    positions: BTreeSet<Position>,
}

impl PrefixSet {
    pub fn new<I: IntoIterator<Item = Position>>(positions: I) -> PrefixSet {
        let mut s = PrefixSet::default();
        for p in positions {
            s.insert(p);
        }
        s
    }

    /// Inserts the position and every prefix of it.
    pub fn insert(&mut self, p: Position) {
        for k in 0..=p.0.len() {
            self.positions.insert(Position(p.0[..k].to_vec()));
        }
    }

    pub fn contains(&self, p: &Position) -> bool {
        self.positions.contains(p)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Position> {
        self.positions.iter()
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// True if every position of the set exists in both terms and carries the
/// same root label: equal function symbols, equal meta-variable names,
/// matching abstractions, and bound variables with the same tree-level
/// index (the paths cross the same binders, so index equality is exactly
/// correspondence of binders).
pub fn mirrors(t: &Term, s: &Term, prefixes: &PrefixSet) -> bool {
    for p in prefixes.iter() {
        let (Ok(ct), Ok(cs)) = (Cursor::at(t, p), Cursor::at(s, p)) else {
            return false;
        };
        let same = match (ct.node(), cs.node()) {
            (TermNode::Fun(f, _), TermNode::Fun(g, _)) => f == g,
            (TermNode::Meta(m, _), TermNode::Meta(n, _)) => m == n,
            (TermNode::Abs(..), TermNode::Abs(..)) => true,
            (TermNode::Var(i), TermNode::Var(j)) => i == j,
            (TermNode::Free(a), TermNode::Free(b)) => a == b,
            _ => false,
        };
        if !same {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::find_redexes;
    use crate::signature::{Signature, SymbolId, TOP};
    use crate::term::MetaName;
    use crate::valuation::Valuation;

    fn meta(name: &str) -> Term {
        Term::meta(MetaName::new(name), vec![])
    }

    fn meta_app(name: &str, args: Vec<Term>) -> Term {
        Term::meta(MetaName::new(name), args)
    }

    fn redex_at(pos: Vec<usize>, rule_index: usize) -> Redex {
        Redex { position: pos.into(), rule_index, valuation: Valuation::new() }
    }

    /// f/2, h/1, a/0 with the rule f([x]Z(x), Z') -> Z(Z').
    fn beta_like() -> (RuleSystem, SymbolId, SymbolId, SymbolId) {
        let mut sig = Signature::new();
        let f = sig.declare("f", 2).unwrap();
        let h = sig.declare("h", 1).unwrap();
        let a = sig.declare("a", 0).unwrap();
        let rule = Rule::new(
            "beta",
            Term::fun(
                f,
                vec![
                    Term::abs("x", meta_app("Z", vec![Term::var(0)])),
                    meta("Z'"),
                ],
            ),
            meta_app("Z", vec![meta("Z'")]),
        );
        let sys = RuleSystem::new(sig, vec![rule]);
        sys.validate().unwrap();
        (sys, f, h, a)
    }

    /// f/1 with the self-nesting rule f([x]Z(x)) -> Z(f([x]Z(x))).
    fn self_nesting() -> (RuleSystem, SymbolId) {
        let mut sig = Signature::new();
        let f = sig.declare("f", 1).unwrap();
        let lhs = Term::fun(f, vec![Term::abs("x", meta_app("Z", vec![Term::var(0)]))]);
        let rhs = meta_app("Z", vec![lhs.clone()]);
        let sys = RuleSystem::new(sig, vec![Rule::new("nest", lhs, rhs)]);
        sys.validate().unwrap();
        (sys, f)
    }

    /// f/1, plus extra constants, with the collapsing rule f(Z) -> Z.
    fn collapse_f(extra: &[(&str, usize)]) -> (RuleSystem, SymbolId, Vec<SymbolId>) {
        let mut sig = Signature::new();
        let f = sig.declare("f", 1).unwrap();
        let ids = extra.iter().map(|(n, k)| sig.declare(n, *k).unwrap()).collect();
        let rule = Rule::new("col", Term::fun(f, vec![meta("Z")]), meta("Z"));
        let sys = RuleSystem::new(sig, vec![rule]);
        sys.validate().unwrap();
        (sys, f, ids)
    }

    #[test]
    fn worked_example_contracts_to_h_of_a() {
        let (sys, f, h, a) = beta_like();
        let s = Term::fun(
            f,
            vec![Term::abs("x", Term::fun(h, vec![Term::var(0)])), Term::constant(a)],
        );
        let step = apply_step(&s, &redex_at(vec![], 0), &sys).unwrap();
        assert_eq!(step.target, Term::fun(h, vec![Term::constant(a)]));
        assert!(step.flags.collapsing, "the right-hand side is a meta-variable root");
        assert!(step.flags.root_collapsing);
        assert_eq!(step.flags.out_step, None);
    }

    #[test]
    fn self_nesting_rule_steps_at_the_root() {
        let (sys, f) = self_nesting();
        // f([x]f([y]x)) -> f([y]f([x]f([y]x))): the inner binder slides out.
        let s = Term::fun(
            f,
            vec![Term::abs("x", Term::fun(f, vec![Term::abs("y", Term::var(1))]))],
        );
        let step = apply_step(&s, &redex_at(vec![], 0), &sys).unwrap();
        let expect = Term::fun(
            f,
            vec![Term::abs(
                "y",
                Term::fun(
                    f,
                    vec![Term::abs(
                        "x",
                        Term::fun(f, vec![Term::abs("y", Term::var(1))]),
                    )],
                ),
            )],
        );
        assert_eq!(step.target, expect);
        assert!(step.flags.collapsing, "the right-hand side is rooted at Z");
        assert!(step.flags.root_collapsing);
    }

    #[test]
    fn inner_step_rebinds_the_outer_binder() {
        let (sys, f) = self_nesting();
        // The same term stepped inside the abstraction collapses to f([x]x):
        // the meta-variable's substitute is the outer bound variable, which
        // the context captures again after the step.
        let s = Term::fun(
            f,
            vec![Term::abs("x", Term::fun(f, vec![Term::abs("y", Term::var(1))]))],
        );
        let step = apply_step(&s, &redex_at(vec![1, 0], 0), &sys).unwrap();
        assert_eq!(step.target, Term::fun(f, vec![Term::abs("x", Term::var(0))]));
    }

    #[test]
    fn context_capture_follows_the_fixed_representative() {
        // The beta encoding of (\x. (\y.x) z): contracting the inner redex
        // must keep x bound by the outer lambda, yielding \x.x.
        let mut sig = Signature::new();
        let lam = sig.declare("lam", 1).unwrap();
        let app = sig.declare("app", 2).unwrap();
        let z = sig.declare("z", 0).unwrap();
        let rule = Rule::new(
            "beta",
            Term::fun(
                app,
                vec![
                    Term::fun(lam, vec![Term::abs("x", meta_app("Z", vec![Term::var(0)]))]),
                    meta("W"),
                ],
            ),
            meta_app("Z", vec![meta("W")]),
        );
        let sys = RuleSystem::new(sig, vec![rule]);
        sys.validate().unwrap();

        let s = Term::fun(
            lam,
            vec![Term::abs(
                "x",
                Term::fun(
                    app,
                    vec![
                        Term::fun(lam, vec![Term::abs("y", Term::var(1))]),
                        Term::constant(z),
                    ],
                ),
            )],
        );
        let step = apply_step(&s, &redex_at(vec![1, 0], 0), &sys).unwrap();
        assert_eq!(step.target, Term::fun(lam, vec![Term::abs("x", Term::var(0))]));
        assert!(step.flags.collapsing);
        assert!(!step.flags.root_collapsing);
    }

    #[test]
    fn splicing_inside_a_cycle_unfolds_it() {
        let (sys, f, _) = collapse_f(&[]);
        let s = Term::rec("a", Term::fun(f, vec![Term::recref(0)]));
        let step = apply_step(&s, &redex_at(vec![1], 0), &sys).unwrap();
        // One spine unfolding, the contractum re-tied: f(mu r. f(r)).
        let expect = Term::fun(f, vec![Term::rec("r", Term::fun(f, vec![Term::recref(0)]))]);
        assert_eq!(step.target, expect);
        assert!(alpha_eq(&step.target, &s), "the cyclic tower reduces to itself");
        assert!(step.flags.collapsing && !step.flags.root_collapsing);
    }

    #[test]
    fn stale_redexes_are_rejected() {
        let (sys, f, ids) = collapse_f(&[("b", 0)]);
        let s = Term::fun(f, vec![Term::constant(ids[0])]);
        let err = apply_step(&s, &redex_at(vec![1], 0), &sys).unwrap_err();
        assert!(matches!(err, RewriteError::StaleRedex { .. }));
        let err = apply_step(&s, &redex_at(vec![1, 1], 0), &sys).unwrap_err();
        assert!(matches!(err, RewriteError::StaleRedex { .. }));
    }

    #[test]
    fn descendants_of_a_collapsing_step() {
        let (sys, f, ids) = collapse_f(&[("b", 0)]);
        let s = Term::fun(f, vec![Term::constant(ids[0])]);
        let step = apply_step(&s, &redex_at(vec![], 0), &sys).unwrap();
        // The argument slides to the root; the redex root is consumed.
        assert_eq!(
            descendants(&[vec![1].into()], &step, &sys).unwrap(),
            vec![Position::root()]
        );
        assert_eq!(descendants(&[Position::root()], &step, &sys).unwrap(), vec![]);
    }

    #[test]
    fn erased_arguments_leave_no_descendants() {
        // hd(cons(X, XS)) -> X erases XS entirely.
        let mut sig = Signature::new();
        let hd = sig.declare("hd", 1).unwrap();
        let cons = sig.declare("cons", 2).unwrap();
        let a = sig.declare("a", 0).unwrap();
        let b = sig.declare("b", 0).unwrap();
        let rule = Rule::new(
            "hd",
            Term::fun(hd, vec![Term::fun(cons, vec![meta("X"), meta("XS")])]),
            meta("X"),
        );
        let sys = RuleSystem::new(sig, vec![rule]);
        sys.validate().unwrap();
        let s = Term::fun(hd, vec![Term::fun(cons, vec![Term::constant(a), Term::constant(b)])]);
        let step = apply_step(&s, &redex_at(vec![], 0), &sys).unwrap();
        assert_eq!(step.target, Term::constant(a));
        assert_eq!(descendants(&[vec![1, 2].into()], &step, &sys).unwrap(), vec![]);
        assert_eq!(
            descendants(&[vec![1, 1].into()], &step, &sys).unwrap(),
            vec![Position::root()]
        );
        // The pattern positions themselves are consumed.
        assert_eq!(descendants(&[vec![1].into()], &step, &sys).unwrap(), vec![]);
    }

    #[test]
    fn descendants_track_duplication() {
        let mut sig = Signature::new();
        let g = sig.declare("g", 1).unwrap();
        let pair = sig.declare("pair", 2).unwrap();
        let a = sig.declare("a", 0).unwrap();
        let rule = Rule::new(
            "dup",
            Term::fun(g, vec![meta("Z")]),
            Term::fun(pair, vec![meta("Z"), meta("Z")]),
        );
        let sys = RuleSystem::new(sig, vec![rule]);
        sys.validate().unwrap();
        let s = Term::fun(g, vec![Term::fun(g, vec![Term::constant(a)])]);
        let step = apply_step(&s, &redex_at(vec![], 0), &sys).unwrap();
        assert_eq!(
            descendants(&[vec![1].into()], &step, &sys).unwrap(),
            vec![Position(vec![1]), Position(vec![2])]
        );
        assert_eq!(
            descendants(&[vec![1, 1].into()], &step, &sys).unwrap(),
            vec![Position(vec![1, 1]), Position(vec![2, 1])]
        );
    }

    #[test]
    fn residuals_on_the_cyclic_tower() {
        let (sys, f, _) = collapse_f(&[]);
        let s = Term::rec("a", Term::fun(f, vec![Term::recref(0)]));
        let root_step = apply_step(&s, &redex_at(vec![], 0), &sys).unwrap();
        let d = Reduction::single(root_step);
        // The inner redex at 1 descends to the root of the contractum.
        let inner = find_redexes(&s, &sys, 1)
            .into_iter()
            .find(|r| r.position == Position(vec![1]))
            .unwrap();
        let res = residuals(&[inner], &d, &sys).unwrap();
        assert_eq!(res.len(), 1);
        assert_eq!(res[0].position, Position::root());
        assert_eq!(res[0].rule_index, 0);
        // The contracted redex itself has none.
        let root = find_redexes(&s, &sys, 0).remove(0);
        assert!(residuals(&[root], &d, &sys).unwrap().is_empty());
    }

    #[test]
    fn untouched_parallel_redexes_persist() {
        let (sys, f, ids) = collapse_f(&[("pair", 2), ("a", 0)]);
        let (pair, a) = (ids[0], ids[1]);
        let fa = Term::fun(f, vec![Term::constant(a)]);
        let s = Term::fun(pair, vec![fa.clone(), fa]);
        let step = apply_step(&s, &redex_at(vec![1], 0), &sys).unwrap();
        let other = redex_at(vec![2], 0);
        let r = residuals(
            &[Redex {
                position: Position(vec![2]),
                rule_index: 0,
                valuation: match_at(sys.rule(0), &s, &other.position).unwrap(),
            }],
            &Reduction::single(step),
            &sys,
        )
        .unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].position, Position(vec![2]));
    }

    #[test]
    fn develop_contracts_nested_redexes() {
        let (sys, f, ids) = collapse_f(&[("a", 0)]);
        let a = ids[0];
        let s = Term::fun(f, vec![Term::fun(f, vec![Term::constant(a)])]);
        let u = find_redexes(&s, &sys, 2);
        assert_eq!(u.len(), 2);
        let dev = develop(&s, &u, &sys).unwrap();
        assert_eq!(dev.target, Term::constant(a));
        assert_eq!(dev.reduction.len(), 2);
        assert!(residuals(&dev.developed, &dev.reduction, &sys).unwrap().is_empty());
    }

    #[test]
    fn parallel_development_is_order_independent() {
        let mut sig = Signature::new();
        let g = sig.declare("g", 1).unwrap();
        let pair = sig.declare("pair", 2).unwrap();
        let a = sig.declare("a", 0).unwrap();
        let dup = Rule::new(
            "dup",
            Term::fun(g, vec![meta("Z")]),
            Term::fun(pair, vec![meta("Z"), meta("Z")]),
        );
        let sys = RuleSystem::new(sig, vec![dup]);
        sys.validate().unwrap();
        // g(g(a)): developing both redexes in either order ends at
        // pair(pair(a,a), pair(a,a)).
        let s = Term::fun(g, vec![Term::fun(g, vec![Term::constant(a)])]);
        let u = find_redexes(&s, &sys, 1);
        assert_eq!(u.len(), 2);
        let dev = develop(&s, &u, &sys).unwrap();
        let aa = Term::fun(pair, vec![Term::constant(a), Term::constant(a)]);
        assert_eq!(dev.target, Term::fun(pair, vec![aa.clone(), aa]));

        // By hand in the opposite order: inner first, then both copies.
        let inner_first = apply_step(&s, &redex_at(vec![1], 0), &sys).unwrap();
        let after = residuals(
            &[u.iter().find(|r| r.position.is_root()).unwrap().clone()],
            &Reduction::single(inner_first.clone()),
            &sys,
        )
        .unwrap();
        let finish = develop(&inner_first.target, &after, &sys).unwrap();
        assert!(alpha_eq(&finish.target, &dev.target));
    }

    #[test]
    fn projection_closes_the_square() {
        let (sys, f, ids) = collapse_f(&[("pair", 2), ("a", 0), ("b", 0)]);
        let (pair, a, b) = (ids[0], ids[1], ids[2]);
        let s = Term::fun(
            pair,
            vec![
                Term::fun(f, vec![Term::constant(a)]),
                Term::fun(f, vec![Term::constant(b)]),
            ],
        );
        let u = vec![find_redexes(&s, &sys, 1)
            .into_iter()
            .find(|r| r.position == Position(vec![1]))
            .unwrap()];
        let v = find_redexes(&s, &sys, 1)
            .into_iter()
            .find(|r| r.position == Position(vec![2]))
            .unwrap();
        let d = develop(&s, &u, &sys).unwrap();
        let projected = project_over_step(&d, &v, &sys).unwrap();
        // Closing edge: the residuals of v across d, developed from d's end.
        let v_after = residuals(&[v.clone()], &d.reduction, &sys).unwrap();
        let closing = develop(&d.target, &v_after, &sys).unwrap();
        assert!(alpha_eq(&projected.target, &closing.target));
        assert_eq!(
            projected.target,
            Term::fun(pair, vec![Term::constant(a), Term::constant(b)])
        );
    }

    #[test]
    fn tiling_two_finite_reductions_completes() {
        let (sys, f, ids) = collapse_f(&[("pair", 2), ("a", 0), ("b", 0)]);
        let (pair, a, b) = (ids[0], ids[1], ids[2]);
        let s = Term::fun(
            pair,
            vec![
                Term::fun(f, vec![Term::fun(f, vec![Term::constant(a)])]),
                Term::fun(f, vec![Term::constant(b)]),
            ],
        );
        // S: two steps on the left branch; T: one step on the right.
        let s1 = apply_step(&s, &redex_at(vec![1], 0), &sys).unwrap();
        let s2 = apply_step(&s1.target, &redex_at(vec![1], 0), &sys).unwrap();
        let s_red = Reduction::from_steps(vec![s1, s2]).unwrap();
        let t_red = Reduction::single(apply_step(&s, &redex_at(vec![2], 0), &sys).unwrap());

        let diagram = tile(&s_red, &t_red, &sys, 64).unwrap();
        assert_eq!(diagram.status, TilingStatus::Completed);
        let corner = diagram.grid[2][1].as_ref().unwrap();
        assert_eq!(*corner, Term::fun(pair, vec![Term::constant(a), Term::constant(b)]));
        // Both composite borders end in the same term.
        assert!(alpha_eq(
            diagram.grid[2][0].as_ref().unwrap(),
            &s_red.target().cloned().unwrap()
        ));
    }

    #[test]
    fn tiling_reports_divergence_within_budget() {
        let mut sig = Signature::new();
        let g = sig.declare("g", 1).unwrap();
        let pair = sig.declare("pair", 2).unwrap();
        let a = sig.declare("a", 0).unwrap();
        let b = sig.declare("b", 0).unwrap();
        let dup = Rule::new(
            "dup",
            Term::fun(g, vec![meta("Z")]),
            Term::fun(pair, vec![meta("Z"), meta("Z")]),
        );
        let ab = Rule::new("ab", Term::constant(a), Term::constant(b));
        let sys = RuleSystem::new(sig, vec![dup, ab]);
        sys.validate().unwrap();

        // g(g(g(a))): three duplication steps multiply the a-redex into
        // four residuals; developing them needs four steps, which exceeds
        // a budget of three.
        let s = Term::fun(g, vec![Term::fun(g, vec![Term::fun(g, vec![Term::constant(a)])])]);
        let mut cur = s.clone();
        let mut steps = Vec::new();
        for _ in 0..3 {
            let r = find_redexes(&cur, &sys, 8)
                .into_iter()
                .find(|r| r.rule_index == 0)
                .unwrap();
            let st = apply_step(&cur, &r, &sys).unwrap();
            cur = st.target.clone();
            steps.push(st);
        }
        let s_red = Reduction::from_steps(steps).unwrap();
        let a_pos = find_redexes(&s, &sys, 8)
            .into_iter()
            .find(|r| r.rule_index == 1)
            .unwrap();
        let t_red = Reduction::single(apply_step(&s, &a_pos, &sys).unwrap());

        let diagram = tile(&s_red, &t_red, &sys, 3).unwrap();
        assert!(matches!(diagram.status, TilingStatus::Diverged { .. }));
        let ok = tile(&s_red, &t_red, &sys, 64).unwrap();
        assert_eq!(ok.status, TilingStatus::Completed);
    }

    #[test]
    fn reduce_approximates_the_infinite_normal_form() {
        // f([x]g(x)) rewrites to g(g(g(...))) one layer per step.
        let mut sig = Signature::new();
        let f = sig.declare("f", 1).unwrap();
        let g = sig.declare("g", 1).unwrap();
        let lhs = Term::fun(f, vec![Term::abs("x", meta_app("Z", vec![Term::var(0)]))]);
        let rhs = meta_app("Z", vec![lhs.clone()]);
        let sys = RuleSystem::new(sig, vec![Rule::new("nest", lhs, rhs)]);
        sys.validate().unwrap();

        let s = Term::fun(f, vec![Term::abs("x", Term::fun(g, vec![Term::var(0)]))]);
        let out = reduce(&s, &sys, Strategy::LeftmostOutermost, 5, 4);
        assert_eq!(out.reduction.depth_profile(), vec![0, 1, 2, 3, 4]);
        assert_eq!(out.stable_depth, 4);
        let expect = Term::fun(
            g,
            vec![Term::fun(
                g,
                vec![Term::fun(g, vec![Term::fun(g, vec![Term::constant(TOP)])])],
            )],
        );
        assert_eq!(out.stable_prefix, expect);
        assert!(out.fuel_exhausted);
        assert!(!out.normal_form);
    }

    #[test]
    fn root_loops_leave_no_stable_prefix() {
        let (sys, f) = self_nesting();
        let s = Term::fun(f, vec![Term::abs("x", Term::var(0))]);
        let out = reduce(&s, &sys, Strategy::LeftmostOutermost, 5, 4);
        assert_eq!(out.reduction.len(), 5);
        assert!(out.reduction.depth_profile().iter().all(|&d| d == 0));
        assert_eq!(out.stable_depth, 0);
        assert_eq!(out.stable_prefix, Term::constant(TOP));
        assert!(alpha_eq(&out.final_term, &s), "every step reproduces the term");
        assert!(out.fuel_exhausted);
    }

    #[test]
    fn normal_form_input_reduces_trivially() {
        let (sys, _, ids) = collapse_f(&[("a", 0)]);
        let s = Term::constant(ids[0]);
        let out = reduce(&s, &sys, Strategy::LeftmostOutermost, 5, 4);
        assert!(out.reduction.is_empty());
        assert!(out.normal_form);
        assert!(!out.fuel_exhausted);
        assert_eq!(out.stable_depth, 4);
        assert_eq!(out.stable_prefix, s);
    }

    #[test]
    fn normal_form_check_is_exact_on_cycles() {
        let (sys, f, ids) = collapse_f(&[("k", 2), ("c", 0)]);
        let (k, c) = (ids[0], ids[1]);
        // mu p. k(p, c) never contains an f: a normal form despite being
        // infinite.
        let t = Term::rec("p", Term::fun(k, vec![Term::recref(0), Term::constant(c)]));
        assert!(is_normal_form(&t, &sys));
        // Hiding one f inside the cycle is found at any depth.
        let u = Term::rec(
            "p",
            Term::fun(k, vec![Term::fun(f, vec![Term::recref(0)]), Term::constant(c)]),
        );
        assert!(!is_normal_form(&u, &sys));
        let red = leftmost_outermost(&u, &sys).unwrap();
        assert_eq!(red.position, Position(vec![1]));
    }

    #[test]
    fn fair_scheduling_reaches_parallel_redexes() {
        let mut sig = Signature::new();
        let l = sig.declare("l", 0).unwrap();
        let f = sig.declare("f", 1).unwrap();
        let pair = sig.declare("pair", 2).unwrap();
        let a = sig.declare("a", 0).unwrap();
        let looper = Rule::new("loop", Term::constant(l), Term::constant(l));
        let col = Rule::new("col", Term::fun(f, vec![meta("Z")]), meta("Z"));
        let sys = RuleSystem::new(sig, vec![looper, col]);
        sys.validate().unwrap();

        let s = Term::fun(
            pair,
            vec![Term::constant(l), Term::fun(f, vec![Term::constant(a)])],
        );
        // Leftmost-outermost starves the right redex on the left loop.
        let lo = reduce(&s, &sys, Strategy::LeftmostOutermost, 4, 4);
        assert!(alpha_eq(&lo.final_term, &s));
        // The fair strategy alternates by age and contracts it.
        let fair = reduce(&s, &sys, Strategy::OutermostFair, 2, 4);
        let expect = Term::fun(pair, vec![Term::constant(l), Term::constant(a)]);
        assert!(alpha_eq(&fair.final_term, &expect));
    }

    #[test]
    fn mirrors_compares_root_symbols_on_a_prefix_set() {
        let mut sig = Signature::new();
        let f = sig.declare("f", 2).unwrap();
        let a = sig.declare("a", 0).unwrap();
        let b = sig.declare("b", 0).unwrap();
        let t = Term::fun(f, vec![Term::constant(a), Term::constant(a)]);
        let s = Term::fun(f, vec![Term::constant(b), Term::constant(a)]);
        let roots = PrefixSet::new(vec![Position::root()]);
        assert!(mirrors(&t, &s, &roots), "only roots are compared");
        assert!(mirrors(&t, &t, &PrefixSet::new(vec![Position(vec![1]), Position(vec![2])])));
        assert!(!mirrors(&t, &s, &PrefixSet::new(vec![Position(vec![1])])));
        // Positions missing from either term fail the check.
        assert!(!mirrors(&t, &s, &PrefixSet::new(vec![Position(vec![1, 1])])));
        // Prefix closure keeps the root in every set.
        let closed = PrefixSet::new(vec![Position(vec![2, 1])]);
        assert!(closed.contains(&Position::root()));
        assert!(closed.contains(&Position(vec![2])));
        assert_eq!(closed.len(), 3);
    }
}
