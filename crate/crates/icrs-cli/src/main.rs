//! Command-line surface for the rewriting toolkit.
//!
//! Every subcommand loads a rule file, runs one analysis, and prints a
//! report in text or JSON. Exit code 0 means the analysis completed, no
//! matter what it concluded; 1 flags bad input (unreadable file, syntax
//! error, a script that does not apply); 2 flags an internal invariant
//! violation. All output is deterministic for fixed inputs and budgets.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use thiserror::Error;

use icrs::hc::{
    detect_hypercollapsing, hc_equiv_with, join_modulo, HcNormalForm, HcScope, HcVerdict,
    SearchBudget, ThreeValued,
};
use icrs::matching::Redex;
use icrs::parse::{parse_rules, parse_term, ParseError};
use icrs::position::Position;
use icrs::props::{check_nf_properties, PropertyVerdict};
use icrs::rewrite::{apply_step, reduce, Reduction, Step, Strategy};
use icrs::rules::RuleSystem;
use icrs::term::Term;
use icrs::valuation::Valuation;

#[derive(Parser)]
#[command(name = "icrs", version, about = "Rewriting and analysis for cyclic higher-order terms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a rule file and report its structural properties
    Check(CheckArgs),
    /// Reduce a term, printing the trace and the stable prefix
    Reduce(ReduceArgs),
    /// Search for hypercollapsing behaviour of a term
    Hc(TermArgs),
    /// Compare two terms modulo hypercollapsing subterms
    Equiv(EquivArgs),
    /// Search for a join of two reductions modulo hypercollapsing subterms
    Join(JoinArgs),
    /// Check normal-form properties over the graph reachable from seeds
    Props(PropsArgs),
}

#[derive(Args)]
struct Common {
    /// Rule file: `sig f/2 ...` declarations and `name: LHS -> RHS` lines
    #[arg(long)]
    rules: PathBuf,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Step budget for reductions and searches
    #[arg(long, default_value_t = 512)]
    fuel: usize,
    /// Depth bound for matching, truncation and comparison
    #[arg(long, default_value_t = 12)]
    depth: usize,
    /// State budget for graph searches
    #[arg(long, default_value_t = 256)]
    max_states: usize,
    /// Seed for randomized runs; the analyses here are deterministic
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct TermArgs {
    #[command(flatten)]
    common: Common,
    /// The subject term
    #[arg(long)]
    term: String,
}

#[derive(Args)]
struct ReduceArgs {
    #[command(flatten)]
    common: Common,
    /// The subject term
    #[arg(long)]
    term: String,
    /// Redex selection strategy
    #[arg(long, value_enum, default_value_t = StrategyFlag::Lo)]
    strategy: StrategyFlag,
}

#[derive(Args)]
struct EquivArgs {
    #[command(flatten)]
    common: Common,
    /// The two terms to compare (give the flag twice)
    #[arg(long = "term", required = true)]
    terms: Vec<String>,
    /// Let the whole term count as a replaceable subterm
    #[arg(long)]
    whole_term: bool,
}

#[derive(Args)]
struct JoinArgs {
    #[command(flatten)]
    common: Common,
    /// The common source term
    #[arg(long)]
    term: String,
    /// A reduction script: `lo:N`, `fair:N`, or steps `pos:rule; ...`
    /// with positions written `e` or `1 0` (give the flag twice)
    #[arg(long = "script", required = true)]
    scripts: Vec<String>,
    /// Let the whole term count as a replaceable subterm
    #[arg(long)]
    whole_term: bool,
}

#[derive(Args)]
struct PropsArgs {
    #[command(flatten)]
    common: Common,
    /// Seed terms for the reachability graph (repeatable)
    #[arg(long = "term", required = true)]
    terms: Vec<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyFlag {
    /// Leftmost-outermost
    Lo,
    /// Outermost-fair round robin
    Fair,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {err}")]
    Io { path: String, err: std::io::Error },
    #[error("{path}: {err}")]
    Rules { path: String, err: ParseError },
    #[error("term `{text}`: {err}")]
    Term { text: String, err: ParseError },
    #[error("{0}")]
    Input(String),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match catch_unwind(AssertUnwindSafe(|| run(cli))) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {}", e);
            ExitCode::from(1)
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            eprintln!("internal error: {}", msg);
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Check(a) => cmd_check(a),
        Command::Reduce(a) => cmd_reduce(a),
        Command::Hc(a) => cmd_hc(a),
        Command::Equiv(a) => cmd_equiv(a),
        Command::Join(a) => cmd_join(a),
        Command::Props(a) => cmd_props(a),
    }
}

fn load_system(common: &Common) -> Result<RuleSystem, CliError> {
    let path = common.rules.display().to_string();
    let text = std::fs::read_to_string(&common.rules)
        .map_err(|err| CliError::Io { path: path.clone(), err })?;
    parse_rules(&text).map_err(|err| CliError::Rules { path, err })
}

/// Like [`load_system`] but also insists the rules are semantically valid,
/// which every analysis except `check` takes as a precondition.
fn load_valid_system(common: &Common) -> Result<RuleSystem, CliError> {
    let sys = load_system(common)?;
    sys.validate().map_err(|e| {
        CliError::Input(format!("{}: invalid rule system: {}", common.rules.display(), e))
    })?;
    Ok(sys)
}

fn load_term(text: &str, sys: &RuleSystem) -> Result<Term, CliError> {
    parse_term(text, &sys.signature)
        .map_err(|err| CliError::Term { text: text.to_string(), err })
}

fn budget(common: &Common) -> SearchBudget {
    SearchBudget::new(common.fuel, common.depth, common.max_states)
}

fn scope(whole_term: bool) -> HcScope {
    if whole_term {
        HcScope::WholeTerm
    } else {
        HcScope::ProperSubterms
    }
}

fn show(t: &Term, sys: &RuleSystem) -> String {
    t.display(&sys.signature).to_string()
}

fn verdict_name(v: ThreeValued) -> &'static str {
    match v {
        ThreeValued::Yes => "yes",
        ThreeValued::No => "no",
        ThreeValued::Unknown => "unknown",
    }
}

// ---------------------------------------------------------------- traces

fn step_line(i: usize, step: &Step, sys: &RuleSystem) -> String {
    let rule = &sys.rules[step.redex.rule_index].name;
    let mut flags = Vec::new();
    if step.flags.root_collapsing {
        flags.push("root-collapsing");
    } else if step.flags.collapsing {
        flags.push("collapsing");
    }
    match step.flags.out_step {
        Some(true) => flags.push("out"),
        Some(false) => flags.push("in"),
        None => {}
    }
    let suffix =
        if flags.is_empty() { String::new() } else { format!(" [{}]", flags.join(", ")) };
    format!("  {}. {} {}{}", i + 1, step.redex.position, rule, suffix)
}

fn print_trace(label: &str, steps: &[Step], sys: &RuleSystem) {
    if steps.is_empty() {
        println!("{}: empty", label);
        return;
    }
    println!("{}: {} step(s)", label, steps.len());
    for (i, step) in steps.iter().enumerate() {
        println!("{}", step_line(i, step, sys));
    }
}

fn trace_json(steps: &[Step], sys: &RuleSystem) -> serde_json::Value {
    let items: Vec<_> = steps
        .iter()
        .map(|step| {
            json!({
                "position": step.redex.position.to_string(),
                "rule": sys.rules[step.redex.rule_index].name,
                "depth": step.redex.position.depth(),
                "flags": {
                    "collapsing": step.flags.collapsing,
                    "root_collapsing": step.flags.root_collapsing,
                    "out_step": step.flags.out_step,
                },
            })
        })
        .collect();
    serde_json::Value::Array(items)
}

fn positions_json(ps: &BTreeSet<Position>) -> serde_json::Value {
    serde_json::Value::Array(
        ps.iter().map(|p| serde_json::Value::String(p.to_string())).collect(),
    )
}

fn normal_form_json(nf: &HcNormalForm, sys: &RuleSystem) -> serde_json::Value {
    json!({
        "term": show(&nf.term, sys),
        "substituted": positions_json(&nf.substituted_positions),
        "unknown": positions_json(&nf.unknown_positions),
    })
}

// ---------------------------------------------------------------- check

fn cmd_check(args: CheckArgs) -> Result<(), CliError> {
    let sys = load_system(&args.common)?;
    let validity = sys.validate();
    let nonlinear = sys.nonlinear_witnesses();
    let not_extended = sys.fully_extended_witnesses();
    let overlaps = sys.overlap_witnesses();
    let collapsing = sys.collapsing_rules();
    let name = |i: usize| sys.rules[i].name.clone();
    match args.common.format {
        Format::Json => {
            let value = json!({
                "rules": sys.rules.len(),
                "valid": validity.is_ok(),
                "validity_error": validity.as_ref().err().map(|e| e.to_string()),
                "left_linear": nonlinear.is_empty(),
                "nonlinear": nonlinear.iter().map(|(i, m)| json!({
                    "rule": name(*i), "meta": m.to_string(),
                })).collect::<Vec<_>>(),
                "fully_extended": not_extended.is_empty(),
                "not_fully_extended": not_extended.iter().map(|(i, m, p)| json!({
                    "rule": name(*i), "meta": m.to_string(), "position": p.to_string(),
                })).collect::<Vec<_>>(),
                "orthogonal": sys.is_orthogonal(),
                "overlaps": overlaps.iter().map(|(i, j, o)| json!({
                    "rule_a": name(*i), "rule_b": name(*j), "position": o.position.to_string(),
                })).collect::<Vec<_>>(),
                "collapsing": collapsing.iter().map(|&i| name(i)).collect::<Vec<_>>(),
                "almost_non_collapsing": sys.is_almost_non_collapsing(),
            });
            println!("{}", serde_json::to_string_pretty(&value).expect("serializable"));
        }
        Format::Text => {
            println!("rules: {}", sys.rules.len());
            match &validity {
                Ok(()) => println!("valid: yes"),
                Err(e) => println!("valid: no ({})", e),
            }
            println!("left-linear: {}", if nonlinear.is_empty() { "yes" } else { "no" });
            for (i, m) in &nonlinear {
                println!("  witness: rule `{}` repeats {}", name(*i), m);
            }
            println!("fully-extended: {}", if not_extended.is_empty() { "yes" } else { "no" });
            for (i, m, p) in &not_extended {
                println!(
                    "  witness: rule `{}` hides a bound variable from {} at {}",
                    name(*i),
                    m,
                    p
                );
            }
            println!("orthogonal: {}", if sys.is_orthogonal() { "yes" } else { "no" });
            for (i, j, o) in &overlaps {
                println!(
                    "  witness: `{}` and `{}` overlap at {}",
                    name(*i),
                    name(*j),
                    o.position
                );
            }
            if collapsing.is_empty() {
                println!("collapsing rules: none");
            } else {
                let names: Vec<String> = collapsing.iter().map(|&i| name(i)).collect();
                println!("collapsing rules: {}", names.join(", "));
            }
            println!(
                "almost-non-collapsing: {}",
                if sys.is_almost_non_collapsing() { "yes" } else { "no" }
            );
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- reduce

fn cmd_reduce(args: ReduceArgs) -> Result<(), CliError> {
    let sys = load_valid_system(&args.common)?;
    let term = load_term(&args.term, &sys)?;
    let strategy = match args.strategy {
        StrategyFlag::Lo => Strategy::LeftmostOutermost,
        StrategyFlag::Fair => Strategy::OutermostFair,
    };
    let out = reduce(&term, &sys, strategy, args.common.fuel, args.common.depth);
    match args.common.format {
        Format::Json => {
            let value = json!({
                "trace": trace_json(out.reduction.steps(), &sys),
                "final": show(&out.final_term, &sys),
                "normal_form": out.normal_form,
                "fuel_exhausted": out.fuel_exhausted,
                "stable_depth": out.stable_depth,
                "stable_prefix": show(&out.stable_prefix, &sys),
            });
            println!("{}", serde_json::to_string_pretty(&value).expect("serializable"));
        }
        Format::Text => {
            print_trace("trace", out.reduction.steps(), &sys);
            println!("final: {}", show(&out.final_term, &sys));
            println!("normal form: {}", if out.normal_form { "yes" } else { "no" });
            println!("fuel exhausted: {}", if out.fuel_exhausted { "yes" } else { "no" });
            println!("stable depth: {}", out.stable_depth);
            println!("stable prefix: {}", show(&out.stable_prefix, &sys));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- hc

fn cmd_hc(args: TermArgs) -> Result<(), CliError> {
    let sys = load_valid_system(&args.common)?;
    let term = load_term(&args.term, &sys)?;
    let verdict = detect_hypercollapsing(&term, &sys, &budget(&args.common));
    match args.common.format {
        Format::Json => {
            let value = match &verdict {
                HcVerdict::Hypercollapsing(lasso) => json!({
                    "verdict": "hypercollapsing",
                    "lasso": {
                        "stem": trace_json(lasso.stem.steps(), &sys),
                        "cycle": trace_json(lasso.cycle.steps(), &sys),
                    },
                }),
                HcVerdict::NotWithinBounds => json!({ "verdict": "not-within-bounds" }),
                HcVerdict::Unknown => json!({ "verdict": "unknown" }),
            };
            println!("{}", serde_json::to_string_pretty(&value).expect("serializable"));
        }
        Format::Text => match &verdict {
            HcVerdict::Hypercollapsing(lasso) => {
                println!("verdict: hypercollapsing");
                print_trace("stem", lasso.stem.steps(), &sys);
                print_trace("cycle", lasso.cycle.steps(), &sys);
            }
            HcVerdict::NotWithinBounds => println!("verdict: not within bounds"),
            HcVerdict::Unknown => println!("verdict: unknown (budget exhausted)"),
        },
    }
    Ok(())
}

// ---------------------------------------------------------------- equiv

fn cmd_equiv(args: EquivArgs) -> Result<(), CliError> {
    if args.terms.len() != 2 {
        return Err(CliError::Input(format!(
            "equiv needs exactly two --term flags, got {}",
            args.terms.len()
        )));
    }
    let sys = load_valid_system(&args.common)?;
    let left = load_term(&args.terms[0], &sys)?;
    let right = load_term(&args.terms[1], &sys)?;
    let (verdict, evidence) = hc_equiv_with(
        &left,
        &right,
        &sys,
        &budget(&args.common),
        args.common.depth,
        scope(args.whole_term),
    );
    match args.common.format {
        Format::Json => {
            let value = json!({
                "verdict": verdict_name(verdict),
                "depth": evidence.depth,
                "left": normal_form_json(&evidence.left, &sys),
                "right": normal_form_json(&evidence.right, &sys),
            });
            println!("{}", serde_json::to_string_pretty(&value).expect("serializable"));
        }
        Format::Text => {
            println!("verdict: {}", verdict_name(verdict));
            println!("compared to depth {}", evidence.depth);
            println!("left  normal form: {}", show(&evidence.left.term, &sys));
            println!("right normal form: {}", show(&evidence.right.term, &sys));
            for (label, nf) in [("left", &evidence.left), ("right", &evidence.right)] {
                if !nf.unknown_positions.is_empty() {
                    let ps: Vec<String> =
                        nf.unknown_positions.iter().map(|p| p.to_string()).collect();
                    println!("{} undecided at: {}", label, ps.join("; "));
                }
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- join

/// A reduction script: a strategy shorthand or explicit `pos:rule` steps.
enum Script {
    Strategy(Strategy, usize),
    Steps(Vec<(Position, String)>),
}

fn parse_script(text: &str) -> Result<Script, String> {
    let body = text.trim();
    for (prefix, strategy) in
        [("lo:", Strategy::LeftmostOutermost), ("fair:", Strategy::OutermostFair)]
    {
        if let Some(rest) = body.strip_prefix(prefix) {
            let n: usize = rest
                .trim()
                .parse()
                .map_err(|_| format!("invalid step count `{}` in `{}`", rest.trim(), text))?;
            return Ok(Script::Strategy(strategy, n));
        }
    }
    let mut steps = Vec::new();
    for part in body.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let Some((pos_text, rule)) = part.split_once(':') else {
            return Err(format!("expected `position:rule` in `{}`", part));
        };
        let pos_text = pos_text.trim();
        let rule = rule.trim();
        if rule.is_empty() {
            return Err(format!("missing rule name in `{}`", part));
        }
        let position = parse_position(pos_text)
            .ok_or_else(|| format!("invalid position `{}` in `{}`", pos_text, part))?;
        steps.push((position, rule.to_string()));
    }
    if steps.is_empty() {
        return Err(format!("empty script `{}`", text));
    }
    Ok(Script::Steps(steps))
}

/// Positions are written `e` for the root or indices separated by spaces
/// or dots, matching how they are printed.
fn parse_position(text: &str) -> Option<Position> {
    if text == "e" || text == "eps" {
        return Some(Position::from(vec![]));
    }
    let mut indices = Vec::new();
    for tok in text.split(|c: char| c == '.' || c.is_whitespace()) {
        if tok.is_empty() {
            continue;
        }
        indices.push(tok.parse::<usize>().ok()?);
    }
    if indices.is_empty() {
        None
    } else {
        Some(Position::from(indices))
    }
}

fn run_script(
    source: &Term,
    sys: &RuleSystem,
    text: &str,
    common: &Common,
) -> Result<Reduction, CliError> {
    match parse_script(text).map_err(CliError::Input)? {
        Script::Strategy(strategy, n) => {
            Ok(reduce(source, sys, strategy, n, common.depth).reduction)
        }
        Script::Steps(steps) => {
            let mut red = Reduction::empty();
            let mut current = source.clone();
            for (position, rule_name) in steps {
                let rule_index = sys
                    .rules
                    .iter()
                    .position(|r| r.name == rule_name)
                    .ok_or_else(|| {
                        CliError::Input(format!("unknown rule `{}` in script", rule_name))
                    })?;
                let redex =
                    Redex { position: position.clone(), rule_index, valuation: Valuation::new() };
                let step = apply_step(&current, &redex, sys).map_err(|e| {
                    CliError::Input(format!(
                        "script step {}:{} does not apply: {}",
                        position, rule_name, e
                    ))
                })?;
                current = step.target.clone();
                red.push(step).expect("scripted steps chain");
            }
            Ok(red)
        }
    }
}

fn cmd_join(args: JoinArgs) -> Result<(), CliError> {
    if args.scripts.len() != 2 {
        return Err(CliError::Input(format!(
            "join needs exactly two --script flags, got {}",
            args.scripts.len()
        )));
    }
    let sys = load_valid_system(&args.common)?;
    let term = load_term(&args.term, &sys)?;
    let first = run_script(&term, &sys, &args.scripts[0], &args.common)?;
    let second = run_script(&term, &sys, &args.scripts[1], &args.common)?;
    let found = join_modulo(
        &term,
        &first,
        &second,
        &sys,
        &budget(&args.common),
        args.common.depth,
        scope(args.whole_term),
    )
    .map_err(|e| CliError::Input(format!("join search failed: {}", e)))?;
    match args.common.format {
        Format::Json => {
            let value = match &found {
                Some((from_first, from_second, evidence)) => json!({
                    "joined": true,
                    "from_first": trace_json(from_first.steps(), &sys),
                    "from_second": trace_json(from_second.steps(), &sys),
                    "first_end": from_first.target().map(|t| show(t, &sys)),
                    "second_end": from_second.target().map(|t| show(t, &sys)),
                    "modulo": {
                        "depth": evidence.depth,
                        "left": normal_form_json(&evidence.left, &sys),
                        "right": normal_form_json(&evidence.right, &sys),
                    },
                }),
                None => json!({ "joined": false }),
            };
            println!("{}", serde_json::to_string_pretty(&value).expect("serializable"));
        }
        Format::Text => match &found {
            Some((from_first, from_second, evidence)) => {
                println!("joined: yes");
                print_trace("from first", from_first.steps(), &sys);
                print_trace("from second", from_second.steps(), &sys);
                if let Some(t) = from_first.target() {
                    println!("first reaches:  {}", show(t, &sys));
                }
                if let Some(t) = from_second.target() {
                    println!("second reaches: {}", show(t, &sys));
                }
                println!(
                    "equal modulo collapsing subterms at depth {}: {} ~ {}",
                    evidence.depth,
                    show(&evidence.left.term, &sys),
                    show(&evidence.right.term, &sys)
                );
            }
            None => println!("joined: no (within budgets)"),
        },
    }
    Ok(())
}

// ---------------------------------------------------------------- props

fn cmd_props(args: PropsArgs) -> Result<(), CliError> {
    let sys = load_valid_system(&args.common)?;
    let mut seeds = Vec::new();
    for text in &args.terms {
        seeds.push(load_term(text, &sys)?);
    }
    let report = check_nf_properties(&sys, &seeds, &budget(&args.common));
    let render = |verdict: &PropertyVerdict| -> (bool, Vec<String>) {
        match verdict {
            PropertyVerdict::Holds => (true, Vec::new()),
            PropertyVerdict::Fails { witness } => {
                (false, witness.iter().map(|t| show(t, &sys)).collect())
            }
        }
    };
    let (nf, nf_w) = render(&report.nf);
    let (un, un_w) = render(&report.un);
    let (una, una_w) = render(&report.un_arrow);
    match args.common.format {
        Format::Json => {
            let value = json!({
                "states": report.state_count,
                "bounded": report.bounded,
                "nf": { "holds": nf, "witness": nf_w },
                "un": { "holds": un, "witness": un_w },
                "un_arrow": { "holds": una, "witness": una_w },
            });
            println!("{}", serde_json::to_string_pretty(&value).expect("serializable"));
        }
        Format::Text => {
            println!(
                "states explored: {}{}",
                report.state_count,
                if report.bounded { " (bounded)" } else { "" }
            );
            for (label, holds, witness) in
                [("NF", nf, &nf_w), ("UN", un, &un_w), ("UN->", una, &una_w)]
            {
                if holds {
                    println!("{}: holds", label);
                } else {
                    println!("{}: fails", label);
                    for t in witness {
                        println!("  witness: {}", t);
                    }
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scripts_parse_strategies_and_steps() {
        match parse_script("lo:4").unwrap() {
            Script::Strategy(Strategy::LeftmostOutermost, 4) => {}
            _ => panic!("expected a strategy script"),
        }
        match parse_script(" fair:0 ").unwrap() {
            Script::Strategy(Strategy::OutermostFair, 0) => {}
            _ => panic!("expected a strategy script"),
        }
        match parse_script("1 0:peel; e:hd").unwrap() {
            Script::Steps(steps) => {
                assert_eq!(steps.len(), 2);
                assert_eq!(steps[0].0, Position::from(vec![1, 0]));
                assert_eq!(steps[0].1, "peel");
                assert_eq!(steps[1].0, Position::from(vec![]));
            }
            _ => panic!("expected explicit steps"),
        }
        assert_eq!(parse_position("1.0"), Some(Position::from(vec![1, 0])));
        assert!(parse_script("lo:x").is_err());
        assert!(parse_script("nonsense").is_err());
        assert!(parse_script("").is_err());
    }
}
