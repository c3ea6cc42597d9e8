use std::fmt::Write as _;
use std::path::Path;

use knowop::dynamics::{verify_learning_claims, LearningReport, RefinementReport};
use knowop::enumeration::{
    sampled_check, universal_check, AxiomSet, CheckConfig, Detail, EnumerationStats, Target,
};
use knowop::formula::{parse_assertion, parse_expr, Assertion, Model, Stage};
use knowop::operator::{
    verify_claim_with, AxiomReport, Claim, ClaimOptions, ClaimReport, TraceEntry,
};
use knowop::{Event, KnowledgeOperator};
use serde::Serialize;

use crate::load::{load_model, load_scenario};

/// A finished command: a document for `--format json`, a text rendering,
/// and whether everything requested held.
pub struct Outcome {
    pub json: serde_json::Value,
    pub text: String,
    pub holds: bool,
}

pub type CmdResult = Result<Outcome, Box<dyn std::error::Error>>;

fn outcome(report: &impl Serialize, text: String, holds: bool) -> CmdResult {
    Ok(Outcome {
        json: serde_json::to_value(report)?,
        text,
        holds,
    })
}

fn entry(name: impl Into<String>, event: Event) -> TraceEntry {
    TraceEntry {
        name: name.into(),
        event,
    }
}

fn omega_trace(k: &KnowledgeOperator, stage: Stage) -> Vec<TraceEntry> {
    let omega = k.space().omega();
    [
        ("K", "{k} Omega"),
        ("~K", "~{k} Omega"),
        ("K~K", "{k} ~{k} Omega"),
    ]
    .into_iter()
    .map(|(word, name)| {
        let event = k.introspect(&omega, word).expect("same space");
        entry(name.replace("{k}", &stage.to_string()), event)
    })
    .collect()
}

#[derive(Serialize)]
struct AssertionResult {
    assertion: String,
    holds: bool,
    witness: Option<String>,
    values: Vec<TraceEntry>,
}

fn parse_assertions(texts: &[String]) -> Result<Vec<Assertion>, String> {
    texts
        .iter()
        .enumerate()
        .map(|(i, t)| parse_assertion(t).map_err(|e| format!("assertion {} {t:?}: {e}", i + 1)))
        .collect()
}

fn evaluate(model: &Model, assertions: &[Assertion]) -> Result<Vec<AssertionResult>, String> {
    assertions
        .iter()
        .map(|a| {
            let verdict = model.eval_assertion(a).map_err(|e| format!("{a}: {e}"))?;
            let sides = match a {
                Assertion::Binary(_, l, r) => vec![l, r],
                Assertion::Unary(_, e) => vec![e],
            };
            let values = sides
                .into_iter()
                .map(|e| {
                    Ok(entry(
                        e.to_string(),
                        model.eval_expr(e).map_err(|err| format!("{e}: {err}"))?,
                    ))
                })
                .collect::<Result<_, String>>()?;
            Ok(AssertionResult {
                assertion: a.to_string(),
                holds: verdict.holds,
                witness: verdict.witness.map(|w| model.space().label(w).to_owned()),
                values,
            })
        })
        .collect()
}

fn render_assertions(out: &mut String, results: &[AssertionResult]) {
    if results.is_empty() {
        return;
    }
    out.push_str("assertions\n");
    for r in results {
        let status = if r.holds { "ok  " } else { "FAIL" };
        let _ = write!(out, "  {status}  {}", r.assertion);
        if let Some(w) = &r.witness {
            let _ = write!(out, "  (witness state {w})");
        }
        out.push('\n');
        if !r.holds {
            for v in &r.values {
                let _ = writeln!(out, "          {} = {}", v.name, v.event);
            }
        }
    }
}

fn render_trace(out: &mut String, indent: &str, trace: &[TraceEntry]) {
    let width = trace.iter().map(|t| t.name.len()).max().unwrap_or(0);
    for t in trace {
        let _ = writeln!(out, "{indent}{:width$} = {}", t.name, t.event);
    }
}

fn axiom_summary(reports: &[AxiomReport]) -> String {
    reports
        .iter()
        .map(|r| {
            if r.holds {
                format!("{} ok", r.axiom.short_name())
            } else {
                format!("{} FAIL ({})", r.axiom.short_name(), r.violations)
            }
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn claim_line(r: &ClaimReport) -> String {
    let name = r.claim.short_name();
    let mut line = if !r.applicable && !r.evaluated {
        let missing: Vec<_> = r.missing_axioms.iter().map(|a| a.short_name()).collect();
        format!("{name}: not applicable (missing {})", missing.join(","))
    } else if r.holds {
        format!("{name}: holds")
    } else {
        format!("{name}: FAILS")
    };
    if !r.applicable && r.evaluated {
        line.push_str(" [forced]");
    }
    if let Some(e) = &r.event {
        let _ = write!(line, " for E = {e}");
    }
    for f in &r.failures {
        let _ = write!(line, "\n      {}", f.condition);
        if let Some(e) = &f.event {
            let _ = write!(line, " at E = {e}");
        }
        if let Some(s) = &f.state {
            let _ = write!(line, ", state {}", s.label);
        }
    }
    line
}

fn resolve_event(model: &Model, text: &str) -> Result<Event, String> {
    if let Some(e) = model.events().get(text.trim()) {
        return Ok(e.clone());
    }
    model
        .space()
        .parse_event(text)
        .map_err(|e| format!("--event {text:?}: {e}"))
}

pub struct CheckArgs<'a> {
    pub model: &'a Path,
    pub assertions: &'a [String],
    pub claims: &'a [Claim],
    pub event: Option<&'a str>,
    pub axioms: AxiomSet,
    pub force: bool,
    pub max_counterexamples: usize,
}

#[derive(Serialize)]
struct OperatorReport {
    stage: Stage,
    axioms: Vec<AxiomReport>,
    required_axioms: AxiomSet,
    required_axioms_hold: bool,
    trace: Vec<TraceEntry>,
    claims: Vec<ClaimReport>,
}

#[derive(Serialize)]
struct CheckReport {
    model: String,
    states: Vec<String>,
    operators: Vec<OperatorReport>,
    assertions: Vec<AssertionResult>,
    holds: bool,
}

pub fn check(args: CheckArgs<'_>) -> CmdResult {
    let loaded = load_model(args.model, args.max_counterexamples)?;
    let model = &loaded.model;
    let texts = if args.assertions.is_empty() {
        &loaded.assertions
    } else {
        args.assertions
    };
    let assertions = parse_assertions(texts)?;
    let event = args.event.map(|t| resolve_event(model, t)).transpose()?;
    if args.claims.contains(&Claim::Eq1) && event.is_none() {
        return Err("claim eq1 needs --event".into());
    }
    let opts = ClaimOptions {
        forced: args.force,
        max_counterexamples: args.max_counterexamples,
    };

    let mut operators = Vec::new();
    for (stage, k) in model.operators() {
        let axioms = loaded.axioms[stage].clone();
        let required_axioms_hold = axioms
            .iter()
            .all(|r| r.holds || !args.axioms.contains(r.axiom));
        let claims = args
            .claims
            .iter()
            .map(|&c| verify_claim_with(k, c, event.as_ref(), &opts))
            .collect::<Result<Vec<_>, _>>()?;
        operators.push(OperatorReport {
            stage: *stage,
            axioms,
            required_axioms: args.axioms,
            required_axioms_hold,
            trace: omega_trace(k, *stage),
            claims,
        });
    }
    let results = evaluate(model, &assertions)?;
    let holds = results.iter().all(|r| r.holds)
        && operators
            .iter()
            .all(|o| o.required_axioms_hold && o.claims.iter().all(|c| c.holds || !c.evaluated));

    let space = model.space();
    let mut text = format!(
        "model {} ({} states: {})\n",
        args.model.display(),
        space.len(),
        space.labels().join(", ")
    );
    for o in &operators {
        let _ = writeln!(text, "operator {}", o.stage);
        let _ = writeln!(text, "  axioms: {}", axiom_summary(&o.axioms));
        if !o.required_axioms_hold {
            let _ = writeln!(
                text,
                "  required axioms {} do not all hold",
                o.required_axioms
            );
        }
        render_trace(&mut text, "  ", &o.trace);
        for c in &o.claims {
            let _ = writeln!(text, "  {}", claim_line(c));
        }
    }
    render_assertions(&mut text, &results);
    let _ = writeln!(
        text,
        "result: {}",
        if holds { "all checks hold" } else { "FAILED" }
    );

    let report = CheckReport {
        model: args.model.display().to_string(),
        states: space.labels().to_vec(),
        operators,
        assertions: results,
        holds,
    };
    outcome(&report, text, holds)
}

#[derive(Serialize)]
struct EvalReport {
    expression: String,
    value: Event,
}

pub fn eval(model_path: &Path, text: &str, max_counterexamples: usize) -> CmdResult {
    let loaded = load_model(model_path, max_counterexamples)?;
    let model = &loaded.model;
    match parse_expr(text) {
        Ok(expr) => {
            let value = model.eval_expr(&expr)?;
            let rendered = format!("{expr} = {value}\n");
            let report = EvalReport {
                expression: expr.to_string(),
                value,
            };
            outcome(&report, rendered, true)
        }
        Err(expr_err) => {
            let Ok(assertion) = parse_assertion(text) else {
                return Err(format!("{text:?}: {expr_err}").into());
            };
            let results = evaluate(model, std::slice::from_ref(&assertion))?;
            let holds = results[0].holds;
            let mut rendered = String::new();
            render_assertions(&mut rendered, &results);
            outcome(&results[0], rendered, holds)
        }
    }
}

pub struct EnumerateArgs<'a> {
    pub states: usize,
    pub axioms: AxiomSet,
    pub targets: &'a [Target],
    pub count_only: bool,
    pub allow_large: bool,
    pub samples: Option<u64>,
    pub serial: bool,
    pub seed: u64,
    pub max_counterexamples: usize,
}

fn render_operator(k: &KnowledgeOperator) -> String {
    let images: Vec<String> = k.images().iter().map(ToString::to_string).collect();
    format!("[{}]", images.join(", "))
}

pub fn enumerate(args: EnumerateArgs<'_>) -> CmdResult {
    let mut stats: EnumerationStats = match args.samples {
        Some(samples) => {
            if args.axioms != AxiomSet::truth_monotone() {
                return Err(
                    "--samples draws truthful monotone operators; use --axioms truth,mono".into(),
                );
            }
            sampled_check(
                args.states,
                samples,
                args.seed,
                args.targets,
                args.max_counterexamples,
            )?
        }
        None => universal_check(&CheckConfig {
            max_counterexamples: args.max_counterexamples,
            allow_large: args.allow_large,
            parallel: !args.serial,
            ..CheckConfig::new(args.states, args.axioms, args.targets.to_vec())
        })
        .map_err(|e| match e {
            knowop::Error::TooManyStates { .. } if !args.allow_large && args.states == 3 => {
                format!("{e}; pass --override-large to search all tables at 3 states")
            }
            e => e.to_string(),
        })?,
    };
    if args.count_only {
        for t in &mut stats.targets {
            t.counterexamples.clear();
        }
    }
    let holds = stats
        .targets
        .iter()
        .all(|t| t.fail == 0 && t.not_applicable_fail == 0);

    let mut text = format!(
        "{} states, axioms {}, {} operators ({})\n",
        stats.states, stats.axioms, stats.operator_count, stats.source
    );
    for t in &stats.targets {
        let _ = write!(
            text,
            "{}: {} operators, {} pass, {} fail",
            t.target,
            t.total(),
            t.pass,
            t.fail
        );
        if t.not_applicable > 0 {
            let _ = write!(
                text,
                ", {} not applicable ({} of them violate it)",
                t.not_applicable, t.not_applicable_fail
            );
        }
        text.push('\n');
        for c in &t.counterexamples {
            let kind = if c.applicable {
                "counterexample"
            } else {
                "hypotheses fail"
            };
            let _ = writeln!(text, "  {kind}: {}", render_operator(&c.operator));
            match &c.detail {
                Detail::Claim(r) => {
                    render_trace(&mut text, "      ", &r.trace);
                    if let Some(f) = r.failures.first() {
                        let _ = writeln!(text, "      fails: {}", f.condition);
                    }
                }
                Detail::Axiom(r) => {
                    if let Some(v) = r.counterexamples.first() {
                        let _ = writeln!(text, "      {} not within {}", v.lhs, v.rhs);
                    }
                }
            }
        }
    }

    #[derive(Serialize)]
    struct Report<'a> {
        #[serde(flatten)]
        stats: &'a EnumerationStats,
        seed: Option<u64>,
        holds: bool,
    }
    let report = Report {
        stats: &stats,
        seed: args.samples.map(|_| args.seed),
        holds,
    };
    outcome(&report, text, holds)
}

#[derive(Serialize)]
struct StageReport {
    stage: Stage,
    table: KnowledgeOperator,
    trace: Vec<TraceEntry>,
}

#[derive(Serialize)]
struct TransitionReport {
    from: Stage,
    to: Stage,
    learning: Vec<LearningReport>,
}

#[derive(Serialize)]
struct SimulateReport {
    scenario: String,
    states: Vec<String>,
    stages: Vec<StageReport>,
    refinement: RefinementReport,
    transitions: Vec<TransitionReport>,
    assertions: Vec<AssertionResult>,
    holds: bool,
}

fn stage(i: usize) -> Stage {
    Stage::Index(i as u8)
}

pub fn simulate(path: &Path, overrides: &[String], max_counterexamples: usize) -> CmdResult {
    let loaded = load_scenario(path)?;
    let scenario = &loaded.scenario;
    let mut model = scenario.model();
    for (name, event) in &loaded.events {
        model.define_event(name, event.clone())?;
    }
    let texts = if overrides.is_empty() {
        &loaded.assertions
    } else {
        overrides
    };
    let assertions = parse_assertions(texts)?;
    let results = evaluate(&model, &assertions)?;
    let refinement =
        knowop::dynamics::validate_refinement_capped(scenario.stages(), max_counterexamples)?;

    let stages: Vec<StageReport> = scenario
        .stages()
        .iter()
        .enumerate()
        .map(|(i, k)| StageReport {
            stage: stage(i),
            table: k.clone(),
            trace: omega_trace(k, stage(i)),
        })
        .collect();
    let mut transitions = Vec::new();
    for (s, pair) in scenario.stages().windows(2).enumerate() {
        let learning = scenario
            .facts(s)
            .iter()
            .map(|f| verify_learning_claims(&pair[0], &pair[1], f.event()))
            .collect::<Result<Vec<_>, _>>()?;
        transitions.push(TransitionReport {
            from: stage(s),
            to: stage(s + 1),
            learning,
        });
    }
    let holds = refinement.valid
        && results.iter().all(|r| r.holds)
        && transitions
            .iter()
            .flat_map(|t| &t.learning)
            .all(|l| !l.applicable || l.holds);

    let mut text = format!("scenario {} ({} stages)\n", path.display(), stages.len());
    for s in &stages {
        let _ = writeln!(text, "stage {}", s.stage);
        render_trace(&mut text, "  ", &s.trace);
    }
    let _ = writeln!(
        text,
        "refinement: {}",
        if refinement.valid {
            "valid"
        } else {
            "VIOLATED"
        }
    );
    for t in &transitions {
        for l in &t.learning {
            let _ = write!(
                text,
                "learning {} -> {} with E = {}: ",
                t.from, t.to, l.event
            );
            if !l.applicable {
                let _ = writeln!(
                    text,
                    "not applicable ({})",
                    l.not_applicable_because.join("; ")
                );
                continue;
            }
            let _ = writeln!(
                text,
                "{}",
                if l.holds { "all claims hold" } else { "FAILED" }
            );
            for c in &l.claims {
                let _ = writeln!(
                    text,
                    "  {}  {}",
                    if c.holds { "ok  " } else { "FAIL" },
                    c.statement
                );
            }
            render_trace(&mut text, "    ", &l.trace);
        }
    }
    render_assertions(&mut text, &results);
    let _ = writeln!(
        text,
        "result: {}",
        if holds { "all checks hold" } else { "FAILED" }
    );

    let report = SimulateReport {
        scenario: path.display().to_string(),
        states: model.space().labels().to_vec(),
        stages,
        refinement,
        transitions,
        assertions: results,
        holds,
    };
    outcome(&report, text, holds)
}
