//! `ptstrace`: evaluate, compare, sample and validate trace measures.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use ptstrace::kernels::ValidationReport;
use ptstrace::model::{equiv_states, Model, State};
use ptstrace::modelio::{self, Diagnostic, ModelDocument};
use ptstrace::montecarlo::{estimate_base, sample_runs, SampleError};
use ptstrace::trace::{TraceError, TraceValue};
use ptstrace::wordspace::{SetExpr, WordError};

const THREADS_ENV: &str = "PTSTRACE_THREADS";

#[derive(Parser, Debug)]
#[command(name = "ptstrace", version, about = "Trace measures of probabilistic transition systems")]
struct Cli {
    /// Print machine-readable JSON instead of a table.
    #[arg(long, global = true)]
    json: bool,
    /// Numeric tolerance for approximate values and equivalence.
    #[arg(long, global = true, default_value_t = 1e-6)]
    tol: f64,
    /// Seed for sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Ignore unknown top-level keys in model files.
    #[arg(long, global = true)]
    lax: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the trace measure of a state on a set.
    Eval(EvalArgs),
    /// Compare the trace measures of two states on all generators up to a depth.
    Equiv(EquivArgs),
    /// Sample runs, optionally estimating the probability of a set.
    Sample(SampleArgs),
    /// Check the mass conditions of a model.
    Validate(ValidateArgs),
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Model file or `builtin:<name>[?T=<n>]`.
    model: String,
    #[arg(long)]
    state: String,
    /// `word:u`, `cone:u`, unions with `+`, `inf:p^(q)`, `A*` or `Aomega`.
    #[arg(long)]
    set: String,
    /// Depth for limits (`A*`, `Aomega`, `inf:`).
    #[arg(long, default_value_t = 30)]
    depth: usize,
}

#[derive(Args, Debug)]
struct EquivArgs {
    model_a: String,
    model_b: String,
    #[arg(long)]
    state_a: String,
    #[arg(long)]
    state_b: String,
    #[arg(long, default_value_t = 5)]
    depth: usize,
}

#[derive(Args, Debug)]
struct SampleArgs {
    model: String,
    #[arg(long)]
    state: String,
    /// Labels per run; ignored when `--set` fixes it.
    #[arg(long, default_value_t = 10)]
    depth: usize,
    /// Number of runs.
    #[arg(short = 'n', long = "runs", default_value_t = 10_000)]
    n: u64,
    /// A `word:` or `cone:` set to estimate.
    #[arg(long)]
    set: Option<String>,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    model: String,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{message}")]
    Model {
        message: String,
        diagnostic: Option<Box<Diagnostic>>,
        report: Option<Box<ValidationReport>>,
    },
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Model { .. } => 2,
            CliError::Numeric(_) => 3,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Model { .. } => "model-invalid",
            CliError::Numeric(_) => "numeric",
        }
    }

    fn model(message: impl Into<String>) -> Self {
        CliError::Model {
            message: message.into(),
            diagnostic: None,
            report: None,
        }
    }

    fn to_json(&self) -> Value {
        let mut e = json!({"class": self.name(), "exitCode": self.exit_code(), "message": self.to_string()});
        if let CliError::Model { diagnostic, report, .. } = self {
            if let Some(d) = diagnostic {
                e["diagnostic"] = json!(d);
            }
            if let Some(r) = report {
                e["report"] = json!(r);
            }
        }
        json!({ "error": e })
    }
}

impl From<WordError> for CliError {
    fn from(e: WordError) -> Self {
        match e {
            WordError::NotAdmissible { .. } | WordError::KindMismatch(..) | WordError::UnrepresentableComplement => {
                CliError::model(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<TraceError> for CliError {
    fn from(e: TraceError) -> Self {
        match e {
            TraceError::Word(w) => w.into(),
            TraceError::BadState(_) => CliError::Usage(e.to_string()),
            TraceError::KindMismatch { .. } | TraceError::AlphabetMismatch | TraceError::UnsupportedKind { .. } => {
                CliError::model(e.to_string())
            }
            TraceError::Numeric { .. } | TraceError::Inconsistent { .. } => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<SampleError> for CliError {
    fn from(e: SampleError) -> Self {
        match e {
            SampleError::Word(w) => w.into(),
            SampleError::Trace(t) => t.into(),
            SampleError::NoRuns => CliError::Usage(e.to_string()),
        }
    }
}

/// A command's result: JSON for `--json`, `(key, value)` rows otherwise.
struct Output {
    json: Value,
    rows: Vec<(String, String)>,
}

impl Output {
    fn new(json: Value) -> Self {
        Output { json, rows: Vec::new() }
    }

    fn row(mut self, key: &str, value: impl ToString) -> Self {
        self.rows.push((key.to_string(), value.to_string()));
        self
    }
}

struct Loaded {
    name: String,
    model: Model,
}

fn load_model(source: &str, lax: bool) -> Result<Loaded, CliError> {
    let doc = match modelio::parse_builtin_ref(source) {
        Some(f) => ModelDocument::builtin(f.map_err(|d| CliError::Usage(format!("{source}: {}", d.message)))?),
        None => {
            let text = std::fs::read_to_string(source).map_err(|e| CliError::Usage(format!("cannot read {source}: {e}")))?;
            modelio::parse(&text, lax).map_err(|d| CliError::Model {
                message: format!("{source}:{d}"),
                diagnostic: Some(Box::new(d)),
                report: None,
            })?
        }
    };
    let model = doc.to_model().map_err(|d| CliError::Model {
        message: format!("{source}: {}", d.message),
        diagnostic: Some(Box::new(d)),
        report: None,
    })?;
    Ok(Loaded {
        name: source.to_string(),
        model,
    })
}

/// Loads a model and refuses it unless it passes validation.
fn load_valid(source: &str, lax: bool) -> Result<Loaded, CliError> {
    let m = load_model(source, lax)?;
    let report = m.model.validate(&m.name);
    if !report.passed {
        let first = report.failures().next().map(|s| format!("state {}: {}", s.state, s.issues.join("; ")));
        return Err(CliError::Model {
            message: format!("{source} is not a valid model ({})", first.unwrap_or_default()),
            diagnostic: None,
            report: Some(Box::new(report)),
        });
    }
    Ok(m)
}

fn value_json(v: &TraceValue) -> Value {
    v.to_json()
}

fn eval(cli: &Cli, a: &EvalArgs) -> Result<Output, CliError> {
    let Loaded { name, model } = load_valid(&a.model, cli.lax)?;
    let x: State = model.parse_state(&a.state)?;
    let expr = model.space().parse_expr(&a.set)?;
    let mut tracer = model.tracer(&x, cli.tol)?;
    let echo = json!({"model": name, "state": a.state, "set": a.set});
    let (result, mut rows) = match &expr {
        SetExpr::Base(s) => {
            let v = tracer.base(s)?;
            (json!({"value": value_json(&v)}), vec![("value", v.to_string())])
        }
        SetExpr::Ring(r) => {
            let v = tracer.ring(r)?;
            (
                json!({"normalized": r.display(model.alphabet()).to_string(), "value": value_json(&v)}),
                vec![("normalized", r.display(model.alphabet()).to_string()), ("value", v.to_string())],
            )
        }
        SetExpr::Infinite(w) => {
            let s = tracer.infinite_singleton(w, a.depth)?;
            let mut j = json!({
                "depth": s.depth,
                "atDepth": value_json(&s.at_depth),
                "nextPeriod": value_json(&s.next_period),
                "value": value_json(&s.value()),
            });
            let mut rows = vec![
                ("value", s.value().to_string()),
                ("cone at depth", s.at_depth.to_string()),
                ("one period later", s.next_period.to_string()),
            ];
            if let Some(l) = &s.limit {
                j["limit"] = value_json(l);
                rows.push(("limit", l.to_string()));
            }
            (j, rows)
        }
        SetExpr::FiniteWords | SetExpr::InfiniteWords => {
            let b = if expr == SetExpr::FiniteWords {
                tracer.finite_words(a.depth)?
            } else {
                tracer.infinite_words(a.depth)?
            };
            let mut j = json!({
                "depth": b.depth,
                "lower": value_json(&b.lower),
                "upper": value_json(&b.upper),
                "value": value_json(&b.value()),
            });
            let mut rows = vec![
                ("value", b.value().to_string()),
                ("lower", b.lower.to_string()),
                ("upper", b.upper.to_string()),
            ];
            if let Some(l) = &b.limit {
                j["limit"] = value_json(l);
                rows.push(("limit", l.to_string()));
            }
            (j, rows)
        }
    };
    let mut out = Output::new(json!({"command": "eval", "query": echo, "result": result}))
        .row("model", &name)
        .row("state", &a.state)
        .row("set", &a.set);
    if !matches!(expr, SetExpr::Base(_) | SetExpr::Ring(_)) {
        out = out.row("depth", a.depth);
    }
    for (k, v) in rows.drain(..) {
        out = out.row(k, v);
    }
    Ok(out)
}

fn equiv(cli: &Cli, a: &EquivArgs) -> Result<Output, CliError> {
    let ma = load_valid(&a.model_a, cli.lax)?;
    let mb = load_valid(&a.model_b, cli.lax)?;
    let xa = ma.model.parse_state(&a.state_a)?;
    let xb = mb.model.parse_state(&a.state_b)?;
    let r = equiv_states(&ma.model, &xa, &mb.model, &xb, a.depth, cli.tol)?;
    let alphabet = ma.model.alphabet();
    let max = r.max.as_ref().map(|w| {
        json!({
            "set": w.set.display(alphabet).to_string(),
            "left": value_json(&w.left),
            "right": value_json(&w.right),
            "difference": w.difference(),
        })
    });
    let witness = r.witness().map(|_| max.clone().unwrap_or(Value::Null));
    let json = json!({
        "command": "equiv",
        "query": {
            "modelA": ma.name, "stateA": a.state_a,
            "modelB": mb.name, "stateB": a.state_b,
            "depth": a.depth, "tol": cli.tol,
        },
        "result": {
            "equivalent": r.equivalent,
            "compared": r.compared,
            "maxDifference": max,
            "witness": witness,
        },
    });
    let mut out = Output::new(json)
        .row("left", format!("{} @ {}", ma.name, a.state_a))
        .row("right", format!("{} @ {}", mb.name, a.state_b))
        .row("depth", a.depth)
        .row("verdict", if r.equivalent { "equivalent" } else { "not equivalent" })
        .row("compared", r.compared);
    if let Some(w) = &r.max {
        let label = if r.equivalent { "max difference" } else { "witness" };
        out = out.row(
            label,
            format!("{}: {} vs {} (|Δ| = {:.3e})", w.set.display(alphabet), w.left, w.right, w.difference()),
        );
    }
    Ok(out)
}

fn sample(cli: &Cli, a: &SampleArgs) -> Result<Output, CliError> {
    let Loaded { name, model } = load_valid(&a.model, cli.lax)?;
    let x = model.parse_state(&a.state)?;
    match &a.set {
        Some(text) => {
            let s = match model.space().parse_expr(text)? {
                SetExpr::Base(s) => s,
                _ => return Err(CliError::Usage(format!("sample estimates `word:` and `cone:` sets, not `{text}`"))),
            };
            let e = estimate_base(&model, &x, &s, a.n, cli.seed)?;
            let exact = model.trace_base(&x, &s, cli.tol)?;
            let inside = e.covers(exact.value(), exact.err_bound());
            let json = json!({
                "command": "sample",
                "query": {"model": name, "state": a.state, "set": text, "n": a.n, "seed": cli.seed},
                "result": {"estimate": e, "analytic": value_json(&exact), "withinInterval": inside},
            });
            Ok(Output::new(json)
                .row("model", &name)
                .row("state", &a.state)
                .row("set", text)
                .row("runs", a.n)
                .row("seed", cli.seed)
                .row("estimate", format!("{:.6} ± {:.6}", e.point_estimate, e.ci95))
                .row("interval", format!("[{:.6}, {:.6}]", e.lower, e.upper))
                .row("analytic", exact)
                .row("within interval", if inside { "yes" } else { "no" }))
        }
        None => {
            let runs = sample_runs(&model, &x, a.depth, a.n, cli.seed)?;
            let mut counts: BTreeMap<(String, String), u64> = BTreeMap::new();
            for r in &runs {
                let status = serde_json::to_value(r.status).expect("status serializes");
                let status = status.as_str().unwrap_or_default().to_string();
                *counts.entry((model.alphabet().format_word(&r.prefix), status)).or_default() += 1;
            }
            let mut outcomes: Vec<_> = counts.into_iter().collect();
            outcomes.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            let json = json!({
                "command": "sample",
                "query": {"model": name, "state": a.state, "depth": a.depth, "n": a.n, "seed": cli.seed},
                "result": {
                    "distinct": outcomes.len(),
                    "outcomes": outcomes.iter().map(|((p, s), c)| json!({"prefix": p, "status": s, "count": c})).collect::<Vec<_>>(),
                },
            });
            let mut out = Output::new(json)
                .row("model", &name)
                .row("state", &a.state)
                .row("depth", a.depth)
                .row("runs", a.n)
                .row("seed", cli.seed)
                .row("distinct", outcomes.len());
            for ((p, s), c) in outcomes.iter().take(20) {
                let p = if p.is_empty() { "ε" } else { p.as_str() };
                out = out.row(&format!("{p} ({s})"), c);
            }
            Ok(out)
        }
    }
}

fn validate(cli: &Cli, a: &ValidateArgs) -> Result<Output, CliError> {
    let m = load_model(&a.model, cli.lax)?;
    let report = m.model.validate(&m.name);
    if !report.passed {
        let n = report.failures().count();
        return Err(CliError::Model {
            message: format!("{}: {n} state(s) violate the mass condition", m.name),
            diagnostic: None,
            report: Some(Box::new(report)),
        });
    }
    let mut out = Output::new(json!({"command": "validate", "query": {"model": m.name}, "result": report}))
        .row("model", &m.name)
        .row("description", m.model.describe())
        .row("kind", &report.kind)
        .row("states checked", report.states.len())
        .row("verdict", "valid");
    if let Some(worst) = report
        .states
        .iter()
        .max_by(|x, y| x.total_mass.partial_cmp(&y.total_mass).unwrap_or(std::cmp::Ordering::Equal))
    {
        out = out.row("max total mass", format!("{} at {}", worst.total_mass, worst.state));
    }
    Ok(out)
}

fn print_rows(rows: &[(String, String)]) {
    let width = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    for (k, v) in rows {
        println!("{k:<width$}  {v}");
    }
}

fn print_failure(e: &CliError, json: bool) {
    if json {
        println!("{}", serde_json::to_string_pretty(&e.to_json()).expect("json serializes"));
        return;
    }
    eprintln!("error: {e}");
    if let CliError::Model { report: Some(r), .. } = e {
        for s in r.failures() {
            eprintln!("  state {}: total mass {} ({})", s.state, s.total_mass, s.issues.join("; "));
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("{THREADS_ENV} must be a non-negative integer, got `{v}`")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    if !(cli.tol.is_finite() && cli.tol > 0.0) {
        return Err(CliError::Usage(format!("--tol must be positive, got {}", cli.tol)));
    }
    configure_threads()?;
    match &cli.command {
        Command::Eval(a) => eval(cli, a),
        Command::Equiv(a) => equiv(cli, a),
        Command::Sample(a) => sample(cli, a),
        Command::Validate(a) => validate(cli, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    match run(&cli) {
        Ok(mut out) => {
            let ms = start.elapsed().as_secs_f64() * 1e3;
            if cli.json {
                out.json["timing"] = json!({ "elapsedMs": ms });
                println!("{}", serde_json::to_string_pretty(&out.json).expect("json serializes"));
            } else {
                out.rows.push(("time".into(), format!("{ms:.1} ms")));
                print_rows(&out.rows);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            print_failure(&e, cli.json);
            ExitCode::from(e.exit_code())
        }
    }
}
