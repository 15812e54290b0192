//! Command-line front end: argument parsing, command dispatch and report emission.
//!
//! Every command produces a [`Report`] that is rendered as JSON, CSV or text.
//! Exit codes: 0 success, 1 property violation, 2 parse or usage error (including
//! unmet preconditions), 3 exactness degraded under `--strict`.

use std::path::Path;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::classify::{classify_all, is_small, Certificate, Decision};
use crate::corpus::{corpus, curated, Category, DEFAULT_RANDOM_COUNT, DEFAULT_SEED};
use crate::derivation::delta_symbolic_strict;
use crate::dsl::{parse_int_list, parse_set_expr, Diagnostic};
use crate::error::Error;
use crate::group::FiniteGroup;
use crate::ideal::Ideal;
use crate::num::Int;
use crate::oracle::{cross_validate_with_cap, CrossValidation, Severity, DEFAULT_RADIUS_CAP, SCALES};
use crate::symbolic::SymbolicSet;
use crate::theorems::{
    double_exp_bound, exhaustive_finite_validation, lemma_large_verify, lemma_union_decompose_strict, partition_experiment,
    phi_real, phi_with_argmax, random_partition, theorem_nonsmall_pipeline, FiniteValidationConfig, LemmaUnionTrace,
    PartitionReport, PartitionSpec, MAX_DOUBLE_EXP_N,
};
use crate::verify::{delta_window_consistency, verify_certificate, Check, DELTA_CHECK_RADIUS};

/// Environment variable overriding the window radius cap.
pub const BUDGET_ENV: &str = "DELTA_CALC_BUDGET";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DEGRADED: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Emit {
    Json,
    Csv,
    Text,
}

#[derive(Parser, Debug)]
#[command(name = "delta-calc", version, about = "Combinatorial derivation and size notions for subsets of Z")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Ideal: `trivial` (only the empty set) or `fin` (finite sets).
    #[arg(long, global = true)]
    pub ideal: Option<Ideal>,
    /// Output format; defaults to text for `phi` and JSON otherwise.
    #[arg(long, global = true, value_enum)]
    pub emit: Option<Emit>,
    /// Exit with code 3 when a verdict is not exact.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Seed for random partitions, sampled union triples and the random corpus.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Large, thick, prethick, small and Δ-large verdicts with certificates.
    Classify { expr: String },
    /// The derivation Δ_I(A) with its rule trace.
    Delta { expr: String },
    /// From F + A =_I Z to F + Δ_I(A) = Z.
    Lemma3 {
        #[arg(long)]
        set: String,
        #[arg(long)]
        witness: String,
    },
    /// Splits X = A ∪ B with F + X =_I Z into a Δ-cover or a shifted cover by B.
    Lemma4 {
        #[arg(long)]
        x: String,
        #[arg(long)]
        a: String,
        /// Defaults to X \ A.
        #[arg(long)]
        b: Option<String>,
        #[arg(long)]
        f: String,
    },
    /// For a non-small A, an explicit F with F + Δ_I(A ∩ L) = Z.
    ThmSmall {
        #[arg(long)]
        set: String,
    },
    /// Minimum Δ covers for periodic partitions of Z.
    Partition {
        /// Modulus; with `--random`, the largest modulus drawn.
        #[arg(long)]
        p: Option<u64>,
        /// Residue lists separated by `|`, such as `0,1|2,3`.
        #[arg(long, conflicts_with = "random")]
        parts: Option<String>,
        /// Single points moved between parts, such as `5:1,-3:0` (parts count from 1).
        #[arg(long, requires = "parts")]
        perturb: Option<String>,
        /// Number of seeded random partitions.
        #[arg(long, requires = "n")]
        random: Option<usize>,
        /// Number of parts of each random partition.
        #[arg(long)]
        n: Option<usize>,
    },
    /// The bound φ(n) = max over 1 < x ≤ n of (x^(n+1-x) - 1)/(x - 1).
    Phi {
        #[arg(long)]
        n: u32,
    },
    /// Both lemmas over every subset of a small finite group.
    FiniteValidate {
        /// A shipped group (Z1..Z8, S3, D4) or a path to a table file.
        #[arg(long)]
        group: String,
        /// Random decompositions for groups too large to enumerate.
        #[arg(long, default_value_t = FiniteValidationConfig::default().union_samples)]
        samples: usize,
    },
    /// Symbolic verdicts against window trends.
    OracleCheck {
        expr: String,
        #[arg(long, default_value = "1e3,1e4,1e5,1e6")]
        scales: String,
    },
    /// The curated and seeded random corpus through every check.
    Corpus {
        #[arg(long, default_value_t = DEFAULT_RANDOM_COUNT)]
        count: usize,
    },
}

/// Settings shared by every command.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub ideal: Option<Ideal>,
    pub strict: bool,
    pub scales: Vec<Int>,
    pub emit: Option<Emit>,
    pub seed: u64,
    /// Largest window radius any command may materialize.
    pub budget: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { ideal: None, strict: false, scales: SCALES.to_vec(), emit: None, seed: DEFAULT_SEED, budget: DEFAULT_RADIUS_CAP }
    }
}

impl RunConfig {
    fn ideal_or(&self, default: Ideal) -> Ideal {
        self.ideal.unwrap_or(default)
    }
}

/// Rendered result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// What a command found, ready to be rendered in any format.
pub struct Report {
    pub command: &'static str,
    pub exact: bool,
    pub violations: Vec<String>,
    /// Findings worth reporting that do not count as violations.
    pub notes: Vec<String>,
    pub body: Value,
    pub text: String,
    pub table: Table,
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Table {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }
    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
    fn pairs(rows: &[(&str, String)]) -> Table {
        let mut t = Table::new(&["field", "value"]);
        for (k, v) in rows {
            t.push(vec![k.to_string(), v.clone()]);
        }
        t
    }
}

/// A failure before a report could be produced.
#[derive(Clone, Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
    pub diagnostic: Option<Diagnostic>,
    pub detail: Option<Value>,
}

impl CliError {
    fn usage(message: impl Into<String>) -> CliError {
        CliError { code: EXIT_USAGE, message: message.into(), diagnostic: None, detail: None }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        let code = match e {
            Error::Verification(_) => EXIT_VIOLATION,
            Error::UnsupportedExact(_) => EXIT_DEGRADED,
            _ => EXIT_USAGE,
        };
        CliError { code, message: e.to_string(), diagnostic: None, detail: None }
    }
}

fn parse_expr(text: &str) -> Result<SymbolicSet, CliError> {
    let ast = parse_set_expr(text).map_err(|d| CliError {
        code: EXIT_USAGE,
        message: format!("parse error in `{text}`: {d}"),
        diagnostic: Some(d),
        detail: None,
    })?;
    Ok(ast.eval()?)
}

fn parse_list(text: &str) -> Result<Vec<Int>, CliError> {
    parse_int_list(text).map_err(|d| CliError {
        code: EXIT_USAGE,
        message: format!("parse error in `{text}`: {d}"),
        diagnostic: Some(d),
        detail: None,
    })
}

/// Parses scales such as `1e3,1e4,100000`.
pub fn parse_scales(text: &str) -> Result<Vec<Int>, String> {
    text.split(',')
        .map(str::trim)
        .map(|tok| {
            let (mant, exp) = match tok.split_once(['e', 'E']) {
                Some((m, e)) => (m, e.parse::<u32>().map_err(|_| format!("bad exponent in scale `{tok}`"))?),
                None => (tok, 0),
            };
            let m: Int = mant.parse().map_err(|_| format!("bad scale `{tok}`"))?;
            10i128.checked_pow(exp).and_then(|p| m.checked_mul(p)).ok_or_else(|| format!("scale `{tok}` overflows"))
        })
        .collect()
}

/// Reads the window cap from [`BUDGET_ENV`]; accepts the same notation as scales.
pub fn budget_from_env() -> Result<u64, String> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => match parse_scales(&v)?.as_slice() {
            [b] if *b > 0 && *b <= u64::MAX as Int => Ok(*b as u64),
            _ => Err(format!("{BUDGET_ENV} must be one positive integer, got `{v}`")),
        },
        Err(_) => Ok(DEFAULT_RADIUS_CAP),
    }
}

/// Parses `argv` (including the program name), runs the command and renders the report.
pub fn run_command<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let budget = match budget_from_env() {
        Ok(b) => b,
        Err(m) => return Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: format!("error: {m}\n") },
    };
    let config = RunConfig { ideal: cli.ideal, strict: cli.strict, emit: cli.emit, seed: cli.seed.unwrap_or(DEFAULT_SEED), budget, ..RunConfig::default() };
    run_with_config(&cli.command, &config)
}

/// Runs one parsed command under `config`.
pub fn run_with_config(command: &Command, config: &RunConfig) -> Outcome {
    let emit = config.emit.unwrap_or(match command {
        Command::Phi { .. } => Emit::Text,
        _ => Emit::Json,
    });
    let name = command_name(command);
    let default_ideal = match command {
        Command::FiniteValidate { .. } => Ideal::Trivial,
        _ => Ideal::Fin,
    };
    let config = &RunConfig { ideal: Some(config.ideal_or(default_ideal)), ..config.clone() };
    match dispatch(command, config) {
        Ok(report) => render(&report, config, emit),
        Err(err) => render_error(name, &err, config, emit),
    }
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Classify { .. } => "classify",
        Command::Delta { .. } => "delta",
        Command::Lemma3 { .. } => "lemma3",
        Command::Lemma4 { .. } => "lemma4",
        Command::ThmSmall { .. } => "thm-small",
        Command::Partition { .. } => "partition",
        Command::Phi { .. } => "phi",
        Command::FiniteValidate { .. } => "finite-validate",
        Command::OracleCheck { .. } => "oracle-check",
        Command::Corpus { .. } => "corpus",
    }
}

fn dispatch(command: &Command, config: &RunConfig) -> Result<Report, CliError> {
    match command {
        Command::Classify { expr } => cmd_classify(&parse_expr(expr)?, config),
        Command::Delta { expr } => cmd_delta(&parse_expr(expr)?, config),
        Command::Lemma3 { set, witness } => cmd_lemma3(&parse_expr(set)?, &parse_list(witness)?, config),
        Command::Lemma4 { x, a, b, f } => {
            let x = parse_expr(x)?;
            let a = parse_expr(a)?;
            let b = match b {
                Some(b) => parse_expr(b)?,
                None => x.difference(&a),
            };
            cmd_lemma4(&x, &a, &b, &parse_list(f)?, config)
        }
        Command::ThmSmall { set } => cmd_thm_small(&parse_expr(set)?, config),
        Command::Partition { p, parts, perturb, random, n } => cmd_partition(*p, parts.as_deref(), perturb.as_deref(), *random, *n, config),
        Command::Phi { n } => cmd_phi(*n),
        Command::FiniteValidate { group, samples } => cmd_finite_validate(group, *samples, config),
        Command::OracleCheck { expr, scales } => {
            let scales = parse_scales(scales).map_err(CliError::usage)?;
            cmd_oracle(&parse_expr(expr)?, &scales, config)
        }
        Command::Corpus { count } => cmd_corpus(*count, config),
    }
}

fn exit_code(report: &Report, config: &RunConfig) -> i32 {
    if !report.violations.is_empty() {
        EXIT_VIOLATION
    } else if config.strict && !report.exact {
        EXIT_DEGRADED
    } else {
        EXIT_OK
    }
}

fn status(code: i32) -> &'static str {
    match code {
        EXIT_OK => "ok",
        EXIT_VIOLATION => "violation",
        EXIT_DEGRADED => "degraded",
        _ => "error",
    }
}

fn envelope(command: &str, config: &RunConfig, code: i32) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("command".into(), json!(command));
    m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    m.insert("seed".into(), json!(config.seed));
    m.insert("ideal".into(), json!(config.ideal));
    m.insert("strict".into(), json!(config.strict));
    m.insert("budget".into(), json!(config.budget));
    m.insert("status".into(), json!(status(code)));
    m.insert("exit_code".into(), json!(code));
    m
}

fn csv_string(table: &Table) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&table.header).expect("writing to memory");
    for row in &table.rows {
        w.write_record(row).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flushing to memory")).expect("csv output is UTF-8")
}

/// Renders a finished report; the exit code follows from its violations and exactness.
pub fn render(report: &Report, config: &RunConfig, emit: Emit) -> Outcome {
    let code = exit_code(report, config);
    let stdout = match emit {
        Emit::Json => {
            let mut m = envelope(report.command, config, code);
            m.insert("exact".into(), json!(report.exact));
            m.insert("violations".into(), json!(report.violations));
            m.insert("notes".into(), json!(report.notes));
            m.insert("report".into(), report.body.clone());
            serde_json::to_string_pretty(&Value::Object(m)).expect("reports serialize") + "\n"
        }
        Emit::Csv => csv_string(&report.table),
        Emit::Text => {
            let mut s = report.text.clone();
            if !s.ends_with('\n') {
                s.push('\n');
            }
            s
        }
    };
    let mut stderr = String::new();
    if emit != Emit::Json {
        for v in &report.violations {
            stderr += &format!("violation: {v}\n");
        }
        if code == EXIT_DEGRADED {
            stderr += "exactness degraded: some verdicts come from window statistics\n";
        }
    }
    Outcome { code, stdout, stderr }
}

fn render_error(command: &str, err: &CliError, config: &RunConfig, emit: Emit) -> Outcome {
    let stderr = format!("error: {}\n", err.message);
    if emit != Emit::Json {
        return Outcome { code: err.code, stdout: String::new(), stderr };
    }
    let mut m = envelope(command, config, err.code);
    m.insert("error".into(), json!({ "message": err.message, "diagnostic": err.diagnostic, "detail": err.detail }));
    let stdout = serde_json::to_string_pretty(&Value::Object(m)).expect("reports serialize") + "\n";
    Outcome { code: err.code, stdout, stderr }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn check_value(c: &Check) -> Value {
    to_value(c)
}

fn check_label(c: &Check) -> String {
    match c {
        Check::Passed => "passed".into(),
        Check::Failed(m) => format!("failed: {m}"),
        Check::Inconclusive(m) => format!("inconclusive: {m}"),
    }
}

fn certificate_kind(c: &Certificate) -> String {
    to_value(c)["kind"].as_str().unwrap_or("unknown").to_string()
}

fn exactness(exact: bool) -> &'static str {
    if exact {
        "exact"
    } else {
        "window"
    }
}

fn cmd_classify(a: &SymbolicSet, config: &RunConfig) -> Result<Report, CliError> {
    let ideal = config.ideal_or(Ideal::Fin);
    let r = classify_all(a, ideal)?;
    let props: [(&str, &Decision); 5] =
        [("large", &r.large), ("thick", &r.thick), ("prethick", &r.prethick), ("small", &r.small), ("delta_large", &r.delta_large)];
    let mut violations: Vec<String> = r.inconsistencies.iter().map(|s| format!("law violated: {s}")).collect();
    let mut verification = serde_json::Map::new();
    let mut table = Table::new(&["property", "value", "exact", "certificate", "verifier"]);
    let mut text = format!("set: {a}\nideal: {ideal}\n");
    for (name, d) in props {
        let c = verify_certificate(a, ideal, &d.certificate);
        if let Check::Failed(m) = &c {
            violations.push(format!("{name} certificate: {m}"));
        }
        let kind = certificate_kind(&d.certificate);
        text += &format!("{name}: {} [{}, {kind}] verifier {}\n", d.value, exactness(d.exact), check_label(&c));
        table.push(vec![name.into(), d.value.to_string(), d.exact.to_string(), kind, check_label(&c)]);
        verification.insert(name.into(), check_value(&c));
    }
    text += &format!("delta: {} [{}]\n", r.delta, exactness(r.delta_exact));
    let exact = props.iter().all(|(_, d)| d.exact) && r.delta_exact;
    let body = json!({ "classification": to_value(&r), "verification": verification });
    Ok(Report { command: "classify", exact, violations, notes: vec![], body, text, table })
}

fn cmd_delta(a: &SymbolicSet, config: &RunConfig) -> Result<Report, CliError> {
    let ideal = config.ideal_or(Ideal::Fin);
    let d = delta_symbolic_strict(a, ideal, false)?;
    let check = delta_window_consistency(a, ideal, &d.set, DELTA_CHECK_RADIUS);
    let mut violations = Vec::new();
    if let Check::Failed(m) = &check {
        violations.push(format!("window check: {m}"));
    }
    let mut text = format!("Δ_{ideal}({a}) = {}\n[{}] window check {}\n", d.set, exactness(d.exact), check_label(&check));
    let mut table = Table::new(&["left", "right", "rule", "exact", "contribution"]);
    for t in &d.trace {
        text += &format!("  {} × {}: {} -> {}\n", t.left, t.right, t.rule, t.contribution);
        table.push(vec![t.left.clone(), t.right.clone(), t.rule.to_string(), t.exact.to_string(), t.contribution.clone()]);
    }
    let body = json!({
        "set": a, "ideal": ideal, "delta": d.set, "lower": d.lower,
        "exact": d.exact, "trace": d.trace, "window_check": check_value(&check),
    });
    Ok(Report { command: "delta", exact: d.exact, violations, notes: vec![], body, text, table })
}

fn cmd_lemma3(a: &SymbolicSet, f: &[Int], config: &RunConfig) -> Result<Report, CliError> {
    let ideal = config.ideal_or(Ideal::Fin);
    let r = lemma_large_verify(a, f, ideal)?;
    let exact = r.delta_exact && r.cover_exact;
    let text = format!(
        "F = {f:?}\nΔ_{ideal}(A) = {}\nF + Δ = Z: verified [{}], {} residues mod {} with witnesses on both tails, pointwise on ±{}\n",
        r.delta,
        exactness(exact),
        r.residue_witnesses.len(),
        r.period,
        r.window
    );
    let mut table = Table::new(&["residue", "pos_index", "neg_index"]);
    for w in &r.residue_witnesses {
        table.push(vec![w.residue.to_string(), w.pos_index.to_string(), w.neg_index.to_string()]);
    }
    Ok(Report { command: "lemma3", exact, violations: vec![], notes: vec![], body: to_value(&r), text, table })
}

fn cmd_lemma4(x: &SymbolicSet, a: &SymbolicSet, b: &SymbolicSet, f: &[Int], config: &RunConfig) -> Result<Report, CliError> {
    let ideal = config.ideal_or(Ideal::Fin);
    let t = lemma_union_decompose_strict(x, a, b, f, ideal, config.strict)?;
    let mut violations = Vec::new();
    if !t.verified() {
        violations.push("the returned branch did not re-verify".to_string());
    }
    let (exact, text, table) = match &t {
        LemmaUnionTrace::DeltaCover { f, delta, verified } => (
            true,
            format!("branch: F + Δ_{ideal}(A) = Z\nF = {f:?}\nΔ_{ideal}(A) ⊇ {delta}\nverified: {verified}\n"),
            Table::pairs(&[
                ("branch", "delta_cover".into()),
                ("f", format!("{f:?}")),
                ("delta", delta.to_string()),
                ("verified", verified.to_string()),
            ]),
        ),
        LemmaUnionTrace::Shift { g, translates, i1, i2, i1_in_ideal, i2_in_ideal, uncovered, uncovered_in_ideal, surplus_in_ideal, window, verified } => (
            [i1_in_ideal, i2_in_ideal, uncovered_in_ideal, surplus_in_ideal].iter().all(|v| v.exact),
            format!(
                "branch: shift by g = {g}\nT = (F - g) ∪ {{0}} = {translates:?}\nI1 = {i1} (in ideal: {})\nI2 = {i2} (in ideal: {})\n\
                 X \\ (T + B) = {uncovered} (in ideal: {})\n(T + B) \\ X in ideal: {}\nwindow: ±{window}\nverified: {verified}\n",
                i1_in_ideal.value, i2_in_ideal.value, uncovered_in_ideal.value, surplus_in_ideal.value
            ),
            Table::pairs(&[
                ("branch", "shift".into()),
                ("g", g.to_string()),
                ("translates", format!("{translates:?}")),
                ("i1", i1.to_string()),
                ("i2", i2.to_string()),
                ("uncovered", uncovered.to_string()),
                ("verified", verified.to_string()),
            ]),
        ),
    };
    let body = json!({ "x": x, "a": a, "b": b, "f": f, "ideal": ideal, "trace": to_value(&t) });
    Ok(Report { command: "lemma4", exact, violations, notes: vec![], body, text, table })
}

fn cmd_thm_small(a: &SymbolicSet, config: &RunConfig) -> Result<Report, CliError> {
    let ideal = config.ideal_or(Ideal::Fin);
    let small = is_small(a, ideal)?;
    if small.value {
        return Err(CliError {
            code: EXIT_USAGE,
            message: format!("precondition failed: {a} is {ideal}-small"),
            diagnostic: None,
            detail: Some(json!({ "small": to_value(&small) })),
        });
    }
    let r = theorem_nonsmall_pipeline(a, ideal)?;
    let check = verify_certificate(&r.a_cap_l, ideal, &r.witness);
    let mut violations = Vec::new();
    if let Check::Failed(m) = &check {
        violations.push(format!("witness: {m}"));
    }
    let text = format!(
        "A is not {ideal}-small [{}]\nL = {}\nA ∩ L = {}\nF = {:?}\nΔ_{ideal}(A ∩ L) ⊇ {}\nF + Δ = Z verified; Δ(A ∩ L) ⊆ Δ(A) on ±{}\nverifier {}\n",
        exactness(small.exact),
        r.l,
        r.a_cap_l,
        r.f,
        r.delta,
        r.window,
        check_label(&check)
    );
    let table = Table::pairs(&[
        ("l", r.l.to_string()),
        ("a_cap_l", r.a_cap_l.to_string()),
        ("f", format!("{:?}", r.f)),
        ("delta", r.delta.to_string()),
        ("verifier", check_label(&check)),
    ]);
    let body = json!({ "pipeline": to_value(&r), "small": to_value(&small), "verification": check_value(&check) });
    Ok(Report { command: "thm-small", exact: small.exact, violations, notes: vec![], body, text, table })
}

fn parse_moves(text: &str) -> Result<Vec<(Int, usize)>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|tok| {
            let bad = || CliError::usage(format!("bad move `{tok}`, expected point:part"));
            let (x, j) = tok.split_once(':').ok_or_else(bad)?;
            let x: Int = x.trim().parse().map_err(|_| bad())?;
            let j: usize = j.trim().parse().map_err(|_| bad())?;
            if j == 0 {
                return Err(CliError::usage("parts count from 1"));
            }
            Ok((x, j - 1))
        })
        .collect()
}

/// Largest modulus drawn by `partition --random` when `--p` is absent.
pub const DEFAULT_RANDOM_MODULUS: u64 = 12;

fn cmd_partition(
    p: Option<u64>,
    parts: Option<&str>,
    perturb: Option<&str>,
    random: Option<usize>,
    n: Option<usize>,
    config: &RunConfig,
) -> Result<Report, CliError> {
    let ideal = config.ideal_or(Ideal::Fin);
    let specs: Vec<PartitionSpec> = match (parts, random) {
        (Some(text), None) => {
            let p = p.ok_or_else(|| CliError::usage("--parts needs --p"))?;
            let mut s = PartitionSpec::parse_parts(p, text)?;
            if let Some(m) = perturb {
                s = s.with_perturbations(parse_moves(m)?)?;
            }
            vec![s]
        }
        (None, Some(k)) => {
            let n = n.ok_or_else(|| CliError::usage("--random needs --n"))?;
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let p_max = p.unwrap_or(DEFAULT_RANDOM_MODULUS);
            (0..k).map(|_| random_partition(&mut rng, p_max, n)).collect::<crate::Result<_>>()?
        }
        _ => return Err(CliError::usage("give either --parts or --random")),
    };
    let reports: Vec<PartitionReport> = specs.iter().map(|s| partition_experiment(s, ideal)).collect::<crate::Result<_>>()?;
    let mut violations = Vec::new();
    let mut notes = Vec::new();
    let mut table = Table::new(&PartitionReport::CSV_HEADER.split(',').collect::<Vec<_>>());
    let mut text = String::new();
    for r in &reports {
        if r.admissible && !r.leq_phi {
            violations.push(format!("{}: min cover {} exceeds φ({}) = {}", r.spec, r.min_cover, r.n, r.phi_n));
        }
        if !r.leq_n {
            notes.push(format!("{}: min cover {} exceeds n = {}", r.spec, r.min_cover, r.n));
        }
        for row in r.csv_rows() {
            table.push(row.split(',').map(str::to_string).collect());
        }
        text += &format!(
            "{}: best part {} needs {} translates; φ({}) = {}, double exponential bound {}, ≤ n: {}\n",
            r.spec,
            r.best_part + 1,
            r.min_cover,
            r.n,
            r.phi_n,
            r.double_exp,
            r.leq_n
        );
    }
    let admissible = reports.iter().filter(|r| r.admissible).count();
    let leq_phi = reports.iter().filter(|r| r.admissible && r.leq_phi).count();
    let leq_n = reports.iter().filter(|r| r.leq_n).count();
    if reports.len() > 1 {
        text += &format!("runs: {}, admissible: {admissible}, within φ(n): {leq_phi}, within n: {leq_n}\n", reports.len());
    }
    let body = json!({
        "runs": to_value(&reports),
        "summary": { "runs": reports.len(), "admissible": admissible, "leq_phi": leq_phi, "leq_n": leq_n },
    });
    Ok(Report { command: "partition", exact: true, violations, notes, body, text, table })
}

fn cmd_phi(n: u32) -> Result<Report, CliError> {
    let v = phi_with_argmax(n)?;
    let double_exp = if n <= MAX_DOUBLE_EXP_N { double_exp_bound(n).ok().map(|d| d.to_string()) } else { None };
    let real = phi_real(n).ok();
    let table = {
        let mut t = Table::new(&["n", "phi", "argmax", "double_exp"]);
        t.push(vec![n.to_string(), v.value.to_string(), v.argmax.to_string(), double_exp.clone().unwrap_or_default()]);
        t
    };
    let body = json!({ "n": n, "phi": v.value.to_string(), "argmax": v.argmax, "phi_real": real, "double_exp": double_exp });
    Ok(Report { command: "phi", exact: true, violations: vec![], notes: vec![], body, text: v.value.to_string(), table })
}

fn load_group(spec: &str) -> Result<FiniteGroup, CliError> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {spec}: {e}")))?;
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or(spec);
        return Ok(FiniteGroup::parse_table(name, &text)?);
    }
    Ok(FiniteGroup::by_name(spec)?)
}

fn cmd_finite_validate(group: &str, samples: usize, config: &RunConfig) -> Result<Report, CliError> {
    if config.ideal == Some(Ideal::Fin) {
        return Err(CliError::usage("the finite-set ideal is improper on a finite group; use --ideal trivial"));
    }
    let ctx = Arc::new(load_group(group)?);
    let cfg = FiniteValidationConfig { union_samples: samples, seed: config.seed, ..FiniteValidationConfig::default() };
    let r = exhaustive_finite_validation(&ctx, &cfg)?;
    let violations = if r.counterexamples() == 0 {
        vec![]
    } else {
        let mut v = vec![format!("{} counterexamples", r.counterexamples())];
        v.extend(r.examples.iter().cloned());
        v
    };
    let mode = if r.union_exhaustive { "all" } else { "sampled" };
    let text = format!(
        "group {} of order {}\nlarge lemma: {} pairs (A, F), {} counterexamples\n\
         union lemma: {} {mode} triples, {} Δ-cover, {} shift, {} counterexamples\n",
        r.group,
        r.order,
        r.large_pairs,
        r.large_counterexamples,
        r.union_triples,
        r.union_delta_cover,
        r.union_shift,
        r.union_counterexamples
    );
    let table = Table::pairs(&[
        ("group", r.group.clone()),
        ("order", r.order.to_string()),
        ("large_pairs", r.large_pairs.to_string()),
        ("large_counterexamples", r.large_counterexamples.to_string()),
        ("union_triples", r.union_triples.to_string()),
        ("union_exhaustive", r.union_exhaustive.to_string()),
        ("union_counterexamples", r.union_counterexamples.to_string()),
    ]);
    Ok(Report { command: "finite-validate", exact: true, violations, notes: vec![], body: to_value(&r), text, table })
}

fn split_findings(cv: &CrossValidation) -> (Vec<String>, Vec<String>) {
    let fmt = |f: &crate::oracle::Finding| format!("{}: {}", f.property, f.detail);
    let hard = cv.findings.iter().filter(|f| f.severity == Severity::Hard).map(fmt).collect();
    let soft = cv.findings.iter().filter(|f| f.severity == Severity::Soft).map(fmt).collect();
    (hard, soft)
}

fn cmd_oracle(a: &SymbolicSet, scales: &[Int], config: &RunConfig) -> Result<Report, CliError> {
    let ideal = config.ideal_or(Ideal::Fin);
    let cv = cross_validate_with_cap(a, ideal, scales, config.budget)?;
    let (violations, notes) = split_findings(&cv);
    let exact = cv.large.exact && cv.thick.exact && cv.delta.exact;
    let mut table = Table::new(&["property", "verdict", "exact", "trend", "agrees"]);
    let mut text = format!("set: {a}\nideal: {ideal}\nscales: {scales:?}\n");
    for (name, t) in [("large", &cv.large), ("thick", &cv.thick)] {
        text += &format!("{name}: {} [{}] trend {:?} agrees {}\n", t.verdict, exactness(t.exact), t.trend, t.agrees);
        table.push(vec![name.into(), t.verdict.to_string(), t.exact.to_string(), format!("{:?}", t.trend), t.agrees.to_string()]);
    }
    let d = &cv.delta;
    let summary = format!("confirmed {} unconfirmed {} contradicted {}", d.confirmed.len(), d.unconfirmed.len(), d.contradicted.len());
    text += &format!("delta over {} shifts [{}]: {summary}\n", d.checked, exactness(d.exact));
    table.push(vec!["delta".into(), String::new(), d.exact.to_string(), summary, d.contradicted.is_empty().to_string()]);
    for f in &cv.findings {
        let sev = if f.severity == Severity::Hard { "hard" } else { "soft" };
        text += &format!("  {sev} {}: {}\n", f.property, f.detail);
    }
    Ok(Report { command: "oracle-check", exact, violations, notes, body: to_value(&cv), text, table })
}

/// Results for one corpus entry.
#[derive(Clone, Debug, Serialize)]
pub struct CorpusRow {
    pub name: String,
    pub category: Category,
    pub expr: String,
    pub exact: bool,
    pub small: Option<bool>,
    pub delta_large: Option<bool>,
    /// `None` for small sets, where the pipeline does not apply.
    pub pipeline_verified: Option<bool>,
    pub certificate_failures: usize,
    pub inconsistencies: usize,
    pub hard_disagreements: usize,
    pub soft_notes: usize,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CategoryStats {
    pub category: String,
    pub sets: usize,
    pub exact: usize,
    pub non_small: usize,
    pub pipeline_verified: usize,
    pub certificate_failures: usize,
    pub inconsistencies: usize,
    pub hard_disagreements: usize,
    pub soft_notes: usize,
    pub errors: usize,
}

impl CategoryStats {
    fn add(&mut self, r: &CorpusRow) {
        self.sets += 1;
        self.exact += r.exact as usize;
        self.non_small += (r.small == Some(false)) as usize;
        self.pipeline_verified += (r.pipeline_verified == Some(true)) as usize;
        self.certificate_failures += r.certificate_failures;
        self.inconsistencies += r.inconsistencies;
        self.hard_disagreements += r.hard_disagreements;
        self.soft_notes += r.soft_notes;
        self.errors += r.error.is_some() as usize;
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CorpusSummary {
    pub seed: u64,
    pub ideal: Ideal,
    pub curated: usize,
    pub random: usize,
    pub rows: Vec<CorpusRow>,
    /// Per category, followed by the total.
    pub categories: Vec<CategoryStats>,
    pub violations: Vec<String>,
}

fn corpus_row(name: &str, category: Category, expr: &str, ideal: Ideal, config: &RunConfig) -> CorpusRow {
    let mut row = CorpusRow {
        name: name.into(),
        category,
        expr: expr.into(),
        exact: false,
        small: None,
        delta_large: None,
        pipeline_verified: None,
        certificate_failures: 0,
        inconsistencies: 0,
        hard_disagreements: 0,
        soft_notes: 0,
        error: None,
    };
    let run = |row: &mut CorpusRow| -> crate::Result<()> {
        let a = crate::dsl::parse_set(expr)?;
        let r = classify_all(&a, ideal)?;
        let decisions = [&r.large, &r.thick, &r.prethick, &r.small, &r.delta_large];
        row.exact = decisions.iter().all(|d| d.exact) && r.delta_exact;
        row.small = Some(r.small.value);
        row.delta_large = Some(r.delta_large.value);
        row.inconsistencies = r.inconsistencies.len();
        row.certificate_failures = decisions.iter().filter(|d| verify_certificate(&a, ideal, &d.certificate).failed()).count();
        if !r.small.value {
            let ok = match theorem_nonsmall_pipeline(&a, ideal) {
                Ok(p) => !verify_certificate(&p.a_cap_l, ideal, &p.witness).failed(),
                Err(_) => false,
            };
            row.pipeline_verified = Some(ok);
        }
        let cv = cross_validate_with_cap(&a, ideal, &config.scales, config.budget)?;
        row.hard_disagreements = cv.hard_failures();
        row.soft_notes = cv.soft_notes();
        Ok(())
    };
    if let Err(e) = run(&mut row) {
        row.error = Some(e.to_string());
    }
    row
}

/// Runs the curated entries and `random_count` seeded random ones through
/// classification, certificate checks, the non-small pipeline and the oracle.
pub fn run_corpus(config: &RunConfig, random_count: usize) -> CorpusSummary {
    let ideal = config.ideal_or(Ideal::Fin);
    let entries = corpus(config.seed, random_count);
    let rows: Vec<CorpusRow> = entries.iter().map(|e| corpus_row(&e.name, e.category, &e.expr, ideal, config)).collect();
    let mut violations = Vec::new();
    for r in &rows {
        let mut why = Vec::new();
        if let Some(e) = &r.error {
            why.push(format!("error: {e}"));
        }
        if r.pipeline_verified == Some(false) {
            why.push("non-small pipeline failed".into());
        }
        for (n, what) in [
            (r.certificate_failures, "certificate failures"),
            (r.inconsistencies, "law violations"),
            (r.hard_disagreements, "hard oracle disagreements"),
        ] {
            if n > 0 {
                why.push(format!("{n} {what}"));
            }
        }
        if !why.is_empty() {
            violations.push(format!("{} `{}`: {}", r.name, r.expr, why.join("; ")));
        }
    }
    let order = [Category::Finite, Category::Periodic, Category::Blocks, Category::Mixed, Category::Random];
    let mut categories: Vec<CategoryStats> = order
        .iter()
        .map(|&c| {
            let mut s = CategoryStats { category: to_value(&c).as_str().unwrap_or_default().to_string(), ..Default::default() };
            rows.iter().filter(|r| r.category == c).for_each(|r| s.add(r));
            s
        })
        .filter(|s| s.sets > 0)
        .collect();
    let mut total = CategoryStats { category: "total".into(), ..Default::default() };
    rows.iter().for_each(|r| total.add(r));
    categories.push(total);
    CorpusSummary { seed: config.seed, ideal, curated: curated().len(), random: random_count, rows, categories, violations }
}

fn cmd_corpus(count: usize, config: &RunConfig) -> Result<Report, CliError> {
    let s = run_corpus(config, count);
    let mut table = Table::new(&[
        "name",
        "category",
        "expr",
        "exact",
        "small",
        "delta_large",
        "pipeline_verified",
        "certificate_failures",
        "inconsistencies",
        "hard_disagreements",
        "soft_notes",
        "error",
    ]);
    let opt = |v: Option<bool>| v.map(|b| b.to_string()).unwrap_or_default();
    for r in &s.rows {
        table.push(vec![
            r.name.clone(),
            to_value(&r.category).as_str().unwrap_or_default().to_string(),
            r.expr.clone(),
            r.exact.to_string(),
            opt(r.small),
            opt(r.delta_large),
            opt(r.pipeline_verified),
            r.certificate_failures.to_string(),
            r.inconsistencies.to_string(),
            r.hard_disagreements.to_string(),
            r.soft_notes.to_string(),
            r.error.clone().unwrap_or_default(),
        ]);
    }
    let mut text = format!(
        "corpus: {} curated + {} random (seed {}), ideal {}\n{:<10} {:>5} {:>6} {:>10} {:>9} {:>10} {:>6} {:>5} {:>5} {:>7}\n",
        s.curated, s.random, s.seed, s.ideal, "category", "sets", "exact", "non-small", "pipeline", "cert-fail", "laws", "hard", "soft", "errors"
    );
    for c in &s.categories {
        text += &format!(
            "{:<10} {:>5} {:>6} {:>10} {:>9} {:>10} {:>6} {:>5} {:>5} {:>7}\n",
            c.category,
            c.sets,
            c.exact,
            c.non_small,
            c.pipeline_verified,
            c.certificate_failures,
            c.inconsistencies,
            c.hard_disagreements,
            c.soft_notes,
            c.errors
        );
    }
    text += &format!("violations: {}\n", s.violations.len());
    let exact = s.rows.iter().all(|r| r.exact);
    let violations = s.violations.clone();
    let body = json!({
        "seed": s.seed, "ideal": s.ideal, "curated": s.curated, "random": s.random,
        "categories": to_value(&s.categories), "rows": to_value(&s.rows),
    });
    Ok(Report { command: "corpus", exact, violations, notes: vec![], body, text, table })
}
