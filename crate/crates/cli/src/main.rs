//! `qentangle`: batch front end for structure analysis, separability
//! distances, distinguisher certification, descriptive-complexity estimates
//! and the property suites.
//!
//! Exit status: 0 success, 1 invalid input, 2 capability limit, 3 a verify
//! suite failed.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qentangle::circuit::{EnsembleSpec, ENCODING_VERSION, GATE_SET_ID};
use qentangle::descriptive::{qca_with, sqcd_with, trivial_upper_bound, ComplexityEstimate, SearchOptions};
use qentangle::distinguish::{worst_case_advantage, AdvantageOptions, DistinguisherSpec};
use qentangle::io::{read_circuit, read_state, PartitionJson, StateJson};
use qentangle::qstate::{average_entropy, Qustring};
use qentangle::rng::DEFAULT_SEED;
use qentangle::separability::{
    classify_closeness, entropy_gap_check, finest_factorization, sdis_with, SdisOptions,
};
use qentangle::verify::{run_suites, suite_names};
use qentangle::{Error, TOOL_VERSION};
use serde_json::{json, Value};

const THREADS_ENV: &str = "QENTANGLE_THREADS";

#[derive(Parser, Debug)]
#[command(name = "qentangle", version = TOOL_VERSION, about = "Multipartite entanglement measures on small qubit registers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Separability index, finest factorization, average entropy and sdis.
    Analyze(TargetArgs),
    /// k-separability distance, for one k or every k from 2 to n.
    Sdis(TargetArgs),
    /// Certify the worst-case advantage of a distinguisher for the target.
    Distinguish(TargetArgs),
    /// Size-bounded approximating and distinguishing complexities.
    Complexity(TargetArgs),
    /// Run the named property suites.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Base seed of every randomized search.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Random restarts per partition.
    #[arg(long)]
    restarts: Option<usize>,
    /// Worker threads (default: $QENTANGLE_THREADS, else all cores).
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report into this directory instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TargetArgs {
    /// Built-in family: ghz, pairwise, w, basis, phase.
    #[arg(long, conflicts_with = "state", requires = "n")]
    ensemble: Option<String>,
    /// Ensemble index.
    #[arg(long)]
    n: Option<usize>,
    /// State JSON file: {"n": .., "amplitudes": [[re, im], ..]}.
    #[arg(long)]
    state: Option<PathBuf>,
    /// Circuit JSON file, used as the distinguisher.
    #[arg(long)]
    circuit: Option<PathBuf>,
    /// Number of blocks.
    #[arg(long)]
    k: Option<usize>,
    /// Closeness threshold for sdis.
    #[arg(long)]
    delta: Option<f64>,
    /// Largest gate count searched by `complexity`.
    #[arg(long, default_value_t = 2)]
    size_bound: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Suite name or `all`.
    #[arg(long, default_value = "all")]
    suite: String,
    #[command(flatten)]
    common: Common,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
    Table,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Table => "txt",
        }
    }
}

/// A command's output: the full JSON body plus a flat row view for CSV and
/// table rendering.
struct Report {
    result: Value,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    /// Set when a verify suite failed.
    failed: bool,
}

enum Failure {
    Invalid(String),
    Capability(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Capability(_) => Failure::Capability(e.to_string()),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

type Outcome<T> = Result<T, Failure>;

struct Target {
    state: Qustring,
    source: Value,
    ensemble: Option<EnsembleSpec>,
    index: Option<usize>,
}

fn load_target(a: &TargetArgs) -> Outcome<Target> {
    match (&a.ensemble, &a.state) {
        (Some(name), None) => {
            let spec = EnsembleSpec::named(name)?;
            let n = a.n.ok_or_else(|| Failure::Invalid("--ensemble needs --n".into()))?;
            let state = spec.state(n)?;
            let source = json!({"ensemble": spec.name, "n": n, "length": state.n()});
            Ok(Target { state, source, ensemble: Some(spec), index: Some(n) })
        }
        (None, Some(path)) => {
            let loaded = read_state(path).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?;
            let source = json!({
                "state": path.display().to_string(),
                "length": loaded.state.n(),
                "input_norm": loaded.input_norm,
                "renormalized": loaded.renormalized,
            });
            Ok(Target { state: loaded.state, source, ensemble: None, index: None })
        }
        _ => Err(Failure::Invalid("give exactly one of --ensemble (with --n) or --state".into())),
    }
}

fn sdis_options(c: &Common) -> SdisOptions {
    let o = SdisOptions::default().with_seed(c.seed);
    match c.restarts {
        Some(r) => o.with_restarts(r),
        None => o,
    }
}

fn advantage_options(c: &Common) -> AdvantageOptions {
    let o = AdvantageOptions::default().with_seed(c.seed);
    match c.restarts {
        Some(r) => o.with_restarts(r),
        None => o,
    }
}

fn check_k(k: usize, n: usize) -> Outcome<usize> {
    if k == 0 || k > n {
        return Err(Failure::Invalid(format!("k = {k} outside 1..={n}")));
    }
    Ok(k)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn blocks(p: &qentangle::separability::BlockPartition) -> String {
    p.to_string()
}

fn analyze(a: &TargetArgs) -> Outcome<Report> {
    let t = load_target(a)?;
    let n = t.state.n();
    let opts = sdis_options(&a.common);
    let f = finest_factorization(&t.state)?;
    let entropy = average_entropy(&t.state)?;
    let k = check_k(a.k.unwrap_or(2.min(n)), n)?;
    let s = sdis_with(&t.state, k, &opts)?;
    let gap = entropy_gap_check(&t.state, k, &opts)?;
    let result = json!({
        "target": t.source,
        "sind": f.sind,
        "finest_partition": PartitionJson::from(&f.finest_partition),
        "borderline": f.borderline,
        "average_entropy": entropy,
        "k": k,
        "sdis": s.value,
        "sdis_partition": PartitionJson::from(&s.partition),
        "sdis_converged": s.converged,
        "entropy_gap": gap,
        "restarts": opts.restarts,
    });
    let rows = vec![vec![
        n.to_string(),
        f.sind.to_string(),
        blocks(&f.finest_partition),
        entropy.to_string(),
        k.to_string(),
        s.value.to_string(),
        blocks(&s.partition),
        s.converged.to_string(),
    ]];
    Ok(Report {
        result,
        header: vec!["n", "sind", "finest_partition", "average_entropy", "k", "sdis", "sdis_partition", "converged"],
        rows,
        failed: false,
    })
}

fn sdis_cmd(a: &TargetArgs) -> Outcome<Report> {
    let t = load_target(a)?;
    let n = t.state.n();
    let opts = sdis_options(&a.common);
    let ks: Vec<usize> = match a.k {
        Some(k) => vec![check_k(k, n)?],
        None => (2..=n).collect(),
    };
    if ks.is_empty() {
        return Err(Failure::Invalid("a single qubit has no k ≥ 2; pass --k 1".into()));
    }
    let mut entries = Vec::new();
    let mut rows = Vec::new();
    for k in ks {
        let s = sdis_with(&t.state, k, &opts)?;
        let close = a.delta.map(|d| classify_closeness(&t.state, k, d, &opts)).transpose()?;
        rows.push(vec![
            k.to_string(),
            s.value.to_string(),
            s.overlap.to_string(),
            blocks(&s.partition),
            s.converged.to_string(),
            s.partitions_checked.to_string(),
            close.as_ref().map(|c| serde_json::to_value(c.class).unwrap().as_str().unwrap().to_string()).unwrap_or_default(),
        ]);
        entries.push(json!({
            "k": k,
            "sdis": s.value,
            "overlap": s.overlap,
            "partition": PartitionJson::from(&s.partition),
            "nearest": StateJson::from(&s.nearest),
            "converged": s.converged,
            "partitions_checked": s.partitions_checked,
            "closeness": close,
        }));
    }
    Ok(Report {
        result: json!({"target": t.source, "restarts": opts.restarts, "sdis": entries}),
        header: vec!["k", "sdis", "overlap", "partition", "converged", "partitions_checked", "closeness"],
        rows,
        failed: false,
    })
}

fn distinguish(a: &TargetArgs) -> Outcome<Report> {
    let t = load_target(a)?;
    let n = t.state.n();
    let k = check_k(a.k.unwrap_or(2.min(n)), n)?;
    let (d, kind) = match (&a.circuit, &t.ensemble) {
        (Some(path), _) => {
            let c = read_circuit(path).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?;
            (DistinguisherSpec::plain(c, n, k)?, "circuit")
        }
        (None, Some(spec)) => {
            let ctor = spec
                .constructor(t.index.expect("ensemble index"))
                .ok_or_else(|| Failure::Invalid(format!("ensemble {} has no constructor; pass --circuit", spec.name)))??;
            (qentangle::distinguish::build_reversal_distinguisher(&ctor.circuit)?.with_k(k)?, "reversal")
        }
        (None, None) => return Err(Failure::Invalid("--state needs --circuit".into())),
    };
    let opts = advantage_options(&a.common);
    let r = worst_case_advantage(&d, &t.state, &opts)?;
    let s = sdis_with(&t.state, k, &sdis_options(&a.common))?;
    let branches: Vec<Value> = r
        .branches
        .iter()
        .map(|b| {
            json!({
                "partition": PartitionJson::from(&b.partition),
                "p_min": b.p_min,
                "p_max": b.p_max,
                "epsilon": b.epsilon,
                "converged": b.converged,
            })
        })
        .collect();
    let rows = r
        .branches
        .iter()
        .map(|b| {
            vec![
                blocks(&b.partition),
                r.p_target.to_string(),
                b.p_min.to_string(),
                b.p_max.to_string(),
                b.epsilon.to_string(),
                b.converged.to_string(),
            ]
        })
        .collect();
    let result = json!({
        "target": t.source,
        "distinguisher": kind,
        "size": d.size(),
        "k": k,
        "p_target": r.p_target,
        "epsilon_star": r.epsilon_star,
        "worst_partition": PartitionJson::from(&r.worst_partition),
        "worst_state": StateJson::from(&r.worst_state),
        "converged": r.converged,
        "sdis": s.value,
        "sdis_squared": s.value * s.value,
        "restarts": r.restarts,
        "branches": branches,
    });
    Ok(Report {
        result,
        header: vec!["partition", "p_target", "p_min", "p_max", "epsilon", "converged"],
        rows,
        failed: false,
    })
}

fn estimate_json(e: Result<ComplexityEstimate, Error>) -> Outcome<(Value, Option<f64>)> {
    match e {
        Ok(e) => {
            let v = e.value;
            Ok((json!({"status": "defined", "estimate": e}), Some(v)))
        }
        Err(Error::Undefined(reason)) => Ok((json!({"status": "undefined", "reason": reason}), None)),
        Err(other) => Err(other.into()),
    }
}

fn complexity(a: &TargetArgs) -> Outcome<Report> {
    let t = load_target(a)?;
    let n = t.state.n();
    let k = check_k(a.k.unwrap_or(2.min(n)), n)?;
    let mut search = SearchOptions::default();
    search.advantage = search.advantage.with_seed(a.common.seed);
    if let Some(r) = a.common.restarts {
        search.advantage = search.advantage.with_restarts(r);
    }
    let (qca_v, qca) = estimate_json(qca_with(&t.state, a.size_bound, &search))?;
    let (sqcd_v, sqcd) = estimate_json(sqcd_with(&t.state, k, a.size_bound, &search))?;
    let trivial = trivial_upper_bound(&t.state)?;
    let s = sdis_with(&t.state, k, &sdis_options(&a.common))?.value;
    let result = json!({
        "target": t.source,
        "k": k,
        "size_bound": a.size_bound,
        "budget": search.budget.to_string(),
        "restarts": search.advantage.restarts,
        "qca": qca_v,
        "sqcd": sqcd_v,
        "trivial_upper_bound": trivial,
        "sdis": s,
        "sqcd_lower_bound": if s > 0.0 { Some(-s.log2()) } else { None },
    });
    let rows = vec![vec![
        n.to_string(),
        k.to_string(),
        a.size_bound.to_string(),
        fmt_opt(qca),
        fmt_opt(sqcd),
        trivial.value.to_string(),
        s.to_string(),
    ]];
    Ok(Report {
        result,
        header: vec!["n", "k", "size_bound", "qca", "sqcd", "trivial_upper_bound", "sdis"],
        rows,
        failed: false,
    })
}

fn verify(a: &VerifyArgs) -> Outcome<Report> {
    if a.suite != "all" && !suite_names().contains(&a.suite.as_str()) {
        return Err(Failure::Invalid(format!("unknown suite {:?}; expected `all` or one of {:?}", a.suite, suite_names())));
    }
    let results = run_suites(&a.suite, a.common.seed)?;
    let failed = results.iter().any(|r| !r.passed);
    let rows = results
        .iter()
        .map(|r| {
            vec![
                r.name.clone(),
                if r.passed { "pass" } else { "FAIL" }.to_string(),
                r.cases.to_string(),
                r.failures.to_string(),
                r.worst_excess.to_string(),
                r.statement.clone(),
            ]
        })
        .collect();
    Ok(Report {
        result: json!({"suite": a.suite, "all_passed": !failed, "suites": results}),
        header: vec!["suite", "status", "cases", "failures", "worst_excess", "statement"],
        rows,
        failed,
    })
}

fn render(command: &str, common: &Common, threads: usize, report: &Report) -> String {
    match common.format {
        Format::Json => {
            let doc = json!({
                "tool": "qentangle",
                "version": TOOL_VERSION,
                "gate_set": GATE_SET_ID,
                "encoding_version": ENCODING_VERSION,
                "command": command,
                "seed": common.seed,
                "threads": threads,
                "result": report.result,
            });
            let mut s = serde_json::to_string_pretty(&doc).expect("plain data");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&report.header).expect("in-memory write");
            for r in &report.rows {
                w.write_record(r).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8 fields")
        }
        Format::Table => {
            let mut widths: Vec<usize> = report.header.iter().map(|h| h.chars().count()).collect();
            for r in &report.rows {
                for (w, c) in widths.iter_mut().zip(r) {
                    *w = (*w).max(c.chars().count());
                }
            }
            let line = |cells: &mut dyn Iterator<Item = &str>| {
                let mut s = String::new();
                for (c, w) in cells.zip(&widths) {
                    let _ = write!(s, "{c:<w$}  ");
                }
                s.trim_end().to_string() + "\n"
            };
            let mut out = format!(
                "qentangle {TOOL_VERSION} {command}  seed {}  gate set {GATE_SET_ID}  encoding v{ENCODING_VERSION}\n",
                common.seed
            );
            out += &line(&mut report.header.iter().copied());
            for r in &report.rows {
                out += &line(&mut r.iter().map(String::as_str));
            }
            out
        }
    }
}

fn thread_count(flag: Option<usize>) -> Outcome<usize> {
    let n = match flag {
        Some(t) => t,
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => v.trim().parse().map_err(|_| Failure::Invalid(format!("{THREADS_ENV}={v:?} is not a count")))?,
            Err(_) => std::thread::available_parallelism().map(|p| p.get()).unwrap_or(1),
        },
    };
    if n == 0 {
        return Err(Failure::Invalid("thread count must be positive".into()));
    }
    Ok(n)
}

fn write_report(dir: &Path, command: &str, format: Format, text: &str) -> std::io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(format!("{command}.{}", format.extension()));
    fs::write(&path, text)?;
    Ok(path)
}

fn run(cli: Cli) -> Outcome<bool> {
    let (name, common) = match &cli.command {
        Command::Analyze(a) => ("analyze", &a.common),
        Command::Sdis(a) => ("sdis", &a.common),
        Command::Distinguish(a) => ("distinguish", &a.common),
        Command::Complexity(a) => ("complexity", &a.common),
        Command::Verify(a) => ("verify", &a.common),
    };
    let threads = thread_count(common.threads)?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Invalid(format!("thread pool: {e}")))?;
    let report = match &cli.command {
        Command::Analyze(a) => analyze(a)?,
        Command::Sdis(a) => sdis_cmd(a)?,
        Command::Distinguish(a) => distinguish(a)?,
        Command::Complexity(a) => complexity(a)?,
        Command::Verify(a) => verify(a)?,
    };
    let text = render(name, common, threads, &report);
    match &common.out {
        Some(dir) => {
            let path = write_report(dir, name, common.format, &text)
                .map_err(|e| Failure::Invalid(format!("{}: {e}", dir.display())))?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(!report.failed)
}

fn main() -> ExitCode {
    // Usage errors are validation failures; exit 2 is reserved for
    // capability limits.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: at least one verify suite failed");
            ExitCode::from(3)
        }
        Err(Failure::Invalid(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Capability(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
