use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use forge_core::decomp::DecompError;
use forge_core::pipeline::{
    self, Cert, DecomposeConfig, DecomposeTarget, FactorFamily, PipelineError, Recipe, RunConfig,
    ScanConfig,
};
use serde::Deserialize;

#[derive(Parser)]
#[command(name = "forge", version, about = "Expander generating sets, graphs and certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build one generating set, its graph and the requested certificates.
    Run(RunArgs),
    /// Run a family (comma-separated parameter lists) and emit a CSV table.
    Scan(RunArgs),
    /// Product-cover depth of SL_d(F_q) or Alt(n) by a factor family.
    Decompose(DecomposeArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    recipe: Option<String>,
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<u64>>,
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    d: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    m: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    s: Option<Vec<usize>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Comma-separated: spectrum, expansion, diameter, decompose, schreier, class-average.
    #[arg(long, value_delimiter = ',')]
    cert: Option<Vec<String>>,
    #[arg(long)]
    assert_lambda_below: Option<f64>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long)]
    export_edges: Option<PathBuf>,
    #[arg(long)]
    cap: Option<usize>,
    /// JSON file with the same keys as the flags; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct DecomposeArgs {
    #[arg(long, default_value = "sl")]
    target: String,
    #[arg(long, default_value_t = 3)]
    d: usize,
    #[arg(long, default_value_t = 5)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    p: u64,
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// subsets:<b>, blocks:<b>, windows:<n_k> or elementary.
    #[arg(long, default_value = "subsets:2")]
    factors: String,
    #[arg(long, default_value_t = 12)]
    max_rounds: usize,
    #[arg(long)]
    cap: Option<usize>,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(v) => v,
        }
    }
}

#[derive(Deserialize, Default)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
struct FileConfig {
    recipe: Option<String>,
    p: Option<OneOrMany<u64>>,
    k: Option<OneOrMany<usize>>,
    d: Option<OneOrMany<usize>>,
    m: Option<OneOrMany<usize>>,
    s: Option<OneOrMany<usize>>,
    trials: Option<usize>,
    seed: Option<u64>,
    tol: Option<f64>,
    max_iter: Option<usize>,
    cert: Option<OneOrMany<String>>,
    assert_lambda_below: Option<f64>,
    csv: Option<PathBuf>,
    json: Option<PathBuf>,
    export_edges: Option<PathBuf>,
    cap: Option<usize>,
}

/// Writes to stdout, tolerating a closed pipe.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn config_error(msg: impl Into<String>) -> PipelineError {
    PipelineError::Config(msg.into())
}

/// Merges the config file (if any) with the flags into a scan family.
fn family(args: RunArgs) -> Result<ScanConfig, PipelineError> {
    let file: FileConfig = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            serde_json::from_str(&text).map_err(|e| config_error(format!("{}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };
    let mut base = RunConfig::default();
    let recipe = args
        .recipe
        .or(file.recipe)
        .ok_or_else(|| config_error("--recipe is required"))?;
    base.recipe = recipe.parse::<Recipe>()?;
    if let Some(v) = args.trials.or(file.trials) {
        base.trials = v;
    }
    if let Some(v) = args.seed.or(file.seed) {
        base.seed = v;
    }
    if let Some(v) = args.tol.or(file.tol) {
        base.tol = v;
    }
    if let Some(v) = args.max_iter.or(file.max_iter) {
        base.max_iter = v;
    }
    if let Some(v) = args.cap.or(file.cap) {
        base.cap = v;
    }
    if let Some(certs) = args.cert.or(file.cert.map(OneOrMany::into_vec)) {
        base.cert = certs
            .iter()
            .map(|c| c.trim().parse::<Cert>())
            .collect::<Result<_, _>>()?;
    }
    base.assert_lambda_below = args.assert_lambda_below.or(file.assert_lambda_below);
    base.csv = args.csv.or(file.csv);
    base.json = args.json.or(file.json);
    base.export_edges = args.export_edges.or(file.export_edges);
    Ok(ScanConfig {
        base,
        p: args.p.or(file.p.map(OneOrMany::into_vec)),
        k: args.k.or(file.k.map(OneOrMany::into_vec)),
        d: args.d.or(file.d.map(OneOrMany::into_vec)),
        m: args.m.or(file.m.map(OneOrMany::into_vec)),
        s: args.s.or(file.s.map(OneOrMany::into_vec)),
    })
}

fn single<T: Copy>(name: &str, list: &Option<Vec<T>>) -> Result<Option<T>, PipelineError> {
    match list.as_deref() {
        None => Ok(None),
        Some([x]) => Ok(Some(*x)),
        Some(_) => Err(config_error(format!("run takes one value for --{name}; use scan for lists"))),
    }
}

fn run(args: RunArgs) -> Result<ExitCode, PipelineError> {
    let fam = family(args)?;
    let cfg = RunConfig {
        p: single("p", &fam.p)?,
        k: single("k", &fam.k)?,
        d: single("d", &fam.d)?,
        m: single("m", &fam.m)?,
        s: single("s", &fam.s)?,
        ..fam.base
    };
    let report = pipeline::run(&cfg)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    if cfg.json.is_none() {
        emit(&serde_json::to_string_pretty(&report)?);
    }
    for a in &report.assertions {
        eprintln!(
            "{}: {} = {:.6} (threshold {}) {}",
            if a.passed { "pass" } else { "FAIL" },
            a.name,
            a.value,
            a.threshold,
            if a.passed { "" } else { "certification failed" }
        );
    }
    Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn scan(args: RunArgs) -> Result<ExitCode, PipelineError> {
    let fam = family(args)?;
    let rows = pipeline::scan(&fam);
    match &fam.base.csv {
        Some(path) => pipeline::write_csv(std::fs::File::create(path)?, &rows)?,
        None => pipeline::write_csv(std::io::stdout().lock(), &rows)?,
    }
    let failed = rows.iter().filter(|r| !r.error.is_empty()).count();
    if failed > 0 {
        eprintln!("{failed} of {} rows failed", rows.len());
    }
    Ok(ExitCode::SUCCESS)
}

fn decompose(args: DecomposeArgs) -> Result<ExitCode, PipelineError> {
    let target = match args.target.as_str() {
        "sl" => DecomposeTarget::Sl,
        "alt" => DecomposeTarget::Alt,
        other => return Err(config_error(format!("unknown target {other:?}"))),
    };
    let mut cfg = DecomposeConfig {
        target,
        d: args.d,
        n: args.n,
        p: args.p,
        k: args.k,
        factors: args.factors.parse::<FactorFamily>()?,
        max_rounds: args.max_rounds,
        ..Default::default()
    };
    if let Some(cap) = args.cap {
        cfg.cap = cap;
    }
    match pipeline::decompose(&cfg) {
        Ok(report) => {
            let text = serde_json::to_string_pretty(&report)?;
            match &args.json {
                Some(path) => std::fs::write(path, text)?,
                None => emit(&text),
            }
            Ok(ExitCode::SUCCESS)
        }
        Err(PipelineError::Decomp(e @ DecompError::NotCovered(_))) => {
            eprintln!("{e}");
            Ok(ExitCode::from(2))
        }
        Err(e) => Err(e),
    }
}

fn init_threads() -> Result<(), PipelineError> {
    let Ok(v) = std::env::var("FORGE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| config_error(format!("FORGE_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| config_error(e.to_string()))
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
    let result = init_threads().and_then(|_| match cli.command {
        Command::Run(a) => run(a),
        Command::Scan(a) => scan(a),
        Command::Decompose(a) => decompose(a),
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
