use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use cxblt::bench::{
    alpha_grid, best_row, dump_problem, format_table, run_bench, spectrum_dump, sweep,
    AlphaChoice, BenchConfig, TableFormat,
};
use cxblt::factor::OrderingMethod;
use cxblt::precond::PrecondKind;
use cxblt::problems::Example;

#[derive(Parser, Debug)]
#[command(name = "cxblt", version, about = "Block lower-triangular preconditioning for (W + iT)u = b")]
struct Cli {
    /// key=value file supplying defaults for any flag; flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run GMRES over a grid of examples, sizes and preconditioners.
    Bench(BenchArgs),
    /// Eigenvalues of the BLT-preconditioned matrix, as CSV.
    Spectrum(SpectrumArgs),
    /// GMRES iteration counts over a grid of parameters.
    Sweep(SweepArgs),
    /// Write W, T (Matrix Market) and b (CSV) for one problem.
    DumpProblem(DumpArgs),
}

#[derive(Args, Debug, Default)]
struct SolverArgs {
    #[arg(long)]
    restart: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    maxit: Option<usize>,
    /// natural, rcm or md.
    #[arg(long)]
    ordering: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Comma-separated list of ex1..ex4.
    #[arg(long, value_delimiter = ',')]
    example: Vec<String>,
    /// Comma-separated grid sizes.
    #[arg(long, value_delimiter = ',')]
    m: Vec<String>,
    /// Comma-separated list of none, blt, gsor, mhss.
    #[arg(long, value_delimiter = ',')]
    method: Vec<String>,
    /// Explicit parameter values, one run each.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["alpha_auto", "alpha_table"])]
    alpha: Vec<String>,
    /// Spectral choice for BLT, tabulated values otherwise.
    #[arg(long, conflicts_with = "alpha_table")]
    alpha_auto: bool,
    /// Tabulated values (the default).
    #[arg(long)]
    alpha_table: bool,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[arg(long)]
    example: Option<String>,
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    example: Option<String>,
    #[arg(long)]
    m: Option<String>,
    /// blt, gsor or mhss.
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    alpha_min: Option<String>,
    #[arg(long)]
    alpha_max: Option<String>,
    #[arg(long)]
    steps: Option<String>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args, Debug)]
struct DumpArgs {
    #[arg(long)]
    example: Option<String>,
    #[arg(long)]
    m: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Bad flags or config values; exit code 2.
#[derive(Debug)]
struct Usage(String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

const KNOWN_KEYS: [&str; 15] = [
    "example", "m", "method", "alpha", "restart", "tol", "maxit", "ordering", "out", "format",
    "alpha_min", "alpha_max", "steps", "alpha_auto", "alpha_table",
];

struct Config(BTreeMap<String, String>);

impl Config {
    fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Config(BTreeMap::new()));
        };
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
    }

    fn parse(text: &str) -> std::result::Result<Self, String> {
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key=value", i + 1))?;
            let k = k.trim().replace('-', "_");
            if !KNOWN_KEYS.contains(&k.as_str()) {
                return Err(format!("line {}: unknown key '{k}'", i + 1));
            }
            map.insert(k, v.trim().to_string());
        }
        Ok(Config(map))
    }

    /// Flag value if given, else the config value.
    fn pick(&self, key: &str, flag: Option<String>) -> Option<String> {
        flag.or_else(|| self.0.get(key).cloned())
    }

    fn pick_list(&self, key: &str, flag: Vec<String>) -> Vec<String> {
        if !flag.is_empty() {
            return flag;
        }
        self.0
            .get(key)
            .map(|v| v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect())
            .unwrap_or_default()
    }

    fn flag(&self, key: &str, flag: bool) -> Result<bool> {
        if flag {
            return Ok(true);
        }
        match self.0.get(key) {
            None => Ok(false),
            Some(v) => v.parse().map_err(|_| usage(format!("{key}: expected true or false"))),
        }
    }
}

fn parse_one<T: FromStr>(key: &str, s: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    s.trim()
        .parse()
        .map_err(|e| usage(format!("--{}: '{s}': {e}", key.replace('_', "-"))))
}

fn parse_all<T: FromStr>(key: &str, v: &[String]) -> Result<Vec<T>>
where
    T::Err: fmt::Display,
{
    v.iter().map(|s| parse_one(key, s)).collect()
}

fn required<T: FromStr>(cfg: &Config, key: &str, flag: Option<String>) -> Result<T>
where
    T::Err: fmt::Display,
{
    let s = cfg
        .pick(key, flag)
        .ok_or_else(|| usage(format!("--{} is required", key.replace('_', "-"))))?;
    parse_one(key, &s)
}

struct Output {
    path: Option<PathBuf>,
    format: TableFormat,
}

fn solver_config(cfg: &Config, a: SolverArgs, base: &mut BenchConfig) -> Result<Output> {
    if let Some(s) = cfg.pick("restart", a.restart.map(|v| v.to_string())) {
        base.restart = parse_one("restart", &s)?;
    }
    if let Some(s) = cfg.pick("tol", a.tol.map(|v| v.to_string())) {
        base.tol = parse_one("tol", &s)?;
    }
    if let Some(s) = cfg.pick("maxit", a.maxit.map(|v| v.to_string())) {
        base.maxit = parse_one("maxit", &s)?;
    }
    if let Some(s) = cfg.pick("ordering", a.ordering) {
        base.ordering = parse_one::<OrderingMethod>("ordering", &s)?;
    }
    let format = match cfg.pick("format", a.format) {
        Some(s) => parse_one("format", &s)?,
        None => TableFormat::Csv,
    };
    let path = a.out.or_else(|| cfg.pick("out", None).map(PathBuf::from));
    Ok(Output { path, format })
}

fn write_out(out: &Output, text: &str) -> Result<()> {
    match &out.path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .context("writing to stdout"),
    }
}

fn bench(cfg: &Config, a: BenchArgs) -> Result<()> {
    let mut bc = BenchConfig::default();
    let examples = cfg.pick_list("example", a.example);
    if !examples.is_empty() {
        bc.examples = parse_all("example", &examples)?;
    }
    let sizes = cfg.pick_list("m", a.m);
    if !sizes.is_empty() {
        bc.sizes = parse_all("m", &sizes)?;
    }
    let methods = cfg.pick_list("method", a.method);
    if !methods.is_empty() {
        bc.methods = parse_all::<PrecondKind>("method", &methods)?;
    }
    let alphas = parse_all::<f64>("alpha", &cfg.pick_list("alpha", a.alpha))?;
    let auto = cfg.flag("alpha_auto", a.alpha_auto)?;
    let table = cfg.flag("alpha_table", a.alpha_table)?;
    bc.alpha = match (alphas.is_empty(), auto, table) {
        (false, false, false) => AlphaChoice::List(alphas),
        (true, true, false) => AlphaChoice::Auto,
        (true, false, _) => AlphaChoice::Table,
        _ => return Err(usage("--alpha, --alpha-auto and --alpha-table are exclusive")),
    };
    let out = solver_config(cfg, a.solver, &mut bc)?;
    bc.validate().map_err(|e| usage(e.to_string()))?;

    let rows = run_bench(&bc)?;
    for r in &rows {
        let alpha = r.alpha.map(|a| format!("{a}")).unwrap_or_else(|| "-".into());
        let status = match (&r.error, r.converged) {
            (Some(e), _) => format!("error: {e}"),
            (None, true) => format!("IT={}", r.total_inner),
            (None, false) => "not converged".into(),
        };
        eprintln!("{} m={} {} alpha={alpha} {status}", r.example, r.m, r.method);
    }
    write_out(&out, &format_table(&rows, out.format)?)
}

fn spectrum(cfg: &Config, a: SpectrumArgs) -> Result<()> {
    let example: Example = required(cfg, "example", a.example)?;
    let m: usize = required(cfg, "m", a.m)?;
    let alpha: f64 = required(cfg, "alpha", a.alpha)?;
    let out = a
        .out
        .or_else(|| cfg.pick("out", None).map(PathBuf::from))
        .ok_or_else(|| usage("--out is required"))?;
    let report = spectrum_dump(example, m, alpha, &out).map_err(lift)?;
    eprintln!(
        "{} eigenvalues, {} at 1, max |lambda-1| = {:.3e}, within bounds: {}",
        report.eigenvalues.len(),
        report.unit_count,
        report.max_dist,
        report.all_within
    );
    Ok(())
}

fn sweep_cmd(cfg: &Config, a: SweepArgs) -> Result<()> {
    let example: Example = required(cfg, "example", a.example)?;
    let m: usize = required(cfg, "m", a.m)?;
    let method: PrecondKind = match cfg.pick("method", a.method) {
        Some(s) => parse_one("method", &s)?,
        None => PrecondKind::Blt,
    };
    let lo: f64 = required(cfg, "alpha_min", a.alpha_min)?;
    let hi: f64 = required(cfg, "alpha_max", a.alpha_max)?;
    let steps: usize = required(cfg, "steps", a.steps)?;
    let alphas = alpha_grid(lo, hi, steps).map_err(lift)?;
    let mut bc = BenchConfig::default();
    let out = solver_config(cfg, a.solver, &mut bc)?;
    bc.validate().map_err(|e| usage(e.to_string()))?;
    let rows = sweep(example, m, method, &alphas, &bc).map_err(lift)?;
    match best_row(&rows) {
        Some(r) => eprintln!("best alpha = {} with IT = {}", r.alpha.unwrap_or(0.0), r.total_inner),
        None => eprintln!("no parameter in the grid converged"),
    }
    write_out(&out, &format_table(&rows, out.format)?)
}

fn dump(cfg: &Config, a: DumpArgs) -> Result<()> {
    let example: Example = required(cfg, "example", a.example)?;
    let m: usize = required(cfg, "m", a.m)?;
    let dir = a
        .out
        .or_else(|| cfg.pick("out", None).map(PathBuf::from))
        .ok_or_else(|| usage("--out is required"))?;
    for p in dump_problem(example, m, &dir).map_err(lift)? {
        eprintln!("wrote {}", p.display());
    }
    Ok(())
}

/// Library argument errors become usage errors.
fn lift(e: cxblt::Error) -> anyhow::Error {
    match e {
        cxblt::Error::InvalidArgument(msg) => usage(msg),
        other => other.into(),
    }
}

fn run(cli: Cli) -> Result<()> {
    let cfg = Config::load(cli.config.as_deref())?;
    match cli.command {
        Command::Bench(a) => bench(&cfg, a),
        Command::Spectrum(a) => spectrum(&cfg, a),
        Command::Sweep(a) => sweep_cmd(&cfg, a),
        Command::DumpProblem(a) => dump(&cfg, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
