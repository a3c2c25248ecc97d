//! Command-line front end.
//!
//! A run is described by a JSON [`RunConfig`]; command-line flags override
//! keys of the file. Each subcommand writes its artifacts into the output
//! directory from a single thread after all parallel work has joined.

mod svg;

use std::fmt;
use std::fs;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::energy::{evaluate, EnergyBreakdown};
use crate::fuglede::{deficit_suite, write_deficit_csv};
use crate::geometry::io::{read_shape_file, write_shape_file};
use crate::geometry::{Configuration, EnergyParams, MIN_RESOLUTION};
use crate::optimize::{
    critical_exponent, initial_configuration, minimize, scaling_identity, sweep_gamma, write_sweep_csv, InitSpec,
    OptimizerOptions, Status, SweepRecord,
};
use crate::oracle::{total_violations, verify, CorpusOptions};

pub use svg::sweep_svg;

/// Subcommands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Energy breakdown of a shape (or of the configured initial shape).
    Eval,
    /// Volume-constrained minimization.
    Minimize,
    /// Minimization over a list of γ values.
    Sweep,
    /// Perimeter and Riesz deficits of single-mode perturbations.
    Fuglede,
    /// Oracle corpora; exits with 1 on any violation.
    Verify,
    /// Scaling identity across a parameter grid; exits with 1 on any failure.
    ScaleCheck,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.to_possible_value().expect("no skipped variants");
        f.write_str(name.get_name())
    }
}

/// Command-line arguments.
#[derive(Debug, Parser)]
#[command(name = "isoshape", version, about = "Nonlocal isoperimetric shapes with density perimeters")]
pub struct Args {
    pub command: Command,
    /// JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Comma-separated γ list for sweeps.
    #[arg(long, value_delimiter = ',')]
    pub gammas: Option<Vec<f64>>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write an SVG plot (sweep).
    #[arg(long)]
    pub svg: bool,
}

/// Single-mode deficit suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FugledeOptions {
    pub modes: Vec<usize>,
    pub eps: Vec<f64>,
    /// Base radius `R`.
    pub radius: f64,
}

impl Default for FugledeOptions {
    fn default() -> Self {
        FugledeOptions {
            modes: vec![2, 3, 4, 5],
            eps: vec![0.05, 0.025, 0.0125],
            radius: 1.0,
        }
    }
}

/// Parameter grid of the scaling check; empty lists fall back to the run's
/// `p`, `alpha` and `gammas` (or `gamma`).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScaleCheckOptions {
    pub ps: Vec<f64>,
    pub alphas: Vec<f64>,
    pub gammas: Vec<f64>,
    /// Random unit-volume shapes per grid cell (at least one).
    pub shapes: usize,
    pub tolerance: Option<f64>,
}

/// Default residual threshold of the scaling check.
pub const SCALE_TOLERANCE: f64 = 1e-6;

fn default_n() -> usize {
    128
}

fn default_out() -> PathBuf {
    PathBuf::from(".")
}

/// A validated run description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    pub d: usize,
    pub p: f64,
    pub alpha: f64,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default)]
    pub lambda: f64,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default)]
    pub gammas: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default)]
    pub svg: bool,
    /// Shape file evaluated by `eval` or used as the start of `minimize`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<PathBuf>,
    #[serde(default)]
    pub optimizer: OptimizerOptions,
    #[serde(default)]
    pub fuglede: FugledeOptions,
    #[serde(default)]
    pub verify: CorpusOptions,
    #[serde(default)]
    pub scale_check: ScaleCheckOptions,
}

impl RunConfig {
    pub fn params(&self) -> EnergyParams {
        EnergyParams {
            d: self.d,
            p: self.p,
            alpha: self.alpha,
            gamma: self.gamma,
            lambda: self.lambda,
        }
    }

    /// Optimizer options with the run's seed.
    pub fn optimizer_options(&self) -> OptimizerOptions {
        OptimizerOptions {
            seed: self.seed,
            ..self.optimizer.clone()
        }
    }

    /// The γ list of a sweep: `gammas`, or half-decades from `1e-3` to `1e2`.
    pub fn sweep_gammas(&self) -> Vec<f64> {
        if self.gammas.is_empty() {
            (0..=10).map(|k| 10f64.powf(-3.0 + 0.5 * k as f64)).collect()
        } else {
            self.gammas.clone()
        }
    }
}

/// Failure of a run, mapped to the exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config file {0} not found")]
    MissingFile(PathBuf),
    #[error("invalid config: {0}")]
    Schema(String),
    #[error("conflicting options: {0}")]
    Conflict(String),
    #[error("{0}")]
    Numerical(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const VIOLATION: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const NUMERICAL: i32 = 3;
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) | CliError::Io { .. } => exit::NUMERICAL,
            _ => exit::USAGE,
        }
    }
}

fn insert(map: &mut Map<String, Value>, key: &str, v: impl Serialize) {
    map.insert(key.to_string(), serde_json::to_value(v).expect("flag values serialize"));
}

/// Merges the config file (if any) with the flags, flags taking precedence,
/// and validates the result.
pub fn parse_config(args: &Args) -> Result<RunConfig, CliError> {
    let mut map = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| match e.kind() {
                std::io::ErrorKind::NotFound => CliError::MissingFile(path.clone()),
                _ => CliError::Schema(format!("{}: {e}", path.display())),
            })?;
            match serde_json::from_str::<Value>(&text) {
                Ok(Value::Object(m)) => m,
                Ok(_) => return Err(CliError::Schema(format!("{}: top level must be an object", path.display()))),
                Err(e) => return Err(CliError::Schema(format!("{}: {e}", path.display()))),
            }
        }
        None => Map::new(),
    };
    if let Some(Value::String(c)) = map.get("command") {
        if *c != args.command.to_string() {
            return Err(CliError::Conflict(format!(
                "config file is for command '{c}' but '{}' was requested",
                args.command
            )));
        }
    }
    if args.gamma.is_some() && args.gammas.is_some() {
        return Err(CliError::Conflict("--gamma and --gammas are mutually exclusive".into()));
    }
    if let Some(v) = args.d {
        insert(&mut map, "d", v);
    }
    if let Some(v) = args.p {
        insert(&mut map, "p", v);
    }
    if let Some(v) = args.alpha {
        insert(&mut map, "alpha", v);
    }
    if let Some(v) = args.gamma {
        insert(&mut map, "gamma", v);
    }
    if let Some(v) = &args.gammas {
        insert(&mut map, "gammas", v);
    }
    if let Some(v) = args.n {
        insert(&mut map, "n", v);
    }
    if let Some(v) = args.seed {
        insert(&mut map, "seed", v);
    }
    if let Some(v) = &args.out {
        insert(&mut map, "out", v);
    }
    if args.svg {
        insert(&mut map, "svg", true);
    }
    insert(&mut map, "command", args.command);
    let config: RunConfig =
        serde_json::from_value(Value::Object(map)).map_err(|e| CliError::Schema(e.to_string()))?;
    validate(&config)?;
    Ok(config)
}

fn validate(c: &RunConfig) -> Result<(), CliError> {
    let schema = |e: crate::Error| CliError::Schema(e.to_string());
    c.params().validate().map_err(schema)?;
    c.optimizer.validate().map_err(schema)?;
    if c.n < MIN_RESOLUTION {
        return Err(CliError::Schema(format!("n = {} must be at least {MIN_RESOLUTION}", c.n)));
    }
    if c.optimizer.seed != 0 && c.optimizer.seed != c.seed {
        return Err(CliError::Conflict(
            "optimizer.seed differs from the run seed; set only the top-level seed".into(),
        ));
    }
    if c.verify.seed != 0 && c.verify.seed != c.seed {
        return Err(CliError::Conflict(
            "verify.seed differs from the run seed; set only the top-level seed".into(),
        ));
    }
    for (i, g) in c.gammas.iter().enumerate() {
        if !(*g > 0.0 && g.is_finite()) {
            return Err(CliError::Schema(format!("gammas[{i}] = {g} must be positive")));
        }
        if i > 0 && !(*g > c.gammas[i - 1]) {
            return Err(CliError::Schema("gammas must be strictly increasing".into()));
        }
    }
    if c.fuglede.eps.iter().any(|e| !(*e > 0.0 && *e < 0.5)) || c.fuglede.modes.contains(&0) {
        return Err(CliError::Schema(
            "fuglede: eps must lie in (0, 0.5) and modes must be at least 1".into(),
        ));
    }
    Ok(())
}

/// What a successful run produced.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Outcome {
    /// Failed checks (verify, scale-check).
    pub violations: usize,
    pub artifacts: Vec<PathBuf>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.violations > 0 {
            exit::VIOLATION
        } else {
            exit::SUCCESS
        }
    }
}

struct Ctx<'a> {
    config: &'a RunConfig,
    outcome: Outcome,
}

impl Ctx<'_> {
    fn numerical(&self, op: &str, e: crate::Error) -> CliError {
        let c = self.config;
        CliError::Numerical(format!(
            "{op} failed (d = {}, p = {}, alpha = {}, gamma = {}, n = {}): {e}",
            c.d, c.p, c.alpha, c.gamma, c.n
        ))
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.config.out.join(name);
        fs::write(&path, bytes).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        self.outcome.artifacts.push(path);
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).expect("outputs serialize");
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    fn input_configuration(&self) -> Result<Configuration, CliError> {
        let c = self.config;
        match &c.shape {
            Some(path) => read_shape_file(path).map_err(|e| match e {
                crate::Error::Io(_) if !path.exists() => CliError::MissingFile(path.clone()),
                e => CliError::Schema(format!("{}: {e}", path.display())),
            }),
            None => initial_configuration(&c.optimizer.init, c.d, c.n, c.optimizer.target_volume, c.seed)
                .map_err(|e| self.numerical("initial shape", e)),
        }
    }
}

/// Result of `minimize`, written next to the shape and the breakdown.
#[derive(Clone, Debug, Serialize)]
struct MinimizeSummary<'a> {
    status: Status,
    gradient_norm: f64,
    record: &'a SweepRecord,
}

/// Runs one command; artifacts are written under `config.out`.
pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    fs::create_dir_all(&config.out).map_err(|source| CliError::Io {
        path: config.out.clone(),
        source,
    })?;
    let mut ctx = Ctx {
        config,
        outcome: Outcome::default(),
    };
    let params = config.params();
    match config.command.unwrap_or(Command::Eval) {
        Command::Eval => {
            let cfg = ctx.input_configuration()?;
            let b: EnergyBreakdown = evaluate(&cfg, &params).map_err(|e| ctx.numerical("eval", e))?;
            println!("{}", serde_json::to_string_pretty(&b).expect("breakdown serializes"));
            ctx.write_json("breakdown.json", &b)?;
        }
        Command::Minimize => {
            let init = ctx.input_configuration()?;
            let m = minimize(&init, &params, &config.optimizer_options()).map_err(|e| ctx.numerical("minimize", e))?;
            let b = evaluate(&m.config, &params).map_err(|e| ctx.numerical("evaluate minimizer", e))?;
            let shape_path = config.out.join("shape.json");
            write_shape_file(&shape_path, &m.config).map_err(|e| ctx.numerical("write shape", e))?;
            ctx.outcome.artifacts.push(shape_path);
            ctx.write_json("breakdown.json", &b)?;
            let summary = MinimizeSummary {
                status: m.status,
                gradient_norm: m.gradient_norm,
                record: &m.record,
            };
            println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
            ctx.write_json("minimize.json", &summary)?;
        }
        Command::Sweep => {
            let gammas = config.sweep_gammas();
            let results = sweep_gamma(&gammas, &params, config.n, &config.optimizer_options())
                .map_err(|e| ctx.numerical("sweep", e))?;
            let records: Vec<SweepRecord> = results.into_iter().map(|m| m.record).collect();
            let mut csv = Vec::new();
            write_sweep_csv(&records, &mut csv).map_err(|e| ctx.numerical("sweep csv", e))?;
            print!("{}", String::from_utf8_lossy(&csv));
            ctx.write("sweep.csv", &csv)?;
            if config.svg {
                ctx.write("sweep.svg", sweep_svg(&records).as_bytes())?;
            }
        }
        Command::Fuglede => {
            let f = &config.fuglede;
            let rows = deficit_suite(config.d, config.n, &f.modes, &f.eps, f.radius, config.p, config.alpha)
                .map_err(|e| ctx.numerical("fuglede", e))?;
            let mut csv = Vec::new();
            write_deficit_csv(&rows, &mut csv).map_err(|e| ctx.numerical("fuglede csv", e))?;
            print!("{}", String::from_utf8_lossy(&csv));
            ctx.write("deficits.csv", &csv)?;
        }
        Command::Verify => {
            let opts = CorpusOptions {
                seed: config.seed,
                ..config.verify.clone()
            };
            let reports = verify(&opts).map_err(|e| ctx.numerical("verify", e))?;
            for r in &reports {
                println!(
                    "{:<28} trials {:>4}  violations {:>3}  worst margin {:.3e}",
                    r.check, r.trials, r.violations, r.worst_margin
                );
            }
            ctx.outcome.violations = total_violations(&reports);
            ctx.write_json("checks.json", &reports)?;
        }
        Command::ScaleCheck => {
            let (table, failures) = scale_check(config).map_err(|e| ctx.numerical("scale-check", e))?;
            print!("{table}");
            ctx.outcome.violations = failures;
            ctx.write("scale_check.txt", table.as_bytes())?;
        }
    }
    Ok(ctx.outcome)
}

/// Pass/fail table of the scaling identity over `ps × alphas × gammas`; the
/// residual is the largest over the random shapes. Rows at the critical
/// exponent have no correspondence and are reported as `n/a`.
pub fn scale_check(config: &RunConfig) -> crate::Result<(String, usize)> {
    let s = &config.scale_check;
    let or = |v: &Vec<f64>, fallback: Vec<f64>| if v.is_empty() { fallback } else { v.clone() };
    let ps = or(&s.ps, vec![config.p]);
    let alphas = or(&s.alphas, vec![config.alpha]);
    let gammas = or(&s.gammas, if config.gammas.is_empty() { vec![config.gamma] } else { config.gammas.clone() });
    let tol = s.tolerance.unwrap_or(SCALE_TOLERANCE);
    let shapes = s.shapes.max(1);
    let mut table = format!(
        "{:>3} {:>8} {:>8} {:>12} {:>24} {:>10} {:>6}\n",
        "d", "p", "alpha", "gamma", "m", "residual", "result"
    );
    let mut failures = 0;
    for &p in &ps {
        for &alpha in &alphas {
            for &gamma in &gammas {
                let params = EnergyParams::new(config.d, p, alpha, gamma)?;
                if p == critical_exponent(config.d, alpha) {
                    table.push_str(&format!(
                        "{:>3} {:>8} {:>8} {:>12.6e} {:>24} {:>10} {:>6}\n",
                        config.d, p, alpha, gamma, "-", "-", "n/a"
                    ));
                    continue;
                }
                let mut worst: f64 = 0.0;
                let mut m = f64::NAN;
                for k in 0..shapes {
                    let init = InitSpec::PerturbedBall {
                        eps: 0.2,
                        mode: 2 + k % 5,
                    };
                    let seed = config.seed.wrapping_add(k as u64);
                    let cfg = initial_configuration(&init, config.d, config.n, 1.0, seed)?;
                    let id = scaling_identity(&cfg, &params)?;
                    m = id.m;
                    worst = worst.max(id.residual);
                }
                let pass = worst <= tol;
                if !pass {
                    failures += 1;
                }
                table.push_str(&format!(
                    "{:>3} {:>8} {:>8} {:>12.6e} {:>24.16e} {:>10.2e} {:>6}\n",
                    config.d,
                    p,
                    alpha,
                    gamma,
                    m,
                    worst,
                    if pass { "pass" } else { "FAIL" }
                ));
            }
        }
    }
    Ok((table, failures))
}

/// Applies `ISOSHAPE_THREADS` to the global worker pool.
fn configure_threads() -> Result<(), CliError> {
    match std::env::var("ISOSHAPE_THREADS") {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| CliError::Schema(format!("ISOSHAPE_THREADS = '{v}' is not a positive integer")))?;
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Schema(format!("ISOSHAPE_THREADS: {e}")))
        }
        Err(_) => Ok(()),
    }
}

/// Parses `argv`, runs, and returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::USAGE } else { exit::SUCCESS };
        }
    };
    let result = configure_threads()
        .and_then(|_| parse_config(&args))
        .and_then(|c| run(&c));
    match result {
        Ok(outcome) => outcome.exit_code(),
        Err(e) => {
            eprintln!("isoshape {}: {e}", args.command);
            e.exit_code()
        }
    }
}
