//! Command-line front end: frequency tables, sweeps, mode shapes and
//! verification reports for the cracked two-section beam.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use cracked_beam::algebra_check::{run_suite, DEFAULT_SEED, DEFAULT_TRIPLES};
use cracked_beam::beam::{
    alpha_to_omega, find_frequencies, mode_shape, mode_shape_unchecked, sweep, SweepParam, SweepSpec,
    SHAPE_GRID_POINTS,
};
use cracked_beam::interface::RESIDUAL_TOLERANCE;
use cracked_beam::{BeamError, BeamModel, BoundaryCondition, ScanOptions};
use serde::Deserialize;

/// Offset added to each frequency by `verify --perturb`.
pub const PERTURBATION: f64 = 1e-3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    /// 0 ok, 1 numerical failure, 2 usage.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<BeamError> for CliError {
    fn from(e: BeamError) -> Self {
        match e {
            BeamError::InvalidModel(_) | BeamError::InvalidInput(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "cracked-beam", version, about = "Natural frequencies of a cracked two-section beam")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// First n frequencies as CSV `mode_index,alpha,omega`.
    Freq(CommonArgs),
    /// Frequencies over a parameter grid as CSV `param,value,alpha1,...`.
    Sweep(CommonArgs),
    /// Samples of one mode shape as CSV `x,phi`.
    Shape(CommonArgs),
    /// Substitutes each mode into the distributional equation.
    Verify(CommonArgs),
    /// Identity and property checks of the distribution algebra.
    AlgebraCheck(CommonArgs),
}

impl Command {
    pub fn args(&self) -> &CommonArgs {
        match self {
            Command::Freq(a) | Command::Sweep(a) | Command::Shape(a) | Command::Verify(a) | Command::AlgebraCheck(a) => a,
        }
    }
}

/// Every flag is optional so that a config file can fill the gaps.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    /// Boundary conditions: pp (pinned) or cc (clamped).
    #[arg(long)]
    pub bc: Option<String>,
    /// Stiffness ratio of the right section.
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub lambda0: Option<f64>,
    #[arg(long)]
    pub lambda1: Option<f64>,
    /// Crack position in (0, 1).
    #[arg(long)]
    pub xi0: Option<f64>,
    /// Flexural stiffness of the left section.
    #[arg(long = "A")]
    #[serde(rename = "A")]
    pub stiffness: Option<f64>,
    /// Mass per unit length.
    #[arg(long = "m")]
    #[serde(rename = "m")]
    pub mass: Option<f64>,
    #[arg(long)]
    pub n_modes: Option<usize>,
    #[arg(long)]
    pub alpha_max: Option<f64>,
    #[arg(long)]
    pub grid_step: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Sweep parameter: lambda, k or xi0.
    #[arg(long)]
    pub param: Option<String>,
    #[arg(long)]
    pub start: Option<f64>,
    #[arg(long)]
    pub stop: Option<f64>,
    #[arg(long)]
    pub count: Option<usize>,
    /// Frequency parameter of the mode to sample.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// 1-based index of the mode to sample, used when no alpha is given.
    #[arg(long)]
    pub mode_index: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    #[command(flatten)]
    pub overrides: Overrides,
    /// Flat JSON object with the same keys as the flags. Flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Print the effective configuration to stderr.
    #[arg(long)]
    pub verbose: bool,
    /// verify: build each mode at alpha + 1e-3 without the frequency check.
    #[arg(long)]
    pub perturb: bool,
}

/// Effective settings after merging flags, config file and defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub bc: BoundaryCondition,
    pub k: f64,
    pub lambda0: f64,
    pub lambda1: f64,
    pub xi0: f64,
    pub stiffness: f64,
    pub mass: f64,
    pub n_modes: usize,
    pub alpha_max: f64,
    pub grid_step: f64,
    pub tol: f64,
    pub param: SweepParam,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub alpha: Option<f64>,
    pub mode_index: usize,
    pub samples: usize,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn model(&self) -> BeamModel {
        BeamModel {
            stiffness: self.stiffness,
            k: self.k,
            mass: self.mass,
            xi0: self.xi0,
            lambda0: self.lambda0,
            lambda1: self.lambda1,
            bc: self.bc,
        }
    }

    pub fn scan(&self) -> ScanOptions {
        ScanOptions { alpha_max: self.alpha_max, grid_step: self.grid_step, tol: self.tol }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.model().validate()?;
        self.scan().validate()?;
        let positive = [("n-modes", self.n_modes), ("count", self.count), ("mode-index", self.mode_index)];
        for (name, v) in positive {
            if v == 0 {
                return Err(CliError::Usage(format!("--{name} must be positive")));
            }
        }
        if self.samples < 2 {
            return Err(CliError::Usage("--samples must be at least 2".into()));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(CliError::Usage("sweep bounds must be finite".into()));
        }
        if let Some(a) = self.alpha {
            if !(a > 0.0 && a.is_finite()) {
                return Err(CliError::Usage(format!("--alpha {a} must be positive")));
            }
        }
        Ok(())
    }

    /// The configuration as JSON with the config-file keys, for `--verbose`.
    pub fn describe(&self) -> String {
        let v = serde_json::json!({
            "bc": self.bc.to_string(),
            "k": self.k,
            "lambda0": self.lambda0,
            "lambda1": self.lambda1,
            "xi0": self.xi0,
            "A": self.stiffness,
            "m": self.mass,
            "n_modes": self.n_modes,
            "alpha_max": self.alpha_max,
            "grid_step": self.grid_step,
            "tol": self.tol,
            "param": self.param.to_string(),
            "start": self.start,
            "stop": self.stop,
            "count": self.count,
            "alpha": self.alpha,
            "mode_index": self.mode_index,
            "samples": self.samples,
            "out": self.out,
        });
        serde_json::to_string_pretty(&v).expect("config serializes")
    }
}

fn read_config(path: &Path) -> Result<Overrides, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
}

/// Flags take precedence over the config file, which takes precedence over defaults.
pub fn resolve(args: &CommonArgs) -> Result<RunConfig, CliError> {
    let file = match &args.config {
        Some(p) => read_config(p)?,
        None => Overrides::default(),
    };
    let f = &args.overrides;
    macro_rules! pick {
        ($field:ident, $default:expr) => {
            f.$field.clone().or(file.$field.clone()).unwrap_or($default)
        };
    }
    let bc: BoundaryCondition = pick!(bc, "pp".to_string()).parse().map_err(CliError::Usage)?;
    let param: SweepParam = pick!(param, "lambda".to_string()).parse().map_err(CliError::Usage)?;
    let cfg = RunConfig {
        bc,
        k: pick!(k, 1.0),
        lambda0: pick!(lambda0, 0.0),
        lambda1: pick!(lambda1, 0.0),
        xi0: pick!(xi0, 0.5),
        stiffness: pick!(stiffness, 1.0),
        mass: pick!(mass, 1.0),
        n_modes: pick!(n_modes, 3),
        alpha_max: pick!(alpha_max, 25.0),
        grid_step: pick!(grid_step, 0.01),
        tol: pick!(tol, 1e-12),
        param,
        start: pick!(start, 0.0),
        stop: pick!(stop, 10.0),
        count: pick!(count, 11),
        alpha: f.alpha.or(file.alpha),
        mode_index: pick!(mode_index, 1),
        samples: pick!(samples, SHAPE_GRID_POINTS),
        out: f.out.clone().or(file.out.clone()),
    };
    cfg.validate()?;
    Ok(cfg)
}

/// `x` with 9 significant digits, fixed notation for moderate magnitudes.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.8e}");
    let exp: i32 = sci.split_once('e').and_then(|(_, e)| e.parse().ok()).expect("scientific format");
    if !(-5..=15).contains(&exp) {
        return sci;
    }
    // exponent taken after rounding, so 9.9999999996 gives 10.0000000
    let decimals = (8 - exp).max(0) as usize;
    let rounded: f64 = sci.parse().expect("round trip");
    format!("{rounded:.decimals$}")
}

/// Output of a subcommand: text for stdout or the output file, diagnostics
/// for stderr and a failure that still lets the partial text be written.
#[derive(Debug, Default)]
pub struct Report {
    pub body: String,
    pub notes: Vec<String>,
    pub failure: Option<CliError>,
}

pub fn cmd_freq(cfg: &RunConfig) -> Result<Report, CliError> {
    let bm = cfg.model();
    let mut report = Report::default();
    let alphas = match find_frequencies(&bm, cfg.n_modes, &cfg.scan()) {
        Ok(a) => a,
        Err(BeamError::Shortfall { found, requested, alpha_max }) => {
            let msg = format!("found only {} of {requested} frequencies below alpha = {alpha_max}", found.len());
            report.failure = Some(CliError::Numerical(msg));
            found
        }
        Err(e) => return Err(e.into()),
    };
    report.body.push_str("mode_index,alpha,omega\n");
    for (i, a) in alphas.iter().enumerate() {
        let _ = writeln!(report.body, "{},{},{}", i + 1, fmt_sig(*a), fmt_sig(alpha_to_omega(&bm, *a)));
    }
    Ok(report)
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<Report, CliError> {
    let spec = SweepSpec::linspace(cfg.param, cfg.start, cfg.stop, cfg.count, cfg.model(), cfg.n_modes, cfg.scan());
    let rows = sweep(&spec)?;
    let mut report = Report::default();
    report.body.push_str("param,value");
    for i in 1..=cfg.n_modes {
        let _ = write!(report.body, ",alpha{i}");
    }
    report.body.push('\n');
    for row in &rows {
        let _ = write!(report.body, "{},{}", cfg.param, fmt_sig(row.value));
        for a in &row.alphas {
            report.body.push(',');
            if let Some(a) = a {
                report.body.push_str(&fmt_sig(*a));
            }
        }
        report.body.push('\n');
        for note in &row.notes {
            report.notes.push(format!("{} = {}: {note}", cfg.param, fmt_sig(row.value)));
        }
    }
    Ok(report)
}

fn shape_alpha(cfg: &RunConfig) -> Result<f64, CliError> {
    if let Some(a) = cfg.alpha {
        return Ok(a);
    }
    let alphas = find_frequencies(&cfg.model(), cfg.mode_index, &cfg.scan())?;
    Ok(alphas[cfg.mode_index - 1])
}

pub fn cmd_shape(cfg: &RunConfig) -> Result<Report, CliError> {
    let bm = cfg.model();
    let mode = mode_shape(&bm, shape_alpha(cfg)?)?;
    let mut report = Report::default();
    report.body.push_str("x,phi\n");
    for (x, y) in mode.samples(cfg.samples) {
        let _ = writeln!(report.body, "{},{}", fmt_sig(x), fmt_sig(y));
    }
    Ok(report)
}

pub fn cmd_verify(cfg: &RunConfig, perturb: bool) -> Result<Report, CliError> {
    let bm = cfg.model();
    let alphas = find_frequencies(&bm, cfg.n_modes, &cfg.scan())?;
    let mut report = Report::default();
    let _ = writeln!(
        report.body,
        "bc={} k={} lambda0={} lambda1={} xi0={} tolerance={:e}*scale{}",
        cfg.bc,
        cfg.k,
        cfg.lambda0,
        cfg.lambda1,
        cfg.xi0,
        RESIDUAL_TOLERANCE,
        if perturb { " perturbed" } else { "" }
    );
    let mut failed = 0;
    for (i, &alpha) in alphas.iter().enumerate() {
        let mode = if perturb { mode_shape_unchecked(&bm, alpha + PERTURBATION)? } else { mode_shape(&bm, alpha)? };
        let r = mode.residual_report(&bm)?;
        let ok = r.passes(RESIDUAL_TOLERANCE);
        failed += usize::from(!ok);
        let deltas: Vec<String> = r.delta_coeffs.iter().map(|(j, c)| format!("d{j}={}", fmt_sig(*c))).collect();
        let _ = writeln!(
            report.body,
            "mode {} alpha={} {} smooth={} scale={} {}",
            i + 1,
            fmt_sig(mode.alpha),
            if deltas.is_empty() { "no delta terms".to_string() } else { deltas.join(" ") },
            fmt_sig(r.smooth_residual_max),
            fmt_sig(r.scale),
            if ok { "PASS" } else { "FAIL" }
        );
    }
    let _ = writeln!(report.body, "{} of {} modes pass", alphas.len() - failed, alphas.len());
    if failed > 0 {
        report.failure = Some(CliError::Numerical(format!("{failed} modes exceed the residual tolerance")));
    }
    Ok(report)
}

pub fn cmd_algebra_check() -> Report {
    let suite = run_suite(DEFAULT_SEED, DEFAULT_TRIPLES);
    let mut report = Report::default();
    let mut passed = 0;
    for c in &suite.checks {
        passed += usize::from(c.passed());
        let _ = writeln!(
            report.body,
            "{} {}: {}/{} cases, max error {:.3e} (tolerance {:e})",
            if c.passed() { "PASS" } else { "FAIL" },
            c.name,
            c.cases - c.failures,
            c.cases,
            c.max_error,
            c.tolerance
        );
    }
    let _ = writeln!(report.body, "{passed}/{} checks pass", suite.checks.len());
    if !suite.passed() {
        report.failure = Some(CliError::Numerical("algebra checks failed".into()));
    }
    report
}

pub fn run(cli: &Cli) -> Result<(RunConfig, Report), CliError> {
    let args = cli.command.args();
    let cfg = resolve(args)?;
    if args.verbose {
        eprintln!("{}", cfg.describe());
    }
    let report = match &cli.command {
        Command::Freq(_) => cmd_freq(&cfg)?,
        Command::Sweep(_) => cmd_sweep(&cfg)?,
        Command::Shape(_) => cmd_shape(&cfg)?,
        Command::Verify(a) => cmd_verify(&cfg, a.perturb)?,
        Command::AlgebraCheck(_) => cmd_algebra_check(),
    };
    Ok((cfg, report))
}
