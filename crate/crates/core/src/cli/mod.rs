//! The `zlab` command line.
//!
//! Every command prints its CSV rows to stdout and writes the same CSV plus a
//! JSON summary to the results directory. Exit codes: 0 pass, 1 fail,
//! 2 usage or configuration error.

pub mod checks;
pub mod config;
pub mod report;

use std::ffi::OsString;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::optimize::{objective, run_nelder_mead, NelderMeadOptions, Target};
use checks::{CheckError, ReproduceTarget, VerifyCheck};
use config::{ConfigError, RunConfig};
use report::{Check, Report, Row};

#[derive(Debug, Parser)]
#[command(name = "zlab", version, about = "Mollified mean values, zero proportions and their numerical checks")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Directory for CSV and summary files
    #[arg(long, global = true, default_value = "results")]
    pub results_dir: PathBuf,
    /// Also compare against the frozen high-precision goldens
    #[arg(long, global = true)]
    pub golden: bool,
    /// Print rows only, write no files
    #[arg(long, global = true)]
    pub no_save: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Recompute the published constants and check them against their thresholds
    Reproduce {
        #[arg(value_enum)]
        target: ReproduceArg,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Nelder–Mead search over R, δ and the polynomial coefficients
    Optimize {
        #[arg(value_enum)]
        target: TargetArg,
        /// Start point; defaults to the built-in parameters
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        /// Added to every start coordinate
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        perturb: f64,
        #[arg(long, default_value_t = NelderMeadOptions::default().restarts)]
        restarts: usize,
        /// Where to write the best parameters (default: results directory)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one of the numerical property suites
    Verify {
        #[arg(value_enum)]
        check: CheckArg,
        /// Height for `moment` and `zero-count`
        #[arg(long = "T", value_name = "X")]
        t: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Zero counting on the critical line
    Zeros {
        #[command(subcommand)]
        action: ZerosAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum ZerosAction {
    /// Count sign changes of Z(t) on (10, T] and compare with N(T)
    Count {
        #[arg(long = "T", value_name = "X")]
        t: f64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ReproduceArg {
    Section2,
    Section3,
    Theorem1,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TargetArg {
    Section2,
    Section3,
    #[value(alias = "theorem1")]
    Combined,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CheckArg {
    SigmaQuadrature,
    ExpformDerivatives,
    FunctionalEquation,
    Moment,
    ZeroCount,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config {path}: {err}")]
    Config { path: String, err: ConfigError },
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("{0}")]
    Compute(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Compute(_) => 1,
            _ => 2,
        }
    }
}

impl From<CheckError> for CliError {
    fn from(e: CheckError) -> Self {
        match e {
            CheckError::Config(err) => CliError::Config { path: "<built-in>".into(), err },
            CheckError::Num(crate::numverify::NumError::InvalidConfig(m)) => CliError::Usage(m),
            other => CliError::Compute(other.to_string()),
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<RunConfig, CliError> {
    let Some(path) = path else {
        return Ok(RunConfig::default());
    };
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    RunConfig::parse(&text).map_err(|err| CliError::Config {
        path: path.display().to_string(),
        err,
    })
}

fn check_height(t: Option<f64>) -> Result<(), CliError> {
    match t {
        Some(t) if !(t.is_finite() && t > crate::numverify::zeros::SCAN_START) => Err(CliError::Usage(format!(
            "--T must be a finite height above {}",
            crate::numverify::zeros::SCAN_START
        ))),
        _ => Ok(()),
    }
}

fn stamp() -> String {
    chrono::Local::now().format("%Y%m%d-%H%M%S%.3f").to_string()
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    let golden = cli.common.golden;
    let (report, stem) = match &cli.command {
        Command::Reproduce { target, config } => {
            let cfg = load_config(config.as_deref())?;
            let t = match target {
                ReproduceArg::Section2 => ReproduceTarget::Section2,
                ReproduceArg::Section3 => ReproduceTarget::Section3,
                ReproduceArg::Theorem1 => ReproduceTarget::Theorem1,
            };
            (checks::reproduce(t, &cfg, golden)?, format!("reproduce-{}", t.name()))
        }
        Command::Verify { check, t, seed, config } => {
            check_height(*t)?;
            let cfg = load_config(config.as_deref())?;
            let c = match check {
                CheckArg::SigmaQuadrature => VerifyCheck::SigmaQuadrature,
                CheckArg::ExpformDerivatives => VerifyCheck::ExpformDerivatives,
                CheckArg::FunctionalEquation => VerifyCheck::FunctionalEquation,
                CheckArg::Moment => VerifyCheck::Moment,
                CheckArg::ZeroCount => VerifyCheck::ZeroCount,
            };
            (checks::verify(c, *t, *seed, &cfg)?, format!("verify-{}", c.name()))
        }
        Command::Zeros { action: ZerosAction::Count { t } } => {
            check_height(Some(*t))?;
            (checks::zeros_count(*t, golden).map_err(|e| match e {
                CheckError::Other(m) => CliError::Usage(m),
                other => other.into(),
            })?, "zeros-count".to_string())
        }
        Command::Optimize {
            target,
            config,
            seed,
            budget,
            perturb,
            restarts,
            out,
        } => {
            let cfg = load_config(config.as_deref())?;
            let target = match target {
                TargetArg::Section2 => Target::Section2,
                TargetArg::Section3 => Target::Section3,
                TargetArg::Combined => Target::Combined,
            };
            let opts = NelderMeadOptions {
                budget: *budget,
                seed: *seed,
                restarts: *restarts,
                ..Default::default()
            };
            let stem = format!("optimize-{}-{}", target.name(), stamp());
            let params_path = out
                .clone()
                .unwrap_or_else(|| cli.common.results_dir.join(format!("{stem}.cfg")));
            let rep = optimize(&cfg, target, *perturb, &opts, golden, &params_path, cli.common.no_save)?;
            (rep, stem)
        }
    };
    emit(&report, &cli.common, &stem)?;
    Ok(report.exit_code())
}

fn emit(report: &Report, common: &Common, stem: &str) -> Result<(), CliError> {
    report
        .write_csv(io::stdout().lock())
        .map_err(|e| CliError::Io(io::Error::other(e)))?;
    for line in report.diff() {
        eprintln!("{line}");
    }
    if !common.no_save {
        let stem = if stem.starts_with("optimize-") {
            stem.to_string()
        } else {
            format!("{stem}-{}", stamp())
        };
        let (csv, summary) = report.save(&common.results_dir, &stem)?;
        eprintln!("wrote {} and {}", csv.display(), summary.display());
    }
    eprintln!("{}", if report.pass() { "PASS" } else { "FAIL" });
    Ok(())
}

fn optimize(
    cfg: &RunConfig,
    target: Target,
    perturb: f64,
    opts: &NelderMeadOptions,
    golden: bool,
    params_path: &Path,
    no_save: bool,
) -> Result<Report, CliError> {
    use checks::goldens::*;
    let space = cfg.search_space(target);
    let start: Vec<f64> = cfg.to_point(&space).iter().map(|v| v + perturb).collect();
    let res = run_nelder_mead(&space, &start, opts).map_err(|e| CliError::Usage(e.to_string()))?;
    let best_cfg = cfg.with_point(&space, &res.best_params.values);
    let recomputed = objective(&space, &res.best_params.values).map_err(|e| CliError::Compute(e.to_string()))?;

    let mut rep = Report::new("optimize", target.name());
    let check = if target.maximize() { Check::AtLeast } else { Check::AtMost };
    rep.push(Row::new("best_vs_start", res.best_value, res.start_value, 0.0, check));
    rep.push(Row::within("best_recomputed", recomputed, res.best_value, 1e-12));

    let text = best_cfg.to_text();
    let reloaded = RunConfig::parse(&text).map_err(|err| CliError::Config {
        path: params_path.display().to_string(),
        err,
    })?;
    let back = reloaded.to_point(&reloaded.search_space(target));
    let identical = back.len() == res.best_params.values.len()
        && back.iter().zip(&res.best_params.values).all(|(a, b)| a.to_bits() == b.to_bits());
    rep.push(Row::within("params_reload_mismatch", if identical { 0.0 } else { 1.0 }, 0.0, 0.0));

    if golden {
        let row = match target {
            Target::Section2 => Row::new("kappa_G", res.best_value, KAPPA_G_MAX, KAPPA_G_SLACK, Check::AtMost),
            Target::Section3 => Row::new("kappa_c", res.best_value, KAPPA_C_MIN, 1e-5, Check::AtLeast),
            Target::Combined => Row::at_least("kappa_d", res.best_value, KAPPA_D_MIN),
        };
        rep.push(row);
    }

    let params: serde_json::Map<String, serde_json::Value> = res
        .best_params
        .labels
        .iter()
        .zip(&res.best_params.values)
        .map(|(l, v)| (l.clone(), json!(v)))
        .collect();
    rep.detail("seed", json!(opts.seed));
    rep.detail("budget", json!(opts.budget));
    rep.detail("evaluations", json!(res.evaluations));
    rep.detail("start_value", json!(res.start_value));
    rep.detail("best_value", json!(res.best_value));
    rep.detail("best_params", serde_json::Value::Object(params));
    rep.detail(
        "trace",
        json!(res.trace.iter().map(|e| json!([e.evaluations, e.value])).collect::<Vec<_>>()),
    );

    eprintln!(
        "{}: start {:.9}, best {:.9} after {} evaluations ({} improvements)",
        target.name(),
        res.start_value,
        res.best_value,
        res.evaluations,
        res.trace.len()
    );
    if !no_save {
        if let Some(dir) = params_path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        fs::write(params_path, text)?;
        rep.detail("params_file", json!(params_path.display().to_string()));
        eprintln!("best parameters written to {}", params_path.display());
    }
    Ok(rep)
}
