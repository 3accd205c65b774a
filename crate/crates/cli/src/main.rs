//! `dynbc`: batch front end for the spectral and Monte Carlo solvers.

mod commands;
mod config;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dynbc::geometry::Point;

use crate::commands::{CliError, SampleKind};
use crate::config::{Output, RawConfig, RunConfig};
use crate::table::emit_with;

#[derive(Parser)]
#[command(name = "dynbc", version, about = "Laplace's equation with fractional dynamic boundary conditions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Flat `key = value` configuration file.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Overrides as `--key value` or `--key=value`, e.g. `--bc.k -1`.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "--KEY VALUE")]
    overrides: Vec<String>,
}

impl ConfigArgs {
    fn load(&self) -> Result<RunConfig, CliError> {
        let mut raw = match &self.config {
            Some(p) => RawConfig::from_file(p)?,
            None => RawConfig::default(),
        };
        raw.apply_overrides(&self.overrides)?;
        Ok(RunConfig::from_raw(&raw)?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Stable,
    InverseStable,
    InverseTempered,
    ExitAngle,
    BoundaryIncrement,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues up to `datum.n_max` and the spectral-condition check.
    Eigen(ConfigArgs),
    /// Spectral solution at every `eval.times` x `eval.points`.
    Solve(ConfigArgs),
    /// Monte Carlo estimates at every `eval.times` x `eval.points` (disk, k <= 0).
    Simulate(ConfigArgs),
    /// Cross-validates both routes; exit code 4 when they disagree.
    Compare(ConfigArgs),
    /// Mittag-Leffler function values.
    Mlf {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        /// Comma-separated arguments.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        z: Vec<f64>,
        /// Output directory (stdout if absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Raw variates from one sampler as a single-column CSV.
    Sample {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        theta: f64,
        /// Calendar time for the inverse subordinators.
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        /// Tempered grid step.
        #[arg(long, default_value_t = 1e-3)]
        delta: f64,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        /// Start point for exit angles.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        x1: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        x2: f64,
        #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
        k: f64,
        #[arg(long, default_value_t = 1.0)]
        l: f64,
        /// Intrinsic time for boundary increments.
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        /// Output directory (stdout if absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Eigen(a) => {
            let cfg = a.load()?;
            commands::eigen(&cfg)?.emit(&cfg.output, "eigen")?;
        }
        Command::Solve(a) => {
            let cfg = a.load()?;
            commands::solve(&cfg)?.emit(&cfg.output, "solve")?;
        }
        Command::Simulate(a) => {
            let cfg = a.load()?;
            commands::simulate(&cfg)?.emit(&cfg.output, "simulate")?;
        }
        Command::Compare(a) => commands::compare_routes(&a.load()?)?,
        Command::Mlf { alpha, beta, z, out } => {
            let t = commands::mlf(alpha, beta, &z)?;
            emit_with(out.as_deref(), "mlf.csv", |w| t.write_csv(w))?;
        }
        Command::Sample { kind, n, seed, alpha, theta, t, delta, radius, x1, x2, k, l, s, out } => {
            let kind = match kind {
                Kind::Stable => SampleKind::Stable { alpha },
                Kind::InverseStable => SampleKind::InverseStable { alpha, t },
                Kind::InverseTempered => SampleKind::InverseTempered { alpha, theta, t, delta },
                Kind::ExitAngle => SampleKind::ExitAngle { radius, x: Point::planar(x1, x2) },
                Kind::BoundaryIncrement => SampleKind::BoundaryIncrement { radius, k, l, s },
            };
            let table = commands::sample(kind, n, seed)?;
            let output = Output { dir: out, format: config::Format::Csv };
            table.emit(&output, "sample")?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
