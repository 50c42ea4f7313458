//! `monopole-lab`: roots, elliptic tables, curvature checks, simulations,
//! integrability checks and flux reports for the monopole systems.
//!
//! Exit codes: 0 when every threshold is met, 1 on a numerical breach or
//! failure, 2 on a configuration error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use monopole_core::fields::Family;

use commands::{Outcome, SimulateOptions};
use config::{ConfigError, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "monopole-lab", version, about = "Integrable monopole systems on the sphere")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    #[value(name = "CaseI")]
    CaseI,
    #[value(name = "CaseII")]
    CaseII,
    #[value(name = "CaseIILimit")]
    CaseIILimit,
    #[value(name = "VY")]
    Vy,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::CaseI => Family::CaseI,
            FamilyArg::CaseII => Family::CaseII,
            FamilyArg::CaseIILimit => Family::CaseIILimit,
            FamilyArg::Vy => Family::Vy,
        }
    }
}

#[derive(Debug, Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Family; without --config the built-in example system is used.
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    /// Output file (CSV).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Threshold or integrator tolerance, depending on the subcommand.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn load(&self) -> Result<RunConfig, ConfigError> {
        match (&self.config, self.family) {
            (Some(path), family) => {
                let cfg = RunConfig::load(path)?;
                if let Some(f) = family {
                    if Family::from(f) != cfg.family {
                        return Err(ConfigError(format!(
                            "--family {:?} disagrees with the config family {:?}",
                            Family::from(f),
                            cfg.family
                        )));
                    }
                }
                Ok(cfg)
            }
            (None, Some(f)) => Ok(RunConfig::example(f.into())),
            (None, None) => Err(ConfigError("give --config or --family".into())),
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Roots of the quartic and the admissibility conditions.
    Roots {
        #[command(flatten)]
        common: Common,
    },
    /// `u,Q,dQ` over one period of Q1.
    EllipticTable {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Closed-form against finite-difference curvature at random points.
    MetricCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Integrate trajectories and monitor H, F and the Casimirs.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        stride: Option<usize>,
        #[arg(long)]
        trajectories: Option<usize>,
        /// Largest acceptable relative drift of H and F.
        #[arg(long, default_value_t = 1e-7)]
        drift_tol: f64,
        #[arg(long, default_value_t = 1e-10)]
        casimir_tol: f64,
    },
    /// Integrability-condition residuals on a grid.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        stencil: Option<usize>,
    },
    /// Area and flux number, with a grid-refinement check.
    Flux {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 256)]
        n: usize,
    },
}

fn configure_threads() -> Result<(), ConfigError> {
    let Ok(v) = std::env::var("MONOPOLE_LAB_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| ConfigError(format!("MONOPOLE_LAB_THREADS must be a non-negative integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| ConfigError(e.to_string()))
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    configure_threads()?;
    match cli.command {
        Command::Roots { common } => commands::roots(&common.load()?),
        Command::EllipticTable { common, samples } => {
            commands::elliptic_table(&common.load()?, samples, common.out.as_deref())
        }
        Command::MetricCheck { common, samples } => {
            let cfg = common.load()?;
            let tol = commands::ensure_positive("--tol", common.tol.unwrap_or(1e-6))?;
            let seed = common.seed.unwrap_or(cfg.integrator.seed);
            commands::metric_check(&cfg, samples, tol, seed, common.out.as_deref())
        }
        Command::Simulate { common, t_end, stride, trajectories, drift_tol, casimir_tol } => {
            let cfg = common.load()?;
            let it = &cfg.integrator;
            let opt = SimulateOptions {
                t_end: t_end.unwrap_or(it.t_end),
                tol: commands::ensure_positive("--tol", common.tol.unwrap_or(it.tol))?,
                stride: stride.unwrap_or(it.stride).max(1),
                seed: common.seed.unwrap_or(it.seed),
                trajectories: trajectories.unwrap_or(it.trajectories).max(1),
                drift_tol,
                casimir_tol,
            };
            commands::simulate(&cfg, &opt, common.out.as_deref())
        }
        Command::Verify { common, grid, stencil } => {
            let cfg = common.load()?;
            let tol = commands::ensure_positive("--tol", common.tol.unwrap_or(1e-6))?;
            let n = grid.unwrap_or(cfg.grid.n);
            let stencil = stencil.unwrap_or(cfg.grid.stencil);
            commands::verify(&cfg, n, stencil, tol, common.out.as_deref())
        }
        Command::Flux { common, n } => {
            let cfg = common.load()?;
            let tol = commands::ensure_positive("--tol", common.tol.unwrap_or(1e-6))?;
            commands::flux(&cfg, n, tol, common.out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Breach) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let config = e.chain().any(|c| c.downcast_ref::<ConfigError>().is_some());
            ExitCode::from(if config { 2 } else { 1 })
        }
    }
}
