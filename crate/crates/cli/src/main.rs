//! `graphflow`: solve and check semilinear diffusion on weighted graphs.
//!
//! Exit status: 0 success, 1 io, 2 parse or configuration, 3 solver failure,
//! 4 property violation in `verify`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod data;
mod error;
mod expr;
mod output;
mod pipelines;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{ExperimentConfig, Kind, Suite, DEFAULT_EPSILON};
use error::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "graphflow", version, about = "Semilinear diffusion on weighted graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Experiment {
    /// TOML file with experiment keys; flags override its values.
    #[arg(long, short = 'c')]
    config: Option<PathBuf>,

    #[command(flatten)]
    flags: ExperimentConfig,
}

impl Experiment {
    fn resolve(self) -> CliResult<ExperimentConfig> {
        let base = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        Ok(base.overlay(self.flags))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated graph as JSON (infinite families need --radius).
    Generate {
        /// path:N, cycle:N, lattice:Z^d or tree:b.
        spec: String,
        /// Ball radius around --root for infinite families; exterior edges become killing.
        #[arg(long)]
        radius: Option<usize>,
        #[arg(long)]
        root: Option<String>,
        /// Output file [default: stdout].
        #[arg(long, short = 'o')]
        output: Option<PathBuf>,
    },
    /// Solve (id + λ(F + Δ))u = g by exhaustion; writes node_id,value CSV and a JSON report.
    Stationary(Experiment),
    /// Implicit Euler in time; writes t,node_id,value CSV and a JSON report.
    Evolve(Experiment),
    /// Run a property suite; exits 4 on any violation.
    Verify {
        suite: Suite,
        #[command(flatten)]
        experiment: Experiment,
    },
    /// Export derived series as CSV.
    Export {
        #[command(subcommand)]
        what: Export,
    },
    /// Run the pipeline named by `kind` in a config file.
    Run(Experiment),
}

#[derive(Subcommand)]
enum Export {
    /// Barrier θ as t,__barrier__,value rows (discrete recursion unless --continuous).
    Barrier {
        /// Absorption exponent q ≠ 1.
        #[arg(long)]
        q: f64,
        /// Initial bound M.
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        /// Final time [default: T_* + 0.5 for q < 1, else 1].
        #[arg(long, short = 'T')]
        horizon: Option<f64>,
        #[arg(long, short = 'e', default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
        /// Sample the closed form instead of the implicit recursion.
        #[arg(long)]
        continuous: bool,
        #[arg(long, short = 'o', default_value = "barrier.csv")]
        output: PathBuf,
    },
}

fn dispatch(command: Command) -> CliResult<()> {
    match command {
        Command::Generate { spec, radius, root, output } => {
            pipelines::generate(&spec, radius, root.as_deref(), output.as_deref())
        }
        Command::Stationary(e) => pipelines::stationary(&e.resolve()?),
        Command::Evolve(e) => pipelines::evolve(&e.resolve()?),
        Command::Verify { suite, experiment } => suites::verify(suite, &experiment.resolve()?),
        Command::Export { what: Export::Barrier { q, m, horizon, epsilon, continuous, output } } => {
            pipelines::export_barrier(q, m, horizon, epsilon, continuous, &output)
        }
        Command::Run(e) => {
            if e.config.is_none() {
                return Err(CliError::Config("run needs --config".into()));
            }
            let cfg = e.resolve()?;
            match cfg.kind {
                Some(Kind::Stationary) => pipelines::stationary(&cfg),
                Some(Kind::Evolve) => pipelines::evolve(&cfg),
                Some(Kind::Verify) => {
                    let suite = cfg.suite.ok_or_else(|| CliError::Config("kind = \"verify\" needs suite".into()))?;
                    suites::verify(suite, &cfg)
                }
                None => Err(CliError::Config("config has no kind".into())),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("graphflow: {e}");
            e.exit_code()
        }
    }
}
