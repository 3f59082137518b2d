//! Experiment configuration: a TOML file whose keys mirror the command-line
//! flags. Flags given on the command line override the file.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use graphflow_core::graph::{generate, io, GeneratorSpec};
use graphflow_core::{Nonlinearity, NonlinearityClass, NodeId, WeightedGraph};
use serde::Deserialize;

use crate::data::DataSpec;
use crate::error::{CliError, CliResult};

pub const DEFAULT_P: f64 = 2.0;
pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_SOLVE_TOL: f64 = 1e-12;
pub const DEFAULT_CHECK_TOL: f64 = 1e-9;
pub const DEFAULT_EPSILON: f64 = 1e-2;
pub const DEFAULT_HORIZON: f64 = 1.0;
pub const DEFAULT_DEPTH: usize = 32;
pub const DEFAULT_DEPTH_MAX: usize = 64;
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Stationary,
    Evolve,
    Verify,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Accretivity,
    Comparison,
    Contraction,
    Barrier,
    Decay,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Accretivity => "accretivity",
            Suite::Comparison => "comparison",
            Suite::Contraction => "contraction",
            Suite::Barrier => "barrier",
            Suite::Decay => "decay",
        }
    }
}

/// Every experiment parameter. Unset values fall back to the documented defaults.
#[derive(Args, Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Pipeline to run (config files only; subcommands set it themselves).
    #[arg(skip)]
    pub kind: Option<Kind>,

    /// Property suite for `kind = "verify"` (config files only).
    #[arg(skip)]
    pub suite: Option<Suite>,

    /// Graph: generator spec (path:N, cycle:N, lattice:Z^d, tree:b) or a JSON graph file.
    #[arg(long, short = 'g')]
    pub graph: Option<String>,

    /// Nonlinearity: zero | linear | power:q=Q | lipschitz:<sin|tanh|atan|linear>:L=L.
    #[arg(long, short = 'n')]
    pub nonlinearity: Option<String>,

    /// Exhaustion root node, e.g. 0 or (0,0) [default: generator origin or first file node].
    #[arg(long)]
    pub root: Option<String>,

    /// Resolvent step λ for `stationary`.
    #[arg(long, conflicts_with = "alpha")]
    pub lambda: Option<f64>,

    /// Stationary shift α; solves with λ = 1/α. Needs α > 0, and α > L for F2.
    #[arg(long)]
    pub alpha: Option<f64>,

    /// Final time T [default: 1; verify barrier: T_* + 0.5].
    #[arg(long, short = 'T')]
    #[serde(alias = "T")]
    pub horizon: Option<f64>,

    /// Time step ε (uniform grid with ⌈T/ε⌉ steps) [default: 0.01].
    #[arg(long, short = 'e')]
    pub epsilon: Option<f64>,

    /// Finest step width mild refinement may use [default: T·1e-5].
    #[arg(long)]
    pub epsilon_target: Option<f64>,

    /// Ball radius used by `evolve` on infinite hosts without --mild [default: 32].
    #[arg(long)]
    pub depth: Option<usize>,

    /// Largest exhaustion depth [default: 64].
    #[arg(long)]
    pub depth_max: Option<usize>,

    /// Norm exponent p ≥ 1; `inf` for the sup norm [default: 2].
    #[arg(long, short = 'p')]
    pub p: Option<f64>,

    /// Acceptance threshold for exhaustion increments and mild Cauchy gaps [default: 1e-8].
    #[arg(long)]
    pub tol: Option<f64>,

    /// Relative residual tolerance of each resolvent solve [default: 1e-12].
    #[arg(long)]
    pub solve_tol: Option<f64>,

    /// Slack for property checks (barriers, comparison) [default: 1e-9].
    #[arg(long)]
    pub check_tol: Option<f64>,

    /// Initial state u₀ as a data spec (const:c, indicator:x, file:path, expr:e).
    #[arg(long)]
    pub u0: Option<String>,

    /// Stationary datum g as a data spec.
    #[arg(long = "datum")]
    pub g: Option<String>,

    /// Forcing h(t, x) as a data spec; `expr:` may use t [default: const:0].
    #[arg(long = "forcing")]
    pub h: Option<String>,

    /// Approximate the mild solution by joint refinement in ε and depth.
    #[arg(long)]
    pub mild: bool,

    /// Number of random instances for property suites.
    #[arg(long)]
    pub instances: Option<usize>,

    /// Seed for randomized suites [default: 20240601].
    #[arg(long, env = "GRAPHFLOW_SEED")]
    pub seed: Option<u64>,

    /// CSV output [default: solution.csv, trajectory.csv or barrier.csv].
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,

    /// JSON report [default: the CSV path with extension .json].
    #[arg(long)]
    pub report: Option<PathBuf>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($field:ident),*) => {
        ExperimentConfig { $($field: $top.$field.or($base.$field),)* mild: $top.mild || $base.mild }
    };
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Values set in `top` win over values set in `self`.
    pub fn overlay(self, top: ExperimentConfig) -> Self {
        let base = self;
        overlay!(base, top; kind, suite, graph, nonlinearity, root, lambda, alpha, horizon, epsilon,
            epsilon_target, depth, depth_max, p, tol, solve_tol, check_tol, u0, g, h, instances, seed, output, report)
    }

    pub fn p(&self) -> CliResult<f64> {
        let p = self.p.unwrap_or(DEFAULT_P);
        if !(p >= 1.0) {
            return Err(CliError::Config(format!("p must be ≥ 1, got {p}")));
        }
        Ok(p)
    }

    pub fn tol(&self) -> CliResult<f64> {
        positive("tol", self.tol.unwrap_or(DEFAULT_TOL))
    }

    pub fn solve_tol(&self) -> CliResult<f64> {
        positive("solve_tol", self.solve_tol.unwrap_or(DEFAULT_SOLVE_TOL))
    }

    pub fn check_tol(&self) -> CliResult<f64> {
        let t = self.check_tol.unwrap_or(DEFAULT_CHECK_TOL);
        if !(t >= 0.0) {
            return Err(CliError::Config(format!("check_tol must be ≥ 0, got {t}")));
        }
        Ok(t)
    }

    pub fn epsilon(&self) -> CliResult<f64> {
        positive("epsilon", self.epsilon.unwrap_or(DEFAULT_EPSILON))
    }

    pub fn horizon(&self) -> CliResult<f64> {
        positive("horizon", self.horizon.unwrap_or(DEFAULT_HORIZON))
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn nonlinearity(&self) -> CliResult<Nonlinearity> {
        let s = self.nonlinearity.as_deref().ok_or_else(|| CliError::Config("missing --nonlinearity".into()))?;
        Ok(s.parse::<Nonlinearity>()?)
    }

    pub fn data(&self, which: &str) -> CliResult<DataSpec> {
        let spec = match which {
            "u0" => self.u0.as_deref(),
            "g" => self.g.as_deref(),
            _ => self.h.as_deref().or(Some("const:0")),
        };
        let data = DataSpec::parse(spec.ok_or_else(|| CliError::Config(format!("missing data spec for {which}")))?)?;
        if which != "h" && data.depends_on_time() {
            return Err(CliError::Config(format!("{which} is static and cannot use t")));
        }
        Ok(data)
    }

    /// The host graph and its default exhaustion root.
    pub fn host(&self) -> CliResult<(WeightedGraph, NodeId)> {
        let spec = self.graph.as_deref().ok_or_else(|| CliError::Config("missing --graph".into()))?;
        let (host, default_root) = load_graph(spec)?;
        let root = match &self.root {
            Some(r) => r.parse()?,
            None => default_root,
        };
        if !host.contains(&root) {
            return Err(CliError::Config(format!("root {root} is not a node of {spec}")));
        }
        Ok((host, root))
    }

    /// λ from `lambda` or `1/alpha`, checked against the class of `nl`.
    pub fn resolvent_step(&self, nl: &Nonlinearity) -> CliResult<f64> {
        let lambda = match (self.lambda, self.alpha) {
            (Some(l), None) => l,
            (None, Some(a)) => {
                if !(a > 0.0) {
                    return Err(CliError::Config(format!("α must be > 0, got {a}")));
                }
                if let Some(l) = nl.lipschitz_constant().filter(|_| nl.class() == NonlinearityClass::F2) {
                    if a <= l {
                        return Err(CliError::Config(format!("α must exceed L = {l}, got {a}")));
                    }
                }
                1.0 / a
            }
            (Some(_), Some(_)) => return Err(CliError::Config("give either lambda or alpha, not both".into())),
            (None, None) => return Err(CliError::Config("stationary needs --lambda or --alpha".into())),
        };
        positive("lambda", lambda)?;
        check_step(nl, lambda)?;
        Ok(lambda)
    }
}

/// Rejects steps with λL ≥ 1 for F2 nonlinearities.
pub fn check_step(nl: &Nonlinearity, lambda: f64) -> CliResult<()> {
    if nl.class() == NonlinearityClass::F2 {
        let l = nl.lipschitz_constant().ok_or(CliError::Config("F2 nonlinearity without L".into()))?;
        if lambda * l >= 1.0 {
            return Err(CliError::Config(format!("step {lambda} violates λ·L < 1 for L = {l}")));
        }
    }
    Ok(())
}

fn positive(name: &str, v: f64) -> CliResult<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name} must be finite and > 0, got {v}")))
    }
}

/// Generator strings build oracles or finite graphs; anything else is read as a JSON file.
pub fn load_graph(spec: &str) -> CliResult<(WeightedGraph, NodeId)> {
    if let Ok(gen) = spec.parse::<GeneratorSpec>() {
        return Ok((gen.build()?, gen.default_root()));
    }
    let path = Path::new(spec.strip_prefix("file:").unwrap_or(spec));
    if !path.exists() {
        // surface the generator diagnostic for things that look like specs
        if spec.contains(':') && !spec.ends_with(".json") {
            generate(spec)?;
        }
        return Err(CliError::Io(format!("graph file {} not found", path.display())));
    }
    let host = io::load(path)?;
    let root = host.as_finite().and_then(|g| g.ids().first().cloned()).ok_or(CliError::Config("graph file has no nodes".into()))?;
    Ok((host, root))
}
