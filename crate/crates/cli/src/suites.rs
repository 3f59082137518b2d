//! Randomized property suites behind `verify`. Instances run in parallel and
//! are reduced in index order, so a seed fixes the report exactly.

use std::sync::Arc;

use graphflow_core::barriers::{extinction_time, parabolic_compare};
use graphflow_core::evolution::{
    contraction_check, decay_check, implicit_euler_march, make_uniform_discretization, semigroup_linear_oracle,
    zero_forcing, Forcing,
};
use graphflow_core::graph::lp_distance;
use graphflow_core::nonlinearity::LipschitzShape;
use graphflow_core::sampling::{instance_rng, raised, uniform_function, GraphSampler, SuiteRng};
use graphflow_core::stationary::{
    accretivity_witness, compare_solutions, omega_contractivity_check, shifted_accretivity_witness,
    ResolventProblem, SolveOptions,
};
use graphflow_core::{DirichletSubgraph, GridFunction, Nonlinearity, NonlinearityClass, WeightedGraph};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, Suite};
use crate::data::DataSpec;
use crate::error::{CliError, CliResult};
use crate::output::write_json;
use crate::pipelines::{barrier_summary, integrate, positivity_summary, POSITIVITY_FLOOR};

const PAIRING_FLOOR: f64 = -1e-12;
const STEP_RATIOS: [f64; 3] = [0.1, 0.5, 0.9];
const SLACK_FACTOR: f64 = 5.0;

#[derive(Clone, Copy, Default)]
struct Tally {
    checks: usize,
    failures: usize,
    worst: f64,
}

impl Tally {
    fn new() -> Self {
        Tally { checks: 0, failures: 0, worst: f64::NEG_INFINITY }
    }

    /// Records one check whose inequality holds when `excess ≤ 0`.
    fn record(&mut self, excess: f64) {
        self.checks += 1;
        if !(excess <= 0.0) {
            self.failures += 1;
        }
        self.worst = self.worst.max(excess);
    }

    /// Records a pass/fail check that has no numeric margin.
    fn record_bool(&mut self, ok: bool) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.checks += other.checks;
        self.failures += other.failures;
        self.worst = self.worst.max(other.worst);
        self
    }
}

#[derive(Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub seed: u64,
    pub instances: usize,
    pub checks: usize,
    pub failures: usize,
    pub holds: bool,
    /// Largest excess of a checked left side over its bound (≤ 0 when all hold).
    pub worst_excess: f64,
    pub notes: Vec<String>,
}

fn f1_family() -> Vec<Nonlinearity> {
    let mut v = vec![Nonlinearity::zero(), Nonlinearity::linear()];
    v.extend([0.5, 2.0, 3.0].map(|q| Nonlinearity::power_absorption(q).expect("q > 0")));
    v
}

fn random_f2(rng: &mut SuiteRng) -> Nonlinearity {
    let shapes = [LipschitzShape::Sin, LipschitzShape::Tanh, LipschitzShape::Atan, LipschitzShape::Linear];
    let shape = shapes[rng.random_range(0..shapes.len())];
    Nonlinearity::lipschitz(shape, rng.random_range(0.2..4.0)).expect("L > 0")
}

fn pick(rng: &mut SuiteRng, fixed: Option<&Nonlinearity>, class: NonlinearityClass) -> Nonlinearity {
    if let Some(nl) = fixed {
        return nl.clone();
    }
    match class {
        NonlinearityClass::F1 => {
            let fam = f1_family();
            fam[rng.random_range(0..fam.len())].clone()
        }
        NonlinearityClass::F2 => random_f2(rng),
    }
}

fn sample_graph(rng: &mut SuiteRng, max_nodes: usize) -> CliResult<DirichletSubgraph> {
    let g: WeightedGraph = GraphSampler::up_to(max_nodes).sample(rng).into();
    Ok(DirichletSubgraph::whole(&g)?)
}

fn optional_nl(cfg: &ExperimentConfig) -> CliResult<Option<Nonlinearity>> {
    cfg.nonlinearity.as_ref().map(|_| cfg.nonlinearity()).transpose()
}

fn run_parallel(n: usize, f: impl Fn(usize) -> CliResult<Tally> + Sync + Send) -> CliResult<Tally> {
    let parts: Vec<CliResult<Tally>> = (0..n).into_par_iter().map(f).collect();
    let mut total = Tally::new();
    for p in parts {
        total = total.merge(p?);
    }
    Ok(total)
}

/// Spatial profile times a smooth time modulation.
fn modulated(profile: GridFunction) -> Forcing {
    Arc::new(move |t, x| profile.value_or_zero(x) * (1.0 + 0.5 * t.sin()))
}

fn accretivity(cfg: &ExperimentConfig, seed: u64, n: usize) -> CliResult<Tally> {
    let fixed = optional_nl(cfg)?;
    run_parallel(n, |i| {
        let mut rng = instance_rng(seed, i as u64);
        let sub = sample_graph(&mut rng, 12)?;
        let u = uniform_function(&mut rng, sub.window(), -2.0, 2.0);
        let v = uniform_function(&mut rng, sub.window(), -2.0, 2.0);
        let mut tally = Tally::new();
        for p in [1.0, 2.0, 3.0] {
            let mut nls = match &fixed {
                Some(nl) => vec![nl.clone()],
                None => f1_family(),
            };
            if fixed.is_none() {
                nls.push(random_f2(&mut rng));
            }
            for nl in nls {
                match nl.class() {
                    NonlinearityClass::F1 => tally.record(PAIRING_FLOOR - accretivity_witness(&sub, &nl, &u, &v, p)?),
                    NonlinearityClass::F2 => {
                        let l = nl.lipschitz_constant().ok_or(CliError::Config("F2 without L".into()))?;
                        tally.record(PAIRING_FLOOR - shifted_accretivity_witness(&sub, &nl, &u, &v, p, l)?);
                        if l > 0.0 {
                            for r in STEP_RATIOS {
                                let ok = omega_contractivity_check(&sub, &nl, &u, &v, r / l, p)?;
                                tally.record_bool(ok);
                            }
                        }
                    }
                }
            }
        }
        Ok(tally)
    })
}

fn comparison(cfg: &ExperimentConfig, seed: u64, n: usize) -> CliResult<Tally> {
    let fixed = optional_nl(cfg)?;
    let horizon = cfg.horizon()?;
    let eps = cfg.epsilon()?;
    let tol = cfg.check_tol()?;
    let steps = (horizon / eps).ceil() as usize;
    let opts = SolveOptions::with_tol(cfg.solve_tol()?);
    run_parallel(2 * n, |i| {
        let mut rng = instance_rng(seed, i as u64);
        let class = if i % 2 == 0 { NonlinearityClass::F1 } else { NonlinearityClass::F2 };
        let class = fixed.as_ref().map_or(class, Nonlinearity::class);
        let nl = pick(&mut rng, fixed.as_ref(), class);
        if let Some(l) = nl.lipschitz_constant().filter(|_| nl.class() == NonlinearityClass::F2) {
            if horizon / steps as f64 * l >= 1.0 {
                return Err(CliError::Config(format!("step {eps} violates λ·L < 1 for L = {l}")));
            }
        }
        let sub = sample_graph(&mut rng, 20)?;
        let u0 = uniform_function(&mut rng, sub.window(), -1.0, 1.0);
        let v0 = raised(&mut rng, &u0, 1.0, 0.5);
        let a = uniform_function(&mut rng, sub.window(), -1.0, 1.0);
        let b = raised(&mut rng, &a, 1.0, 0.5);
        let du = make_uniform_discretization(horizon, steps, modulated(a.clone()))?;
        let dv = make_uniform_discretization(horizon, steps, modulated(b.clone()))?;
        let tu = implicit_euler_march(&sub, &nl, &u0, &du, &opts)?;
        let tv = implicit_euler_march(&sub, &nl, &v0, &dv, &opts)?;
        let mut tally = Tally::new();
        tally.record(parabolic_compare(&tu, &tv, tol)?.worst);
        // the stationary counterpart at the first step width
        let lambda = horizon / steps as f64;
        let p1 = ResolventProblem::new(&sub, &nl, lambda, &b)?;
        let p2 = ResolventProblem::new(&sub, &nl, lambda, &a)?;
        tally.record_bool(compare_solutions(&p1, &p2, &opts)?);
        Ok(tally)
    })
}

fn contraction(cfg: &ExperimentConfig, seed: u64, n: usize) -> CliResult<Tally> {
    let fixed = optional_nl(cfg)?;
    if fixed.as_ref().is_some_and(|nl| nl.class() != NonlinearityClass::F1) {
        return Err(CliError::Config("contraction suite needs an F1 nonlinearity".into()));
    }
    let horizon = cfg.horizon()?;
    let eps = cfg.epsilon()?;
    let p = cfg.p()?;
    let steps = (horizon / eps).ceil() as usize;
    let slack = SLACK_FACTOR * horizon / steps as f64;
    let opts = SolveOptions::with_tol(cfg.solve_tol()?);
    run_parallel(n, |i| {
        let mut rng = instance_rng(seed, i as u64);
        let nl = pick(&mut rng, fixed.as_ref(), NonlinearityClass::F1);
        let sub = sample_graph(&mut rng, 12)?;
        let u0 = uniform_function(&mut rng, sub.window(), -1.0, 1.0);
        let v0 = uniform_function(&mut rng, sub.window(), -1.0, 1.0);
        let h = modulated(uniform_function(&mut rng, sub.window(), -1.0, 1.0));
        let h_hat = modulated(uniform_function(&mut rng, sub.window(), -1.0, 1.0));
        let dh = make_uniform_discretization(horizon, steps, h.clone())?;
        let dh_hat = make_uniform_discretization(horizon, steps, h_hat.clone())?;
        let a = implicit_euler_march(&sub, &nl, &u0, &dh, &opts)?;
        let b = implicit_euler_march(&sub, &nl, &v0, &dh_hat, &opts)?;
        let c = implicit_euler_march(&sub, &nl, &v0, &dh, &opts)?;
        let mut tally = Tally::new();
        tally.record(contraction_check(&a, &b, &h, &h_hat, p, slack)?.worst);
        tally.record(contraction_check(&a, &c, &h, &h, p, slack)?.worst);
        Ok(tally)
    })
}

struct DecayTally {
    tally: Tally,
    order: f64,
}

fn decay(cfg: &ExperimentConfig, seed: u64, n: usize) -> CliResult<(Tally, Vec<String>)> {
    if optional_nl(cfg)?.is_some_and(|nl| !nl.is_linear()) {
        return Err(CliError::Config("decay suite needs the linear nonlinearity".into()));
    }
    let horizon = cfg.horizon()?;
    let eps = cfg.epsilon()?;
    let p = cfg.p()?;
    let steps = (horizon / eps).ceil() as usize;
    let slack = SLACK_FACTOR * horizon / steps as f64;
    let opts = SolveOptions::with_tol(cfg.solve_tol()?);
    let nl = Nonlinearity::linear();
    let parts: Vec<CliResult<DecayTally>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = instance_rng(seed, i as u64);
            let sub = sample_graph(&mut rng, 16)?;
            let u0 = uniform_function(&mut rng, sub.window(), -1.0, 1.0);
            let h = if i % 2 == 0 { zero_forcing() } else { modulated(uniform_function(&mut rng, sub.window(), -0.5, 0.5)) };
            let mut tally = Tally::new();
            let disc = make_uniform_discretization(horizon, steps, h)?;
            let tr = implicit_euler_march(&sub, &nl, &u0, &disc, &opts)?;
            tally.record(decay_check(&tr, p, slack)?.worst);
            // observed order against the semigroup at h = 0
            let exact = semigroup_linear_oracle(&sub, &u0, horizon)?;
            let gap = |k: usize| -> CliResult<f64> {
                let d = make_uniform_discretization(horizon, k, zero_forcing())?;
                let t = implicit_euler_march(&sub, &nl, &u0, &d, &opts)?;
                Ok(lp_distance(t.last(), &exact, p)?)
            };
            let order = (gap(steps)? / gap(2 * steps)?).log2();
            Ok(DecayTally { tally, order })
        })
        .collect();
    let mut total = Tally::new();
    let mut orders = Vec::with_capacity(n);
    for part in parts {
        let part = part?;
        total = total.merge(part.tally);
        orders.push(part.order);
    }
    orders.sort_by(f64::total_cmp);
    let note = match orders.len() {
        0 => Vec::new(),
        k => vec![format!(
            "observed order vs semigroup oracle at ε = {eps}: median {:.4}, range [{:.4}, {:.4}]",
            orders[k / 2],
            orders[0],
            orders[k - 1]
        )],
    };
    Ok((total, note))
}

fn barrier(cfg: &ExperimentConfig) -> CliResult<(Tally, Vec<String>)> {
    let mut cfg = cfg.clone();
    cfg.graph.get_or_insert_with(|| "path:50".into());
    cfg.nonlinearity.get_or_insert_with(|| "power:q=0.5".into());
    cfg.u0.get_or_insert_with(|| "const:1".into());
    let nl = cfg.nonlinearity()?;
    let q = nl
        .power_exponent()
        .filter(|&q| q != 1.0)
        .ok_or_else(|| CliError::Config(format!("barrier suite needs power absorption with q ≠ 1, got {nl}")))?;
    let u0 = cfg.data("u0")?;
    let h = cfg.data("h")?;
    if !h.is_zero() {
        return Err(CliError::Config("barrier suite needs h = const:0".into()));
    }
    if cfg.horizon.is_none() && q < 1.0 {
        let (host, root) = cfg.host()?;
        let m = match host.as_finite() {
            Some(g) => g.ids().iter().map(|x| u0.value(x, 0.0).abs()).fold(0.0, f64::max),
            None => u0.value(&root, 0.0).abs(),
        };
        cfg.horizon = Some(extinction_time(q, m.max(f64::MIN_POSITIVE))? + 0.5);
    }
    let run = integrate(&cfg, &nl, &u0, &DataSpec::Const(0.0))?;
    let summary = barrier_summary(&run.trajectory, cfg.check_tol()?, &run.solve)?
        .ok_or_else(|| CliError::Config("barrier needs u₀ ≢ 0".into()))?;
    let mut tally = Tally::new();
    tally.record(summary.worst_excess);
    let mut notes = vec![format!(
        "q = {q}, M = {}, T_* = {}, θ at T = {:.6e}, signed = {}",
        summary.m,
        summary.extinction_time.map_or("none".to_string(), |t| t.to_string()),
        summary.theta_final,
        summary.signed
    )];
    if let Some(pos) = positivity_summary(&run.trajectory)? {
        let min = pos.min_after_first();
        tally.record_bool(pos.holds && min > POSITIVITY_FLOOR);
        notes.push(format!("positivity: min after first step {min:.3e}"));
    }
    Ok((tally, notes))
}

/// Runs a suite, prints a one-line verdict, writes the report if requested,
/// and turns a failing verdict into a violation error.
pub fn verify(suite: Suite, cfg: &ExperimentConfig) -> CliResult<()> {
    let seed = cfg.seed();
    let default_instances = match suite {
        Suite::Accretivity => 200,
        Suite::Barrier => 1,
        _ => 50,
    };
    let n = cfg.instances.unwrap_or(default_instances);
    let (tally, notes, instances) = match suite {
        Suite::Accretivity => (accretivity(cfg, seed, n)?, Vec::new(), n),
        Suite::Comparison => (comparison(cfg, seed, n)?, vec![format!("{n} ordered pairs per class (F1 and F2)")], 2 * n),
        Suite::Contraction => (contraction(cfg, seed, n)?, Vec::new(), n),
        Suite::Decay => {
            let (t, notes) = decay(cfg, seed, n)?;
            (t, notes, n)
        }
        Suite::Barrier => {
            let (t, notes) = barrier(cfg)?;
            (t, notes, 1)
        }
    };
    let report = SuiteReport {
        suite: suite.name(),
        seed,
        instances,
        checks: tally.checks,
        failures: tally.failures,
        holds: tally.failures == 0,
        worst_excess: tally.worst,
        notes,
    };
    println!(
        "verify {}: {} ({} instances, {} checks, {} failures, worst excess {:.3e})",
        report.suite,
        if report.holds { "PASS" } else { "FAIL" },
        report.instances,
        report.checks,
        report.failures,
        report.worst_excess
    );
    for note in &report.notes {
        println!("  {note}");
    }
    if let Some(path) = cfg.report.as_deref() {
        write_json(path, &report)?;
    }
    if report.holds {
        Ok(())
    } else {
        Err(CliError::Violation(format!("{} suite: {} of {} checks failed", report.suite, report.failures, report.checks)))
    }
}
