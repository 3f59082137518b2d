use std::path::{Path, PathBuf};

use graphflow_core::barriers::{
    discrete_barrier, extinction_time, positivity_check, verify_barrier, verify_signed_barrier, PositivityReport,
};
use graphflow_core::evolution::{
    implicit_euler_march, make_uniform_discretization, mild_solve, zero_forcing, MildOptions, RefinementStep,
    Trajectory,
};
use graphflow_core::graph::{io, DirichletSubgraph, Exhaustion};
use graphflow_core::stationary::{exhaust_resolvent, ExhaustionLevel, ExhaustionOptions, SolveOptions};
use graphflow_core::{GridFunction, Nonlinearity};
use serde::Serialize;

use crate::config::{check_step, load_graph, ExperimentConfig, DEFAULT_DEPTH, DEFAULT_DEPTH_MAX};
use crate::data::DataSpec;
use crate::error::{CliError, CliResult};
use crate::output::{report_path, write_barrier, write_json, write_solution, write_trajectory};

/// Values at or below this count as extinct in positivity checks.
pub const POSITIVITY_FLOOR: f64 = 1e-30;

#[derive(Serialize)]
struct Tolerances {
    solve: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    refinement: Option<f64>,
    check: f64,
}

#[derive(Serialize)]
struct StationaryReport<'a> {
    command: &'static str,
    graph: String,
    nonlinearity: String,
    root: String,
    lambda: f64,
    p: String,
    exhaustion_tol: f64,
    solve_tol: f64,
    depth: usize,
    nodes: usize,
    saturated: bool,
    monotone: Option<bool>,
    envelope_ok: Option<bool>,
    bound_constant: f64,
    bound_ok: bool,
    solution_norm: f64,
    datum_norm: f64,
    trace: &'a [ExhaustionLevel],
}

fn solve_options(cfg: &ExperimentConfig, p: f64) -> CliResult<SolveOptions> {
    let mut opts = SolveOptions::with_tol(cfg.solve_tol()?);
    opts.p = p;
    Ok(opts)
}

/// `p` as written in reports; `inf` for the sup norm.
pub fn p_label(p: f64) -> String {
    p.to_string()
}

pub fn stationary(cfg: &ExperimentConfig) -> CliResult<()> {
    let (host, root) = cfg.host()?;
    let nl = cfg.nonlinearity()?;
    let lambda = cfg.resolvent_step(&nl)?;
    let p = cfg.p()?;
    let tol = cfg.tol()?;
    let g = cfg.data("g")?;
    let mut opts = ExhaustionOptions::new(root.clone(), cfg.depth_max.unwrap_or(DEFAULT_DEPTH_MAX), tol);
    opts.p = p;
    opts.solve = solve_options(cfg, p)?;
    let res = exhaust_resolvent(&host, &nl, lambda, &g.node_data(), &opts)?;

    let csv = cfg.output.clone().unwrap_or_else(|| PathBuf::from("solution.csv"));
    write_solution(&csv, &res.u)?;
    let datum = GridFunction::from_fn(res.u.window().clone(), |x| g.value(x, 0.0))?;
    let report = StationaryReport {
        command: "stationary",
        graph: host.label().to_string(),
        nonlinearity: nl.to_string(),
        root: root.to_string(),
        lambda,
        p: p_label(p),
        exhaustion_tol: tol,
        solve_tol: opts.solve.tol,
        depth: res.depth,
        nodes: res.u.window().len(),
        saturated: res.saturated,
        monotone: res.monotone,
        envelope_ok: res.envelope_ok,
        bound_constant: res.bound_constant,
        bound_ok: res.bound_ok,
        solution_norm: res.u.lp_norm(p)?,
        datum_norm: datum.lp_norm(p)?,
        trace: &res.trace,
    };
    let json = report_path(cfg.report.as_deref(), &csv);
    write_json(&json, &report)?;
    println!(
        "stationary: depth {} ({} nodes), ‖u‖ = {:.6e}, bound {} -> {}",
        res.depth,
        report.nodes,
        report.solution_norm,
        if res.bound_ok { "ok" } else { "VIOLATED" },
        csv.display()
    );
    Ok(())
}

#[derive(Serialize)]
pub struct BarrierSummary {
    pub q: f64,
    pub m: f64,
    pub extinction_time: Option<f64>,
    pub signed: bool,
    pub holds: bool,
    pub worst_excess: f64,
    pub theta_final: f64,
}

/// Barrier verdict for power absorption with `h = 0`; `None` when it does not apply.
pub fn barrier_summary(traj: &Trajectory, tol: f64, opts: &SolveOptions) -> CliResult<Option<BarrierSummary>> {
    let q = match traj.nonlinearity().power_exponent() {
        Some(q) if q != 1.0 => q,
        _ => return Ok(None),
    };
    let u0 = &traj.states()[0];
    let m = u0.sup_norm();
    if m == 0.0 {
        return Ok(None);
    }
    let barrier = discrete_barrier(q, m, traj.times())?;
    let signed = u0.min() < 0.0;
    let (holds, worst) = if signed {
        let v = verify_signed_barrier(traj, &barrier, tol, opts)?;
        let worst = [v.barrier.barrier.worst, v.barrier.step.worst, v.envelope.worst, v.envelopes_under_barrier.worst];
        (v.holds(), worst.into_iter().fold(f64::NEG_INFINITY, f64::max))
    } else {
        let v = verify_barrier(traj, &barrier, tol)?;
        (v.holds(), v.barrier.worst.max(v.step.worst))
    };
    Ok(Some(BarrierSummary {
        q,
        m,
        extinction_time: if q < 1.0 { Some(extinction_time(q, m)?) } else { None },
        signed,
        holds,
        worst_excess: worst,
        theta_final: *barrier.values().expect("discrete barrier").last().expect("nonempty grid"),
    }))
}

/// Positivity report for `q > 1` absorption from `u₀ ≥ 0`, `u₀ ≢ 0`.
pub fn positivity_summary(traj: &Trajectory) -> CliResult<Option<PositivityReport>> {
    let q = traj.nonlinearity().power_exponent();
    let u0 = &traj.states()[0];
    if !q.is_some_and(|q| q > 1.0) || u0.min() < 0.0 || u0.max() == 0.0 {
        return Ok(None);
    }
    Ok(Some(positivity_check(traj, POSITIVITY_FLOOR)?))
}

pub struct Evolution {
    pub trajectory: Trajectory,
    pub depth: Option<usize>,
    pub refinement: Option<Vec<RefinementStep>>,
    pub solve: SolveOptions,
}

/// Runs the configured time integration: mild refinement, a whole finite
/// graph, or a fixed ball of an infinite host.
pub fn integrate(cfg: &ExperimentConfig, nl: &Nonlinearity, u0: &DataSpec, h: &DataSpec) -> CliResult<Evolution> {
    let (host, root) = cfg.host()?;
    let p = cfg.p()?;
    let eps = cfg.epsilon()?;
    let horizon = cfg.horizon()?;
    check_step(nl, eps)?;
    let solve = solve_options(cfg, p)?;
    let steps = (horizon / eps).ceil().max(1.0) as usize;
    if cfg.mild {
        let mut opts = MildOptions::new(horizon, root, cfg.tol()?);
        opts.depth_max = cfg.depth_max.unwrap_or(DEFAULT_DEPTH_MAX);
        opts.steps_start = steps;
        opts.epsilon_target = cfg.epsilon_target.unwrap_or(horizon * 1e-5);
        opts.p = p;
        opts.solve = solve.clone();
        let sol = mild_solve(&host, nl, &u0.node_data(), &h.forcing(), &opts)?;
        return Ok(Evolution { trajectory: sol.trajectory, depth: Some(sol.depth), refinement: Some(sol.trace), solve });
    }
    let (sub, depth) = if host.is_finite() {
        (DirichletSubgraph::whole(&host)?, None)
    } else {
        let ex = Exhaustion::new(&host, &root, cfg.depth.unwrap_or(DEFAULT_DEPTH))?;
        let d = ex.depth();
        (DirichletSubgraph::new(&host, ex.set(d).expect("attained depth"))?, Some(d))
    };
    let init = GridFunction::from_fn(sub.window().clone(), |x| u0.value(x, 0.0))?;
    let disc = make_uniform_discretization(horizon, steps, h.forcing())?;
    let trajectory = implicit_euler_march(&sub, nl, &init, &disc, &solve)?;
    Ok(Evolution { trajectory, depth, refinement: None, solve })
}

#[derive(Serialize)]
struct EvolveReport<'a> {
    command: &'static str,
    graph: String,
    nonlinearity: String,
    horizon: f64,
    epsilon: f64,
    steps: usize,
    depth: Option<usize>,
    nodes: usize,
    p: String,
    tolerances: Tolerances,
    max_residual: f64,
    total_sweeps: usize,
    forcing_error_estimate: f64,
    final_norm: f64,
    final_sup_norm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    refinement_trace: Option<&'a [RefinementStep]>,
    barrier: Option<BarrierSummary>,
    positivity: Option<PositivityReport>,
}

pub fn evolve(cfg: &ExperimentConfig) -> CliResult<()> {
    let nl = cfg.nonlinearity()?;
    let u0 = cfg.data("u0")?;
    let h = cfg.data("h")?;
    let p = cfg.p()?;
    let check_tol = cfg.check_tol()?;
    let run = integrate(cfg, &nl, &u0, &h)?;
    let traj = &run.trajectory;

    let csv = cfg.output.clone().unwrap_or_else(|| PathBuf::from("trajectory.csv"));
    write_trajectory(&csv, traj)?;
    let barrier = if h.is_zero() { barrier_summary(traj, check_tol, &run.solve)? } else { None };
    let positivity = if h.is_zero() { positivity_summary(traj)? } else { None };
    let disc = traj.discretization();
    let report = EvolveReport {
        command: "evolve",
        graph: traj.subgraph().host().label().to_string(),
        nonlinearity: nl.to_string(),
        horizon: disc.horizon(),
        epsilon: traj.epsilon(),
        steps: disc.steps(),
        depth: run.depth,
        nodes: traj.window().len(),
        p: p_label(p),
        tolerances: Tolerances {
            solve: run.solve.tol,
            refinement: cfg.mild.then(|| cfg.tol()).transpose()?,
            check: check_tol,
        },
        max_residual: traj.residuals().iter().copied().fold(0.0, f64::max),
        total_sweeps: traj.sweeps().iter().sum(),
        forcing_error_estimate: disc.forcing_error_estimate(traj.window(), p)?,
        final_norm: traj.last().lp_norm(p)?,
        final_sup_norm: traj.last().sup_norm(),
        refinement_trace: run.refinement.as_deref(),
        barrier,
        positivity,
    };
    write_json(&report_path(cfg.report.as_deref(), &csv), &report)?;
    let verdict = report.barrier.as_ref().map_or(String::new(), |b| format!(", barrier holds: {}", b.holds));
    println!(
        "evolve: {} steps on {} nodes, ε = {:.3e}, ‖u(T)‖ = {:.6e}{verdict} -> {}",
        report.steps,
        report.nodes,
        report.epsilon,
        report.final_norm,
        csv.display()
    );
    Ok(())
}

/// Writes a graph as JSON. Infinite hosts are cut to the ball of `radius`
/// around `root`, with the exterior edges folded into the killing term.
pub fn generate(spec: &str, radius: Option<usize>, root: Option<&str>, out: Option<&Path>) -> CliResult<()> {
    let (host, default_root) = load_graph(spec)?;
    let finite = match host.as_finite() {
        Some(g) => g.clone(),
        None => {
            let radius = radius.ok_or_else(|| CliError::Config(format!("{spec} is infinite; give --radius")))?;
            let root = root.map(str::parse).transpose()?.unwrap_or(default_root);
            let ex = Exhaustion::new(&host, &root, radius)?;
            DirichletSubgraph::new(&host, ex.set(ex.depth()).expect("attained depth"))?.to_finite_graph()
        }
    };
    match out {
        Some(path) => {
            io::save(&finite, path)?;
            println!("{spec}: {} nodes, {} edges -> {}", finite.len(), finite.edge_count(), path.display());
        }
        None => println!("{}", io::to_json_string(&finite)?),
    }
    Ok(())
}

/// Barrier samples on the uniform grid of width `epsilon` (discrete recursion),
/// or the closed form at the same times.
pub fn export_barrier(
    q: f64,
    m: f64,
    horizon: Option<f64>,
    epsilon: f64,
    continuous: bool,
    out: &Path,
) -> CliResult<()> {
    let horizon = match horizon {
        Some(t) => t,
        None if q < 1.0 => extinction_time(q, m)? + 0.5,
        None => 1.0,
    };
    let steps = (horizon / epsilon).ceil().max(1.0) as usize;
    let disc = make_uniform_discretization(horizon, steps, zero_forcing())?;
    let times = disc.times();
    let values: Vec<f64> = if continuous {
        times.iter().map(|&t| graphflow_core::barriers::barrier_value(q, m, t)).collect::<Result<_, _>>()?
    } else {
        discrete_barrier(q, m, times)?.values().expect("discrete barrier").to_vec()
    };
    write_barrier(out, times, &values)?;
    println!("barrier q = {q}, M = {m}: {} samples -> {}", times.len(), out.display());
    Ok(())
}
