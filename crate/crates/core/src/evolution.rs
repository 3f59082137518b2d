//! Time partitions, implicit Euler marching, mild-solution refinement and
//! trajectory diagnostics.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expm::expm;
use crate::graph::{lp_distance, DirichletSubgraph, Exhaustion, GridFunction, NodeId, WeightedGraph, Window};
use crate::nonlinearity::{Nonlinearity, PsiMap};
use crate::stationary::{solve_resolvent, NodeData, ResolventProblem, SolveOptions};

/// Largest window accepted by [`semigroup_linear_oracle`].
pub const ORACLE_MAX_NODES: usize = 64;

/// Forcing `h(t, x)`.
pub type Forcing = Arc<dyn Fn(f64, &NodeId) -> f64 + Send + Sync>;

pub fn zero_forcing() -> Forcing {
    Arc::new(|_, _| 0.0)
}

/// A partition `0 = t₀ < t₁ < … < t_N ≤ T` with forcing sampled at right endpoints.
#[derive(Clone)]
pub struct EpsilonDiscretization {
    times: Vec<f64>,
    horizon: f64,
    forcing: Forcing,
}

impl fmt::Debug for EpsilonDiscretization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EpsilonDiscretization")
            .field("steps", &self.steps())
            .field("horizon", &self.horizon)
            .field("epsilon", &self.epsilon())
            .finish()
    }
}

impl EpsilonDiscretization {
    pub fn new(times: Vec<f64>, horizon: f64, forcing: Forcing) -> Result<Self> {
        if times.first() != Some(&0.0) || times.len() < 2 {
            return Err(Error::InvalidParameter("partition must start at 0 and have at least one step".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) || times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidParameter("partition must be strictly increasing".into()));
        }
        if !(horizon >= *times.last().unwrap()) || !horizon.is_finite() {
            return Err(Error::InvalidParameter("partition exceeds the horizon".into()));
        }
        Ok(EpsilonDiscretization { times, horizon, forcing })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    /// `λ_k = t_k − t_{k−1}` for `k ≥ 1`.
    pub fn step(&self, k: usize) -> f64 {
        self.times[k] - self.times[k - 1]
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Largest step width, including the uncovered tail `T − t_N`.
    pub fn epsilon(&self) -> f64 {
        let widest = (1..self.times.len()).map(|k| self.step(k)).fold(0.0, f64::max);
        widest.max(self.horizon - self.times[self.steps()])
    }

    pub fn forcing(&self) -> &Forcing {
        &self.forcing
    }

    /// `h_k = h(t_k, ·)` on a window.
    pub fn sample(&self, k: usize, window: &Arc<Window>) -> Result<GridFunction> {
        let t = self.times[k];
        GridFunction::from_fn(window.clone(), |x| (self.forcing)(t, x))
    }

    /// Partition with every step split in half.
    pub fn halved(&self) -> Self {
        let mut times = Vec::with_capacity(2 * self.times.len() - 1);
        times.push(0.0);
        for w in self.times.windows(2) {
            times.push(0.5 * (w[0] + w[1]));
            times.push(w[1]);
        }
        EpsilonDiscretization { times, horizon: self.horizon, forcing: self.forcing.clone() }
    }

    /// Estimate of `Σ_k ∫_{t_{k−1}}^{t_k} ‖h(s) − h_k‖_p ds`, sampling `s` at the
    /// left endpoint and midpoint of each step. Reported, not enforced.
    pub fn forcing_error_estimate(&self, window: &Arc<Window>, p: f64) -> Result<f64> {
        let mut total = 0.0;
        for k in 1..=self.steps() {
            let hk = self.sample(k, window)?;
            let (a, b) = (self.times[k - 1], self.times[k]);
            let mut worst: f64 = 0.0;
            for s in [a, 0.5 * (a + b)] {
                let hs = GridFunction::from_fn(window.clone(), |x| (self.forcing)(s, x))?;
                worst = worst.max(lp_distance(&hs, &hk, p)?);
            }
            total += (b - a) * worst;
        }
        Ok(total)
    }
}

/// `t_k = kT/N`, `ε = T/N`, `h_k = h(t_k, ·)`.
pub fn make_uniform_discretization(horizon: f64, n: usize, h: Forcing) -> Result<EpsilonDiscretization> {
    if n == 0 || !(horizon > 0.0) {
        return Err(Error::InvalidParameter(format!("need N ≥ 1 and T > 0, got N = {n}, T = {horizon}")));
    }
    let times = (0..=n).map(|k| if k == n { horizon } else { horizon * k as f64 / n as f64 }).collect();
    EpsilonDiscretization::new(times, horizon, h)
}

/// Implicit Euler states `u₀, u₁, …, u_N` with their piecewise-constant interpolant.
#[derive(Clone, Debug)]
pub struct Trajectory {
    disc: EpsilonDiscretization,
    states: Vec<GridFunction>,
    window: Arc<Window>,
    subgraph: DirichletSubgraph,
    nonlinearity: Nonlinearity,
    residuals: Vec<f64>,
    sweeps: Vec<usize>,
}

impl Trajectory {
    pub fn discretization(&self) -> &EpsilonDiscretization {
        &self.disc
    }

    pub fn times(&self) -> &[f64] {
        self.disc.times()
    }

    pub fn states(&self) -> &[GridFunction] {
        &self.states
    }

    pub fn window(&self) -> &Arc<Window> {
        &self.window
    }

    pub fn nonlinearity(&self) -> &Nonlinearity {
        &self.nonlinearity
    }

    /// The subgraph the trajectory was marched on.
    pub fn subgraph(&self) -> &DirichletSubgraph {
        &self.subgraph
    }

    pub fn epsilon(&self) -> f64 {
        self.disc.epsilon()
    }

    /// Final residual of each step's resolvent solve (entry 0 is the initial state).
    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    pub fn sweeps(&self) -> &[usize] {
        &self.sweeps
    }

    pub fn last(&self) -> &GridFunction {
        self.states.last().expect("trajectory has an initial state")
    }

    /// `u(0) = u₀` and `u(t) = u_k` on `(t_{k−1}, t_k]`; the last state past `t_N`.
    pub fn value_at(&self, t: f64) -> &GridFunction {
        let times = self.disc.times();
        if t <= 0.0 {
            return &self.states[0];
        }
        let k = times.partition_point(|&s| s < t);
        &self.states[k.min(self.states.len() - 1)]
    }
}

/// Solves `(id + λ_k 𝒜_dir) u_k = u_{k−1} + λ_k h_k` for `k = 1..N`, warm-starting
/// each step at `u_{k−1}`.
pub fn implicit_euler_march(
    sub: &DirichletSubgraph,
    nl: &Nonlinearity,
    u0: &GridFunction,
    disc: &EpsilonDiscretization,
    opts: &SolveOptions,
) -> Result<Trajectory> {
    if u0.window().nodes() != sub.nodes() {
        return Err(Error::WindowMismatch);
    }
    let window = sub.window().clone();
    for k in 1..=disc.steps() {
        PsiMap::new(nl, disc.step(k))?;
    }
    let mut states = Vec::with_capacity(disc.steps() + 1);
    states.push(GridFunction::new(window.clone(), u0.values().to_vec())?);
    let mut residuals = vec![0.0];
    let mut sweeps = vec![0];
    for k in 1..=disc.steps() {
        let lambda = disc.step(k);
        let prev = states.last().unwrap();
        let rhs = prev.add_scaled(lambda, &disc.sample(k, &window)?)?;
        let prob = ResolventProblem::new(sub, nl, lambda, &rhs)?;
        let step_opts = SolveOptions { initial: Some(prev.clone()), ..opts.clone() };
        let rep = solve_resolvent(&prob, &step_opts)?;
        residuals.push(rep.residual_norm);
        sweeps.push(rep.sweeps);
        states.push(rep.u);
    }
    Ok(Trajectory { disc: disc.clone(), states, window, subgraph: sub.clone(), nonlinearity: nl.clone(), residuals, sweeps })
}

#[derive(Clone, Debug)]
pub struct MildOptions {
    pub horizon: f64,
    pub root: NodeId,
    pub depth_start: usize,
    pub depth_max: usize,
    /// Initial number of steps; rounded up to a multiple of 4.
    pub steps_start: usize,
    /// Finest step width the refinement may use.
    pub epsilon_target: f64,
    /// Acceptance threshold for the Cauchy gaps.
    pub tol: f64,
    pub p: f64,
    pub solve: SolveOptions,
}

impl MildOptions {
    pub fn new(horizon: f64, root: NodeId, tol: f64) -> Self {
        MildOptions {
            horizon,
            root,
            depth_start: 1,
            depth_max: 64,
            steps_start: 8,
            epsilon_target: horizon * 1e-5,
            tol,
            p: 2.0,
            solve: SolveOptions::with_tol(1e-12),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Refinement {
    Initial,
    Halve,
    Deepen,
}

#[derive(Clone, Debug, Serialize)]
pub struct RefinementStep {
    pub kind: Refinement,
    pub depth: usize,
    pub nodes: usize,
    pub steps: usize,
    pub epsilon: f64,
    /// Max over the sample times of the ℓᵖ distance to the previous level.
    pub gap: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct MildSolution {
    pub trajectory: Trajectory,
    pub depth: usize,
    pub trace: Vec<RefinementStep>,
}

fn sample_times(horizon: f64) -> [f64; 5] {
    [0.0, 0.25 * horizon, 0.5 * horizon, 0.75 * horizon, horizon]
}

/// Largest ℓᵖ distance between two trajectories at `{0, T/4, T/2, 3T/4, T}`.
pub fn cauchy_gap(a: &Trajectory, b: &Trajectory, horizon: f64, p: f64) -> Result<f64> {
    let mut gap: f64 = 0.0;
    for t in sample_times(horizon) {
        gap = gap.max(lp_distance(a.value_at(t), b.value_at(t), p)?);
    }
    Ok(gap)
}

/// Approximates the mild solution by alternately halving `ε` and growing the
/// exhaustion depth until both Cauchy gaps are below `tol`.
pub fn mild_solve(
    host: &WeightedGraph,
    nl: &Nonlinearity,
    u0: &NodeData,
    h: &Forcing,
    opts: &MildOptions,
) -> Result<MildSolution> {
    if !(opts.horizon > 0.0) || !opts.horizon.is_finite() {
        return Err(Error::InvalidParameter(format!("horizon must be finite and > 0, got {}", opts.horizon)));
    }
    if !(opts.tol > 0.0) || opts.depth_start == 0 || opts.depth_start > opts.depth_max {
        return Err(Error::InvalidParameter("need tol > 0 and 1 ≤ depth_start ≤ depth_max".into()));
    }
    let exh = Exhaustion::new(host, &opts.root, opts.depth_max)?;
    let max_depth = exh.depth();
    let steps0 = opts.steps_start.max(1).div_ceil(4) * 4;

    let run = |depth: usize, steps: usize| -> Result<Trajectory> {
        let sub = DirichletSubgraph::new(host, exh.set(depth).expect("depth within exhaustion"))?;
        let init = GridFunction::from_fn(sub.window().clone(), |x| u0(x))?;
        let disc = make_uniform_discretization(opts.horizon, steps, h.clone())?;
        implicit_euler_march(&sub, nl, &init, &disc, &opts.solve)
    };

    let mut depth = opts.depth_start.min(max_depth);
    let mut steps = steps0;
    let mut current = run(depth, steps)?;
    let mut trace = vec![RefinementStep {
        kind: Refinement::Initial,
        depth,
        nodes: current.window().len(),
        steps,
        epsilon: current.epsilon(),
        gap: None,
    }];
    let mut eps_gap: Option<f64> = None;
    let mut depth_gap: Option<f64> = if depth == max_depth && exh.saturated() { Some(0.0) } else { None };
    let mut prefer_halving = true;
    loop {
        let accepts = |g: Option<f64>| g.is_some_and(|g| g < opts.tol);
        if accepts(eps_gap) && accepts(depth_gap) {
            return Ok(MildSolution { trajectory: current, depth, trace });
        }
        let can_halve = opts.horizon / (2 * steps) as f64 >= opts.epsilon_target;
        let can_deepen = depth < max_depth;
        let halve = match (can_halve, can_deepen) {
            (false, false) => {
                return Err(Error::RefinementExhausted { gaps: trace.iter().filter_map(|s| s.gap).collect() });
            }
            (true, false) => true,
            (false, true) => false,
            (true, true) => {
                if accepts(eps_gap) {
                    false
                } else if accepts(depth_gap) {
                    true
                } else {
                    prefer_halving
                }
            }
        };
        prefer_halving = !halve;
        let (kind, next) = if halve {
            steps *= 2;
            (Refinement::Halve, run(depth, steps)?)
        } else {
            depth += 1;
            (Refinement::Deepen, run(depth, steps)?)
        };
        let gap = cauchy_gap(&current, &next, opts.horizon, opts.p)?;
        if halve {
            eps_gap = Some(gap);
        } else {
            depth_gap = Some(gap);
        }
        trace.push(RefinementStep { kind, depth, nodes: next.window().len(), steps, epsilon: next.epsilon(), gap: Some(gap) });
        current = next;
    }
}

/// Outcome of an inequality check over a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub holds: bool,
    /// Largest amount by which the checked left side exceeded the right side
    /// (negative when the inequality holds with room).
    pub worst: f64,
}

impl Verdict {
    pub(crate) fn from_excess(worst: f64) -> Self {
        Verdict { holds: worst <= 0.0, worst }
    }
}

fn same_grid(a: &Trajectory, b: &Trajectory) -> Result<()> {
    if a.times() != b.times() || a.window().nodes() != b.window().nodes() {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

/// `‖u(t₂)−v(t₂)‖_p ≤ ‖u(t₁)−v(t₁)‖_p + ∫_{t₁}^{t₂}‖h−ĥ‖_p ds + slack` for all grid
/// pairs `t₁ < t₂`, with the integral by the trapezoid rule on the grid.
pub fn contraction_check(
    u: &Trajectory,
    v: &Trajectory,
    h: &Forcing,
    h_hat: &Forcing,
    p: f64,
    slack: f64,
) -> Result<Verdict> {
    same_grid(u, v)?;
    let times = u.times();
    let window = u.window();
    let mut gap_int = 0.0;
    let mut prev_e: Option<f64> = None;
    let mut best_start = f64::INFINITY;
    let mut worst = f64::NEG_INFINITY;
    for (k, &t) in times.iter().enumerate() {
        let hu = GridFunction::from_fn(window.clone(), |x| h(t, x))?;
        let hv = GridFunction::from_fn(window.clone(), |x| h_hat(t, x))?;
        let e = lp_distance(&hu, &hv, p)?;
        if let Some(pe) = prev_e {
            gap_int += 0.5 * (times[k] - times[k - 1]) * (pe + e);
        }
        prev_e = Some(e);
        let d = lp_distance(&u.states[k], &v.states[k], p)?;
        let key = d - gap_int;
        if k > 0 {
            worst = worst.max(key - best_start - slack);
        }
        best_start = best_start.min(key);
    }
    if times.len() < 2 {
        worst = -slack;
    }
    Ok(Verdict::from_excess(worst))
}

/// `‖u(t)‖_p ≤ e^{−t}‖u₀‖_p + ∫₀ᵗ e^{−(t−s)}‖h(s)‖_p ds + slack` at every grid time.
/// Only meaningful for the linear nonlinearity `f(u) = −u`.
pub fn decay_check(traj: &Trajectory, p: f64, slack: f64) -> Result<Verdict> {
    if !traj.nonlinearity().is_linear() {
        return Err(Error::Precondition(format!(
            "decay bound needs the linear nonlinearity, got {}",
            traj.nonlinearity()
        )));
    }
    let times = traj.times();
    let h = traj.disc.forcing().clone();
    let window = traj.window();
    let hn: Vec<f64> = times
        .iter()
        .map(|&t| GridFunction::from_fn(window.clone(), |x| h(t, x)).and_then(|g| g.lp_norm(p)))
        .collect::<Result<_>>()?;
    let n0 = traj.states[0].lp_norm(p)?;
    let mut worst = f64::NEG_INFINITY;
    // I_k = ∫₀^{t_k} e^{s}‖h(s)‖ ds by the trapezoid rule; the bound is e^{−t_k}(‖u₀‖ + I_k)
    let mut acc = 0.0;
    for k in 0..times.len() {
        if k > 0 {
            let (a, b) = (times[k - 1], times[k]);
            acc += 0.5 * (b - a) * (a.exp() * hn[k - 1] + b.exp() * hn[k]);
        }
        let bound = (-times[k]).exp() * (n0 + acc);
        worst = worst.max(traj.states[k].lp_norm(p)? - bound - slack);
    }
    Ok(Verdict::from_excess(worst))
}

/// `e^{−t(Δ_dir + id)} u₀` by dense scaling and squaring.
pub fn semigroup_linear_oracle(sub: &DirichletSubgraph, u0: &GridFunction, t: f64) -> Result<GridFunction> {
    if sub.len() > ORACLE_MAX_NODES {
        return Err(Error::WindowTooLarge { size: sub.len(), max: ORACLE_MAX_NODES });
    }
    if u0.window().nodes() != sub.nodes() {
        return Err(Error::WindowMismatch);
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("time must be ≥ 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(u0.clone());
    }
    let n = sub.len();
    let generator = (sub.dense_laplacian() + DMatrix::identity(n, n)) * (-t);
    let v = expm(&generator) * DVector::from_column_slice(u0.values());
    GridFunction::new(sub.window().clone(), v.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{lattice, path, FiniteGraph, NodeSpec};
    use std::f64::consts::E;

    fn isolated() -> DirichletSubgraph {
        let g: WeightedGraph =
            FiniteGraph::new(vec![NodeSpec { id: 0.into(), mu: 1.0, kappa: 0.0 }], vec![]).unwrap().into();
        DirichletSubgraph::whole(&g).unwrap()
    }

    fn one(sub: &DirichletSubgraph, v: f64) -> GridFunction {
        GridFunction::constant(sub.window().clone(), v)
    }

    #[test]
    fn uniform_partition() {
        let d = make_uniform_discretization(1.0, 4, zero_forcing()).unwrap();
        assert_eq!(d.times(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(d.epsilon(), 0.25);
        let w = isolated().window().clone();
        assert_eq!(d.forcing_error_estimate(&w, 2.0).unwrap(), 0.0);
        let c = make_uniform_discretization(1.0, 4, Arc::new(|_, _| 3.0)).unwrap();
        assert_eq!(c.sample(2, &w).unwrap().values(), &[3.0]);
        assert_eq!(c.forcing_error_estimate(&w, 2.0).unwrap(), 0.0);
        assert!(make_uniform_discretization(1.0, 0, zero_forcing()).is_err());
        assert_eq!(d.halved().steps(), 8);
        assert!(EpsilonDiscretization::new(vec![0.0, 0.5, 0.4], 1.0, zero_forcing()).is_err());
    }

    #[test]
    fn scalar_recursions() {
        let sub = isolated();
        let disc = make_uniform_discretization(1.0, 2, zero_forcing()).unwrap();
        let tr = implicit_euler_march(&sub, &Nonlinearity::linear(), &one(&sub, 1.0), &disc, &SolveOptions::with_tol(1e-14))
            .unwrap();
        assert!((tr.last().values()[0] - 4.0 / 9.0).abs() < 1e-13);

        let tr = implicit_euler_march(&sub, &Nonlinearity::linear(), &one(&sub, 0.0), &disc, &SolveOptions::default())
            .unwrap();
        assert!(tr.states().iter().all(|s| s.values()[0] == 0.0));

        let disc = make_uniform_discretization(1.5, 6, Arc::new(|_, _| 1.0)).unwrap();
        let tr = implicit_euler_march(&sub, &Nonlinearity::zero(), &one(&sub, 0.0), &disc, &SolveOptions::with_tol(1e-14))
            .unwrap();
        assert!((tr.last().values()[0] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn interpolant_is_right_continuous_on_steps() {
        let sub = isolated();
        let disc = make_uniform_discretization(1.0, 2, zero_forcing()).unwrap();
        let tr = implicit_euler_march(&sub, &Nonlinearity::linear(), &one(&sub, 1.0), &disc, &SolveOptions::default())
            .unwrap();
        assert_eq!(tr.value_at(0.0).values(), tr.states()[0].values());
        assert_eq!(tr.value_at(0.1).values(), tr.states()[1].values());
        assert_eq!(tr.value_at(0.5).values(), tr.states()[1].values());
        assert_eq!(tr.value_at(0.50001).values(), tr.states()[2].values());
    }

    #[test]
    fn f2_step_limit() {
        let sub = isolated();
        let nl = Nonlinearity::lipschitz(crate::nonlinearity::LipschitzShape::Sin, 4.0).unwrap();
        let disc = make_uniform_discretization(1.0, 2, zero_forcing()).unwrap();
        let r = implicit_euler_march(&sub, &nl, &one(&sub, 1.0), &disc, &SolveOptions::default());
        assert!(matches!(r, Err(Error::StepTooLarge { .. })));
    }

    #[test]
    fn oracle_examples() {
        let sub = isolated();
        let u = semigroup_linear_oracle(&sub, &one(&sub, 1.0), 1.0).unwrap();
        assert!((u.values()[0] - 1.0 / E).abs() < 1e-15);
        let u0 = one(&sub, 0.3);
        assert_eq!(semigroup_linear_oracle(&sub, &u0, 0.0).unwrap(), u0);

        let g = path(2).unwrap();
        let sub = DirichletSubgraph::whole(&g).unwrap();
        let u0 = GridFunction::new(sub.window().clone(), vec![1.0, 0.0]).unwrap();
        let u = semigroup_linear_oracle(&sub, &u0, 1.0).unwrap();
        let e2 = (-2.0f64).exp();
        assert!((u.values()[0] - (1.0 + e2) / (2.0 * E)).abs() < 1e-14);
        assert!((u.values()[1] - (1.0 - e2) / (2.0 * E)).abs() < 1e-14);

        let big = path(65).unwrap();
        let sub = DirichletSubgraph::whole(&big).unwrap();
        let z = GridFunction::zeros(sub.window().clone());
        assert!(matches!(semigroup_linear_oracle(&sub, &z, 1.0), Err(Error::WindowTooLarge { .. })));
    }

    #[test]
    fn decay_examples() {
        let sub = isolated();
        let disc = make_uniform_discretization(1.0, 1000, zero_forcing()).unwrap();
        let tr = implicit_euler_march(&sub, &Nonlinearity::linear(), &one(&sub, 1.0), &disc, &SolveOptions::with_tol(1e-14))
            .unwrap();
        let v = decay_check(&tr, 2.0, 5e-3).unwrap();
        assert!(v.holds);
        // the scalar case saturates the bound up to O(ε)
        assert!(v.worst > -5e-3 - 1e-3);
        let tr0 = implicit_euler_march(&sub, &Nonlinearity::linear(), &one(&sub, 0.0), &disc, &SolveOptions::default())
            .unwrap();
        assert!(decay_check(&tr0, 2.0, 0.0).unwrap().holds);
        let tr2 = implicit_euler_march(&sub, &Nonlinearity::zero(), &one(&sub, 0.0), &disc, &SolveOptions::default())
            .unwrap();
        assert!(decay_check(&tr2, 2.0, 0.0).is_err());
    }

    #[test]
    fn contraction_trivial_cases() {
        let g = path(4).unwrap();
        let sub = DirichletSubgraph::whole(&g).unwrap();
        let nl = Nonlinearity::power_absorption(2.0).unwrap();
        let disc = make_uniform_discretization(1.0, 20, zero_forcing()).unwrap();
        let u0 = GridFunction::new(sub.window().clone(), vec![1.0, 0.0, -1.0, 2.0]).unwrap();
        let v0 = GridFunction::new(sub.window().clone(), vec![0.0, 0.5, 0.0, 0.0]).unwrap();
        let a = implicit_euler_march(&sub, &nl, &u0, &disc, &SolveOptions::default()).unwrap();
        let b = implicit_euler_march(&sub, &nl, &v0, &disc, &SolveOptions::default()).unwrap();
        let z = zero_forcing();
        assert!(contraction_check(&a, &a, &z, &z, 2.0, 0.0).unwrap().holds);
        assert!(contraction_check(&a, &b, &z, &z, 2.0, 0.0).unwrap().holds);
        let other = make_uniform_discretization(1.0, 10, zero_forcing()).unwrap();
        let c = implicit_euler_march(&sub, &nl, &v0, &other, &SolveOptions::default()).unwrap();
        assert!(matches!(contraction_check(&a, &c, &z, &z, 2.0, 0.0), Err(Error::GridMismatch)));
    }

    #[test]
    fn mild_solution_of_scalar_decay() {
        let g: WeightedGraph =
            FiniteGraph::new(vec![NodeSpec { id: 0.into(), mu: 1.0, kappa: 0.0 }], vec![]).unwrap().into();
        let u0: NodeData = Arc::new(|_| 1.0);
        let opts = MildOptions { steps_start: 8, ..MildOptions::new(1.0, 0.into(), 1e-3) };
        let sol = mild_solve(&g, &Nonlinearity::linear(), &u0, &zero_forcing(), &opts).unwrap();
        assert!((sol.trajectory.last().values()[0] - 1.0 / E).abs() < 5e-3);
        assert!(sol.trace.len() >= 2);

        let zero: NodeData = Arc::new(|_| 0.0);
        let sol = mild_solve(&g, &Nonlinearity::linear(), &zero, &zero_forcing(), &opts).unwrap();
        assert!(sol.trajectory.states().iter().all(|s| s.values()[0] == 0.0));

        let tight = MildOptions { epsilon_target: 0.05, ..MildOptions::new(1.0, 0.into(), 1e-9) };
        assert!(matches!(
            mild_solve(&g, &Nonlinearity::linear(), &u0, &zero_forcing(), &tight),
            Err(Error::RefinementExhausted { .. })
        ));
    }

    #[test]
    fn mild_solution_on_the_line_is_nonnegative() {
        let z = lattice(1).unwrap();
        let u0: NodeData = Arc::new(|x| if x.coords()[0] == 0 { 1.0 } else { 0.0 });
        let h: Forcing = Arc::new(|t, x| if x.coords()[0].abs() <= 1 { 0.5 * t } else { 0.0 });
        let opts = MildOptions { depth_start: 2, ..MildOptions::new(1.0, 0.into(), 2e-2) };
        let sol = mild_solve(&z, &Nonlinearity::power_absorption(2.0).unwrap(), &u0, &h, &opts).unwrap();
        assert!(sol.trajectory.states().iter().all(|s| s.min() >= -1e-12));
        assert!(sol.trace.iter().any(|s| s.kind == Refinement::Deepen));
    }
}
