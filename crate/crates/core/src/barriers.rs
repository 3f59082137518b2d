//! Barriers for power absorption `f(u) = −u|u|^{q−1}`: closed-form and discrete
//! supersolutions, extinction time, positivity and comparison verdicts.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::{implicit_euler_march, Trajectory, Verdict};
use crate::graph::GridFunction;
use crate::nonlinearity::{Nonlinearity, PsiMap};
use crate::stationary::SolveOptions;

/// Tolerance of the scalar solves behind [`discrete_barrier`].
const BARRIER_TOL: f64 = 1e-15;

fn check_exponent(q: f64) -> Result<()> {
    if !(q > 0.0) || !q.is_finite() || q == 1.0 {
        return Err(Error::InvalidParameter(format!("barrier needs q ∈ (0,1) ∪ (1,∞), got {q}")));
    }
    Ok(())
}

fn check_level(m: f64) -> Result<()> {
    if !(m >= 0.0) || !m.is_finite() {
        return Err(Error::InvalidParameter(format!("barrier level M must be ≥ 0, got {m}")));
    }
    Ok(())
}

/// `θ(t)`: `[M^{1−q} − (1−q)t]₊^{1/(1−q)}` for `q < 1`, `[M^{1−q} + (q−1)t]^{−1/(q−1)}` for `q > 1`.
pub fn barrier_value(q: f64, m: f64, t: f64) -> Result<f64> {
    check_exponent(q)?;
    check_level(m)?;
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("time must be ≥ 0, got {t}")));
    }
    if m == 0.0 {
        return Ok(0.0);
    }
    if q < 1.0 {
        let base = m.powf(1.0 - q) - (1.0 - q) * t;
        Ok(if base <= 0.0 { 0.0 } else { base.powf(1.0 / (1.0 - q)) })
    } else {
        Ok((m.powf(1.0 - q) + (q - 1.0) * t).powf(-1.0 / (q - 1.0)))
    }
}

/// `T_* = M^{1−q}/(1−q)` for `q ∈ (0,1)`.
pub fn extinction_time(q: f64, m: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidParameter(format!("extinction time needs q ∈ (0,1), got {q}")));
    }
    check_level(m)?;
    Ok(if m == 0.0 { 0.0 } else { m.powf(1.0 - q) / (1.0 - q) })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BarrierKind {
    Continuous,
    /// `θ₀ = M`, `θ_k + λ_k θ_k^q = θ_{k−1}` on the given partition.
    Discrete { times: Vec<f64>, values: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Barrier {
    pub q: f64,
    pub m: f64,
    pub kind: BarrierKind,
}

impl Barrier {
    pub fn continuous(q: f64, m: f64) -> Result<Self> {
        check_exponent(q)?;
        check_level(m)?;
        Ok(Barrier { q, m, kind: BarrierKind::Continuous })
    }

    /// `θ(t)`, or the piecewise-constant interpolant `θ_ε(t)` for a discrete barrier.
    pub fn value_at(&self, t: f64) -> f64 {
        match &self.kind {
            BarrierKind::Continuous => barrier_value(self.q, self.m, t.max(0.0)).unwrap_or(f64::NAN),
            BarrierKind::Discrete { times, values } => {
                if t <= 0.0 {
                    return values[0];
                }
                let k = times.partition_point(|&s| s < t);
                values[k.min(values.len() - 1)]
            }
        }
    }

    pub fn times(&self) -> Option<&[f64]> {
        match &self.kind {
            BarrierKind::Discrete { times, .. } => Some(times),
            BarrierKind::Continuous => None,
        }
    }

    pub fn values(&self) -> Option<&[f64]> {
        match &self.kind {
            BarrierKind::Discrete { values, .. } => Some(values),
            BarrierKind::Continuous => None,
        }
    }
}

/// Discrete barrier on `times` (`times[0] = 0`).
pub fn discrete_barrier(q: f64, m: f64, times: &[f64]) -> Result<Barrier> {
    check_exponent(q)?;
    check_level(m)?;
    if times.first() != Some(&0.0) || times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("partition must start at 0 and increase".into()));
    }
    let nl = Nonlinearity::power_absorption(q)?;
    let mut values = Vec::with_capacity(times.len());
    values.push(m);
    for w in times.windows(2) {
        let prev = *values.last().unwrap();
        let map = PsiMap::new(&nl, w[1] - w[0])?;
        let next = map.solve_shifted(prev, 0.0, BARRIER_TOL * prev.abs())?;
        // rounding must never lift the barrier above its predecessor
        values.push(next.clamp(0.0, prev));
    }
    Ok(Barrier { q, m, kind: BarrierKind::Discrete { times: times.to_vec(), values } })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BarrierVerdict {
    /// `sup_x u_k(x) ≤ θ_k + tol` for every `k`.
    pub barrier: Verdict,
    /// `‖u_k‖_∞ ≤ ψ_{q,λ_k}⁻¹(‖u_{k−1}‖_∞) + tol` for every `k`.
    pub step: Verdict,
}

impl BarrierVerdict {
    pub fn holds(&self) -> bool {
        self.barrier.holds && self.step.holds
    }
}

fn check_barrier_inputs(traj: &Trajectory, barrier: &Barrier) -> Result<(f64, Vec<f64>)> {
    let (times, values) = match &barrier.kind {
        BarrierKind::Discrete { times, values } => (times, values),
        BarrierKind::Continuous => {
            return Err(Error::Precondition("barrier verification needs a discrete barrier".into()));
        }
    };
    if times.as_slice() != traj.times() {
        return Err(Error::GridMismatch);
    }
    let q = traj
        .nonlinearity()
        .power_exponent()
        .ok_or_else(|| Error::Precondition(format!("barrier needs power absorption, got {}", traj.nonlinearity())))?;
    if q != barrier.q {
        return Err(Error::Precondition(format!("trajectory exponent {q} differs from barrier exponent {}", barrier.q)));
    }
    let window = traj.window();
    for k in 1..traj.states().len() {
        if traj.discretization().sample(k, window)?.sup_norm() != 0.0 {
            return Err(Error::Precondition("barrier verification needs h = 0".into()));
        }
    }
    Ok((q, values.clone()))
}

fn barrier_sweep(traj: &Trajectory, q: f64, theta: &[f64], abs: bool, tol: f64) -> Result<BarrierVerdict> {
    let nl = Nonlinearity::power_absorption(q)?;
    let size = |u: &GridFunction| if abs { u.sup_norm() } else { u.max().max(0.0) };
    let mut worst_barrier = f64::NEG_INFINITY;
    let mut worst_step = f64::NEG_INFINITY;
    let states = traj.states();
    for (k, u) in states.iter().enumerate() {
        worst_barrier = worst_barrier.max(size(u) - theta[k] - tol);
        if k > 0 {
            let map = PsiMap::new(&nl, traj.discretization().step(k))?;
            let prev = states[k - 1].sup_norm();
            let bound = map.solve_shifted(prev, 0.0, BARRIER_TOL * prev)?;
            worst_step = worst_step.max(u.sup_norm() - bound - tol);
        }
    }
    if states.len() < 2 {
        worst_step = -tol;
    }
    Ok(BarrierVerdict { barrier: Verdict::from_excess(worst_barrier), step: Verdict::from_excess(worst_step) })
}

/// Checks a trajectory with `h = 0`, `0 ≤ u₀ ≤ M` against the discrete barrier.
pub fn verify_barrier(traj: &Trajectory, barrier: &Barrier, tol: f64) -> Result<BarrierVerdict> {
    let (q, theta) = check_barrier_inputs(traj, barrier)?;
    let u0 = &traj.states()[0];
    if u0.min() < 0.0 || u0.max() > barrier.m {
        return Err(Error::Precondition("barrier verification needs 0 ≤ u₀ ≤ M".into()));
    }
    barrier_sweep(traj, q, &theta, false, tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SignedBarrierVerdict {
    /// `sup_x |u_k(x)| ≤ θ_k + tol` together with the step bound.
    pub barrier: BarrierVerdict,
    /// `u_k⁻ − tol ≤ u_k ≤ u_k⁺ + tol` for the trajectories from `−u₀⁻` and `u₀⁺`.
    pub envelope: Verdict,
    /// Both envelope trajectories stay under the barrier.
    pub envelopes_under_barrier: Verdict,
}

impl SignedBarrierVerdict {
    pub fn holds(&self) -> bool {
        self.barrier.holds() && self.envelope.holds && self.envelopes_under_barrier.holds
    }
}

/// Sign-changing `u₀` with `‖u₀‖_∞ ≤ M`: re-marches from the positive and negative
/// parts of `u₀` and checks the envelope and the barrier for `|u_k|`.
pub fn verify_signed_barrier(
    traj: &Trajectory,
    barrier: &Barrier,
    tol: f64,
    opts: &SolveOptions,
) -> Result<SignedBarrierVerdict> {
    let (q, theta) = check_barrier_inputs(traj, barrier)?;
    let u0 = &traj.states()[0];
    if u0.sup_norm() > barrier.m {
        return Err(Error::Precondition("signed barrier needs ‖u₀‖_∞ ≤ M".into()));
    }
    let sub = traj.subgraph();
    let disc = traj.discretization();
    let upper = implicit_euler_march(sub, traj.nonlinearity(), &u0.positive_part(), disc, opts)?;
    let lower = implicit_euler_march(sub, traj.nonlinearity(), &u0.negative_part(), disc, opts)?;
    let mut worst_env = f64::NEG_INFINITY;
    for ((u, a), b) in traj.states().iter().zip(upper.states()).zip(lower.states()) {
        for ((&v, &hi), &lo) in u.values().iter().zip(a.values()).zip(b.values()) {
            worst_env = worst_env.max(v - hi - tol).max(lo - v - tol);
        }
    }
    let up = barrier_sweep(&upper, q, &theta, true, tol)?;
    let lo = barrier_sweep(&lower, q, &theta, true, tol)?;
    let env_barrier = up.barrier.worst.max(lo.barrier.worst);
    Ok(SignedBarrierVerdict {
        barrier: barrier_sweep(traj, q, &theta, true, tol)?,
        envelope: Verdict::from_excess(worst_env),
        envelopes_under_barrier: Verdict::from_excess(env_barrier),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PositivityReport {
    /// Every value is `> −tol` and every step has a strictly positive value.
    pub holds: bool,
    /// Minimum over the window at each step.
    pub step_minima: Vec<f64>,
    /// Number of values in `[0, tol]` after the initial state.
    pub flagged: usize,
}

impl PositivityReport {
    /// Smallest value at any step after the first.
    pub fn min_after_first(&self) -> f64 {
        self.step_minima.iter().skip(1).copied().fold(f64::INFINITY, f64::min)
    }
}

/// Positivity of a trajectory for power absorption with `q > 1`; requires `u₀ ≥ 0`, `u₀ ≢ 0`.
pub fn positivity_check(traj: &Trajectory, tol: f64) -> Result<PositivityReport> {
    match traj.nonlinearity().power_exponent() {
        Some(q) if q > 1.0 => {}
        _ => return Err(Error::Precondition(format!("positivity needs power absorption with q > 1, got {}", traj.nonlinearity()))),
    }
    let u0 = &traj.states()[0];
    if u0.min() < 0.0 || u0.max() <= 0.0 {
        return Err(Error::Precondition("positivity needs u₀ ≥ 0 and u₀ ≢ 0".into()));
    }
    let mut holds = true;
    let mut flagged = 0;
    let mut step_minima = Vec::with_capacity(traj.states().len());
    for (k, u) in traj.states().iter().enumerate() {
        step_minima.push(u.min());
        if u.min() <= -tol || u.max() <= 0.0 {
            holds = false;
        }
        if k > 0 {
            flagged += u.values().iter().filter(|&&v| (0.0..=tol).contains(&v)).count();
        }
    }
    Ok(PositivityReport { holds, step_minima, flagged })
}

/// `u_k(x) ≤ v_k(x) + tol` for all `k, x`.
pub fn parabolic_compare(u: &Trajectory, v: &Trajectory, tol: f64) -> Result<Verdict> {
    if u.times() != v.times() || u.window().nodes() != v.window().nodes() {
        return Err(Error::GridMismatch);
    }
    let mut worst = f64::NEG_INFINITY;
    for (a, b) in u.states().iter().zip(v.states()) {
        for (x, y) in a.values().iter().zip(b.values()) {
            worst = worst.max(x - y - tol);
        }
    }
    Ok(Verdict::from_excess(worst))
}
