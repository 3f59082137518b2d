//! Resolvent equation `(id + λ(F + Δ_dir))u = g` on Dirichlet subgraphs, its
//! exhaustion limit on infinite hosts, and accretivity diagnostics.

use std::sync::Arc;

use rayon::prelude::*;
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{lp_distance, signed_power, DirichletSubgraph, Exhaustion, GridFunction, NodeId, WeightedGraph};
use crate::nonlinearity::{Nonlinearity, NonlinearityClass, PsiMap};

/// Below this step size the resolvent is replaced by the identity.
pub const DEGENERATE_LAMBDA: f64 = 1e-30;

/// Per-node scalar solves run this much tighter than the global residual target.
const INNER_RELATIVE_TOL: f64 = 1e-15;

/// One resolvent problem `(id + λ𝒜_dir)u = g` with `𝒜 = −f + Δ`.
#[derive(Clone, Debug)]
pub struct ResolventProblem<'a> {
    sub: &'a DirichletSubgraph,
    psi: PsiMap,
    g: &'a GridFunction,
}

impl<'a> ResolventProblem<'a> {
    pub fn new(sub: &'a DirichletSubgraph, nl: &Nonlinearity, lambda: f64, g: &'a GridFunction) -> Result<Self> {
        if g.window().nodes() != sub.nodes() {
            return Err(Error::WindowMismatch);
        }
        Ok(ResolventProblem { sub, psi: PsiMap::new(nl, lambda)?, g })
    }

    pub fn subgraph(&self) -> &DirichletSubgraph {
        self.sub
    }

    pub fn nonlinearity(&self) -> &Nonlinearity {
        self.psi.nonlinearity()
    }

    pub fn lambda(&self) -> f64 {
        self.psi.lambda()
    }

    pub fn datum(&self) -> &GridFunction {
        self.g
    }

    fn residual_at(&self, i: usize, u: &[f64]) -> f64 {
        let lambda = self.psi.lambda();
        u[i] - lambda * self.psi.nonlinearity().eval(u[i]) + lambda * self.sub.laplacian_at(i, u) - self.g.values()[i]
    }

    /// Solves the node equation `ψ(s) + (λ deg_dir/μ) s = g + (λ/μ) Σ_Y w u(y)` at `i`.
    fn node_update(&self, i: usize, u: &[f64]) -> Result<f64> {
        let lambda = self.psi.lambda();
        let mu = self.sub.measure_at(i);
        let shift = lambda * self.sub.degree(i) / mu;
        let rhs = self.g.values()[i] + lambda / mu * self.sub.neighbor_sum(i, u);
        self.psi.solve_shifted(rhs, shift, INNER_RELATIVE_TOL * rhs.abs())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SweepMode {
    /// Sequential sweeps in ascending node order.
    #[default]
    GaussSeidel,
    /// Simultaneous updates, computed in parallel.
    Jacobi,
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Target for `‖r‖_∞ / max(1, ‖g‖_∞)`.
    pub tol: f64,
    pub max_sweeps: usize,
    pub mode: SweepMode,
    /// Exponent used for the a-priori bound check in the report.
    pub p: f64,
    /// Starting guess; zero-extended or restricted onto the window.
    pub initial: Option<GridFunction>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { tol: 1e-10, max_sweeps: 100_000, mode: SweepMode::GaussSeidel, p: 2.0, initial: None }
    }
}

impl SolveOptions {
    pub fn with_tol(tol: f64) -> Self {
        SolveOptions { tol, ..Default::default() }
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub u: GridFunction,
    pub sweeps: usize,
    pub residual_norm: f64,
    pub norm_bound_ok: bool,
}

struct KeyedValues<'a>(&'a GridFunction);

impl Serialize for KeyedValues<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.values().len()))?;
        for (x, v) in self.0.iter() {
            map.serialize_entry(&x.to_string(), &v)?;
        }
        map.end()
    }
}

impl Serialize for SolveReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("SolveReport", 4)?;
        st.serialize_field("u", &KeyedValues(&self.u))?;
        st.serialize_field("sweeps", &self.sweeps)?;
        st.serialize_field("residual_norm", &self.residual_norm)?;
        st.serialize_field("norm_bound_ok", &self.norm_bound_ok)?;
        st.end()
    }
}

/// Pointwise `(id + λ(F + Δ_dir))u − g`.
pub fn residual(prob: &ResolventProblem<'_>, u: &GridFunction) -> Result<GridFunction> {
    if u.window().nodes() != prob.sub.nodes() {
        return Err(Error::WindowMismatch);
    }
    let values = (0..prob.sub.len()).map(|i| prob.residual_at(i, u.values())).collect();
    GridFunction::new(prob.sub.window().clone(), values)
}

fn residual_sup(prob: &ResolventProblem<'_>, u: &[f64]) -> f64 {
    (0..prob.sub.len()).map(|i| prob.residual_at(i, u).abs()).fold(0.0, f64::max)
}

/// Nonlinear Gauss–Seidel (or Jacobi) for the resolvent problem.
pub fn solve_resolvent(prob: &ResolventProblem<'_>, opts: &SolveOptions) -> Result<SolveReport> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be > 0, got {}", opts.tol)));
    }
    let window = prob.sub.window().clone();
    let g = prob.g;
    let scale = g.sup_norm().max(1.0);
    let target = opts.tol * scale;
    let constant = prob.nonlinearity().apriori_constant(prob.lambda())?;
    let finish = |u: Vec<f64>, sweeps: usize, residual_norm: f64| -> Result<SolveReport> {
        let u = GridFunction::new(window.clone(), u)?;
        let norm_bound_ok = u.lp_norm(opts.p)? <= constant * g.lp_norm(opts.p)? + opts.tol;
        Ok(SolveReport { u, sweeps, residual_norm, norm_bound_ok })
    };

    if prob.lambda() < DEGENERATE_LAMBDA {
        let u = g.values().to_vec();
        let r = residual_sup(prob, &u);
        return finish(u, 0, r);
    }

    let mut u = match &opts.initial {
        Some(init) => init.transfer(&window).into_values(),
        None => vec![0.0; prob.sub.len()],
    };
    let mut r = residual_sup(prob, &u);
    let mut sweeps = 0;
    while r > target {
        if sweeps >= opts.max_sweeps {
            return Err(Error::NotConverged { sweeps, residual: r, tolerance: target });
        }
        match opts.mode {
            SweepMode::GaussSeidel => {
                for i in 0..u.len() {
                    u[i] = prob.node_update(i, &u)?;
                }
            }
            SweepMode::Jacobi => {
                let old = &u;
                u = (0..old.len())
                    .into_par_iter()
                    .map(|i| prob.node_update(i, old))
                    .collect::<Result<Vec<_>>>()?;
            }
        }
        sweeps += 1;
        r = residual_sup(prob, &u);
    }
    finish(u, sweeps, r)
}

/// Host data `g` evaluable at any node (zero outside its support).
pub type NodeData = Arc<dyn Fn(&NodeId) -> f64 + Send + Sync>;

/// Zero extension of a grid function as host data.
pub fn node_data_from(u: &GridFunction) -> NodeData {
    let u = u.clone();
    Arc::new(move |x| u.value_or_zero(x))
}

#[derive(Clone, Debug)]
pub struct ExhaustionOptions {
    pub root: NodeId,
    pub depth_max: usize,
    /// Acceptance threshold for `‖u_{n+1} − u_n‖_p`.
    pub tol: f64,
    pub p: f64,
    pub solve: SolveOptions,
}

impl ExhaustionOptions {
    pub fn new(root: NodeId, depth_max: usize, tol: f64) -> Self {
        ExhaustionOptions { root, depth_max, tol, p: 2.0, solve: SolveOptions::with_tol((tol * 1e-3).max(1e-14)) }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExhaustionLevel {
    pub depth: usize,
    pub nodes: usize,
    pub sweeps: usize,
    pub norm: f64,
    /// `‖u_n − u_{n−1}‖_p`, absent at the first level.
    pub increment: Option<f64>,
    pub datum_layer_norm: f64,
}

#[derive(Clone, Debug)]
pub struct ExhaustionResult {
    pub u: GridFunction,
    pub depth: usize,
    pub saturated: bool,
    pub trace: Vec<ExhaustionLevel>,
    /// For sign-definite data: iterates were monotone in `n` at every node.
    pub monotone: Option<bool>,
    /// For signed data: the final solution lies between the `g⁺` and `g⁻` solutions.
    pub envelope_ok: Option<bool>,
    /// `C` for sign-definite data, `2^{(p−1)/p}·C` for signed data.
    pub bound_constant: f64,
    pub bound_ok: bool,
}

impl ExhaustionResult {
    pub fn solution_on(&self, x: &NodeId) -> f64 {
        self.u.value_or_zero(x)
    }
}

struct Level {
    sub: DirichletSubgraph,
    g: GridFunction,
}

fn level(host: &WeightedGraph, nodes: &[NodeId], g: &NodeData) -> Result<Level> {
    let sub = DirichletSubgraph::new(host, nodes)?;
    let values = sub.nodes().iter().map(|x| g(x)).collect();
    let g = GridFunction::new(sub.window().clone(), values)?;
    Ok(Level { sub, g })
}

fn solve_level(lv: &Level, nl: &Nonlinearity, lambda: f64, opts: &SolveOptions, warm: Option<&GridFunction>) -> Result<SolveReport> {
    let prob = ResolventProblem::new(&lv.sub, nl, lambda, &lv.g)?;
    let opts = SolveOptions { initial: warm.cloned(), ..opts.clone() };
    solve_resolvent(&prob, &opts)
}

/// Solves on Dirichlet subgraphs of the breadth-first balls `X_1 ⊂ X_2 ⊂ …`
/// around `root` until successive zero-extended solutions differ by at most `tol`.
pub fn exhaust_resolvent(
    host: &WeightedGraph,
    nl: &Nonlinearity,
    lambda: f64,
    g: &NodeData,
    opts: &ExhaustionOptions,
) -> Result<ExhaustionResult> {
    PsiMap::new(nl, lambda)?;
    if !(opts.p >= 1.0) {
        return Err(Error::InvalidExponent(opts.p));
    }
    let exh = Exhaustion::new(host, &opts.root, opts.depth_max)?;
    let slack = 2.0 * opts.solve.tol;

    let mut trace = Vec::new();
    let mut prev: Option<GridFunction> = None;
    let mut prev_g_mass: f64 = 0.0;
    let mut sign_pos = true;
    let mut sign_neg = true;
    let mut monotone = true;
    let mut converged = None;
    let mut layers = Vec::new();
    for n in 1..=exh.depth() {
        let lv = level(host, exh.set(n).expect("depth in range"), g)?;
        sign_pos &= lv.g.min() >= 0.0;
        sign_neg &= lv.g.max() <= 0.0;
        let report = solve_level(&lv, nl, lambda, &opts.solve, prev.as_ref())?;
        let g_mass = lv.g.lp_norm(opts.p)?;
        let layer = if opts.p.is_infinite() {
            g_mass
        } else {
            (g_mass.powf(opts.p) - prev_g_mass.powf(opts.p)).max(0.0).powf(1.0 / opts.p)
        };
        layers.push(layer);
        prev_g_mass = g_mass;
        let increment = match &prev {
            Some(p) => {
                let scale = slack * lv.g.sup_norm().max(1.0);
                for (x, v) in p.iter() {
                    let now = report.u.value_or_zero(x);
                    if (sign_pos && now < v - scale) || (sign_neg && now > v + scale) {
                        monotone = false;
                    }
                }
                Some(lp_distance(&report.u, p, opts.p)?)
            }
            None => None,
        };
        trace.push(ExhaustionLevel {
            depth: n,
            nodes: lv.sub.len(),
            sweeps: report.sweeps,
            norm: report.u.lp_norm(opts.p)?,
            increment,
            datum_layer_norm: layer,
        });
        let last = n == exh.depth();
        let done = increment.is_some_and(|d| d <= opts.tol) || (last && exh.saturated());
        prev = Some(report.u);
        if done {
            converged = Some((n, lv));
            break;
        }
    }

    let (depth, lv) = match converged {
        Some(c) => c,
        None => {
            let k = layers.len();
            let grows = |a: f64, b: f64| a >= b * (1.0 - 1e-9);
            if k >= 3 && layers[k - 1] > 0.0 && grows(layers[k - 1], layers[k - 2]) && grows(layers[k - 2], layers[k - 3]) {
                return Err(Error::NotSummable);
            }
            let norms: Vec<f64> = trace.iter().map(|l| l.norm).collect();
            return Err(Error::ExhaustionNotConverged {
                depth: exh.depth(),
                previous: norms.len().checked_sub(2).map(|i| norms[i]).unwrap_or(f64::NAN),
                last: norms.last().copied().unwrap_or(f64::NAN),
            });
        }
    };
    let u = prev.expect("at least one level");
    let signed = !(sign_pos || sign_neg);

    let envelope_ok = if signed {
        let upper = Level { sub: lv.sub.clone(), g: lv.g.positive_part() };
        let lower = Level { sub: lv.sub.clone(), g: lv.g.negative_part() };
        let up = solve_level(&upper, nl, lambda, &opts.solve, Some(&u))?.u;
        let lo = solve_level(&lower, nl, lambda, &opts.solve, Some(&u))?.u;
        let scale = slack * lv.g.sup_norm().max(1.0);
        let ok = u.values().iter().zip(up.values()).zip(lo.values()).all(|((&v, &a), &b)| v <= a + scale && v >= b - scale);
        Some(ok)
    } else {
        None
    };

    let c = nl.apriori_constant(lambda)?;
    let bound_constant = if signed && opts.p.is_finite() { 2f64.powf((opts.p - 1.0) / opts.p) * c } else if signed { 2.0 * c } else { c };
    let bound_ok = u.lp_norm(opts.p)? <= bound_constant * lv.g.lp_norm(opts.p)? + opts.tol;
    Ok(ExhaustionResult {
        u,
        depth,
        saturated: exh.saturated() && depth == exh.depth(),
        trace,
        monotone: (!signed).then_some(monotone),
        envelope_ok,
        bound_constant,
        bound_ok,
    })
}

/// Stationary equation `Δu + αu = f(u) + αg`, solved as the resolvent with `λ = 1/α`.
pub fn solve_stationary(
    host: &WeightedGraph,
    nl: &Nonlinearity,
    alpha: f64,
    g: &NodeData,
    opts: &ExhaustionOptions,
) -> Result<ExhaustionResult> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("α must be > 0, got {alpha}")));
    }
    if nl.class() == NonlinearityClass::F2 {
        let l = nl.lipschitz_constant().ok_or(Error::MissingLipschitz)?;
        if alpha <= l {
            return Err(Error::InvalidParameter(format!("α must exceed L = {l}, got {alpha}")));
        }
    }
    exhaust_resolvent(host, nl, 1.0 / alpha, g, opts)
}

/// `𝒜u = −f(u) + Δ_dir u` on the window.
pub fn apply_operator(sub: &DirichletSubgraph, nl: &Nonlinearity, u: &[f64]) -> Vec<f64> {
    (0..sub.len()).map(|i| -nl.eval(u[i]) + sub.laplacian_at(i, u)).collect()
}

fn check_pair(sub: &DirichletSubgraph, u: &GridFunction, v: &GridFunction) -> Result<()> {
    if u.window().nodes() != sub.nodes() || v.window().nodes() != sub.nodes() {
        return Err(Error::WindowMismatch);
    }
    Ok(())
}

/// `Σ z |k|^{p−1} sgn(k) μ` with `z = 𝒜u − 𝒜v + ω k`, `k = u − v`; for `p = 1`
/// the nodes with `k = 0` contribute `|z| μ`.
pub fn shifted_accretivity_witness(
    sub: &DirichletSubgraph,
    nl: &Nonlinearity,
    u: &GridFunction,
    v: &GridFunction,
    p: f64,
    omega: f64,
) -> Result<f64> {
    if !(p >= 1.0) || p.is_infinite() {
        return Err(Error::InvalidExponent(p));
    }
    check_pair(sub, u, v)?;
    let au = apply_operator(sub, nl, u.values());
    let av = apply_operator(sub, nl, v.values());
    let mut total = 0.0;
    for i in 0..sub.len() {
        let k = u.values()[i] - v.values()[i];
        let z = au[i] - av[i] + omega * k;
        let mu = sub.measure_at(i);
        total += if p == 1.0 {
            if k == 0.0 { z.abs() * mu } else { z * k.signum() * mu }
        } else {
            z * signed_power(k, p - 1.0) * mu
        };
    }
    Ok(total)
}

/// The accretivity pairing with `ω = 0`.
pub fn accretivity_witness(
    sub: &DirichletSubgraph,
    nl: &Nonlinearity,
    u: &GridFunction,
    v: &GridFunction,
    p: f64,
) -> Result<f64> {
    shifted_accretivity_witness(sub, nl, u, v, p, 0.0)
}

/// `‖k + λz‖_p ≥ (1 − Lλ)‖k‖_p − 10⁻¹²` with `k = u − v`, `z = 𝒜u − 𝒜v`.
pub fn omega_contractivity_check(
    sub: &DirichletSubgraph,
    nl: &Nonlinearity,
    u: &GridFunction,
    v: &GridFunction,
    lambda: f64,
    p: f64,
) -> Result<bool> {
    let l = nl.lipschitz_constant().ok_or(Error::MissingLipschitz)?;
    if !(lambda >= 0.0) || lambda * l >= 1.0 {
        return Err(Error::StepTooLarge { lambda, lipschitz: l });
    }
    check_pair(sub, u, v)?;
    let au = apply_operator(sub, nl, u.values());
    let av = apply_operator(sub, nl, v.values());
    let k = u.sub(v)?;
    let lhs_vals = (0..sub.len()).map(|i| k.values()[i] + lambda * (au[i] - av[i])).collect();
    let lhs = GridFunction::new(sub.window().clone(), lhs_vals)?;
    Ok(lhs.lp_norm(p)? >= (1.0 - l * lambda) * k.lp_norm(p)? - 1e-12)
}

/// Solves both problems and checks `u₁ ≥ u₂ − tol` pointwise. Requires `g₁ ≥ g₂`.
pub fn compare_solutions(prob1: &ResolventProblem<'_>, prob2: &ResolventProblem<'_>, opts: &SolveOptions) -> Result<bool> {
    if prob1.sub.nodes() != prob2.sub.nodes() || prob1.lambda() != prob2.lambda() {
        return Err(Error::Precondition("problems must share subgraph and step".into()));
    }
    if prob1.g.values().iter().zip(prob2.g.values()).any(|(a, b)| a < b) {
        return Err(Error::Precondition("compare_solutions needs g₁ ≥ g₂".into()));
    }
    let u1 = solve_resolvent(prob1, opts)?.u;
    let u2 = solve_resolvent(prob2, opts)?.u;
    let tol = opts.tol * prob1.g.sup_norm().max(prob2.g.sup_norm()).max(1.0);
    Ok(u1.values().iter().zip(u2.values()).all(|(a, b)| *a >= b - tol))
}
