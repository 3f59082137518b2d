//! Independent oracles for integration and acceptance tests.
#![allow(dead_code)]

use graphflow_core::graph::DirichletSubgraph;
use graphflow_core::Nonlinearity;
use nalgebra::{DMatrix, DVector};

/// Bisection for `s + λ s|s|^{q−1} = y`.
pub fn bisect_power(q: f64, lambda: f64, y: f64) -> f64 {
    let sign = y.signum();
    let y = y.abs();
    let (mut lo, mut hi) = (0.0f64, y);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid + lambda * mid.powf(q) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    sign * 0.5 * (lo + hi)
}

/// Dense operator of the Dirichlet Laplacian, assembled from the node data
/// and edges of the subgraph.
pub fn laplacian_matrix(sub: &DirichletSubgraph) -> DMatrix<f64> {
    let n = sub.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        let mu = sub.measure_at(i);
        let mut diag = sub.dirichlet_killing()[i];
        for &(j, w) in sub.adjacency(i) {
            diag += w;
            m[(i, j)] -= w / mu;
        }
        m[(i, i)] += diag / mu;
    }
    m
}

fn full_residual(l: &DMatrix<f64>, nl: &Nonlinearity, lambda: f64, g: &[f64], u: &DVector<f64>) -> DVector<f64> {
    let lu = l * u;
    DVector::from_iterator(u.len(), (0..u.len()).map(|i| u[i] - lambda * nl.eval(u[i]) + lambda * lu[i] - g[i]))
}

/// Damped Newton on the full system `u − λf(u) + λLu = g`, with `f'` by central differences.
pub fn newton_resolvent(sub: &DirichletSubgraph, nl: &Nonlinearity, lambda: f64, g: &[f64]) -> Option<Vec<f64>> {
    let n = sub.len();
    let l = laplacian_matrix(sub);
    let mut u = DVector::from_column_slice(g);
    let mut r = full_residual(&l, nl, lambda, g, &u);
    for _ in 0..1000 {
        if r.amax() < 1e-14 * (1.0 + g.iter().fold(0.0f64, |m, v| m.max(v.abs()))) {
            return Some(u.iter().copied().collect());
        }
        let mut jac = &l * lambda + DMatrix::identity(n, n);
        for i in 0..n {
            let h = 1e-7 * u[i].abs().max(1e-3);
            let slope = (nl.eval(u[i] + h) - nl.eval(u[i] - h)) / (2.0 * h);
            jac[(i, i)] -= lambda * slope;
        }
        let step = jac.lu().solve(&(-&r))?;
        let merit = r.norm_squared();
        let mut t = 1.0;
        loop {
            let cand = &u + &step * t;
            let rc = full_residual(&l, nl, lambda, g, &cand);
            if rc.norm_squared() < merit * (1.0 - 1e-4 * t) || t < 1e-12 {
                u = cand;
                r = rc;
                break;
            }
            t *= 0.5;
        }
    }
    None
}
