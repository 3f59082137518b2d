//! Semilinear diffusion `∂ₜu + Δu = f(u) + h` on weighted, possibly infinite graphs.
//!
//! The crate is organised bottom-up:
//!
//! | Module | Purpose |
//! |--------|---------|
//! | [`graph`] | weighted graphs (explicit or neighbor oracles), windows, grid functions, Dirichlet subgraphs, exhaustions |
//! | [`nonlinearity`] | reaction terms of class F1 (decreasing) and F2 (Lipschitz), the increment map `ψ(s) = s − λf(s)` |
//! | [`stationary`] | the resolvent equation `(id + λ(F + Δ_dir))u = g`, exhaustion limits, accretivity diagnostics |
//! | [`evolution`] | ε-discretizations, implicit Euler marching, mild-solution refinement, linear semigroup oracle |
//! | [`barriers`] | extinction/positivity barriers for power absorption and comparison verdicts |
//! | [`sampling`] | seeded random finite graphs and data for property suites |
//!
//! Infinite graphs are never materialized: every computation happens on a finite
//! window plus its exterior boundary, which is absorbed into a Dirichlet killing term.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod barriers;
pub mod error;
pub mod evolution;
pub mod graph;
pub mod nonlinearity;
pub mod sampling;
pub mod stationary;

mod expm;
mod roots;

pub use error::{Error, Result};
pub use graph::{
    DirichletSubgraph, Exhaustion, FiniteGraph, GraphFlags, GridFunction, NodeId, WeightedGraph,
    Window,
};
pub use nonlinearity::{Nonlinearity, NonlinearityClass, PsiMap};

/// `p = ∞` for norm arguments.
pub const SUP_NORM: f64 = f64::INFINITY;
