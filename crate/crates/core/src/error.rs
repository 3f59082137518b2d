use thiserror::Error;

use crate::graph::NodeId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),

    #[error("neighbor {neighbor} of {node} lies outside the window")]
    NeighborOutsideWindow { node: NodeId, neighbor: NodeId },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("node set is empty")]
    EmptyNodeSet,

    #[error("duplicate node {0} in window")]
    DuplicateNode(NodeId),

    #[error("norm exponent p = {0} is not in [1, ∞]")]
    InvalidExponent(f64),

    #[error("neighbor oracle failed at {node}: {reason}")]
    Oracle { node: NodeId, reason: String },

    #[error("exhaustion set X_{depth} has no edge into X_{next}∖X_{depth}", next = depth + 1)]
    ExhaustionProperty { depth: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("class F2 nonlinearity requires a Lipschitz constant")]
    MissingLipschitz,

    #[error("step λ = {lambda} violates λ·L < 1 for Lipschitz constant L = {lipschitz}")]
    StepTooLarge { lambda: f64, lipschitz: f64 },

    #[error("nonlinearity violates its declared class: {0}")]
    ClassViolation(String),

    #[error("could not bracket ψ⁻¹({target}); nonlinearity is inconsistent with its class")]
    BracketExpansion { target: f64 },

    #[error("resolvent solve did not converge: {sweeps} sweeps, residual {residual:e} > {tolerance:e}")]
    NotConverged { sweeps: usize, residual: f64, tolerance: f64 },

    #[error("grid function window does not match the problem window")]
    WindowMismatch,

    #[error("exhaustion did not converge by depth {depth}; last increments {previous:e}, {last:e}")]
    ExhaustionNotConverged { depth: usize, previous: f64, last: f64 },

    #[error("datum is not ℓ^p-summable on the materialized window")]
    NotSummable,

    #[error("refinement budget exhausted; Cauchy gaps {gaps:?}")]
    RefinementExhausted { gaps: Vec<f64> },

    #[error("trajectories do not share a time grid and window")]
    GridMismatch,

    #[error("window has {size} nodes, dense oracle supports at most {max}")]
    WindowTooLarge { size: usize, max: usize },

    #[error("missing boundary value at {0}")]
    MissingBoundaryValue(NodeId),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
