//! Weighted graphs `G = (X, w, κ, μ)`.
//!
//! A graph is either an explicit finite graph or a neighbor oracle: a pure
//! function returning the finite weighted neighbor list of any node. Oracles let
//! infinite graphs such as `ℤᵈ` or regular trees take part in exhaustion
//! arguments, which only ever touch finite windows and their exterior boundary.

mod dirichlet;
mod exhaustion;
mod generators;
pub mod io;
mod window;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use dirichlet::{absorb_boundary_data, DirichletSubgraph};
pub use exhaustion::Exhaustion;
pub use generators::{cycle, generate, lattice, path, regular_tree, GeneratorSpec};
pub use window::{lp_distance, lp_norm, GridFunction, Window};

/// Node identifier: a tuple of integers.
///
/// Explicit graphs and one-dimensional generators use 1-tuples, lattices use
/// their coordinates and trees use the child-index path from the root (the
/// root is the empty tuple).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct NodeId(Vec<i64>);

impl NodeId {
    pub fn new(coords: impl Into<Vec<i64>>) -> Self {
        NodeId(coords.into())
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<i64> for NodeId {
    fn from(i: i64) -> Self {
        NodeId(vec![i])
    }
}

impl From<Vec<i64>> for NodeId {
    fn from(v: Vec<i64>) -> Self {
        NodeId(v)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            return write!(f, "{}", self.0[0]);
        }
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for NodeId {
    type Err = Error;

    /// Accepts `5`, `(1,2)`, `(1, -2)`, `1,2` and `()`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let inner = t
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .unwrap_or(t)
            .trim();
        if inner.is_empty() {
            return if t.starts_with('(') {
                Ok(NodeId(Vec::new()))
            } else {
                Err(Error::InvalidParameter(format!("empty node id {s:?}")))
            };
        }
        inner
            .split(',')
            .map(|c| {
                c.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::InvalidParameter(format!("bad node id {s:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(NodeId)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum NodeIdRepr {
    Scalar(i64),
    Tuple(Vec<i64>),
}

impl Serialize for NodeId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.len() == 1 {
            NodeIdRepr::Scalar(self.0[0]).serialize(s)
        } else {
            NodeIdRepr::Tuple(self.0.clone()).serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for NodeId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(match NodeIdRepr::deserialize(d)? {
            NodeIdRepr::Scalar(i) => NodeId(vec![i]),
            NodeIdRepr::Tuple(v) => NodeId(v),
        })
    }
}

/// User-declared hypotheses on the graph. Neither is decidable for an oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFlags {
    /// (IP): every infinite path has infinite total measure.
    pub infinite_paths_have_infinite_measure: bool,
    /// (B): `sup_x Σ_y w(x,y) / μ(x) < ∞`.
    pub bounded_degree: bool,
}

impl GraphFlags {
    pub const FINITE: GraphFlags = GraphFlags {
        infinite_paths_have_infinite_measure: true,
        bounded_degree: true,
    };
}

/// A lazily generated graph. Implementations must be pure functions of the node.
pub trait NeighborOracle: Send + Sync {
    fn contains(&self, x: &NodeId) -> bool;

    /// Finite weighted neighbor list of `x`; entries with zero weight are omitted.
    fn neighbors(&self, x: &NodeId) -> Result<Vec<(NodeId, f64)>>;

    fn measure(&self, _x: &NodeId) -> f64 {
        1.0
    }

    fn killing(&self, _x: &NodeId) -> f64 {
        0.0
    }

    fn describe(&self) -> String;
}

/// Explicit finite graph with a dense index map.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteGraph {
    ids: Vec<NodeId>,
    index: HashMap<NodeId, usize>,
    measure: Vec<f64>,
    killing: Vec<f64>,
    adjacency: Vec<Vec<(usize, f64)>>,
}

/// Node record used when building a [`FiniteGraph`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeSpec {
    pub id: NodeId,
    pub mu: f64,
    #[serde(default)]
    pub kappa: f64,
}

/// Undirected edge record used when building a [`FiniteGraph`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub u: NodeId,
    pub v: NodeId,
    pub w: f64,
}

impl FiniteGraph {
    /// Builds a graph from node and undirected edge records.
    ///
    /// Rejects duplicate nodes, duplicate edges (in either orientation),
    /// self-loops, negative or non-finite weights, `μ ≤ 0` and `κ < 0`.
    /// Zero-weight edges are dropped.
    pub fn new(nodes: Vec<NodeSpec>, edges: Vec<EdgeSpec>) -> Result<Self> {
        let mut ids = Vec::with_capacity(nodes.len());
        let mut index = HashMap::with_capacity(nodes.len());
        let mut measure = Vec::with_capacity(nodes.len());
        let mut killing = Vec::with_capacity(nodes.len());
        for n in nodes {
            if !(n.mu > 0.0 && n.mu.is_finite()) {
                return Err(Error::InvalidGraph(format!("μ({}) = {} must be positive", n.id, n.mu)));
            }
            if !(n.kappa >= 0.0 && n.kappa.is_finite()) {
                return Err(Error::InvalidGraph(format!("κ({}) = {} must be nonnegative", n.id, n.kappa)));
            }
            if index.insert(n.id.clone(), ids.len()).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate node {}", n.id)));
            }
            ids.push(n.id);
            measure.push(n.mu);
            killing.push(n.kappa);
        }
        let mut adjacency = vec![Vec::new(); ids.len()];
        let mut seen = BTreeSet::new();
        for e in edges {
            let lookup = |id: &NodeId| {
                index
                    .get(id)
                    .copied()
                    .ok_or_else(|| Error::InvalidGraph(format!("edge endpoint {id} is not a node")))
            };
            let (a, b) = (lookup(&e.u)?, lookup(&e.v)?);
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at {}", e.u)));
            }
            if !(e.w >= 0.0 && e.w.is_finite()) {
                return Err(Error::InvalidGraph(format!("weight w({},{}) = {} is invalid", e.u, e.v, e.w)));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::InvalidGraph(format!("duplicate edge {}–{}", e.u, e.v)));
            }
            if e.w > 0.0 {
                adjacency[a].push((b, e.w));
                adjacency[b].push((a, e.w));
            }
        }
        for adj in &mut adjacency {
            adj.sort_by_key(|&(j, _)| j);
        }
        Ok(FiniteGraph { ids, index, measure, killing, adjacency })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[NodeId] {
        &self.ids
    }

    pub fn index_of(&self, x: &NodeId) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn measure_at(&self, i: usize) -> f64 {
        self.measure[i]
    }

    pub fn killing_at(&self, i: usize) -> f64 {
        self.killing[i]
    }

    /// Neighbors of node `i` as `(index, weight)`.
    pub fn adjacency(&self, i: usize) -> &[(usize, f64)] {
        &self.adjacency[i]
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Node records in index order.
    pub fn node_specs(&self) -> Vec<NodeSpec> {
        (0..self.len())
            .map(|i| NodeSpec { id: self.ids[i].clone(), mu: self.measure[i], kappa: self.killing[i] })
            .collect()
    }

    /// Each undirected edge once, ordered by endpoint index.
    pub fn edge_specs(&self) -> Vec<EdgeSpec> {
        let mut out = Vec::new();
        for (i, adj) in self.adjacency.iter().enumerate() {
            for &(j, w) in adj {
                if i < j {
                    out.push(EdgeSpec { u: self.ids[i].clone(), v: self.ids[j].clone(), w });
                }
            }
        }
        out
    }
}

enum Presentation {
    Finite(FiniteGraph),
    Oracle(Box<dyn NeighborOracle>),
}

/// A weighted graph, cheap to clone and safe to share across threads.
#[derive(Clone)]
pub struct WeightedGraph {
    inner: Arc<Presentation>,
    flags: GraphFlags,
    label: String,
}

impl fmt::Debug for WeightedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightedGraph")
            .field("label", &self.label)
            .field("finite", &self.is_finite())
            .field("flags", &self.flags)
            .finish()
    }
}

impl PartialEq for WeightedGraph {
    /// Explicit graphs compare structurally; oracle graphs only by identity.
    fn eq(&self, other: &Self) -> bool {
        match (self.inner.as_ref(), other.inner.as_ref()) {
            (Presentation::Finite(a), Presentation::Finite(b)) => a == b,
            _ => Arc::ptr_eq(&self.inner, &other.inner),
        }
    }
}

impl From<FiniteGraph> for WeightedGraph {
    fn from(g: FiniteGraph) -> Self {
        WeightedGraph::finite(g)
    }
}

impl WeightedGraph {
    pub fn finite(g: FiniteGraph) -> Self {
        let label = format!("finite({} nodes)", g.len());
        WeightedGraph { inner: Arc::new(Presentation::Finite(g)), flags: GraphFlags::FINITE, label }
    }

    pub fn oracle(oracle: impl NeighborOracle + 'static, flags: GraphFlags) -> Self {
        let label = oracle.describe();
        WeightedGraph { inner: Arc::new(Presentation::Oracle(Box::new(oracle))), flags, label }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn flags(&self) -> GraphFlags {
        self.flags
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.inner.as_ref(), Presentation::Finite(_))
    }

    pub fn as_finite(&self) -> Option<&FiniteGraph> {
        match self.inner.as_ref() {
            Presentation::Finite(g) => Some(g),
            Presentation::Oracle(_) => None,
        }
    }

    pub fn node_count(&self) -> Option<usize> {
        self.as_finite().map(FiniteGraph::len)
    }

    pub fn contains(&self, x: &NodeId) -> bool {
        match self.inner.as_ref() {
            Presentation::Finite(g) => g.index.contains_key(x),
            Presentation::Oracle(o) => o.contains(x),
        }
    }

    fn require(&self, x: &NodeId) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::UnknownNode(x.clone()))
        }
    }

    pub fn measure(&self, x: &NodeId) -> Result<f64> {
        self.require(x)?;
        Ok(match self.inner.as_ref() {
            Presentation::Finite(g) => g.measure[g.index[x]],
            Presentation::Oracle(o) => o.measure(x),
        })
    }

    pub fn killing(&self, x: &NodeId) -> Result<f64> {
        self.require(x)?;
        Ok(match self.inner.as_ref() {
            Presentation::Finite(g) => g.killing[g.index[x]],
            Presentation::Oracle(o) => o.killing(x),
        })
    }

    /// Weighted neighbor list of `x`, with weights validated against (A1)–(A3).
    pub fn neighbors(&self, x: &NodeId) -> Result<Vec<(NodeId, f64)>> {
        self.require(x)?;
        match self.inner.as_ref() {
            Presentation::Finite(g) => {
                let i = g.index[x];
                Ok(g.adjacency[i].iter().map(|&(j, w)| (g.ids[j].clone(), w)).collect())
            }
            Presentation::Oracle(o) => {
                let nbrs = o.neighbors(x)?;
                for (y, w) in &nbrs {
                    if y == x {
                        return Err(Error::Oracle { node: x.clone(), reason: "self-loop".into() });
                    }
                    if !(*w >= 0.0 && w.is_finite()) {
                        return Err(Error::Oracle { node: x.clone(), reason: format!("weight {w} to {y}") });
                    }
                }
                Ok(nbrs)
            }
        }
    }

    /// `Σ_y w(x,y)`.
    pub fn edge_degree(&self, x: &NodeId) -> Result<f64> {
        Ok(self.neighbors(x)?.iter().map(|(_, w)| w).sum())
    }

    /// `deg(x) = Σ_y w(x,y) + κ(x)`.
    pub fn degree(&self, x: &NodeId) -> Result<f64> {
        Ok(self.edge_degree(x)? + self.killing(x)?)
    }

    /// Checks `w(x,y) = w(y,x)` exactly for every edge incident to `nodes`, plus
    /// `μ > 0` and `κ ≥ 0` at those nodes.
    pub fn audit(&self, nodes: &[NodeId]) -> Result<()> {
        for x in nodes {
            let mu = self.measure(x)?;
            let kappa = self.killing(x)?;
            if !(mu > 0.0 && mu.is_finite()) || !(kappa >= 0.0 && kappa.is_finite()) {
                return Err(Error::InvalidGraph(format!("μ({x}) = {mu}, κ({x}) = {kappa}")));
            }
            for (y, w) in self.neighbors(x)? {
                let back = self
                    .neighbors(&y)?
                    .into_iter()
                    .find(|(z, _)| z == x)
                    .map(|(_, w)| w)
                    .unwrap_or(0.0);
                if back != w {
                    return Err(Error::InvalidGraph(format!("w({x},{y}) = {w} but w({y},{x}) = {back}")));
                }
            }
        }
        Ok(())
    }

    /// Breadth-first ball of `radius` around `root`, in BFS discovery order.
    pub fn ball(&self, root: &NodeId, radius: usize) -> Result<Vec<NodeId>> {
        self.require(root)?;
        let mut seen: std::collections::HashSet<NodeId> = [root.clone()].into_iter().collect();
        let mut order = vec![root.clone()];
        let mut frontier = vec![root.clone()];
        for _ in 0..radius {
            let mut next = Vec::new();
            for x in &frontier {
                for (y, _) in self.neighbors(x)? {
                    if seen.insert(y.clone()) {
                        next.push(y.clone());
                        order.push(y);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        Ok(order)
    }

    /// Induced finite graph on `nodes` with the canonical killing term `κ|_Y`.
    pub fn induced(&self, nodes: &[NodeId]) -> Result<FiniteGraph> {
        let set: std::collections::HashSet<&NodeId> = nodes.iter().collect();
        let mut specs = Vec::with_capacity(nodes.len());
        let mut edges = Vec::new();
        for x in nodes {
            specs.push(NodeSpec { id: x.clone(), mu: self.measure(x)?, kappa: self.killing(x)? });
            for (y, w) in self.neighbors(x)? {
                if set.contains(&y) && x < &y {
                    edges.push(EdgeSpec { u: x.clone(), v: y, w });
                }
            }
        }
        FiniteGraph::new(specs, edges)
    }
}

/// Whether values outside the window may be read as zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extension {
    /// Every node touched must lie in the window.
    Strict,
    /// The function is extended by zero outside its window.
    ZeroExtended,
}

/// `Δu(x) = (1/μ(x)) Σ_y w(x,y)(u(x) − u(y)) + (κ(x)/μ(x)) u(x)` on the host graph.
pub fn apply_laplacian(
    g: &WeightedGraph,
    u: &GridFunction,
    x: &NodeId,
    extension: Extension,
) -> Result<f64> {
    let read = |y: &NodeId, from: &NodeId| match (u.get(y), extension) {
        (Some(v), _) => Ok(v),
        (None, Extension::ZeroExtended) => Ok(0.0),
        (None, Extension::Strict) => {
            Err(Error::NeighborOutsideWindow { node: from.clone(), neighbor: y.clone() })
        }
    };
    let mu = g.measure(x)?;
    let ux = read(x, x)?;
    let mut acc = g.killing(x)? * ux;
    for (y, w) in g.neighbors(x)? {
        acc += w * (ux - read(&y, x)?);
    }
    Ok(acc / mu)
}

/// Condition (C_p) at `x`: `Σ_y w(x,y)ᵖ / μ(y)^{p−1} < ∞`, or `sup_y w(x,y)/μ(y) < ∞` for `p = ∞`.
///
/// Neighbor lists are finite by construction, so this can only fail through
/// floating-point overflow of the sum.
pub fn check_cp(g: &WeightedGraph, x: &NodeId, p: f64) -> Result<bool> {
    if !(p >= 1.0) {
        return Err(Error::InvalidExponent(p));
    }
    let nbrs = g.neighbors(x)?;
    if p.is_infinite() {
        let mut sup = 0.0_f64;
        for (y, w) in &nbrs {
            sup = sup.max(w / g.measure(y)?);
        }
        return Ok(sup.is_finite());
    }
    let mut sum = 0.0;
    for (y, w) in &nbrs {
        sum += w.powf(p) / g.measure(y)?.powf(p - 1.0);
    }
    Ok(sum.is_finite())
}

/// Interior `Y̊`, interior boundary `∂̊Y` and exterior boundary `∂•Y` of a node set.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BoundarySets {
    pub interior: Vec<NodeId>,
    pub interior_boundary: Vec<NodeId>,
    pub exterior_boundary: Vec<NodeId>,
}

pub fn boundary_sets(g: &WeightedGraph, y: &[NodeId]) -> Result<BoundarySets> {
    if y.is_empty() {
        return Err(Error::EmptyNodeSet);
    }
    let set: BTreeSet<&NodeId> = y.iter().collect();
    let mut out = BoundarySets::default();
    let mut exterior = BTreeSet::new();
    for &x in &set {
        let mut touches_outside = false;
        for (z, _) in g.neighbors(x)? {
            if !set.contains(&z) {
                touches_outside = true;
                exterior.insert(z);
            }
        }
        if touches_outside {
            out.interior_boundary.push(x.clone());
        } else {
            out.interior.push(x.clone());
        }
    }
    out.exterior_boundary = exterior.into_iter().collect();
    Ok(out)
}

/// `Σ_x Δu(x) |u(x)|^{p−1} sgn(u(x)) μ(x)` for a function on a finite graph.
///
/// Nonnegative for every `p ≥ 1` (up to rounding).
pub fn laplacian_pairing(g: &FiniteGraph, u: &[f64], p: f64) -> f64 {
    (0..g.len())
        .map(|i| {
            let lap = finite_laplacian_at(g, u, i);
            lap * signed_power(u[i], p - 1.0) * g.measure[i]
        })
        .sum()
}

/// Laplacian of an explicit finite graph at node index `i`.
pub fn finite_laplacian_at(g: &FiniteGraph, u: &[f64], i: usize) -> f64 {
    let mut acc = g.killing[i] * u[i];
    for &(j, w) in &g.adjacency[i] {
        acc += w * (u[i] - u[j]);
    }
    acc / g.measure[i]
}

/// `|s|^e sgn(s)` with `sgn(0) = 0`.
pub(crate) fn signed_power(s: f64, e: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else if e == 0.0 {
        s.signum()
    } else {
        s.abs().powf(e) * s.signum()
    }
}
