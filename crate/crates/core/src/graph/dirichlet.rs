use std::collections::BTreeSet;
use std::sync::Arc;

use nalgebra::DMatrix;

use super::{EdgeSpec, FiniteGraph, GridFunction, NodeId, NodeSpec, WeightedGraph, Window};
use crate::error::{Error, Result};

/// Finite window `Y` of a host graph with zero Dirichlet conditions on `∂•Y`.
///
/// The edges leaving `Y` are folded into the killing term:
/// `b_dir(y) = Σ_{z∉Y} w(y,z)` and `κ_dir = κ|_Y + b_dir`. For any `u`
/// supported in `Y` the host Laplacian and the subgraph Laplacian agree on `Y`.
#[derive(Clone, Debug)]
pub struct DirichletSubgraph {
    host: WeightedGraph,
    window: Arc<Window>,
    adjacency: Vec<Vec<(usize, f64)>>,
    killing: Vec<f64>,
    boundary_weight: Vec<f64>,
    dirichlet_killing: Vec<f64>,
    exterior: Vec<(usize, NodeId, f64)>,
}

impl DirichletSubgraph {
    /// Builds the Dirichlet subgraph on `y`, ordered by ascending node id.
    pub fn new(host: &WeightedGraph, y: &[NodeId]) -> Result<Self> {
        if y.is_empty() {
            return Err(Error::EmptyNodeSet);
        }
        let nodes: Vec<NodeId> = y.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        host.audit(&nodes)?;
        let window = Window::new(host, nodes)?;
        let n = window.len();
        let mut adjacency = vec![Vec::new(); n];
        let mut killing = Vec::with_capacity(n);
        let mut boundary_weight = vec![0.0; n];
        let mut exterior = Vec::new();
        for (i, x) in window.nodes().iter().enumerate() {
            killing.push(host.killing(x)?);
            for (z, w) in host.neighbors(x)? {
                match window.index_of(&z) {
                    Some(j) => adjacency[i].push((j, w)),
                    None => {
                        boundary_weight[i] += w;
                        exterior.push((i, z, w));
                    }
                }
            }
            adjacency[i].sort_by_key(|&(j, _)| j);
        }
        let dirichlet_killing = killing.iter().zip(&boundary_weight).map(|(k, b)| k + b).collect();
        Ok(DirichletSubgraph {
            host: host.clone(),
            window,
            adjacency,
            killing,
            boundary_weight,
            dirichlet_killing,
            exterior,
        })
    }

    /// The whole of a finite graph as its own Dirichlet subgraph (`b_dir ≡ 0`).
    pub fn whole(host: &WeightedGraph) -> Result<Self> {
        let g = host
            .as_finite()
            .ok_or_else(|| Error::Precondition("whole-graph subgraph needs a finite host".into()))?;
        DirichletSubgraph::new(host, g.ids())
    }

    pub fn host(&self) -> &WeightedGraph {
        &self.host
    }

    pub fn window(&self) -> &Arc<Window> {
        &self.window
    }

    pub fn len(&self) -> usize {
        self.window.len()
    }

    pub fn is_empty(&self) -> bool {
        self.window.is_empty()
    }

    pub fn nodes(&self) -> &[NodeId] {
        self.window.nodes()
    }

    pub fn measure_at(&self, i: usize) -> f64 {
        self.window.measure()[i]
    }

    /// Edges inside `Y` at local index `i`.
    pub fn adjacency(&self, i: usize) -> &[(usize, f64)] {
        &self.adjacency[i]
    }

    /// `b_dir` per local index.
    pub fn boundary_weight(&self) -> &[f64] {
        &self.boundary_weight
    }

    /// `κ|_Y` per local index.
    pub fn host_killing(&self) -> &[f64] {
        &self.killing
    }

    /// `κ_dir` per local index.
    pub fn dirichlet_killing(&self) -> &[f64] {
        &self.dirichlet_killing
    }

    pub fn boundary_weight_of(&self, x: &NodeId) -> Option<f64> {
        self.window.index_of(x).map(|i| self.boundary_weight[i])
    }

    pub fn dirichlet_killing_of(&self, x: &NodeId) -> Option<f64> {
        self.window.index_of(x).map(|i| self.dirichlet_killing[i])
    }

    /// `deg_dir(i) = Σ_{y∈Y} w(i,y) + κ_dir(i)`, which equals the host degree.
    pub fn degree(&self, i: usize) -> f64 {
        self.adjacency[i].iter().map(|&(_, w)| w).sum::<f64>() + self.dirichlet_killing[i]
    }

    /// Edges `(local index, outside node, weight)` crossing to `∂•Y`.
    pub fn exterior_edges(&self) -> &[(usize, NodeId, f64)] {
        &self.exterior
    }

    /// `∂•Y`, sorted.
    pub fn exterior_boundary(&self) -> Vec<NodeId> {
        self.exterior.iter().map(|(_, z, _)| z.clone()).collect::<BTreeSet<_>>().into_iter().collect()
    }

    /// `Δ_dir u` at local index `i` for values on the window.
    pub fn laplacian_at(&self, i: usize, u: &[f64]) -> f64 {
        let mut acc = self.dirichlet_killing[i] * u[i];
        for &(j, w) in &self.adjacency[i] {
            acc += w * (u[i] - u[j]);
        }
        acc / self.measure_at(i)
    }

    /// `Σ_{y∈Y} w(i,y) u(y)`.
    pub fn neighbor_sum(&self, i: usize, u: &[f64]) -> f64 {
        self.adjacency[i].iter().map(|&(j, w)| w * u[j]).sum()
    }

    pub fn laplacian(&self, u: &GridFunction) -> Result<GridFunction> {
        if !Arc::ptr_eq(u.window(), &self.window) && u.window().nodes() != self.nodes() {
            return Err(Error::WindowMismatch);
        }
        let values = (0..self.len()).map(|i| self.laplacian_at(i, u.values())).collect();
        Ok(GridFunction::from_parts_unchecked(self.window.clone(), values))
    }

    /// The subgraph as a standalone explicit graph with killing term `κ_dir`.
    pub fn to_finite_graph(&self) -> FiniteGraph {
        let nodes = self
            .nodes()
            .iter()
            .enumerate()
            .map(|(i, x)| NodeSpec { id: x.clone(), mu: self.measure_at(i), kappa: self.dirichlet_killing[i] })
            .collect();
        let mut edges = Vec::new();
        for (i, adj) in self.adjacency.iter().enumerate() {
            for &(j, w) in adj {
                if i < j {
                    edges.push(EdgeSpec { u: self.nodes()[i].clone(), v: self.nodes()[j].clone(), w });
                }
            }
        }
        FiniteGraph::new(nodes, edges).expect("Dirichlet subgraph of a valid host is valid")
    }

    /// Dense matrix of `Δ_dir` in window order.
    pub fn dense_laplacian(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            let mu = self.measure_at(i);
            m[(i, i)] = self.degree(i) / mu;
            for &(j, w) in &self.adjacency[i] {
                m[(i, j)] -= w / mu;
            }
        }
        m
    }
}

/// Forcing `h(t,x) = (1/μ(x)) Σ_{y∈∂•Y} w(x,y) bc(t,y)` that turns boundary data on
/// `∂•Y` into a source term on the Dirichlet subgraph of `Y`.
pub fn absorb_boundary_data(
    sub: &DirichletSubgraph,
    t: f64,
    bc: impl Fn(f64, &NodeId) -> Option<f64>,
) -> Result<GridFunction> {
    let mut values = vec![0.0; sub.len()];
    for (i, z, w) in sub.exterior_edges() {
        let b = bc(t, z).ok_or_else(|| Error::MissingBoundaryValue(z.clone()))?;
        values[*i] += w * b;
    }
    for (i, v) in values.iter_mut().enumerate() {
        *v /= sub.measure_at(i);
    }
    GridFunction::new(sub.window().clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{apply_laplacian, lattice, path, Extension};

    #[test]
    fn boundary_weights_on_a_path() {
        let g = path(4).unwrap();
        let s = DirichletSubgraph::new(&g, &[1.into(), 2.into()]).unwrap();
        assert_eq!(s.boundary_weight(), &[1.0, 1.0]);
        let s = DirichletSubgraph::new(&g, &[1.into()]).unwrap();
        assert_eq!(s.boundary_weight(), &[2.0]);
        assert_eq!(s.dirichlet_killing(), &[2.0]);
        let g5 = path(5).unwrap();
        let s = DirichletSubgraph::new(&g5, &[3.into(), 1.into(), 2.into()]).unwrap();
        assert_eq!(s.boundary_weight_of(&2.into()), Some(0.0));
        assert_eq!(s.nodes(), &[1.into(), 2.into(), 3.into()]);
        assert!(matches!(DirichletSubgraph::new(&g5, &[]), Err(Error::EmptyNodeSet)));
    }

    #[test]
    fn host_and_subgraph_laplacians_agree_on_zero_extensions() {
        let z = lattice(2).unwrap();
        let ball = z.ball(&NodeId::new(vec![0, 0]), 3).unwrap();
        let s = DirichletSubgraph::new(&z, &ball).unwrap();
        let u = GridFunction::from_fn(s.window().clone(), |x| {
            let c = x.coords();
            (c[0] as f64 * 0.7).sin() + 0.3 * c[1] as f64
        })
        .unwrap();
        let lap = s.laplacian(&u).unwrap();
        for (i, x) in s.nodes().iter().enumerate() {
            let host = apply_laplacian(&z, &u, x, Extension::ZeroExtended).unwrap();
            assert!((host - lap.values()[i]).abs() < 1e-14, "{x}: {host} vs {}", lap.values()[i]);
        }
    }

    #[test]
    fn boundary_data_absorption() {
        let g = path(4).unwrap();
        let s = DirichletSubgraph::new(&g, &[1.into(), 2.into()]).unwrap();
        let h = absorb_boundary_data(&s, 0.3, |_, y| Some(if *y == NodeId::from(0) { 1.0 } else { 0.0 })).unwrap();
        assert_eq!(h.values(), &[1.0, 0.0]);
        let h = absorb_boundary_data(&s, 0.0, |_, _| Some(0.0)).unwrap();
        assert_eq!(h.values(), &[0.0, 0.0]);
        assert!(matches!(
            absorb_boundary_data(&s, 0.0, |_, y| (*y == NodeId::from(0)).then_some(1.0)),
            Err(Error::MissingBoundaryValue(_))
        ));

        let g5 = path(5).unwrap();
        let s = DirichletSubgraph::new(&g5, &[1.into(), 2.into(), 3.into()]).unwrap();
        let h = absorb_boundary_data(&s, 0.0, |_, _| Some(5.0)).unwrap();
        assert_eq!(h.get(&2.into()), Some(0.0));
    }

    #[test]
    fn dense_operator_matches_pointwise() {
        let g = path(5).unwrap();
        let s = DirichletSubgraph::new(&g, &[1.into(), 2.into(), 3.into()]).unwrap();
        let m = s.dense_laplacian();
        let u = [0.3, -1.0, 2.0];
        let mv = &m * nalgebra::DVector::from_column_slice(&u);
        for i in 0..3 {
            assert!((mv[i] - s.laplacian_at(i, &u)).abs() < 1e-15);
        }
    }
}
