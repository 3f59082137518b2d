use std::collections::HashMap;
use std::sync::Arc;

use super::{NodeId, WeightedGraph};
use crate::error::{Error, Result};

/// An ordered finite list of distinct host nodes together with their measure.
#[derive(Debug, PartialEq)]
pub struct Window {
    nodes: Vec<NodeId>,
    index: HashMap<NodeId, usize>,
    measure: Vec<f64>,
}

impl Window {
    /// Window over `nodes` in the given order. Fails on duplicates or unknown nodes.
    pub fn new(g: &WeightedGraph, nodes: Vec<NodeId>) -> Result<Arc<Window>> {
        let mut index = HashMap::with_capacity(nodes.len());
        let mut measure = Vec::with_capacity(nodes.len());
        for (i, x) in nodes.iter().enumerate() {
            if index.insert(x.clone(), i).is_some() {
                return Err(Error::DuplicateNode(x.clone()));
            }
            measure.push(g.measure(x)?);
        }
        Ok(Arc::new(Window { nodes, index, measure }))
    }

    /// Window with unit measure on every node, independent of any host.
    pub fn unit(nodes: Vec<NodeId>) -> Result<Arc<Window>> {
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, x) in nodes.iter().enumerate() {
            if index.insert(x.clone(), i).is_some() {
                return Err(Error::DuplicateNode(x.clone()));
            }
        }
        let measure = vec![1.0; nodes.len()];
        Ok(Arc::new(Window { nodes, index, measure }))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn index_of(&self, x: &NodeId) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn contains(&self, x: &NodeId) -> bool {
        self.index.contains_key(x)
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }
}

/// Real values on a finite window.
#[derive(Clone, Debug)]
pub struct GridFunction {
    window: Arc<Window>,
    values: Vec<f64>,
}

impl PartialEq for GridFunction {
    fn eq(&self, other: &Self) -> bool {
        self.values == other.values && same_window(&self.window, &other.window)
    }
}

fn same_window(a: &Arc<Window>, b: &Arc<Window>) -> bool {
    Arc::ptr_eq(a, b) || a.nodes == b.nodes
}

impl GridFunction {
    pub fn new(window: Arc<Window>, values: Vec<f64>) -> Result<Self> {
        if values.len() != window.len() {
            return Err(Error::WindowMismatch);
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "value at {} is not finite",
                window.nodes[i]
            )));
        }
        Ok(GridFunction { window, values })
    }

    pub(crate) fn from_parts_unchecked(window: Arc<Window>, values: Vec<f64>) -> Self {
        debug_assert_eq!(window.len(), values.len());
        GridFunction { window, values }
    }

    pub fn zeros(window: Arc<Window>) -> Self {
        let values = vec![0.0; window.len()];
        GridFunction { window, values }
    }

    pub fn constant(window: Arc<Window>, c: f64) -> Self {
        let values = vec![c; window.len()];
        GridFunction { window, values }
    }

    /// Samples `f` at every window node.
    pub fn from_fn(window: Arc<Window>, f: impl Fn(&NodeId) -> f64) -> Result<Self> {
        let values = window.nodes.iter().map(f).collect();
        GridFunction::new(window, values)
    }

    pub fn window(&self) -> &Arc<Window> {
        &self.window
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, x: &NodeId) -> Option<f64> {
        self.window.index_of(x).map(|i| self.values[i])
    }

    /// Value of the zero extension.
    pub fn value_or_zero(&self, x: &NodeId) -> f64 {
        self.get(x).unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&NodeId, f64)> + '_ {
        self.window.nodes.iter().zip(self.values.iter().copied())
    }

    pub fn shares_window(&self, other: &GridFunction) -> bool {
        same_window(&self.window, &other.window)
    }

    /// Zero extension (or restriction) of `self` onto `target`.
    pub fn transfer(&self, target: &Arc<Window>) -> GridFunction {
        let values = target.nodes.iter().map(|x| self.value_or_zero(x)).collect();
        GridFunction { window: target.clone(), values }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction { window: self.window.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// `max(0, u)`.
    pub fn positive_part(&self) -> GridFunction {
        self.map(|v| v.max(0.0))
    }

    /// `min(0, u)`.
    pub fn negative_part(&self) -> GridFunction {
        self.map(|v| v.min(0.0))
    }

    fn zip_with(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Result<GridFunction> {
        if !self.shares_window(other) {
            return Err(Error::WindowMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(GridFunction { window: self.window.clone(), values })
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &GridFunction) -> Result<GridFunction> {
        self.zip_with(other, |a, b| a + b)
    }

    /// `self + c·other`.
    pub fn add_scaled(&self, c: f64, other: &GridFunction) -> Result<GridFunction> {
        self.zip_with(other, |a, b| a + c * b)
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        lp_norm(self, p)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

fn norm_from_terms(terms: impl Iterator<Item = (f64, f64)>, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidExponent(p));
    }
    if p.is_infinite() {
        return Ok(terms.fold(0.0_f64, |m, (v, _)| m.max(v.abs())));
    }
    let sum: f64 = terms.map(|(v, mu)| v.abs().powf(p) * mu).sum();
    Ok(sum.powf(1.0 / p))
}

/// `(Σ_x |u(x)|ᵖ μ(x))^{1/p}`, or `sup |u|` for `p = ∞`.
pub fn lp_norm(u: &GridFunction, p: f64) -> Result<f64> {
    norm_from_terms(u.values.iter().copied().zip(u.window.measure.iter().copied()), p)
}

/// `‖a − b‖_p` of the zero extensions of two functions on possibly different windows.
pub fn lp_distance(a: &GridFunction, b: &GridFunction, p: f64) -> Result<f64> {
    if a.shares_window(b) {
        let terms = a
            .values
            .iter()
            .zip(&b.values)
            .zip(&a.window.measure)
            .map(|((x, y), &mu)| (x - y, mu));
        return norm_from_terms(terms, p);
    }
    let own = a
        .iter()
        .zip(a.window.measure.iter())
        .map(|((x, v), &mu)| (v - b.value_or_zero(x), mu));
    let rest = b
        .iter()
        .zip(b.window.measure.iter())
        .filter(|((x, _), _)| !a.window.contains(x))
        .map(|((_, v), &mu)| (v, mu));
    norm_from_terms(own.chain(rest), p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{path, EdgeSpec, FiniteGraph, NodeSpec};

    fn weighted_pair() -> WeightedGraph {
        FiniteGraph::new(
            vec![
                NodeSpec { id: 0.into(), mu: 2.0, kappa: 0.0 },
                NodeSpec { id: 1.into(), mu: 1.0, kappa: 0.0 },
            ],
            vec![EdgeSpec { u: 0.into(), v: 1.into(), w: 1.0 }],
        )
        .unwrap()
        .into()
    }

    #[test]
    fn norms() {
        let g = path(2).unwrap();
        let w = Window::new(&g, vec![0.into(), 1.into()]).unwrap();
        let u = GridFunction::new(w.clone(), vec![3.0, 4.0]).unwrap();
        assert_eq!(lp_norm(&u, 2.0).unwrap(), 5.0);
        assert_eq!(lp_norm(&u, f64::INFINITY).unwrap(), 4.0);
        let z = GridFunction::zeros(w);
        for p in [1.0, 2.0, 7.0, f64::INFINITY] {
            assert_eq!(lp_norm(&z, p).unwrap(), 0.0);
        }
        assert!(matches!(lp_norm(&u, 0.5), Err(Error::InvalidExponent(_))));

        let g = weighted_pair();
        let w = Window::new(&g, vec![0.into(), 1.into()]).unwrap();
        let u = GridFunction::new(w, vec![1.0, -2.0]).unwrap();
        assert_eq!(lp_norm(&u, 1.0).unwrap(), 4.0);
    }

    #[test]
    fn distance_across_windows() {
        let g = path(5).unwrap();
        let a = GridFunction::new(Window::new(&g, vec![1.into(), 2.into()]).unwrap(), vec![1.0, 2.0]).unwrap();
        let b = GridFunction::new(Window::new(&g, vec![2.into(), 3.into()]).unwrap(), vec![2.0, 2.0]).unwrap();
        // differences: node1 → 1, node2 → 0, node3 → −2
        assert_eq!(lp_distance(&a, &b, 1.0).unwrap(), 3.0);
        assert_eq!(lp_distance(&a, &b, f64::INFINITY).unwrap(), 2.0);
        let c = a.transfer(b.window());
        assert_eq!(c.values(), &[2.0, 0.0]);
    }

    #[test]
    fn rejects_bad_values() {
        let g = path(2).unwrap();
        let w = Window::new(&g, vec![0.into(), 1.into()]).unwrap();
        assert!(GridFunction::new(w.clone(), vec![1.0]).is_err());
        assert!(GridFunction::new(w, vec![1.0, f64::NAN]).is_err());
        assert!(Window::new(&g, vec![0.into(), 0.into()]).is_err());
    }
}
