use std::str::FromStr;

use super::{EdgeSpec, FiniteGraph, GraphFlags, NeighborOracle, NodeId, NodeSpec, WeightedGraph};
use crate::error::{Error, Result};

/// Built-in graph families, parsed from `path:N`, `cycle:N`, `lattice:Z^d`, `tree:b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorSpec {
    Path(usize),
    Cycle(usize),
    Lattice(usize),
    Tree(usize),
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("bad generator spec {s:?}"));
        let (family, arg) = s.trim().split_once(':').ok_or_else(bad)?;
        let int = |a: &str| a.trim().parse::<usize>().map_err(|_| bad());
        match family.trim() {
            "path" => Ok(GeneratorSpec::Path(int(arg)?)),
            "cycle" => Ok(GeneratorSpec::Cycle(int(arg)?)),
            "lattice" => {
                let d = arg.trim().strip_prefix("Z^").ok_or_else(bad)?;
                Ok(GeneratorSpec::Lattice(int(d)?))
            }
            "tree" => Ok(GeneratorSpec::Tree(int(arg)?)),
            other => Err(Error::InvalidParameter(format!("unknown graph family {other:?}"))),
        }
    }
}

impl std::fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GeneratorSpec::Path(n) => write!(f, "path:{n}"),
            GeneratorSpec::Cycle(n) => write!(f, "cycle:{n}"),
            GeneratorSpec::Lattice(d) => write!(f, "lattice:Z^{d}"),
            GeneratorSpec::Tree(b) => write!(f, "tree:{b}"),
        }
    }
}

impl GeneratorSpec {
    /// Default root for exhaustions: node 0, the lattice origin, the tree root.
    pub fn default_root(&self) -> NodeId {
        match *self {
            GeneratorSpec::Path(_) | GeneratorSpec::Cycle(_) => 0.into(),
            GeneratorSpec::Lattice(d) => NodeId::new(vec![0; d]),
            GeneratorSpec::Tree(_) => NodeId::default(),
        }
    }

    pub fn build(&self) -> Result<WeightedGraph> {
        let g = match *self {
            GeneratorSpec::Path(n) => path(n)?,
            GeneratorSpec::Cycle(n) => cycle(n)?,
            GeneratorSpec::Lattice(d) => lattice(d)?,
            GeneratorSpec::Tree(b) => regular_tree(b)?,
        };
        Ok(g.with_label(self.to_string()))
    }
}

pub fn generate(spec: &str) -> Result<WeightedGraph> {
    spec.parse::<GeneratorSpec>()?.build()
}

fn unit_nodes(n: usize) -> Vec<NodeSpec> {
    (0..n as i64).map(|i| NodeSpec { id: i.into(), mu: 1.0, kappa: 0.0 }).collect()
}

/// Path `0 – 1 – … – (n−1)` with `w ≡ 1`, `μ ≡ 1`, `κ ≡ 0`.
pub fn path(n: usize) -> Result<WeightedGraph> {
    if n == 0 {
        return Err(Error::InvalidParameter("path needs at least one node".into()));
    }
    let edges = (1..n as i64).map(|i| EdgeSpec { u: (i - 1).into(), v: i.into(), w: 1.0 }).collect();
    Ok(WeightedGraph::finite(FiniteGraph::new(unit_nodes(n), edges)?).with_label(format!("path:{n}")))
}

/// Cycle on `n ≥ 3` nodes with unit weights and measure.
pub fn cycle(n: usize) -> Result<WeightedGraph> {
    if n < 3 {
        return Err(Error::InvalidParameter("cycle needs at least three nodes".into()));
    }
    let n = n as i64;
    let edges = (0..n).map(|i| EdgeSpec { u: i.into(), v: ((i + 1) % n).into(), w: 1.0 }).collect();
    Ok(WeightedGraph::finite(FiniteGraph::new(unit_nodes(n as usize), edges)?).with_label(format!("cycle:{n}")))
}

struct Lattice {
    dim: usize,
}

impl NeighborOracle for Lattice {
    fn contains(&self, x: &NodeId) -> bool {
        x.len() == self.dim
    }

    fn neighbors(&self, x: &NodeId) -> Result<Vec<(NodeId, f64)>> {
        let mut out = Vec::with_capacity(2 * self.dim);
        for k in 0..self.dim {
            for step in [-1, 1] {
                let mut c = x.coords().to_vec();
                c[k] = c[k].checked_add(step).ok_or_else(|| Error::Oracle {
                    node: x.clone(),
                    reason: "coordinate overflow".into(),
                })?;
                out.push((NodeId::new(c), 1.0));
            }
        }
        Ok(out)
    }

    fn describe(&self) -> String {
        format!("lattice:Z^{}", self.dim)
    }
}

/// `ℤᵈ` with nearest-neighbor unit weights, `μ ≡ 1`, `κ ≡ 0`. Declares (IP) and (B).
pub fn lattice(dim: usize) -> Result<WeightedGraph> {
    if dim == 0 {
        return Err(Error::InvalidParameter("lattice dimension must be ≥ 1".into()));
    }
    Ok(WeightedGraph::oracle(
        Lattice { dim },
        GraphFlags { infinite_paths_have_infinite_measure: true, bounded_degree: true },
    ))
}

struct RegularTree {
    degree: usize,
}

impl RegularTree {
    fn children(&self, depth: usize) -> i64 {
        if depth == 0 {
            self.degree as i64
        } else {
            self.degree as i64 - 1
        }
    }
}

impl NeighborOracle for RegularTree {
    fn contains(&self, x: &NodeId) -> bool {
        x.coords().iter().enumerate().all(|(i, &c)| c >= 0 && c < self.children(i))
    }

    fn neighbors(&self, x: &NodeId) -> Result<Vec<(NodeId, f64)>> {
        let c = x.coords();
        let mut out = Vec::with_capacity(self.degree);
        if let Some((_, parent)) = c.split_last() {
            out.push((NodeId::new(parent.to_vec()), 1.0));
        }
        for j in 0..self.children(c.len()) {
            let mut child = c.to_vec();
            child.push(j);
            out.push((NodeId::new(child), 1.0));
        }
        Ok(out)
    }

    fn describe(&self) -> String {
        format!("tree:{}", self.degree)
    }
}

/// The `b`-regular tree with unit weights. Nodes are child-index paths from the
/// root `()`; the root has `b` children and every other node `b − 1`.
/// With `μ ≡ 1` both (IP) and (B) hold.
pub fn regular_tree(b: usize) -> Result<WeightedGraph> {
    if b < 2 {
        return Err(Error::InvalidParameter("tree degree must be ≥ 2".into()));
    }
    Ok(WeightedGraph::oracle(
        RegularTree { degree: b },
        GraphFlags { infinite_paths_have_infinite_measure: true, bounded_degree: true },
    ))
}
