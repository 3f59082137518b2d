use std::collections::HashSet;

use super::{NodeId, WeightedGraph};
use crate::error::{Error, Result};

/// Nested breadth-first balls `X₁ ⊆ X₂ ⊆ …` around a root.
///
/// `sets[n-1]` is the ball of radius `n`, sorted ascending. On an infinite host
/// each step must add a node adjacent to the previous ball; a violation is an
/// error, never repaired. On a finite host growth stops once the ball covers
/// the root's component, and the exhaustion is flagged as saturated.
#[derive(Clone, Debug)]
pub struct Exhaustion {
    host: WeightedGraph,
    root: NodeId,
    sets: Vec<Vec<NodeId>>,
    saturated: bool,
}

impl Exhaustion {
    pub fn new(host: &WeightedGraph, root: &NodeId, depth: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::InvalidParameter("exhaustion depth must be ≥ 1".into()));
        }
        if !host.contains(root) {
            return Err(Error::UnknownNode(root.clone()));
        }
        let mut ex = Exhaustion { host: host.clone(), root: root.clone(), sets: Vec::new(), saturated: false };
        let mut seen: HashSet<NodeId> = [root.clone()].into_iter().collect();
        let mut members = vec![root.clone()];
        let mut frontier = vec![root.clone()];
        for n in 1..=depth {
            let mut next = Vec::new();
            for x in &frontier {
                for (y, _) in host.neighbors(x)? {
                    if seen.insert(y.clone()) {
                        next.push(y);
                    }
                }
            }
            if next.is_empty() {
                if host.is_finite() {
                    if ex.sets.is_empty() {
                        ex.push_sorted(&members);
                    }
                    ex.saturated = true;
                    break;
                }
                return Err(Error::ExhaustionProperty { depth: n.saturating_sub(1).max(1) });
            }
            members.extend(next.iter().cloned());
            frontier = next;
            ex.push_sorted(&members);
        }
        if host.is_finite() && !ex.saturated {
            // a ball that has already swallowed the finite component is saturated too
            let last = ex.sets.last().expect("depth ≥ 1");
            let grows = last
                .iter()
                .try_fold(false, |acc, x| -> Result<bool> {
                    Ok(acc || host.neighbors(x)?.iter().any(|(y, _)| !seen.contains(y)))
                })?;
            ex.saturated = !grows;
        }
        Ok(ex)
    }

    fn push_sorted(&mut self, members: &[NodeId]) {
        let mut set = members.to_vec();
        set.sort();
        self.sets.push(set);
    }

    pub fn host(&self) -> &WeightedGraph {
        &self.host
    }

    pub fn root(&self) -> &NodeId {
        &self.root
    }

    pub fn sets(&self) -> &[Vec<NodeId>] {
        &self.sets
    }

    /// `X_n` for `n ≥ 1`.
    pub fn set(&self, n: usize) -> Option<&[NodeId]> {
        n.checked_sub(1).and_then(|i| self.sets.get(i)).map(Vec::as_slice)
    }

    pub fn depth(&self) -> usize {
        self.sets.len()
    }

    pub fn saturated(&self) -> bool {
        self.saturated
    }

    /// `∂•X_{n,n+1}`: nodes of `X_{n+1} ∖ X_n` adjacent to `X_n`.
    pub fn layer_boundary(&self, n: usize) -> Result<Vec<NodeId>> {
        let (inner, outer) = match (self.set(n), self.set(n + 1)) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::InvalidParameter(format!("no layer between X_{n} and X_{}", n + 1))),
        };
        let inner_set: HashSet<&NodeId> = inner.iter().collect();
        let mut out = Vec::new();
        for y in outer.iter().filter(|y| !inner_set.contains(y)) {
            if self.host.neighbors(y)?.iter().any(|(x, _)| inner_set.contains(x)) {
                out.push(y.clone());
            }
        }
        Ok(out)
    }
}
