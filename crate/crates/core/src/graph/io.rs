//! Graph file format: `{"nodes":[{"id","mu","kappa"}],"edges":[{"u","v","w"}]}`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{EdgeSpec, FiniteGraph, NodeSpec, WeightedGraph};
use crate::error::Result;

#[derive(Serialize, Deserialize)]
struct GraphFile {
    nodes: Vec<NodeSpec>,
    #[serde(default)]
    edges: Vec<EdgeSpec>,
}

pub fn from_json_str(s: &str) -> Result<FiniteGraph> {
    let file: GraphFile = serde_json::from_str(s)?;
    FiniteGraph::new(file.nodes, file.edges)
}

pub fn to_json_string(g: &FiniteGraph) -> Result<String> {
    let file = GraphFile { nodes: g.node_specs(), edges: g.edge_specs() };
    Ok(serde_json::to_string_pretty(&file)?)
}

pub fn load(path: impl AsRef<Path>) -> Result<WeightedGraph> {
    let text = std::fs::read_to_string(path.as_ref())?;
    let label = path.as_ref().display().to_string();
    Ok(WeightedGraph::finite(from_json_str(&text)?).with_label(label))
}

pub fn save(g: &FiniteGraph, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_json_string(g)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn parses_reference_layout() {
        let g = from_json_str(
            r#"{"nodes":[{"id":0,"mu":1.0,"kappa":0.5},{"id":[1,2],"mu":2.0,"kappa":0}],
                "edges":[{"u":0,"v":[1,2],"w":0.25}]}"#,
        )
        .unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.killing_at(0), 0.5);
    }

    #[test]
    fn loader_rejections() {
        let dup = r#"{"nodes":[{"id":0,"mu":1},{"id":1,"mu":1}],"edges":[{"u":0,"v":1,"w":1},{"u":1,"v":0,"w":1}]}"#;
        assert!(matches!(from_json_str(dup), Err(Error::InvalidGraph(_))));
        let lp = r#"{"nodes":[{"id":0,"mu":1}],"edges":[{"u":0,"v":0,"w":1}]}"#;
        assert!(matches!(from_json_str(lp), Err(Error::InvalidGraph(_))));
        let mu = r#"{"nodes":[{"id":0,"mu":0}]}"#;
        assert!(matches!(from_json_str(mu), Err(Error::InvalidGraph(_))));
        assert!(matches!(from_json_str("{"), Err(Error::Json(_))));
    }
}
