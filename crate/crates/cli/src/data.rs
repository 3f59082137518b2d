//! Node data specs: `const:c`, `indicator:<node>`, `file:<csv>`, `expr:<expression>`.
//! A bare number is read as `const:`.

use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;

use graphflow_core::evolution::Forcing;
use graphflow_core::stationary::NodeData;
use graphflow_core::NodeId;

use crate::error::{CliError, CliResult};
use crate::expr::Expr;

#[derive(Clone, Debug)]
pub enum DataSpec {
    Const(f64),
    Indicator(NodeId),
    /// Values keyed by node; zero elsewhere.
    File(Arc<HashMap<NodeId, f64>>),
    Expr(Arc<Expr>),
}

#[derive(serde::Deserialize)]
struct Row {
    node_id: String,
    value: f64,
}

/// Reads a `node_id,value` CSV with header.
pub fn read_node_csv(path: &Path) -> CliResult<HashMap<NodeId, f64>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.is_io_error() {
        true => CliError::Io(format!("{}: {e}", path.display())),
        false => CliError::Config(format!("{}: {e}", path.display())),
    })?;
    let mut out = HashMap::new();
    for row in reader.deserialize::<Row>() {
        let row = row.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let id: NodeId = row.node_id.parse()?;
        if out.insert(id.clone(), row.value).is_some() {
            return Err(CliError::Config(format!("{}: duplicate node {id}", path.display())));
        }
    }
    Ok(out)
}

impl DataSpec {
    pub fn parse(s: &str) -> CliResult<DataSpec> {
        let s = s.trim();
        if let Ok(c) = s.parse::<f64>() {
            return Ok(DataSpec::Const(c));
        }
        let (kind, arg) =
            s.split_once(':').ok_or_else(|| CliError::Config(format!("bad data spec {s:?}")))?;
        match kind.trim() {
            "const" => arg
                .trim()
                .parse::<f64>()
                .map(DataSpec::Const)
                .map_err(|_| CliError::Config(format!("bad constant in {s:?}"))),
            "indicator" => Ok(DataSpec::Indicator(arg.parse()?)),
            "file" => Ok(DataSpec::File(Arc::new(read_node_csv(Path::new(arg.trim()))?))),
            "expr" => Expr::parse(arg)
                .map(|e| DataSpec::Expr(Arc::new(e)))
                .map_err(|e| CliError::Config(format!("{s:?}: {e}"))),
            other => Err(CliError::Config(format!("unknown data kind {other:?}"))),
        }
    }

    pub fn value(&self, x: &NodeId, t: f64) -> f64 {
        match self {
            DataSpec::Const(c) => *c,
            DataSpec::Indicator(y) => {
                if x == y {
                    1.0
                } else {
                    0.0
                }
            }
            DataSpec::File(map) => map.get(x).copied().unwrap_or(0.0),
            DataSpec::Expr(e) => e.eval(x, t),
        }
    }

    pub fn depends_on_time(&self) -> bool {
        matches!(self, DataSpec::Expr(e) if e.depends_on_time())
    }

    /// True when the spec is identically zero.
    pub fn is_zero(&self) -> bool {
        matches!(self, DataSpec::Const(c) if *c == 0.0)
    }

    pub fn node_data(&self) -> NodeData {
        let spec = self.clone();
        Arc::new(move |x| spec.value(x, 0.0))
    }

    pub fn forcing(&self) -> Forcing {
        let spec = self.clone();
        Arc::new(move |t, x| spec.value(x, t))
    }
}

#[cfg(test)]
mod tests {
    use std::io::Write;

    use super::*;

    #[test]
    fn parses_each_kind() {
        let x0: NodeId = 0.into();
        let x1: NodeId = 1.into();
        assert_eq!(DataSpec::parse("2.5").unwrap().value(&x0, 0.0), 2.5);
        assert_eq!(DataSpec::parse("const:-1").unwrap().value(&x1, 3.0), -1.0);
        let ind = DataSpec::parse("indicator:0").unwrap();
        assert_eq!((ind.value(&x0, 0.0), ind.value(&x1, 0.0)), (1.0, 0.0));
        let lat = DataSpec::parse("indicator:(1,-2)").unwrap();
        assert_eq!(lat.value(&NodeId::new(vec![1, -2]), 0.0), 1.0);
        let e = DataSpec::parse("expr:x * t").unwrap();
        assert_eq!(e.value(&NodeId::new(vec![3]), 2.0), 6.0);
        assert!(DataSpec::parse("const:0").unwrap().is_zero());
    }

    #[test]
    fn reads_node_files() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "node_id,value\n0,1.5\n\"(1,2)\",-2").unwrap();
        let spec = DataSpec::parse(&format!("file:{}", f.path().display())).unwrap();
        assert_eq!(spec.value(&0.into(), 0.0), 1.5);
        assert_eq!(spec.value(&NodeId::new(vec![1, 2]), 0.0), -2.0);
        assert_eq!(spec.value(&7.into(), 0.0), 0.0);
    }

    #[test]
    fn rejects_bad_specs() {
        for bad in ["", "const:abc", "indicator:", "wave:3", "expr:1 +", "file:/nonexistent/x.csv"] {
            assert!(DataSpec::parse(bad).is_err(), "{bad:?}");
        }
        assert!(matches!(DataSpec::parse("file:/nonexistent/x.csv"), Err(CliError::Io(_))));
    }
}
