//! CSV and JSON artifacts. Floats are written with 17 significant digits so
//! identical runs produce byte-identical files.

use std::path::{Path, PathBuf};

use graphflow_core::evolution::Trajectory;
use graphflow_core::GridFunction;
use serde::Serialize;

use crate::error::{CliError, CliResult};

pub const BARRIER_NODE: &str = "__barrier__";

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn writer(path: &Path) -> CliResult<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write_solution(path: &Path, u: &GridFunction) -> CliResult<()> {
    let mut w = writer(path)?;
    w.write_record(["node_id", "value"])?;
    for (x, v) in u.iter() {
        w.write_record([x.to_string(), fmt_f64(v)])?;
    }
    w.flush()?;
    Ok(())
}

/// `t,node_id,value` rows, one per grid time and node, in window order.
pub fn write_trajectory(path: &Path, traj: &Trajectory) -> CliResult<()> {
    let mut w = writer(path)?;
    w.write_record(["t", "node_id", "value"])?;
    for (t, state) in traj.times().iter().zip(traj.states()) {
        let t = fmt_f64(*t);
        for (x, v) in state.iter() {
            w.write_record([t.as_str(), &x.to_string(), &fmt_f64(v)])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Barrier samples as `t,__barrier__,value` rows.
pub fn write_barrier(path: &Path, times: &[f64], values: &[f64]) -> CliResult<()> {
    let mut w = writer(path)?;
    w.write_record(["t", "node_id", "value"])?;
    for (t, v) in times.iter().zip(values) {
        w.write_record([fmt_f64(*t).as_str(), BARRIER_NODE, &fmt_f64(*v)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Explicit report path, or the CSV path with its extension replaced by `.json`.
pub fn report_path(report: Option<&Path>, csv: &Path) -> PathBuf {
    report.map_or_else(|| csv.with_extension("json"), Path::to_path_buf)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(0.0), "0.0000000000000000e0");
        let x = 0.3819660112501051_f64;
        assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn report_beside_csv() {
        assert_eq!(report_path(None, Path::new("out/traj.csv")), PathBuf::from("out/traj.json"));
        assert_eq!(report_path(Some(Path::new("r.json")), Path::new("a.csv")), PathBuf::from("r.json"));
    }
}
