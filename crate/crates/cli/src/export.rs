//! Flat CSV view of a branch file for plotting tools.

use std::path::Path;

use serde::Serialize;

use crate::error::{CliError, Result};
use crate::records::PointRecord;

pub const COLUMNS: [&str; 8] = [
    "s",
    "c",
    "residual_complex",
    "chord_arc",
    "c1_norm",
    "curvature_min",
    "curvature_max",
    "decay_slope",
];

#[derive(Serialize)]
struct Row {
    s: f64,
    c: f64,
    residual_complex: f64,
    chord_arc: f64,
    c1_norm: f64,
    curvature_min: f64,
    curvature_max: f64,
    decay_slope: f64,
}

impl From<&PointRecord> for Row {
    fn from(p: &PointRecord) -> Self {
        Self {
            s: p.s,
            c: p.c,
            residual_complex: p.residual_complex,
            chord_arc: p.chord_arc,
            c1_norm: p.c1_norm,
            curvature_min: p.curvature_min,
            curvature_max: p.curvature_max,
            decay_slope: p.decay_slope,
        }
    }
}

/// Writes one row per point. Floats use the shortest representation that
/// parses back to the same value; an empty branch still gets the header.
pub fn write_csv(points: &[PointRecord], path: &Path) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    w.write_record(COLUMNS).map_err(|e| csv_error(path, e))?;
    for p in points {
        w.serialize(Row::from(p)).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::Usage(format!("{}: {other:?}", path.display())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_only_for_empty_branch() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.csv");
        write_csv(&[], &path).unwrap();
        assert_eq!(
            std::fs::read_to_string(&path).unwrap(),
            "s,c,residual_complex,chord_arc,c1_norm,curvature_min,curvature_max,decay_slope\n"
        );
    }

    #[test]
    fn values_round_trip() {
        let p = PointRecord {
            s: 0.1 + 0.2,
            c: 1.224744871391589,
            coeffs: vec![1.0],
            residual_complex: 1e-13,
            residual_real: 0.0,
            chord_arc: f64::INFINITY,
            c1_norm: 2.0,
            curvature_min: 0.9,
            curvature_max: 1.1,
            decay_slope: -30.0,
            newton_iters: 2,
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("one.csv");
        write_csv(&[p], &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(row[0].parse::<f64>().unwrap(), 0.1 + 0.2);
        assert_eq!(row[1], "1.224744871391589");
        assert_eq!(row[3].parse::<f64>().unwrap(), f64::INFINITY);
    }
}
