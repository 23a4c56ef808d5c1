use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::IoError;
use crate::construction::FlexiblePolyhedron;
use crate::geometry::Point3;
use crate::octahedron::{flexion_range, track_grid, Tracker};
use crate::verification::{InvariantReport, VerificationReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshVertex {
    pub label: String,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Realized surface at one value of the flexion variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshSnapshot {
    pub model: String,
    pub phi: f64,
    pub vertices: Vec<MeshVertex>,
    /// Loops of 0-based indices into `vertices`.
    pub faces: Vec<Vec<usize>>,
}

impl MeshSnapshot {
    pub fn new(poly: &FlexiblePolyhedron, phi: f64, points: &[Point3]) -> Self {
        let vertices = poly
            .vertices
            .iter()
            .zip(points)
            .map(|(l, p)| MeshVertex { label: l.to_string(), x: p.x, y: p.y, z: p.z })
            .collect();
        MeshSnapshot { model: poly.name.clone(), phi, vertices, faces: poly.faces.clone() }
    }

    pub fn validate(&self) -> Result<(), IoError> {
        let n = self.vertices.len();
        match self.faces.iter().position(|f| f.len() < 3 || f.iter().any(|&i| i >= n)) {
            Some(k) => Err(IoError::Schema { path: format!(".faces[{k}]"), message: format!("needs three or more indices below {n}") }),
            None => Ok(()),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("snapshots serialize");
        s.push('\n');
        s
    }
}

/// Snapshot on the seed branch at `phi`.
pub fn snapshot(poly: &FlexiblePolyhedron, phi: f64) -> Result<MeshSnapshot, IoError> {
    let mut tr = Tracker::start(poly, poly.seed)?;
    tr.advance_to(phi)?;
    Ok(MeshSnapshot::new(poly, phi, &tr.state.points))
}

/// `n` snapshots evenly spread over the flexion range, tracked along one
/// branch.
pub fn frames(poly: &FlexiblePolyhedron, n: usize) -> Result<Vec<MeshSnapshot>, IoError> {
    let range = flexion_range(poly, poly.seed)?;
    let grid = if range.periodic {
        // The last grid point would repeat the first.
        (0..n).map(|i| range.lo + range.width() * i as f64 / n as f64).collect()
    } else {
        range.grid(n)
    };
    Ok(track_grid(poly, poly.seed, &grid)?.into_iter().map(|(phi, st)| MeshSnapshot::new(poly, phi, &st.points)).collect())
}

/// Scientific notation with 17 significant digits.
fn real(x: f64) -> String {
    format!("{:.16e}", x)
}

/// Wavefront OBJ with 1-based face indices.
pub fn export_obj(s: &MeshSnapshot) -> String {
    let mut out = String::new();
    writeln!(out, "# {} phi {}", s.model, real(s.phi)).unwrap();
    for v in &s.vertices {
        writeln!(out, "v {} {} {}", real(v.x), real(v.y), real(v.z)).unwrap();
    }
    for f in &s.faces {
        let idx: Vec<String> = f.iter().map(|i| (i + 1).to_string()).collect();
        writeln!(out, "f {}", idx.join(" ")).unwrap();
    }
    out
}

pub fn frame_path(dir: &Path, stem: &str, k: usize, extension: &str) -> PathBuf {
    dir.join(format!("{stem}_{k:04}.{extension}"))
}

/// Writes `stem_0000.obj`, `stem_0001.obj`, ...
pub fn write_obj_frames(dir: &Path, stem: &str, frames: &[MeshSnapshot]) -> Result<Vec<PathBuf>, IoError> {
    std::fs::create_dir_all(dir)?;
    frames
        .iter()
        .enumerate()
        .map(|(k, f)| {
            let path = frame_path(dir, stem, k, "obj");
            std::fs::write(&path, export_obj(f))?;
            Ok(path)
        })
        .collect()
}

/// CSV: `phi`, one column per invariant record, then the per-row residual
/// check and the report verdict.
pub fn export_trace(report: &InvariantReport) -> String {
    let residual = report.records.iter().position(|r| r.name == "residual");
    let mut out = String::from("phi");
    for r in &report.records {
        out.push(',');
        out.push_str(&r.name);
    }
    out.push_str(",residual_ok,pass\n");
    for (k, row) in report.trace.iter().enumerate() {
        out.push_str(&real(report.phis[k]));
        for v in row {
            out.push(',');
            out.push_str(&real(*v));
        }
        let ok = match residual {
            Some(i) => report.records[i].tolerance.is_none_or(|t| row[i] <= t),
            None => true,
        };
        writeln!(out, ",{ok},{}", report.pass).unwrap();
    }
    out
}

pub fn report_json(report: &VerificationReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}
