use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::topology::topology_check;
use super::VerifyError;
use crate::construction::FlexiblePolyhedron;
use crate::exec::Exec;
use crate::geometry::{face_metrics, interior_dihedral, oriented_volume, FaceComplex, Point3};
use crate::octahedron::{track_grid, Flexible, SubType, FLEX_TOLERANCE};

/// Pass thresholds of the invariant suite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantTolerances {
    /// Relative drift of every edge length.
    pub length_drift: f64,
    /// Relative drift of every face area.
    pub area_drift: f64,
    /// `|volume|` in units of `scale^3`.
    pub volume: f64,
    /// Radians, against 4pi for the end-cap sum and 2pi per type-III cap.
    pub solid_angle: f64,
    /// Drift of total mean curvature relative to `pi * sum(edge lengths)`.
    pub mean_curvature_drift: f64,
    /// Closure residual in units of `scale`.
    pub residual: f64,
}

impl Default for InvariantTolerances {
    fn default() -> Self {
        InvariantTolerances {
            length_drift: 1e-10,
            area_drift: 1e-10,
            volume: 1e-9,
            solid_angle: 1e-9,
            mean_curvature_drift: 1e-8,
            residual: FLEX_TOLERANCE,
        }
    }
}

/// How a record is judged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// `relative_drift <= tolerance`.
    RelativeDrift,
    /// `max |value - target| <= tolerance`.
    Target,
    /// Recorded only; always passes.
    Informational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantRecord {
    pub name: String,
    pub check: CheckKind,
    pub min: f64,
    pub max: f64,
    /// `max - min` over the grid.
    pub drift: f64,
    pub relative_drift: f64,
    pub target: Option<f64>,
    pub max_deviation: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: bool,
    /// Whether `pass` counts toward the report verdict.
    pub enforced: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub model: String,
    pub samples: usize,
    /// Sorted flexion values.
    pub phis: Vec<f64>,
    pub records: Vec<InvariantRecord>,
    /// Per sample, one value per record.
    #[serde(skip)]
    pub trace: Vec<Vec<f64>>,
    pub pass: bool,
}

impl InvariantReport {
    pub fn record(&self, name: &str) -> Option<&InvariantRecord> {
        self.records.iter().find(|r| r.name == name)
    }

    /// Enforced records that failed.
    pub fn failures(&self) -> impl Iterator<Item = &InvariantRecord> {
        self.records.iter().filter(|r| r.enforced && !r.pass)
    }

    /// Largest relative drift among records whose name starts with `prefix`.
    pub fn worst_relative_drift(&self, prefix: &str) -> f64 {
        self.records.iter().filter(|r| r.name.starts_with(prefix)).map(|r| r.relative_drift).fold(0.0, f64::max)
    }
}

/// Index structure of a closed oriented polyhedron, fixed along the motion.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceStructure {
    pub edges: Vec<(usize, usize)>,
    /// Per edge `(a, b)`: third vertex of the face traversing `a -> b`, and
    /// of the face traversing `b -> a`.
    pub wings: Vec<(usize, usize)>,
    /// End-cap apexes with their fans `(a_i, b_i)`, `b_i == a_{i+1}`.
    pub caps: Vec<(usize, Vec<(usize, usize)>)>,
    /// Indices into `edges` of the edges at each cap apex.
    pub cap_edges: Vec<Vec<usize>>,
    pub faces: Vec<Vec<usize>>,
}

impl SurfaceStructure {
    pub fn new(poly: &FlexiblePolyhedron) -> Result<Self, VerifyError> {
        let topo = topology_check(&poly.faces);
        if !topo.is_closed_orientable() {
            return Err(VerifyError::NotClosed(format!(
                "{} boundary, {} nonmanifold, {} misoriented edges",
                topo.boundary_edges, topo.nonmanifold_edges, topo.misoriented_edges
            )));
        }
        let edges = poly.edges();
        let wing = |a: usize, b: usize| -> usize {
            for f in &poly.faces {
                let k = f.len();
                for i in 0..k {
                    if f[i] == a && f[(i + 1) % k] == b {
                        return f[(i + 2) % k];
                    }
                }
            }
            unreachable!("closed surfaces traverse every edge both ways")
        };
        let wings = edges.iter().map(|&(a, b)| (wing(a, b), wing(b, a))).collect();
        let mut caps = vec![];
        for label in &poly.end_caps {
            let Some(v) = poly.index_of(*label) else { continue };
            caps.push((v, fan_around(&poly.faces, v)?));
        }
        let cap_edges = caps
            .iter()
            .map(|(v, _)| edges.iter().enumerate().filter(|(_, &(a, b))| a == *v || b == *v).map(|(e, _)| e).collect())
            .collect();
        Ok(SurfaceStructure { edges, wings, caps, cap_edges, faces: poly.faces.clone() })
    }
}

/// Fan `(next, prev)` per face around `v`, chained so that `b_i == a_{i+1}`.
fn fan_around(faces: &[Vec<usize>], v: usize) -> Result<Vec<(usize, usize)>, VerifyError> {
    let mut pieces = vec![];
    for f in faces {
        let k = f.len();
        if let Some(i) = f.iter().position(|&x| x == v) {
            pieces.push((f[(i + 1) % k], f[(i + k - 1) % k]));
        }
    }
    if pieces.len() < 3 {
        return Err(VerifyError::NotClosed(format!("vertex {v} has {} faces", pieces.len())));
    }
    let mut fan = vec![pieces.swap_remove(0)];
    while !pieces.is_empty() {
        let b = fan.last().map(|p| p.1).unwrap_or_default();
        let i = pieces.iter().position(|p| p.0 == b).ok_or_else(|| VerifyError::NotClosed(format!("fan at vertex {v} is not a disk")))?;
        fan.push(pieces.swap_remove(i));
    }
    Ok(fan)
}

/// Every measured quantity at one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMetrics {
    pub phi: f64,
    pub residual: f64,
    pub edge_lengths: Vec<f64>,
    pub face_areas: Vec<f64>,
    pub volume: f64,
    /// Local solid angles `sum(dihedrals) - (k - 2) pi` with dihedrals in `[0, 2pi)`.
    pub cap_solid_angles: Vec<f64>,
    /// Interior dihedrals in `[0, 2pi)`, aligned with the edges.
    pub dihedrals: Vec<f64>,
}

pub fn sample_metrics(s: &SurfaceStructure, phi: f64, points: &[Point3], residual: f64) -> Result<SampleMetrics, VerifyError> {
    let edge_lengths = s.edges.iter().map(|&(a, b)| points[a].distance(points[b])).collect();
    let face_areas = s
        .faces
        .iter()
        .map(|f| face_metrics(&f.iter().map(|&i| points[i]).collect::<Vec<_>>()).map(|m| m.area))
        .collect::<Result<Vec<_>, _>>()?;
    let complex = FaceComplex { points: points.to_vec(), faces: s.faces.clone() };
    let volume = oriented_volume(&complex)?;
    let dihedrals = s
        .edges
        .iter()
        .zip(&s.wings)
        .map(|(&(a, b), &(wab, wba))| interior_dihedral(points[a], points[b], points[wab], points[wba]))
        .collect::<Result<Vec<_>, _>>()?;
    let cap_solid_angles = s.cap_edges.iter().map(|edges| cone_solid_angle(edges.iter().map(|&e| dihedrals[e]))).collect();
    Ok(SampleMetrics { phi, residual, edge_lengths, face_areas, volume, cap_solid_angles, dihedrals })
}

/// Dihedral series per edge, each made continuous along the sample order.
/// Unwrapping starts at the sample farthest from any fold, since at a
/// range endpoint a dihedral may sit exactly on the 0/2pi cut.
pub fn unwrapped_dihedrals(samples: &[SampleMetrics]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = samples.iter().map(|m| m.dihedrals.clone()).collect();
    let all: Vec<usize> = samples.first().map_or(vec![], |m| (0..m.dihedrals.len()).collect());
    let Some(pivot) = most_generic(samples, &all) else { return out };
    let order: Vec<(usize, usize)> = (pivot + 1..out.len()).map(|k| (k - 1, k)).chain((0..pivot).rev().map(|k| (k + 1, k))).collect();
    for (from, k) in order {
        for e in 0..out[k].len() {
            let prev = out[from][e];
            let cur = out[k][e];
            out[k][e] = cur + TAU * ((prev - cur) / TAU).round();
        }
    }
    out
}

/// Sample whose dihedrals on `edges` stay farthest from 0 mod 2pi; ties go
/// to the earliest.
fn most_generic(samples: &[SampleMetrics], edges: &[usize]) -> Option<usize> {
    let clearance = |m: &SampleMetrics| edges.iter().map(|&e| m.dihedrals[e].min(TAU - m.dihedrals[e])).fold(f64::INFINITY, f64::min);
    (0..samples.len()).max_by(|&a, &b| clearance(&samples[a]).total_cmp(&clearance(&samples[b])).then(b.cmp(&a)))
}

fn record(name: String, values: &[f64], check: CheckKind, target: Option<f64>, norm: f64, tolerance: Option<f64>) -> InvariantRecord {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let drift = max - min;
    let relative_drift = if norm > 0.0 { drift / norm } else { drift };
    let max_deviation = target.map(|t| values.iter().map(|v| (v - t).abs()).fold(0.0, f64::max));
    let pass = match (check, tolerance) {
        (CheckKind::RelativeDrift, Some(t)) => relative_drift <= t,
        (CheckKind::Target, Some(t)) => max_deviation.is_some_and(|d| d <= t),
        _ => true,
    };
    InvariantRecord { name, check, min, max, drift, relative_drift, target, max_deviation, tolerance, pass, enforced: check != CheckKind::Informational }
}

/// `Sum(theta) - (k - 2) pi` over the `k` dihedrals of a vertex cone.
fn cone_solid_angle(dihedrals: impl ExactSizeIterator<Item = f64>) -> f64 {
    let k = dihedrals.len() as f64;
    dihedrals.sum::<f64>() - (k - 2.0) * PI
}

fn is_type_three(poly: &FlexiblePolyhedron) -> bool {
    matches!(poly.subtype, Some(SubType::IiiOae) | Some(SubType::IiiOas))
}

/// Builds the report from already measured samples (any order).
pub fn summarize(poly: &FlexiblePolyhedron, s: &SurfaceStructure, mut samples: Vec<SampleMetrics>, tol: &InvariantTolerances) -> InvariantReport {
    samples.sort_by(|a, b| a.phi.total_cmp(&b.phi));
    let scale = poly.length_scale();
    let label = |i: usize| poly.vertices[i].to_string();
    let mut records: Vec<InvariantRecord> = vec![];
    let mut columns: Vec<Vec<f64>> = vec![];
    let mut push = |r: InvariantRecord, col: Vec<f64>, records: &mut Vec<InvariantRecord>| {
        records.push(r);
        columns.push(col);
    };

    for (e, &(a, b)) in s.edges.iter().enumerate() {
        let col: Vec<f64> = samples.iter().map(|m| m.edge_lengths[e]).collect();
        let norm = col.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        push(record(format!("edge {}-{}", label(a), label(b)), &col, CheckKind::RelativeDrift, None, norm, Some(tol.length_drift)), col, &mut records);
    }
    for (k, f) in s.faces.iter().enumerate() {
        let col: Vec<f64> = samples.iter().map(|m| m.face_areas[k]).collect();
        let norm = col.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let name = format!("area {}", f.iter().map(|&i| label(i)).collect::<Vec<_>>().join(" "));
        push(record(name, &col, CheckKind::RelativeDrift, None, norm, Some(tol.area_drift)), col, &mut records);
    }
    let col: Vec<f64> = samples.iter().map(|m| m.volume).collect();
    push(record("volume".into(), &col, CheckKind::Target, Some(0.0), scale.powi(3), Some(tol.volume * scale.powi(3))), col, &mut records);

    // Solid angles follow the unwrapped dihedrals so they stay continuous
    // through a fold of any cap edge. The branch is the local cone value
    // Sum(theta) - (k - 2)pi at the sample whose cap dihedrals are farthest
    // from a fold.
    let unwrapped = unwrapped_dihedrals(&samples);
    let caps: Vec<Vec<f64>> = (0..s.caps.len())
        .map(|c| {
            let continued: Vec<f64> = unwrapped.iter().map(|th| cone_solid_angle(s.cap_edges[c].iter().map(|&e| th[e]))).collect();
            let Some(k) = most_generic(&samples, &s.cap_edges[c]) else { return continued };
            let offset = samples[k].cap_solid_angles[c] - continued[k];
            continued.iter().map(|v| v + offset).collect()
        })
        .collect();
    let type_three = is_type_three(poly);
    for (c, (v, _)) in s.caps.iter().enumerate() {
        let col = caps[c].clone();
        let name = format!("solid angle {}", label(*v));
        let r = if type_three {
            // Reported against 2pi; not part of the verdict.
            InvariantRecord { enforced: false, ..record(name, &col, CheckKind::Target, Some(TAU), TAU, Some(tol.solid_angle)) }
        } else {
            record(name, &col, CheckKind::Informational, None, TAU, None)
        };
        push(r, col, &mut records);
    }
    if s.caps.len() == 2 {
        let col: Vec<f64> = (0..samples.len()).map(|k| caps[0][k] + caps[1][k]).collect();
        push(record("solid angle sum".into(), &col, CheckKind::Target, Some(2.0 * TAU), 2.0 * TAU, Some(tol.solid_angle)), col, &mut records);
    }

    let col: Vec<f64> = samples
        .iter()
        .zip(&unwrapped)
        .map(|(m, th)| m.edge_lengths.iter().zip(th).map(|(l, t)| l * (PI - t)).sum())
        .collect();
    let total_length: f64 = samples.first().map(|m| m.edge_lengths.iter().sum()).unwrap_or(0.0);
    push(record("mean curvature".into(), &col, CheckKind::RelativeDrift, None, PI * total_length, Some(tol.mean_curvature_drift)), col, &mut records);

    let col: Vec<f64> = samples.iter().map(|m| m.residual).collect();
    push(record("residual".into(), &col, CheckKind::Target, Some(0.0), scale, Some(tol.residual * scale)), col, &mut records);

    let trace = (0..samples.len()).map(|k| columns.iter().map(|c| c[k]).collect()).collect();
    let pass = !samples.is_empty() && records.iter().all(|r| r.pass || !r.enforced);
    InvariantReport {
        model: poly.name.clone(),
        samples: samples.len(),
        phis: samples.iter().map(|m| m.phi).collect(),
        records,
        trace,
        pass,
    }
}

/// Tracks the seed branch through `grid` (sequentially, for continuity),
/// then measures every sample on `exec`.
pub fn measure_grid(poly: &FlexiblePolyhedron, s: &SurfaceStructure, grid: &[f64], exec: Exec) -> Result<Vec<SampleMetrics>, VerifyError> {
    if grid.is_empty() {
        return Err(VerifyError::EmptyGrid);
    }
    if let Some(bad) = grid.iter().find(|p| !p.is_finite()) {
        return Err(VerifyError::Flex(crate::octahedron::FlexError::InvalidPhi(*bad)));
    }
    let states = track_grid(poly, poly.seed(), grid)?;
    exec.map(&states, |(phi, r)| sample_metrics(s, *phi, &r.points, r.residual)).into_iter().collect()
}

/// Every invariant quantity at each grid value.
pub fn invariant_sweep(poly: &FlexiblePolyhedron, grid: &[f64], tol: &InvariantTolerances, exec: Exec) -> Result<InvariantReport, VerifyError> {
    let s = SurfaceStructure::new(poly)?;
    let samples = measure_grid(poly, &s, grid, exec)?;
    Ok(summarize(poly, &s, samples, tol))
}
