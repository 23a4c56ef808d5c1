use serde::{Deserialize, Serialize};

use super::invariants::{measure_grid, unwrapped_dihedrals, SurfaceStructure};
use super::VerifyError;
use crate::construction::{FlexiblePolyhedron, Realization};
use crate::exec::Exec;
use crate::geometry::{plane_deviation, Point3};
use crate::octahedron::{flexion_range, track_grid, FlexionInterval, SubType, Tracker, FLEX_TOLERANCE};

/// Least dihedral variation over the range for a flexible verdict.
pub const MIN_DIHEDRAL_VARIATION: f64 = 0.01;
/// Coplanarity threshold for flat positions, in units of `scale`.
pub const FLAT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Flexible,
    Rigid,
    Inconsistent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlatPosition {
    pub phi: f64,
    /// Largest distance of a vertex to the best-fit plane, on the
    /// interpolated configuration.
    pub deviation: f64,
    /// Same, on the configuration realized directly at `phi`.
    pub direct_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlexCertificate {
    pub range: FlexionInterval,
    pub samples: usize,
    pub max_residual: f64,
    pub residual_tolerance: f64,
    pub max_dihedral_variation: f64,
    pub flat_positions: Vec<FlatPosition>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateOptions {
    pub samples: usize,
    pub exec: Exec,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        CertificateOptions { samples: 400, exec: Exec::Parallel }
    }
}

/// Sweeps the flexion range and classifies the motion.
pub fn flex_certificate(poly: &FlexiblePolyhedron, opts: &CertificateOptions) -> Result<FlexCertificate, VerifyError> {
    let range = flexion_range(poly, poly.seed)?;
    let s = SurfaceStructure::new(poly)?;
    let residual_tolerance = FLEX_TOLERANCE * poly.length_scale();
    let grid = range.grid(opts.samples.max(2));
    let samples = match measure_grid(poly, &s, &grid, opts.exec) {
        Ok(m) => m,
        Err(VerifyError::Flex(_)) => {
            return Ok(FlexCertificate {
                range,
                samples: 0,
                max_residual: f64::INFINITY,
                residual_tolerance,
                max_dihedral_variation: 0.0,
                flat_positions: vec![],
                verdict: Verdict::Inconsistent,
            })
        }
        Err(e) => return Err(e),
    };
    let max_residual = samples.iter().map(|m| m.residual).fold(0.0, f64::max);
    let unwrapped = unwrapped_dihedrals(&samples);
    let edges = s.edges.len();
    let max_dihedral_variation = (0..edges)
        .map(|e| {
            let col = unwrapped.iter().map(|th| th[e]);
            let (lo, hi) = col.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
            hi - lo
        })
        .fold(0.0, f64::max);
    let verdict = if max_residual > residual_tolerance {
        Verdict::Inconsistent
    } else if range.width() > 0.0 && max_dihedral_variation >= MIN_DIHEDRAL_VARIATION {
        Verdict::Flexible
    } else {
        Verdict::Rigid
    };
    let flat_positions = if verdict == Verdict::Flexible && matches!(poly.subtype, Some(SubType::IiiOae) | Some(SubType::IiiOas)) {
        flat_positions(poly, &range, opts)?
    } else {
        vec![]
    };
    Ok(FlexCertificate { range, samples: samples.len(), max_residual, residual_tolerance, max_dihedral_variation, flat_positions, verdict })
}

/// Half-spacing of the interpolation nodes used at flat positions.
const FLAT_NODE_SPACING: f64 = 1e-3;

/// Face-vertex coordinates at `phi` on the branch through grid sample `k`.
fn branch_points(
    poly: &FlexiblePolyhedron,
    states: &[(f64, Realization)],
    k: usize,
    phis: &[f64],
) -> Result<Vec<Vec<Point3>>, VerifyError> {
    let earlier = if k > 0 { Some((states[k - 1].0, &states[k - 1].1)) } else { states.get(1).map(|(p, s)| (*p, s)) };
    let mut order: Vec<usize> = (0..phis.len()).collect();
    order.sort_by(|&a, &b| phis[a].total_cmp(&phis[b]));
    let mut out = vec![vec![]; phis.len()];
    // Walk down then up from the grid sample so each leg stays continuous.
    let below: Vec<usize> = order.iter().rev().copied().filter(|&i| phis[i] < states[k].0).collect();
    let above: Vec<usize> = order.iter().copied().filter(|&i| phis[i] >= states[k].0).collect();
    for leg in [below, above] {
        let mut tr = Tracker::resume(poly, earlier, states[k].0, states[k].1.clone());
        for i in leg {
            tr.advance_to(phis[i])?;
            out[i] = tr.state.points.clone();
        }
    }
    Ok(out)
}

/// Lagrange weights at 0 for nodes `j * h`, `j` in `nodes`.
fn center_weights(nodes: &[f64]) -> Vec<f64> {
    nodes
        .iter()
        .enumerate()
        .map(|(j, &xj)| nodes.iter().enumerate().filter(|&(m, _)| m != j).map(|(_, &xm)| (0.0 - xm) / (xj - xm)).product())
        .collect()
}

/// Configuration at `phi` from a centered six-node interpolant of the
/// branch. At a flat position the trilaterations are tangent and direct
/// evaluation carries a `sqrt(eps) * scale` error; the nodes are not.
fn interpolated_points(
    poly: &FlexiblePolyhedron,
    states: &[(f64, Realization)],
    k: usize,
    phi: f64,
) -> Result<Vec<Point3>, VerifyError> {
    let nodes = [-3.0, -2.0, -1.0, 1.0, 2.0, 3.0];
    let w = center_weights(&nodes);
    let phis: Vec<f64> = nodes.iter().map(|j| phi + j * FLAT_NODE_SPACING).collect();
    let pts = branch_points(poly, states, k, &phis)?;
    let n = pts[0].len();
    Ok((0..n).map(|i| pts.iter().zip(&w).fold(Point3::ORIGIN, |acc, (p, wj)| acc + p[i] * *wj)).collect())
}

/// Configurations in which every vertex lies in one plane, located as local
/// minima of the best-fit-plane deviation over the range.
pub fn flat_positions(poly: &FlexiblePolyhedron, range: &FlexionInterval, opts: &CertificateOptions) -> Result<Vec<FlatPosition>, VerifyError> {
    let grid = range.grid(opts.samples.max(3));
    let states = track_grid(poly, poly.seed, &grid)?;
    let g: Vec<f64> = states.iter().map(|(_, r)| plane_deviation(&r.points)).collect();
    // A periodic grid repeats its first configuration at the end.
    let n = if range.periodic { g.len() - 1 } else { g.len() };
    let candidates: Vec<usize> = (0..n)
        .filter(|&k| {
            let left = if k > 0 { Some(g[k - 1]) } else if range.periodic { Some(g[n - 1]) } else { None };
            let right = if k + 1 < n { Some(g[k + 1]) } else if range.periodic { Some(g[0]) } else { None };
            left.is_none_or(|l| g[k] <= l) && right.is_none_or(|r| g[k] < r)
        })
        .collect();
    let step = grid[1] - grid[0];
    let tol = FLAT_TOLERANCE * poly.length_scale();
    let margin = 3.0 * FLAT_NODE_SPACING;
    let refined = opts.exec.map(&candidates, |&k| -> Option<FlatPosition> {
        let dev = |phi: f64| interpolated_points(poly, &states, k, phi).map(|p| plane_deviation(&p)).unwrap_or(f64::INFINITY);
        let (mut a, mut b) = (grid[k] - step, grid[k] + step);
        if !range.periodic {
            a = a.max(range.lo + margin);
            b = b.min(range.hi - margin);
        }
        if a >= b {
            return None;
        }
        // Bisection on the sign of a centered difference.
        while b - a > 1e-13 {
            let m = 0.5 * (a + b);
            let h = 1e-3 * (b - a);
            if dev(m + h) < dev(m - h) {
                a = m - h;
            } else {
                b = m + h;
            }
        }
        let phi = 0.5 * (a + b);
        let direct = branch_points(poly, &states, k, &[phi]).ok().map(|p| plane_deviation(&p[0]));
        Some(FlatPosition { phi, deviation: dev(phi), direct_deviation: direct.unwrap_or(f64::INFINITY) })
    });
    let mut out: Vec<FlatPosition> = vec![];
    for f in refined.into_iter().flatten().filter(|f| f.deviation <= tol) {
        let phi = if range.periodic { range.lo + (f.phi - range.lo).rem_euclid(range.width()) } else { f.phi };
        let dup = out.iter().any(|o| {
            let d = (o.phi - phi).abs();
            d < 1e-6 || (range.periodic && (range.width() - d).abs() < 1e-6)
        });
        if !dup {
            out.push(FlatPosition { phi, ..f });
        }
    }
    out.sort_by(|a, b| a.phi.total_cmp(&b.phi));
    Ok(out)
}
