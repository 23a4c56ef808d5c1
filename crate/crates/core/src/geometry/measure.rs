use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix3, SymmetricEigen};

use super::{GeometryError, Point3};

fn wrap_tau(a: f64) -> f64 {
    let mut r = a.rem_euclid(TAU);
    if r >= TAU {
        r -= TAU;
    }
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Angle in `[0, 2pi)` from the half-plane through `r1` to the half-plane
/// through `r2`, turning right-handed about `q - p`.
pub fn dihedral_angle(p: Point3, q: Point3, r1: Point3, r2: Point3) -> Result<f64, GeometryError> {
    let e = (q - p).normalized().ok_or(GeometryError::DegenerateWing)?;
    let w1 = r1 - p;
    let w2 = r2 - p;
    let u = w1 - e * w1.dot(e);
    let v = w2 - e * w2.dot(e);
    let scale = (q - p).norm().max(w1.norm()).max(w2.norm());
    if u.norm() <= 1e-14 * scale || v.norm() <= 1e-14 * scale {
        return Err(GeometryError::DegenerateWing);
    }
    Ok(wrap_tau(e.dot(u.cross(v)).atan2(u.dot(v))))
}

/// Interior dihedral at edge `p-q` of an oriented closed surface. `wing_pq`
/// is the third vertex of the face traversing `p -> q`, `wing_qp` that of
/// the face traversing `q -> p`. A unit cube edge gives pi/2.
pub fn interior_dihedral(
    p: Point3,
    q: Point3,
    wing_pq: Point3,
    wing_qp: Point3,
) -> Result<f64, GeometryError> {
    dihedral_angle(p, q, wing_qp, wing_pq)
}

/// Solid angle at `apex` enclosed by an oriented fan of triangles
/// `[apex, a_i, b_i]` with `b_i == a_{i+1}` cyclically.
///
/// Computed as the Gauss-Bonnet area of the spherical polygon cut out by the
/// fan: `sum(interior dihedrals) - (k - 2) pi`. The value is real-valued
/// rather than reduced mod 4pi, so a fan and its reversal sum to 4pi.
pub fn solid_angle(apex: Point3, fan: &[[Point3; 3]]) -> Result<f64, GeometryError> {
    let k = fan.len();
    if k < 3 {
        return Err(GeometryError::BrokenFan { index: 0 });
    }
    let scale = fan
        .iter()
        .flat_map(|t| t.iter())
        .map(|p| (*p - apex).norm())
        .fold(0.0, f64::max);
    let mut sum = 0.0;
    for i in 0..k {
        let prev = &fan[i];
        let next = &fan[(i + 1) % k];
        let shares_apex = (prev[0] - apex).norm() <= 1e-12 * scale && (next[0] - apex).norm() <= 1e-12 * scale;
        if !shares_apex || (prev[2] - next[1]).norm() > 1e-12 * scale {
            return Err(GeometryError::BrokenFan { index: i });
        }
        sum += interior_dihedral(apex, next[1], next[2], prev[1])?;
    }
    Ok(sum - (k as f64 - 2.0) * PI)
}

/// Solid angle at `apex` for the fan through its cyclically ordered
/// neighbours (faces `[apex, ring[i], ring[i+1]]`).
pub fn solid_angle_ring(apex: Point3, ring: &[Point3]) -> Result<f64, GeometryError> {
    let k = ring.len();
    let fan: Vec<[Point3; 3]> = (0..k).map(|i| [apex, ring[i], ring[(i + 1) % k]]).collect();
    solid_angle(apex, &fan)
}

/// Indexed polygon soup.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FaceComplex {
    pub points: Vec<Point3>,
    pub faces: Vec<Vec<usize>>,
}

impl FaceComplex {
    /// Directed edges lacking their reverse, or appearing more than once.
    pub fn unmatched_edges(&self) -> usize {
        let mut count: HashMap<(usize, usize), i64> = HashMap::new();
        for f in &self.faces {
            for i in 0..f.len() {
                let (a, b) = (f[i], f[(i + 1) % f.len()]);
                *count.entry((a, b)).or_insert(0) += 1;
            }
        }
        let mut bad = 0;
        for (&(a, b), &c) in &count {
            let back = count.get(&(b, a)).copied().unwrap_or(0);
            if c != 1 || back != 1 {
                bad += 1;
            }
        }
        bad
    }
}

/// Signed enclosed volume. Cones are taken from the vertex centroid, which
/// equals the origin-based sum for closed complexes and cancels less.
pub fn oriented_volume(complex: &FaceComplex) -> Result<f64, GeometryError> {
    let bad = complex.unmatched_edges();
    if bad > 0 {
        return Err(GeometryError::NotClosed { edges: bad });
    }
    let n = complex.points.len().max(1) as f64;
    let o = complex.points.iter().fold(Point3::ORIGIN, |acc, &p| acc + p) / n;
    let mut six_v = 0.0;
    for f in &complex.faces {
        let p0 = complex.points[f[0]] - o;
        for i in 1..f.len() - 1 {
            let a = complex.points[f[i]] - o;
            let b = complex.points[f[i + 1]] - o;
            six_v += p0.dot(a.cross(b));
        }
    }
    Ok(six_v / 6.0)
}

/// Area, flatness and centroid of one polygon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceMetrics {
    pub area: f64,
    pub planarity_deviation: f64,
    pub centroid: Point3,
}

/// Least-squares plane through a point set: (centroid, unit normal, max
/// distance of a point to the plane, middle eigenvalue of the scatter).
pub fn best_fit_plane(points: &[Point3]) -> (Point3, Point3, f64, f64) {
    let n = points.len().max(1) as f64;
    let c = points.iter().fold(Point3::ORIGIN, |acc, &p| acc + p) / n;
    let mut m = Matrix3::<f64>::zeros();
    for p in points {
        let d = *p - c;
        let v = [d.x, d.y, d.z];
        for i in 0..3 {
            for j in 0..3 {
                m[(i, j)] += v[i] * v[j];
            }
        }
    }
    let eig = SymmetricEigen::new(m);
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap_or(std::cmp::Ordering::Equal));
    let col = eig.eigenvectors.column(idx[0]);
    let normal = Point3::new(col[0], col[1], col[2]);
    let dev = points.iter().map(|p| (*p - c).dot(normal).abs()).fold(0.0, f64::max);
    (c, normal, dev, eig.eigenvalues[idx[1]])
}

/// Maximum distance of any point to the least-squares plane.
pub fn plane_deviation(points: &[Point3]) -> f64 {
    if points.len() <= 3 {
        return 0.0;
    }
    best_fit_plane(points).2
}

pub fn face_metrics(face: &[Point3]) -> Result<FaceMetrics, GeometryError> {
    if face.len() < 3 {
        return Err(GeometryError::DegenerateFace);
    }
    let (centroid, _, dev, mid) = best_fit_plane(face);
    let scale = face.iter().map(|p| (*p - centroid).norm()).fold(0.0, f64::max);
    if scale == 0.0 || mid <= 1e-24 * scale * scale {
        return Err(GeometryError::DegenerateFace);
    }
    let k = face.len();
    let mut vector_area = Point3::ORIGIN;
    for i in 0..k {
        vector_area += (face[i] - centroid).cross(face[(i + 1) % k] - centroid);
    }
    let planarity_deviation = if k == 3 { 0.0 } else { dev };
    Ok(FaceMetrics { area: 0.5 * vector_area.norm(), planarity_deviation, centroid })
}

/// Signed solid angle subtended at `p` by triangle `a b c`; positive when
/// `p` lies behind the right-handed normal.
pub fn triangle_solid_angle(p: Point3, a: Point3, b: Point3, c: Point3) -> f64 {
    let (a, b, c) = (a - p, b - p, c - p);
    let (la, lb, lc) = (a.norm(), b.norm(), c.norm());
    let num = a.dot(b.cross(c));
    let den = la * lb * lc + a.dot(b) * lc + a.dot(c) * lb + b.dot(c) * la;
    2.0 * num.atan2(den)
}

/// Solid angle at vertex `v` of a closed complex, from the winding number
/// of the surface around points near `v`: the signed solid angle subtended
/// by every face not incident to `v`. Defined modulo 4pi.
pub fn winding_solid_angle(complex: &FaceComplex, v: usize) -> f64 {
    let p = complex.points[v];
    let mut sum = 0.0;
    for f in complex.faces.iter().filter(|f| !f.contains(&v)) {
        for i in 1..f.len() - 1 {
            sum += triangle_solid_angle(p, complex.points[f[0]], complex.points[f[i]], complex.points[f[i + 1]]);
        }
    }
    sum
}
