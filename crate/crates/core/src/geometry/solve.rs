use std::f64::consts::PI;

use super::{GeometryError, Point3};

/// Negative discriminants down to `-TANGENCY_CLAMP * scale^2` count as tangency.
pub const TANGENCY_CLAMP: f64 = 1e-12;

/// Full result of a three-sphere intersection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trilateration {
    pub point: Point3,
    /// Squared height above the plane of the centers before clamping.
    pub discriminant: f64,
    /// Length scale used for the tangency clamp.
    pub scale: f64,
}

/// Intersection of three spheres; `branch` picks the side of the plane of
/// the centers via the sign of `((c2-c1) x (c3-c1)) . (p - c1)`.
pub fn trilaterate(
    c1: Point3,
    c2: Point3,
    c3: Point3,
    d1: f64,
    d2: f64,
    d3: f64,
    branch: i8,
) -> Result<Point3, GeometryError> {
    trilaterate_detailed(c1, c2, c3, [d1, d2, d3], branch).map(|t| t.point)
}

pub fn trilaterate_detailed(
    c1: Point3,
    c2: Point3,
    c3: Point3,
    d: [f64; 3],
    branch: i8,
) -> Result<Trilateration, GeometryError> {
    let scale = d[0].max(d[1]).max(d[2]);
    if !(d.iter().all(|&x| x > 0.0 && x.is_finite())) {
        return Err(GeometryError::InvalidDistance);
    }
    let u = c2 - c1;
    let base = u.norm();
    let w = c3 - c1;
    let frame_scale = base.max(w.norm()).max(scale);
    if base <= 1e-14 * frame_scale {
        return Err(GeometryError::DegenerateCenters);
    }
    let ex = u / base;
    let i = ex.dot(w);
    let perp = w - ex * i;
    let j = perp.norm();
    if j <= 1e-12 * frame_scale {
        return Err(GeometryError::DegenerateCenters);
    }
    let ey = perp / j;
    let ez = ex.cross(ey);
    let x = (d[0] * d[0] - d[1] * d[1] + base * base) / (2.0 * base);
    let y = (d[0] * d[0] - d[2] * d[2] + i * i + j * j) / (2.0 * j) - i * x / j;
    let disc = d[0] * d[0] - x * x - y * y;
    let z2 = if disc >= 0.0 {
        disc
    } else if disc >= -TANGENCY_CLAMP * scale * scale {
        0.0
    } else {
        return Err(GeometryError::NoRealIntersection { discriminant: disc });
    };
    let sign = if branch >= 0 { 1.0 } else { -1.0 };
    let point = c1 + ex * x + ey * y + ez * (sign * z2.sqrt());
    if !point.is_finite() {
        return Err(GeometryError::NonFinite);
    }
    Ok(Trilateration { point, discriminant: disc, scale })
}

/// Input form for [`solve_triangle`]. Vertices are named P, Q, R.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TriangleSpec {
    /// Side |PQ| with the angles at P and Q.
    Asa { side_pq: f64, angle_p: f64, angle_q: f64 },
    /// Sides |PQ| and |PR| with the included angle at P.
    Sas { side_pq: f64, side_pr: f64, angle_p: f64 },
}

/// Solved triangle; index 0, 1, 2 refers to P, Q, R.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle {
    pub angles: [f64; 3],
    /// `opposite[i]` is the side opposite vertex `i`.
    pub opposite: [f64; 3],
}

impl Triangle {
    pub fn side_pq(&self) -> f64 {
        self.opposite[2]
    }
    pub fn side_qr(&self) -> f64 {
        self.opposite[0]
    }
    pub fn side_pr(&self) -> f64 {
        self.opposite[1]
    }
}

fn check_angle(a: f64) -> Result<(), GeometryError> {
    if a > 0.0 && a < PI && a.is_finite() {
        Ok(())
    } else {
        Err(GeometryError::InvalidTriangle(format!("angle {a} outside (0, pi)")))
    }
}

fn check_side(s: f64) -> Result<(), GeometryError> {
    if s > 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(GeometryError::InvalidTriangle(format!("side {s} not positive")))
    }
}

pub fn solve_triangle(spec: TriangleSpec) -> Result<Triangle, GeometryError> {
    match spec {
        TriangleSpec::Asa { side_pq, angle_p, angle_q } => {
            check_side(side_pq)?;
            check_angle(angle_p)?;
            check_angle(angle_q)?;
            let angle_r = PI - angle_p - angle_q;
            if angle_r <= 0.0 {
                return Err(GeometryError::InvalidTriangle(format!(
                    "angle sum {} not below pi",
                    angle_p + angle_q
                )));
            }
            let k = side_pq / angle_r.sin();
            Ok(Triangle {
                angles: [angle_p, angle_q, angle_r],
                opposite: [k * angle_p.sin(), k * angle_q.sin(), side_pq],
            })
        }
        TriangleSpec::Sas { side_pq, side_pr, angle_p } => {
            check_side(side_pq)?;
            check_side(side_pr)?;
            check_angle(angle_p)?;
            let (c, b) = (side_pq, side_pr);
            let h = (0.5 * angle_p).sin();
            let qr = ((b - c) * (b - c) + 4.0 * b * c * h * h).sqrt();
            let (s, co) = angle_p.sin_cos();
            let angle_q = (b * s).atan2(c - b * co);
            let angle_r = (c * s).atan2(b - c * co);
            check_side(qr)?;
            Ok(Triangle { angles: [angle_p, angle_q, angle_r], opposite: [qr, b, c] })
        }
    }
}

/// Angle at vertex `p` of triangle `(p, q, r)` from its side lengths,
/// using an area-based sine so near-degenerate angles stay accurate.
pub fn angle_from_sides(pq: f64, pr: f64, qr: f64) -> Result<f64, GeometryError> {
    for s in [pq, pr, qr] {
        check_side(s)?;
    }
    let cos_num = pq * pq + pr * pr - qr * qr;
    let area2 = 2.0 * heron_area(pq, pr, qr)?;
    Ok((2.0 * area2).atan2(cos_num))
}

/// Triangle area from side lengths (Kahan's ordering for stability).
pub fn heron_area(a: f64, b: f64, c: f64) -> Result<f64, GeometryError> {
    let mut s = [a, b, c];
    s.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    let [a, b, c] = s;
    if c - (a - b) < 0.0 {
        return Err(GeometryError::InvalidTriangle(format!(
            "sides {a}, {b}, {c} violate the triangle inequality"
        )));
    }
    let prod = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    Ok(0.25 * prod.max(0.0).sqrt())
}
