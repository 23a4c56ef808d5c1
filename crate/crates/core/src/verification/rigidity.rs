use nalgebra::DMatrix;

use super::VerifyError;
use crate::geometry::Point3;

/// Singular values below this fraction of the largest count as zero.
pub const NULLITY_THRESHOLD: f64 = 1e-8;

/// One row of the rigidity matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RigidityConstraint {
    /// Fixed distance between two joints.
    Bar(usize, usize),
    /// Four joints stay coplanar.
    Coplanar([usize; 4]),
}

/// Bars on every face edge; a polygon with `k > 3` vertices is held rigid by
/// a fan of diagonals plus one coplanarity row per vertex beyond the third.
pub fn polyhedron_constraints(faces: &[Vec<usize>]) -> Vec<RigidityConstraint> {
    let mut bars = std::collections::BTreeSet::new();
    let mut rows = vec![];
    for f in faces {
        let k = f.len();
        for i in 0..k {
            let (a, b) = (f[i], f[(i + 1) % k]);
            bars.insert((a.min(b), a.max(b)));
        }
        for i in 2..k.saturating_sub(1) {
            bars.insert((f[0].min(f[i]), f[0].max(f[i])));
        }
        for i in 3..k {
            rows.push(RigidityConstraint::Coplanar([f[0], f[1], f[2], f[i]]));
        }
    }
    let mut out: Vec<RigidityConstraint> = bars.into_iter().map(|(a, b)| RigidityConstraint::Bar(a, b)).collect();
    out.extend(rows);
    out
}

/// Dimension of the space of first-order motions, trivial ones included.
pub fn first_order_flex_dim(coords: &[Point3], constraints: &[RigidityConstraint]) -> Result<usize, VerifyError> {
    let n = coords.len();
    if n == 0 {
        return Err(VerifyError::DegenerateInput("no joints".into()));
    }
    let scale = coords.iter().flat_map(|p| coords.iter().map(move |q| p.distance(*q))).fold(0.0, f64::max);
    let mut m = DMatrix::<f64>::zeros(constraints.len().max(1), 3 * n);
    let mut put = |row: usize, j: usize, v: Point3| {
        m[(row, 3 * j)] += v.x;
        m[(row, 3 * j + 1)] += v.y;
        m[(row, 3 * j + 2)] += v.z;
    };
    for (r, c) in constraints.iter().enumerate() {
        match *c {
            RigidityConstraint::Bar(i, j) => {
                check_index(&[i, j], n)?;
                let d = coords[i] - coords[j];
                let len = d.norm();
                if len <= 1e-12 * scale {
                    return Err(VerifyError::DegenerateInput(format!("joints {i} and {j} coincide")));
                }
                put(r, i, d / len);
                put(r, j, -d / len);
            }
            RigidityConstraint::Coplanar(q) => {
                check_index(&q, n)?;
                let [p0, p1, p2, p3] = q.map(|i| coords[i]);
                let (u, v, w) = (p1 - p0, p2 - p0, p3 - p0);
                let g1 = v.cross(w);
                let g2 = w.cross(u);
                let g3 = u.cross(v);
                let g0 = -(g1 + g2 + g3);
                let norm = (g0.norm_squared() + g1.norm_squared() + g2.norm_squared() + g3.norm_squared()).sqrt();
                if norm <= 1e-12 * scale * scale {
                    return Err(VerifyError::DegenerateInput(format!("coplanarity of {q:?} is degenerate")));
                }
                for (j, g) in q.iter().zip([g0, g1, g2, g3]) {
                    put(r, *j, g / norm);
                }
            }
        }
    }
    let sv = m.singular_values();
    let top = sv.iter().copied().fold(0.0, f64::max);
    let rank = sv.iter().filter(|&&s| s > NULLITY_THRESHOLD * top).count();
    Ok(3 * n - rank)
}

fn check_index(idx: &[usize], n: usize) -> Result<(), VerifyError> {
    match idx.iter().find(|&&i| i >= n) {
        Some(i) => Err(VerifyError::DegenerateInput(format!("joint {i} out of range"))),
        None => Ok(()),
    }
}
