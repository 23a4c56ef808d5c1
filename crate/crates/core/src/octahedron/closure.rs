//! Closure of a type-III octahedron: the quadratic relating the unknown
//! face angles `I2` (or `G2`) and `B1` at the second apex.
//!
//! Faces `X1 V0 V1` and `X1 V1 V2` share the edge `X1 V1`; equating its
//! length from both gives `ctn I2 = a ctn B1 + b`. The tangent half-angle
//! relation at the cap then yields one quadratic in `c = ctn(I2/2)`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use thiserror::Error;

/// Half-angle relation used to close the cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum ClosureVariant {
    /// `ctn(I2/2) = k ctn(B1/2)` with `k = tan(b1/2) / tan(g2/2)`.
    #[default]
    #[serde(rename = "eq3")]
    Eq3,
    /// `ctn(G2/2) = k tan(B1/2)` with `k = ctn(b1/2) / tan(g2/2)`.
    #[serde(rename = "eq3a")]
    Eq3a,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClosureError {
    #[error("closure quadratic has no real root")]
    NoRealRoot,
    #[error("closure roots exist but give angles outside (0, pi)")]
    NoAdmissibleRoot,
    #[error("closure problem is ill-posed: {0}")]
    IllPosed(String),
}

/// Coefficients of the closure equations for one cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosureProblem {
    pub l1: f64,
    pub l2: f64,
    pub b2: f64,
    pub i1: f64,
    pub beta1: f64,
    pub gamma2: f64,
    pub variant: ClosureVariant,
    pub a: f64,
    pub b: f64,
    pub k: f64,
}

/// One admissible closure solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosureRoot {
    /// `I2` (or `G2` for the second variant).
    pub i2: f64,
    pub b1: f64,
    /// `ctn(I2/2)`.
    pub c: f64,
}

fn ctn(x: f64) -> f64 {
    x.cos() / x.sin()
}

impl ClosureProblem {
    /// `l1 = |V0 V1|`, `l2 = |V1 V2|`, `b2 = <X1 V1 V2>`, `i1 = <V0 V1 X1>`,
    /// `beta1 = <X0 V0 V1>`, `gamma2 = <X0 V2 V1>`.
    pub fn new(
        l1: f64,
        l2: f64,
        b2: f64,
        i1: f64,
        beta1: f64,
        gamma2: f64,
        variant: ClosureVariant,
    ) -> Result<Self, ClosureError> {
        for (name, x) in [("b2", b2), ("i1", i1), ("beta1", beta1), ("gamma2", gamma2)] {
            if !(x > 0.0 && x < PI) {
                return Err(ClosureError::IllPosed(format!("{name} = {x} outside (0, pi)")));
            }
        }
        if !(l1 > 0.0 && l2 > 0.0) {
            return Err(ClosureError::IllPosed("base lengths must be positive".into()));
        }
        let sb2 = b2.sin();
        let a = l2 * i1.sin() / (l1 * sb2);
        let b = (l2 * i1.cos() - l1 * b2.cos()) / (l1 * sb2);
        let t_g = (0.5 * gamma2).tan();
        let k = match variant {
            ClosureVariant::Eq3 => (0.5 * beta1).tan() / t_g,
            ClosureVariant::Eq3a => 1.0 / ((0.5 * beta1).tan() * t_g),
        };
        if !(a.is_finite() && b.is_finite() && k.is_finite()) {
            return Err(ClosureError::IllPosed("non-finite coefficient".into()));
        }
        Ok(ClosureProblem { l1, l2, b2, i1, beta1, gamma2, variant, a, b, k })
    }

    /// Problem given directly by its coefficients; the geometric fields are NaN.
    pub fn from_coefficients(a: f64, b: f64, k: f64, variant: ClosureVariant) -> Self {
        ClosureProblem {
            l1: f64::NAN,
            l2: f64::NAN,
            b2: f64::NAN,
            i1: f64::NAN,
            beta1: f64::NAN,
            gamma2: f64::NAN,
            variant,
            a,
            b,
            k,
        }
    }

    /// Coefficients `(p, q, r)` of `p c^2 + q c + r = 0`.
    pub fn quadratic(&self) -> (f64, f64, f64) {
        let (a, b, k) = (self.a, self.b, self.k);
        match self.variant {
            ClosureVariant::Eq3 => (k - a, -2.0 * b * k, k * (a * k - 1.0)),
            ClosureVariant::Eq3a => (k + a, -2.0 * b * k, -k * (1.0 + a * k)),
        }
    }

    /// `B1` paired with a root `c` of the quadratic.
    pub fn b1_for(&self, c: f64) -> f64 {
        match self.variant {
            ClosureVariant::Eq3 => 2.0 * self.k.atan2(c),
            ClosureVariant::Eq3a => 2.0 * c.atan2(self.k),
        }
    }

    /// Scaled residuals of the linear relation and the half-angle relation.
    pub fn residuals(&self, root: &ClosureRoot) -> (f64, f64) {
        let lhs = ctn(root.i2);
        let rhs = self.a * ctn(root.b1);
        let r1 = (lhs - rhs - self.b).abs() / (1.0 + lhs.abs() + rhs.abs() + self.b.abs());
        let c = ctn(0.5 * root.i2);
        let h = match self.variant {
            ClosureVariant::Eq3 => self.k * ctn(0.5 * root.b1),
            ClosureVariant::Eq3a => self.k * (0.5 * root.b1).tan(),
        };
        let r2 = (c - h).abs() / (1.0 + c.abs() + h.abs());
        (r1, r2)
    }
}

/// Admissible roots ordered by increasing `I2`. A double root is reported once.
pub fn solve_closure(problem: &ClosureProblem) -> Result<Vec<ClosureRoot>, ClosureError> {
    let (p, q, r) = problem.quadratic();
    let size = p.abs().max(q.abs()).max(r.abs());
    if size == 0.0 || !size.is_finite() {
        return Err(ClosureError::IllPosed("closure quadratic vanishes identically".into()));
    }
    let mut cs: Vec<f64> = Vec::with_capacity(2);
    if p.abs() <= 1e-14 * size {
        if q.abs() <= 1e-14 * size {
            return Err(ClosureError::NoRealRoot);
        }
        cs.push(-r / q);
    } else {
        let disc = q * q - 4.0 * p * r;
        if disc < -1e-14 * q.abs().max((p * r).abs().sqrt()).powi(2) {
            return Err(ClosureError::NoRealRoot);
        }
        let sq = disc.max(0.0).sqrt();
        if sq == 0.0 {
            cs.push(-q / (2.0 * p));
        } else {
            let t = -0.5 * (q + q.signum() * sq);
            let (c1, c2) = if q == 0.0 { (sq / (2.0 * p), -sq / (2.0 * p)) } else { (t / p, r / t) };
            cs.push(c1);
            cs.push(c2);
        }
    }
    let mut roots: Vec<ClosureRoot> = cs
        .into_iter()
        .filter(|c| c.is_finite())
        .map(|c| ClosureRoot { i2: 2.0 * 1f64.atan2(c), b1: problem.b1_for(c), c })
        .filter(|rt| rt.i2 > 0.0 && rt.i2 <= PI && rt.b1 > 0.0 && rt.b1 <= PI)
        .collect();
    if roots.is_empty() {
        return Err(ClosureError::NoAdmissibleRoot);
    }
    roots.sort_by(|x, y| x.i2.partial_cmp(&y.i2).unwrap_or(std::cmp::Ordering::Equal));
    Ok(roots)
}
