use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use super::GeometryError;

/// A point (or displacement) in 3-space. Coordinates are finite for every
/// value produced by this crate.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const ORIGIN: Point3 = Point3 { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    /// Checked constructor rejecting NaN and infinities.
    pub fn try_new(x: f64, y: f64, z: f64) -> Result<Self, GeometryError> {
        let p = Point3 { x, y, z };
        if p.is_finite() {
            Ok(p)
        } else {
            Err(GeometryError::NonFinite)
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn dot(self, o: Point3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Point3) -> Point3 {
        Point3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn distance(self, o: Point3) -> f64 {
        (self - o).norm()
    }

    /// Unit vector in the same direction; `None` for the zero vector.
    pub fn normalized(self) -> Option<Point3> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(self / n)
        } else {
            None
        }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Point3::new(a[0], a[1], a[2])
    }

    pub fn max_abs(self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    /// `self + t (other - self)`.
    pub fn lerp(self, other: Point3, t: f64) -> Point3 {
        self + (other - self) * t
    }
}

impl Add for Point3 {
    type Output = Point3;
    fn add(self, o: Point3) -> Point3 {
        Point3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Point3 {
    fn add_assign(&mut self, o: Point3) {
        self.x += o.x;
        self.y += o.y;
        self.z += o.z;
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Point3 {
    type Output = Point3;
    fn neg(self) -> Point3 {
        Point3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    fn mul(self, s: f64) -> Point3 {
        Point3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Point3> for f64 {
    type Output = Point3;
    fn mul(self, p: Point3) -> Point3 {
        p * self
    }
}

impl Div<f64> for Point3 {
    type Output = Point3;
    fn div(self, s: f64) -> Point3 {
        Point3::new(self.x / s, self.y / s, self.z / s)
    }
}

/// Oriented line used as a rotation axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisLine {
    origin: Point3,
    direction: Point3,
}

impl AxisLine {
    /// Normalizes `direction`; fails on a zero or non-finite direction.
    pub fn new(origin: Point3, direction: Point3) -> Result<Self, GeometryError> {
        if !origin.is_finite() {
            return Err(GeometryError::NonFinite);
        }
        let direction = direction.normalized().ok_or(GeometryError::DegenerateAxis)?;
        Ok(AxisLine { origin, direction })
    }

    pub fn z_axis() -> Self {
        AxisLine { origin: Point3::ORIGIN, direction: Point3::new(0.0, 0.0, 1.0) }
    }

    pub fn origin(&self) -> Point3 {
        self.origin
    }

    pub fn direction(&self) -> Point3 {
        self.direction
    }

    /// Distance from `p` to the line.
    pub fn distance_to(&self, p: Point3) -> f64 {
        let v = p - self.origin;
        (v - self.direction * v.dot(self.direction)).norm()
    }
}

/// Right-handed rotation of `p` about `axis` by `angle` radians (Rodrigues form).
pub fn rotate_about_axis(p: Point3, axis: &AxisLine, angle: f64) -> Point3 {
    let k = axis.direction;
    let v = p - axis.origin;
    let (s, c) = angle.sin_cos();
    axis.origin + v * c + k.cross(v) * s + k * (k.dot(v) * (1.0 - c))
}

/// Scaling about a center. A factor of 1 is the identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Homothety {
    center: Point3,
    factor: f64,
}

impl Homothety {
    pub fn new(center: Point3, factor: f64) -> Result<Self, GeometryError> {
        if factor == 0.0 || !factor.is_finite() || !center.is_finite() {
            return Err(GeometryError::InvalidHomothety(factor));
        }
        Ok(Homothety { center, factor })
    }

    pub fn center(&self) -> Point3 {
        self.center
    }

    pub fn factor(&self) -> f64 {
        self.factor
    }

    pub fn apply(&self, p: Point3) -> Point3 {
        self.center + (p - self.center) * self.factor
    }
}

/// Proper rigid motion `p -> R p + t` with `R` orthonormal, det +1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidMotion {
    /// Rows of the rotation matrix.
    pub rotation: [Point3; 3],
    pub translation: Point3,
}

impl RigidMotion {
    pub fn identity() -> Self {
        RigidMotion {
            rotation: [
                Point3::new(1.0, 0.0, 0.0),
                Point3::new(0.0, 1.0, 0.0),
                Point3::new(0.0, 0.0, 1.0),
            ],
            translation: Point3::ORIGIN,
        }
    }

    /// Motion taking `origin` to zero and the orthonormal right-handed frame
    /// `(ex, ey, ez)` onto the coordinate axes.
    pub fn to_frame(origin: Point3, ex: Point3, ey: Point3, ez: Point3) -> Self {
        let rotation = [ex, ey, ez];
        let rotated = Point3::new(ex.dot(origin), ey.dot(origin), ez.dot(origin));
        RigidMotion { rotation, translation: -rotated }
    }

    pub fn rotate(&self, v: Point3) -> Point3 {
        Point3::new(self.rotation[0].dot(v), self.rotation[1].dot(v), self.rotation[2].dot(v))
    }

    pub fn apply(&self, p: Point3) -> Point3 {
        self.rotate(p) + self.translation
    }

    /// Rotation about `axis` by `angle`.
    pub fn about_axis(axis: &AxisLine, angle: f64) -> Self {
        let o = axis.origin();
        let e = [
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
            Point3::new(0.0, 0.0, 1.0),
        ];
        let zero = AxisLine { origin: Point3::ORIGIN, direction: axis.direction() };
        let cols: Vec<Point3> = e.iter().map(|&v| rotate_about_axis(v, &zero, angle)).collect();
        let rotation = [
            Point3::new(cols[0].x, cols[1].x, cols[2].x),
            Point3::new(cols[0].y, cols[1].y, cols[2].y),
            Point3::new(cols[0].z, cols[1].z, cols[2].z),
        ];
        let m = RigidMotion { rotation, translation: Point3::ORIGIN };
        RigidMotion { rotation, translation: o - m.rotate(o) }
    }

    /// `self` applied after `first`.
    pub fn compose(&self, first: &RigidMotion) -> RigidMotion {
        let col = |j: usize| {
            let e = match j {
                0 => Point3::new(1.0, 0.0, 0.0),
                1 => Point3::new(0.0, 1.0, 0.0),
                _ => Point3::new(0.0, 0.0, 1.0),
            };
            self.rotate(first.rotate(e))
        };
        let (c0, c1, c2) = (col(0), col(1), col(2));
        RigidMotion {
            rotation: [
                Point3::new(c0.x, c1.x, c2.x),
                Point3::new(c0.y, c1.y, c2.y),
                Point3::new(c0.z, c1.z, c2.z),
            ],
            translation: self.apply(first.translation),
        }
    }
}
