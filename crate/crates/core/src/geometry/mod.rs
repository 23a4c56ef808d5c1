//! Floating-point primitives: points, rigid maps, sphere trilateration,
//! triangle solving, dihedral and solid angles, areas and volumes.

mod measure;
mod point;
mod solve;

pub use measure::{
    best_fit_plane, dihedral_angle, face_metrics, interior_dihedral, oriented_volume,
    plane_deviation, solid_angle, solid_angle_ring, triangle_solid_angle, winding_solid_angle, FaceComplex,
    FaceMetrics,
};
pub use point::{rotate_about_axis, AxisLine, Homothety, Point3, RigidMotion};
pub use solve::{
    angle_from_sides, heron_area, solve_triangle, trilaterate, trilaterate_detailed, Triangle,
    TriangleSpec, Trilateration, TANGENCY_CLAMP,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("spheres do not intersect (discriminant {discriminant:e})")]
    NoRealIntersection { discriminant: f64 },
    #[error("trilateration centers are collinear")]
    DegenerateCenters,
    #[error("trilateration distances must be positive and finite")]
    InvalidDistance,
    #[error("invalid triangle: {0}")]
    InvalidTriangle(String),
    #[error("wing point lies on the edge line")]
    DegenerateWing,
    #[error("fan is broken at triangle {index}")]
    BrokenFan { index: usize },
    #[error("face complex is not closed ({edges} unmatched directed edges)")]
    NotClosed { edges: usize },
    #[error("face vertices are collinear")]
    DegenerateFace,
    #[error("axis direction is zero")]
    DegenerateAxis,
    #[error("homothety factor {0} is not a finite nonzero number")]
    InvalidHomothety(f64),
    #[error("non-finite coordinate")]
    NonFinite,
}

#[cfg(test)]
mod tests;
