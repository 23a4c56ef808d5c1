//! Bricard octahedra: classification, completion of the metric from cap
//! parameters, the type-III closure equations, and realization as a
//! function of the flexion variable (the dihedral angle at `X0A0`).

mod closure;
mod flex;
mod frame;
mod labels;
mod spec;
mod subtype;

pub use closure::{solve_closure, ClosureError, ClosureProblem, ClosureRoot, ClosureVariant};
pub use flex::{
    flex, flex_with_hint, flexion_range, flexion_variable, track_grid, FlexState, Flexible, FlexionInterval, Tracker,
    FLEX_TOLERANCE, INCONSISTENT_TOLERANCE, TRACK_STEP,
};
#[allow(unused_imports)]
pub(crate) use flex::{displacement, select_index};
pub use frame::{canonical_frame, canonical_motion};
pub use labels::{Family, LabelParseError, OctaEdge, OctaLabels, VertexLabel};
pub use spec::{
    complete_spec, complete_spec_labeled, solve_type_three, solve_type_three_at, type_three_closure_problem, CapParams, FaceAngles, OctahedronSpec,
    TypeThreeCap, TypeThreeInput, TypeThreeSolution, DEGENERATE_ANGLE,
};
pub use subtype::{type_three_vertex_types, OasAssignment, SubType, SubTypeParseError, VertexType};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OctaError {
    #[error("no admissible closure: {0}")]
    NoRealClosure(ClosureError),
    #[error("infeasible cap: {0}")]
    InfeasibleCap(String),
    #[error("invalid cap parameters: {0}")]
    InvalidParams(String),
    #[error("degenerate parameterization: {0}")]
    Degenerate(String),
    #[error("closure root {requested} requested but only {available} admissible")]
    RootIndex { requested: usize, available: usize },
    #[error("inconsistent length chain: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlexError {
    #[error("flexion variable {phi} outside the range (discriminant {discriminant:e})")]
    OutOfRange { phi: f64, discriminant: f64 },
    #[error("no consistent branch at {phi} (best residual {residual:e})")]
    Inconsistent { phi: f64, residual: f64 },
    #[error("seed {phi} does not realize")]
    SeedInvalid { phi: f64 },
    #[error("flexion variable {0} is not finite")]
    InvalidPhi(f64),
    #[error("symmetry not found: {0}")]
    SymmetryNotFound(String),
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
}

#[cfg(test)]
mod tests;
