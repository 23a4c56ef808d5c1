//! Staged construction of flexible polyhedra from Bricard octahedra:
//! genus-0 chains of octahedra sharing caps, and tori assembled from
//! homothetic copies along the axis of a type-I octahedron.

mod assemble;
mod composite;
mod plan;
mod ring;

pub use assemble::{assemble, assemble_genus0, propagate_flex, FlexiblePolyhedron, Realization, Realizer};
pub use composite::{build_composite, extend_edges, extend_scale, extend_scale_unchecked, respecify_cap, CompositeModel, StageLink, MERGE_TOLERANCE};
pub use plan::{ConstructionPlan, Direction, EdgeExtensions, RingBand, RingPair, ScaleSpec, Stage, TorusSpec};
pub use ring::{build_ring_structure, build_torus16, extract_torus, RingOctahedron, RingQuad, RingStructure, RING_TOLERANCE};

use thiserror::Error;

use crate::geometry::GeometryError;
use crate::octahedron::{FlexError, OctaError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstructionError {
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("invalid stage {stage}: {reason}")]
    InvalidStage { stage: usize, reason: String },
    #[error("stage {stage}: no real solution for the extended cap: {reason}")]
    NoRealRoot { stage: usize, reason: String },
    #[error("stage {stage}: {zeros} zero extensions where at most {allowed} are allowed")]
    ZeroRuleViolation { stage: usize, zeros: usize, allowed: usize },
    #[error("stage {stage}: {source}")]
    Stage { stage: usize, source: OctaError },
    #[error(transparent)]
    Octa(#[from] OctaError),
    #[error(transparent)]
    Flex(#[from] FlexError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("ring does not close: {0}")]
    RingMismatch(String),
    #[error("face selection is not a closed surface: {0}")]
    NotClosed(String),
    #[error("degenerate face: {0}")]
    DegenerateFace(String),
}
