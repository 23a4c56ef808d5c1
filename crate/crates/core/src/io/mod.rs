//! Plan documents and result serialization.

mod export;
mod plan;

pub use export::{export_obj, export_trace, frame_path, frames, report_json, snapshot, write_obj_frames, MeshSnapshot, MeshVertex};
pub use plan::{
    load_plan, parse_document, serialize_plan, AngleCap, BandDocument, CapDocument, DirectionDocument, EdgesDocument, LengthCap,
    PlanDocument, RespecifyDocument, ScaleDocument, StageDocument, TorusDocument,
};

use crate::construction::ConstructionError;
use crate::octahedron::FlexError;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("unit error at {path}: {message}")]
    Unit { path: String, message: String },
    #[error(transparent)]
    Plan(#[from] ConstructionError),
    #[error(transparent)]
    Flex(#[from] FlexError),
    #[error(transparent)]
    File(#[from] std::io::Error),
}
