use std::f64::consts::PI;

use super::ConstructionError;
use crate::octahedron::{CapParams, ClosureVariant, OasAssignment, SubType};

/// Whether a scaling stage pushes the new base beyond the previous one or
/// pulls it back onto the shared cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Out,
    In,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScaleSpec {
    Factor(f64),
    /// Extension length of `|A_{i-1}A_i|`, converted to a factor.
    Extension { length: f64, direction: Direction },
}

impl ScaleSpec {
    /// Homothety factor given `|X_i A_{i-1}|`.
    pub fn resolve(&self, reference: f64) -> f64 {
        match *self {
            ScaleSpec::Factor(s) => s,
            ScaleSpec::Extension { length, direction: Direction::Out } => 1.0 + length / reference,
            ScaleSpec::Extension { length, direction: Direction::In } => 1.0 - length / reference,
        }
    }
}

/// Extension lengths `|V_{i-1}V_i|` for the four base vertices; `None`
/// entries are solved.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EdgeExtensions {
    pub lengths: [Option<f64>; 4],
    /// OAS pair of the new type-III octahedron; by default the pair that
    /// contains the solved vertex.
    pub oas: Option<OasAssignment>,
    /// Index among the admissible solutions; by default the first one that
    /// does not reproduce the previous octahedron.
    pub root: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stage {
    Scale(ScaleSpec),
    Edges(EdgeExtensions),
    /// II-OEE: keep `retain` times the cap at `X_i` and give the new apex the
    /// lengths `[|X_{i+1}A_i|, |X_{i+1}B_i|]`.
    RespecifyCap { apex: [f64; 2], retain: f64 },
    Close,
    TorusClose,
}

/// Octahedra pair `(j, k)` of a ring structure: bottom apex of copy `j` and
/// top apex of copy `k`, both 1-based.
pub type RingPair = (usize, usize);

/// Four quads (or the listed sectors) joining two ring octahedra that share
/// an apex.
#[derive(Debug, Clone, PartialEq)]
pub struct RingBand {
    pub from: RingPair,
    pub to: RingPair,
    /// Sector indices 0..4 (`AB`, `BC`, `CD`, `DA`); empty means all four.
    pub sectors: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TorusSpec {
    /// Contraction factor `f` of the hexadecahedron.
    Sixteen { f: f64 },
    Ring { m: usize, n: usize, scales: Vec<f64>, selection: Vec<RingBand> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstructionPlan {
    pub name: String,
    pub subtype: SubType,
    pub cap: CapParams,
    pub phi_seed: f64,
    pub stages: Vec<Stage>,
    pub torus: Option<TorusSpec>,
}

impl ConstructionPlan {
    /// Single-octahedron plan.
    pub fn octahedron(name: &str, subtype: SubType, cap: CapParams) -> Self {
        ConstructionPlan { name: name.into(), subtype, cap, phi_seed: PI / 2.0, stages: vec![Stage::Close], torus: None }
    }

    /// Number of octahedra in the chain.
    pub fn n(&self) -> usize {
        self.stages.iter().filter(|s| !matches!(s, Stage::Close | Stage::TorusClose)).count() + 1
    }

    pub fn validate(&self) -> Result<(), ConstructionError> {
        let bad = |m: String| Err(ConstructionError::InvalidPlan(m));
        if !self.phi_seed.is_finite() {
            return bad("seed is not finite".into());
        }
        match self.stages.last() {
            Some(Stage::Close) | Some(Stage::TorusClose) => {}
            _ => return bad("the last stage must close the polyhedron".into()),
        }
        let closes = self.stages.iter().filter(|s| matches!(s, Stage::Close | Stage::TorusClose)).count();
        if closes != 1 {
            return bad("exactly one closing stage is allowed".into());
        }
        let torus_close = matches!(self.stages.last(), Some(Stage::TorusClose));
        match (&self.torus, torus_close) {
            (Some(_), true) if self.stages.len() == 1 => {}
            (Some(_), true) => return bad("torus plans consist of the closing stage only".into()),
            (None, true) => return bad("torus closure needs a torus section".into()),
            (Some(_), false) => return bad("torus section given but the plan closes a genus-0 chain".into()),
            (None, false) => {}
        }
        if self.torus.is_some() && self.subtype != SubType::IOee {
            return bad(format!("tori are built from I-OEE octahedra, not {}", self.subtype));
        }
        if let Some(TorusSpec::Sixteen { f }) = self.torus {
            if !(f > 0.0 && f < 1.0) {
                return bad(format!("contraction factor {f} outside (0, 1)"));
            }
        }
        for (i, st) in self.stages.iter().enumerate() {
            let stage = i + 1;
            let invalid = |reason: String| Err(ConstructionError::InvalidStage { stage, reason });
            match st {
                Stage::Scale(ScaleSpec::Factor(s)) if !(s.is_finite() && *s > 0.0 && *s != 1.0) => {
                    return invalid(format!("scale factor {s} must be positive and differ from 1"))
                }
                Stage::Scale(ScaleSpec::Extension { length, .. }) if !(length.is_finite() && *length > 0.0) => {
                    return invalid(format!("extension length {length} must be positive"))
                }
                Stage::Edges(e) => {
                    if e.lengths.iter().flatten().any(|l| !(l.is_finite() && *l >= 0.0)) {
                        return invalid("extension lengths must be finite and non-negative".into());
                    }
                    if self.subtype == SubType::IiOee {
                        return invalid("II-OEE stages respecify the cap instead".into());
                    }
                    if e.oas.is_some() && self.subtype != SubType::IiiOae {
                        return invalid("an OAS assignment applies to III-OAE only".into());
                    }
                }
                Stage::RespecifyCap { apex, retain } => {
                    if self.subtype != SubType::IiOee {
                        return invalid("cap respecification applies to II-OEE only".into());
                    }
                    if !(retain.is_finite() && *retain > 0.0 && *retain != 1.0) {
                        return invalid(format!("retain factor {retain} must be positive and differ from 1"));
                    }
                    if apex.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
                        return invalid("apex lengths must be positive".into());
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Closure variant of a type-III cap, if any.
    pub fn variant(&self) -> Option<ClosureVariant> {
        match self.cap {
            CapParams::Angles(c) => Some(c.variant),
            _ => None,
        }
    }
}
