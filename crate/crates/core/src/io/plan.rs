use serde::{Deserialize, Serialize};

use super::IoError;
use crate::construction::{ConstructionPlan, Direction, EdgeExtensions, RingBand, ScaleSpec, Stage, TorusSpec};
use crate::octahedron::{CapParams, ClosureVariant, OasAssignment, SubType, TypeThreeCap};

/// Plan file layout. Lengths are unit-less, angles are degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanDocument {
    #[serde(default = "default_name")]
    pub name: String,
    pub subtype: SubType,
    pub cap: CapDocument,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oas_assignment: Option<OasAssignment>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub root_choice: usize,
    #[serde(default = "default_seed")]
    pub phi_seed_degrees: f64,
    pub stages: Vec<StageDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torus: Option<TorusDocument>,
}

fn default_name() -> String {
    "plan".into()
}

fn default_seed() -> f64 {
    90.0
}

fn is_zero(x: &usize) -> bool {
    *x == 0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapDocument {
    Lengths(LengthCap),
    Angles(AngleCap),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LengthCap {
    /// `|X0A0|, |X0B0|, |X0C0|, |X0D0|`.
    pub lateral: [f64; 4],
    pub base: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub apex: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AngleCap {
    pub x0a0: f64,
    pub a0x0b0: f64,
    pub b0x0c0: f64,
    pub b0a0x0: f64,
    pub c0b0x0: f64,
    #[serde(default)]
    pub variant: ClosureVariant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageDocument {
    Scale(ScaleDocument),
    Edges(EdgesDocument),
    RespecifyCap(RespecifyDocument),
    Close,
    TorusClose,
}

/// Exactly one of `factor` and `extension`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extension: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<DirectionDocument>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionDocument {
    Out,
    In,
}

/// Extension lengths by base vertex; omitted vertices are solved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgesDocument {
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oas_assignment: Option<OasAssignment>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root_choice: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RespecifyDocument {
    /// `[|X_{i+1}A_i|, |X_{i+1}B_i|]`.
    pub apex: [f64; 2],
    pub retain: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum TorusDocument {
    Sixteen {
        f: f64,
    },
    Ring {
        m: usize,
        n: usize,
        scales: Vec<f64>,
        selection: Vec<BandDocument>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandDocument {
    pub from: [usize; 2],
    pub to: [usize; 2],
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sectors: Vec<usize>,
}

fn unit_error(path: &str, msg: String) -> IoError {
    IoError::Unit { path: path.into(), message: msg }
}

fn radians(path: &str, degrees: f64, open_range: (f64, f64)) -> Result<f64, IoError> {
    let (lo, hi) = open_range;
    if !(degrees.is_finite() && degrees > lo && degrees < hi) {
        return Err(unit_error(path, format!("{degrees} degrees outside ({lo}, {hi})")));
    }
    Ok(degrees.to_radians())
}

/// Shortest decimal degree value that converts back to exactly `rad`.
fn degrees(rad: f64) -> f64 {
    let d = rad.to_degrees();
    for digits in 1..=17 {
        let candidate: f64 = format!("{:.*e}", digits - 1, d).parse().expect("formatted float");
        if candidate.to_radians() == rad {
            return candidate;
        }
    }
    let mut candidate = d;
    for _ in 0..8 {
        if candidate.to_radians() == rad {
            return candidate;
        }
        candidate = if candidate.to_radians() < rad { candidate.next_up() } else { candidate.next_down() };
    }
    d
}

impl PlanDocument {
    /// Converts to a plan, validating units and the plan's own rules.
    pub fn to_plan(&self) -> Result<ConstructionPlan, IoError> {
        let cap = match &self.cap {
            CapDocument::Lengths(c) => {
                if self.oas_assignment.is_some() {
                    return Err(schema(".oas_assignment", "applies to type-III caps only"));
                }
                CapParams::Lengths { lateral: c.lateral, base: c.base, apex: c.apex }
            }
            CapDocument::Angles(c) => {
                let angle = |name: &str, v: f64| radians(&format!(".cap.angles.{name}"), v, (0.0, 180.0));
                CapParams::Angles(TypeThreeCap {
                    x0a0: c.x0a0,
                    angle_a0x0b0: angle("a0x0b0", c.a0x0b0)?,
                    angle_b0x0c0: angle("b0x0c0", c.b0x0c0)?,
                    angle_b0a0x0: angle("b0a0x0", c.b0a0x0)?,
                    angle_c0b0x0: angle("c0b0x0", c.c0b0x0)?,
                    oas: self.oas_assignment.unwrap_or_default(),
                    variant: c.variant,
                    root: self.root_choice,
                })
            }
        };
        let mut stages = Vec::with_capacity(self.stages.len());
        for (i, st) in self.stages.iter().enumerate() {
            let path = format!(".stages[{i}]");
            stages.push(match st {
                StageDocument::Scale(s) => Stage::Scale(match (s.factor, s.extension) {
                    (Some(f), None) if s.direction.is_none() => ScaleSpec::Factor(f),
                    (Some(_), None) => return Err(schema(&format!("{path}.scale.direction"), "a factor takes no direction")),
                    (None, Some(length)) => ScaleSpec::Extension {
                        length,
                        direction: match s.direction {
                            Some(DirectionDocument::In) => Direction::In,
                            _ => Direction::Out,
                        },
                    },
                    _ => return Err(schema(&format!("{path}.scale"), "give exactly one of factor and extension")),
                }),
                StageDocument::Edges(e) => Stage::Edges(EdgeExtensions {
                    lengths: [e.a, e.b, e.c, e.d],
                    oas: e.oas_assignment,
                    root: e.root_choice,
                }),
                StageDocument::RespecifyCap(r) => Stage::RespecifyCap { apex: r.apex, retain: r.retain },
                StageDocument::Close => Stage::Close,
                StageDocument::TorusClose => Stage::TorusClose,
            });
        }
        let torus = self.torus.as_ref().map(|t| match t {
            TorusDocument::Sixteen { f } => TorusSpec::Sixteen { f: *f },
            TorusDocument::Ring { m, n, scales, selection } => TorusSpec::Ring {
                m: *m,
                n: *n,
                scales: scales.clone(),
                selection: selection
                    .iter()
                    .map(|b| RingBand { from: (b.from[0], b.from[1]), to: (b.to[0], b.to[1]), sectors: b.sectors.clone() })
                    .collect(),
            },
        });
        let phi_seed = radians(".phi_seed_degrees", self.phi_seed_degrees, (-720.0, 720.0))?;
        let plan = ConstructionPlan { name: self.name.clone(), subtype: self.subtype, cap, phi_seed, stages, torus };
        plan.validate()?;
        Ok(plan)
    }

    pub fn from_plan(plan: &ConstructionPlan) -> Self {
        let (cap, oas, root) = match plan.cap {
            CapParams::Lengths { lateral, base, apex } => (CapDocument::Lengths(LengthCap { lateral, base, apex }), None, 0),
            CapParams::Angles(c) => (
                CapDocument::Angles(AngleCap {
                    x0a0: c.x0a0,
                    a0x0b0: degrees(c.angle_a0x0b0),
                    b0x0c0: degrees(c.angle_b0x0c0),
                    b0a0x0: degrees(c.angle_b0a0x0),
                    c0b0x0: degrees(c.angle_c0b0x0),
                    variant: c.variant,
                }),
                Some(c.oas),
                c.root,
            ),
        };
        let stages = plan
            .stages
            .iter()
            .map(|st| match st {
                Stage::Scale(ScaleSpec::Factor(f)) => StageDocument::Scale(ScaleDocument { factor: Some(*f), extension: None, direction: None }),
                Stage::Scale(ScaleSpec::Extension { length, direction }) => StageDocument::Scale(ScaleDocument {
                    factor: None,
                    extension: Some(*length),
                    direction: Some(match direction {
                        Direction::Out => DirectionDocument::Out,
                        Direction::In => DirectionDocument::In,
                    }),
                }),
                Stage::Edges(e) => StageDocument::Edges(EdgesDocument {
                    a: e.lengths[0],
                    b: e.lengths[1],
                    c: e.lengths[2],
                    d: e.lengths[3],
                    oas_assignment: e.oas,
                    root_choice: e.root,
                }),
                Stage::RespecifyCap { apex, retain } => StageDocument::RespecifyCap(RespecifyDocument { apex: *apex, retain: *retain }),
                Stage::Close => StageDocument::Close,
                Stage::TorusClose => StageDocument::TorusClose,
            })
            .collect();
        let torus = plan.torus.as_ref().map(|t| match t {
            TorusSpec::Sixteen { f } => TorusDocument::Sixteen { f: *f },
            TorusSpec::Ring { m, n, scales, selection } => TorusDocument::Ring {
                m: *m,
                n: *n,
                scales: scales.clone(),
                selection: selection
                    .iter()
                    .map(|b| BandDocument { from: [b.from.0, b.from.1], to: [b.to.0, b.to.1], sectors: b.sectors.clone() })
                    .collect(),
            },
        });
        PlanDocument {
            name: plan.name.clone(),
            subtype: plan.subtype,
            cap,
            oas_assignment: oas,
            root_choice: root,
            phi_seed_degrees: degrees(plan.phi_seed),
            stages,
            torus,
        }
    }
}

fn schema(path: &str, message: &str) -> IoError {
    IoError::Schema { path: path.into(), message: message.into() }
}

/// JSON path in the `.a.b[2]` form.
fn dotted(path: &serde_path_to_error::Path) -> String {
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            serde_path_to_error::Segment::Seq { index } => out.push_str(&format!("[{index}]")),
            serde_path_to_error::Segment::Map { key } => out.push_str(&format!(".{key}")),
            serde_path_to_error::Segment::Enum { variant } => out.push_str(&format!(".{variant}")),
            serde_path_to_error::Segment::Unknown => out.push_str(".?"),
        }
    }
    if out.is_empty() {
        out.push('.');
    }
    out
}

pub fn parse_document(text: &str) -> Result<PlanDocument, IoError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = dotted(e.path());
        let inner = e.into_inner();
        if inner.is_syntax() || inner.is_eof() {
            IoError::Parse(inner.to_string())
        } else {
            IoError::Schema { path, message: inner.to_string() }
        }
    })
}

/// Parses, converts degrees and validates a plan document.
pub fn load_plan(text: &str) -> Result<ConstructionPlan, IoError> {
    parse_document(text)?.to_plan()
}

/// Pretty JSON for `plan`; `load_plan` maps it back to the same value.
pub fn serialize_plan(plan: &ConstructionPlan) -> String {
    let mut s = serde_json::to_string_pretty(&PlanDocument::from_plan(plan)).expect("plan documents serialize");
    s.push('\n');
    s
}
