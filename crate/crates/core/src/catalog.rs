//! Named construction plans: the worked examples plus single octahedra of
//! every sub-type and the count-checking scaling chains.

use crate::construction::{ConstructionPlan, Direction, EdgeExtensions, RingBand, ScaleSpec, Stage, TorusSpec};
use crate::octahedron::{CapParams, ClosureVariant, OasAssignment, SubType, TypeThreeCap};

const DEG: f64 = std::f64::consts::PI / 180.0;

pub struct CatalogEntry {
    pub key: &'static str,
    pub summary: &'static str,
    build: fn() -> ConstructionPlan,
}

impl CatalogEntry {
    pub fn plan(&self) -> ConstructionPlan {
        (self.build)()
    }
}

const ENTRIES: &[CatalogEntry] = &[
    CatalogEntry { key: "decahedron", summary: "III-OAE, three zero extensions: 7 vertices, 10 faces", build: decahedron },
    CatalogEntry { key: "hendecahedron", summary: "III-OAE, one extension of 1.5: 8 vertices, 11 faces", build: hendecahedron },
    CatalogEntry { key: "ii-aee-32", summary: "II-AEE, six scaling stages: 30 vertices, 32 faces", build: ii_aee_32 },
    CatalogEntry { key: "i-oee-32", summary: "I-OEE, six scaling stages: 30 vertices, 32 faces", build: i_oee_32 },
    CatalogEntry { key: "ii-oee-20", summary: "II-OEE, three respecified caps: 18 vertices, 20 faces", build: ii_oee_20 },
    CatalogEntry { key: "iii-oae-100", summary: "III-OAE, 23 edge-extension stages: 98 vertices, 100 faces", build: iii_oae_100 },
    CatalogEntry { key: "iii-oas-100", summary: "III-OAS, 23 scaling stages: 98 vertices, 100 faces", build: iii_oas_100 },
    CatalogEntry { key: "torus16", summary: "I-OEE hexadecahedron closed into a 16-quad torus", build: torus16 },
    CatalogEntry { key: "ring-torus32", summary: "32-quad torus cut from a five-copy ring structure", build: ring_torus32 },
    CatalogEntry { key: "octahedron-i-oee", summary: "single I-OEE octahedron", build: octahedron_i_oee },
    CatalogEntry { key: "octahedron-ii-aee", summary: "single II-AEE octahedron", build: octahedron_ii_aee },
    CatalogEntry { key: "octahedron-ii-oee", summary: "single II-OEE octahedron", build: octahedron_ii_oee },
    CatalogEntry { key: "octahedron-iii-oae", summary: "single III-OAE octahedron", build: octahedron_iii_oae },
    CatalogEntry { key: "octahedron-iii-oas", summary: "single III-OAS octahedron", build: octahedron_iii_oas },
];

pub fn entries() -> &'static [CatalogEntry] {
    ENTRIES
}

pub fn plan(key: &str) -> Option<ConstructionPlan> {
    ENTRIES.iter().find(|e| e.key == key).map(CatalogEntry::plan)
}

/// Type-III cap with angles in degrees.
pub fn type_three_cap(x0a0: f64, angles_deg: [f64; 4], oas: OasAssignment, variant: ClosureVariant) -> CapParams {
    let [a, b, c, d] = angles_deg.map(|x| x * DEG);
    CapParams::Angles(TypeThreeCap {
        x0a0,
        angle_a0x0b0: a,
        angle_b0x0c0: b,
        angle_b0a0x0: c,
        angle_c0b0x0: d,
        oas,
        variant,
        root: 0,
    })
}

pub fn decahedron_cap() -> CapParams {
    type_three_cap(10.0, [17.0, 47.0, 65.0, 40.0], OasAssignment::BD, ClosureVariant::Eq3)
}

/// Feasible III-OAS cap; the decahedron angles admit no OAS closure.
pub fn oas_cap() -> CapParams {
    type_three_cap(10.0, [50.0, 70.0, 20.0, 80.0], OasAssignment::BD, ClosureVariant::Eq3a)
}

pub fn hexadecahedron_cap() -> CapParams {
    CapParams::Lengths { lateral: [10.0, 10.5, 9.5, 9.0], base: [1.5, 1.75], apex: None }
}

pub fn ii_aee_cap() -> CapParams {
    CapParams::Lengths { lateral: [10.0, 11.0, 12.0, 13.0], base: [3.0, 8.0], apex: None }
}

pub fn ii_oee_cap() -> CapParams {
    CapParams::Lengths { lateral: [10.0, 11.0, 10.0, 11.0], base: [3.0, 4.0], apex: Some([12.0, 13.0]) }
}

/// Extension `|C0C1|` of the hexadecahedron's contracted octahedron.
pub const HEXADECAHEDRON_EXTENSION: f64 = 5.0;

/// Contraction `f` with `|C0C1| = (1 - f) |X1C0|`.
pub fn torus16_contraction() -> f64 {
    let CapParams::Lengths { lateral, .. } = hexadecahedron_cap() else { unreachable!() };
    // I-OEE: |X1C0| = |X0A0|.
    1.0 - HEXADECAHEDRON_EXTENSION / lateral[0]
}

fn with_stages(mut plan: ConstructionPlan, stages: Vec<Stage>) -> ConstructionPlan {
    plan.stages = stages;
    plan.stages.push(Stage::Close);
    plan
}

fn edges(lengths: [Option<f64>; 4]) -> Stage {
    Stage::Edges(EdgeExtensions { lengths, oas: None, root: None })
}

/// Extension lengths and directions of the 32-face chains.
fn six_extensions() -> Vec<Stage> {
    use Direction::{In, Out};
    [(4.0, Out), (5.0, Out), (12.0, In), (13.0, Out), (11.0, In), (10.0, Out)]
        .into_iter()
        .map(|(length, direction)| Stage::Scale(ScaleSpec::Extension { length, direction }))
        .collect()
}

pub fn decahedron() -> ConstructionPlan {
    let p = ConstructionPlan::octahedron("decahedron", SubType::IiiOae, decahedron_cap());
    with_stages(p, vec![edges([None, Some(0.0), Some(0.0), Some(0.0)])])
}

pub fn hendecahedron() -> ConstructionPlan {
    let p = ConstructionPlan::octahedron("hendecahedron", SubType::IiiOae, decahedron_cap());
    with_stages(p, vec![edges([None, Some(1.5), Some(0.0), Some(0.0)])])
}

pub fn ii_aee_32() -> ConstructionPlan {
    let mut p = with_stages(ConstructionPlan::octahedron("ii-aee-32", SubType::IiAee, ii_aee_cap()), six_extensions());
    p.phi_seed = 12.0 * DEG;
    p
}

pub fn i_oee_32() -> ConstructionPlan {
    with_stages(ConstructionPlan::octahedron("i-oee-32", SubType::IOee, hexadecahedron_cap()), six_extensions())
}

pub fn ii_oee_20() -> ConstructionPlan {
    let stages = [[12.0, 13.0], [11.0, 12.0], [10.0, 11.0]].map(|apex| Stage::RespecifyCap { apex, retain: 0.8 });
    with_stages(ConstructionPlan::octahedron("ii-oee-20", SubType::IiOee, ii_oee_cap()), stages.to_vec())
}

pub fn iii_oae_100() -> ConstructionPlan {
    let p = ConstructionPlan::octahedron("iii-oae-100", SubType::IiiOae, decahedron_cap());
    with_stages(p, vec![edges([None, Some(1.0), Some(1.0), Some(1.0)]); 23])
}

pub fn iii_oas_100() -> ConstructionPlan {
    let p = ConstructionPlan::octahedron("iii-oas-100", SubType::IiiOas, oas_cap());
    with_stages(p, vec![Stage::Scale(ScaleSpec::Extension { length: 1.0, direction: Direction::Out }); 23])
}

pub fn torus16() -> ConstructionPlan {
    let mut p = ConstructionPlan::octahedron("torus16", SubType::IOee, hexadecahedron_cap());
    p.stages = vec![Stage::TorusClose];
    p.torus = Some(TorusSpec::Sixteen { f: torus16_contraction() });
    p
}

/// Cycle of eight ring octahedra, consecutive ones sharing an apex.
pub fn ring_torus32() -> ConstructionPlan {
    let cycle = [(1, 2), (1, 3), (2, 3), (2, 4), (3, 4), (3, 5), (2, 5), (2, 2)];
    let selection = (0..cycle.len())
        .map(|i| RingBand { from: cycle[i], to: cycle[(i + 1) % cycle.len()], sectors: vec![] })
        .collect();
    let mut p = ConstructionPlan::octahedron("ring-torus32", SubType::IOee, hexadecahedron_cap());
    p.stages = vec![Stage::TorusClose];
    p.torus = Some(TorusSpec::Ring { m: 5, n: 4, scales: vec![2.5, 4.0, 5.0, 6.0], selection });
    p
}

pub fn octahedron_i_oee() -> ConstructionPlan {
    ConstructionPlan::octahedron("octahedron-i-oee", SubType::IOee, hexadecahedron_cap())
}

pub fn octahedron_ii_aee() -> ConstructionPlan {
    let mut p = ConstructionPlan::octahedron("octahedron-ii-aee", SubType::IiAee, ii_aee_cap());
    p.phi_seed = 12.0 * DEG;
    p
}

pub fn octahedron_ii_oee() -> ConstructionPlan {
    ConstructionPlan::octahedron("octahedron-ii-oee", SubType::IiOee, ii_oee_cap())
}

pub fn octahedron_iii_oae() -> ConstructionPlan {
    ConstructionPlan::octahedron("octahedron-iii-oae", SubType::IiiOae, decahedron_cap())
}

pub fn octahedron_iii_oas() -> ConstructionPlan {
    ConstructionPlan::octahedron("octahedron-iii-oas", SubType::IiiOas, oas_cap())
}

/// Chain of `n` octahedra joined by alternating homotheties of factor 1.5
/// and 0.8.
pub fn scaling_chain(subtype: SubType, n: usize) -> ConstructionPlan {
    let (cap, seed) = match subtype {
        SubType::IOee => (hexadecahedron_cap(), 90.0),
        SubType::IiAee => (ii_aee_cap(), 12.0),
        SubType::IiOee => (ii_oee_cap(), 90.0),
        SubType::IiiOae => (decahedron_cap(), 90.0),
        SubType::IiiOas => (oas_cap(), 90.0),
    };
    let stages = (1..n).map(|i| Stage::Scale(ScaleSpec::Factor(if i % 2 == 1 { 1.5 } else { 0.8 }))).collect();
    let mut p = with_stages(ConstructionPlan::octahedron(&format!("{subtype}-chain-{n}"), subtype, cap), stages);
    p.phi_seed = seed * DEG;
    p
}
