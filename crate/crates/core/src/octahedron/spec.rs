use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::closure::{solve_closure, ClosureError, ClosureProblem, ClosureVariant};
use super::labels::{OctaEdge, OctaLabels, VertexLabel};
use super::subtype::{type_three_vertex_types, OasAssignment, SubType, VertexType};
use super::OctaError;
use crate::geometry::{angle_from_sides, solve_triangle, Point3, TriangleSpec};

/// Angles closer than this to 0 or pi are rejected as degenerate.
pub const DEGENERATE_ANGLE: f64 = 1e-9;

/// Independent parameters of the cap at `X0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CapParams {
    /// Lateral lengths `|X0A0|..|X0D0|` and two base edges: `[|A0B0|, |B0C0|]`
    /// for I-OEE and II-OEE, `[|A0B0|, |C0D0|]` for II-AEE. II-OEE also needs
    /// `apex = [|X1A0|, |X1B0|]`.
    Lengths { lateral: [f64; 4], base: [f64; 2], apex: Option<[f64; 2]> },
    /// Two adjacent faces of a type-III cap (angles in radians).
    Angles(TypeThreeCap),
}

/// Faces `X0A0B0` and `X0B0C0` of a type-III cap, plus closure choices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TypeThreeCap {
    pub x0a0: f64,
    pub angle_a0x0b0: f64,
    pub angle_b0x0c0: f64,
    pub angle_b0a0x0: f64,
    pub angle_c0b0x0: f64,
    pub oas: OasAssignment,
    pub variant: ClosureVariant,
    pub root: usize,
}

/// Face angles of the eight faces. Face `(a, s)` is the triangle
/// `apex_a, base_s, base_{s+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FaceAngles {
    pub at_apex: [[f64; 4]; 2],
    /// Angle at `base_s`.
    pub at_first: [[f64; 4]; 2],
    /// Angle at `base_{s+1}`.
    pub at_second: [[f64; 4]; 2],
}

impl FaceAngles {
    /// The four face angles around a vertex in cyclic face order, so that
    /// entries 0/2 and 1/3 are opposite. `vertex` is in point order
    /// (apex 0, apex 1, base 0..4).
    pub fn around(&self, vertex: usize) -> [f64; 4] {
        match vertex {
            0 | 1 => self.at_apex[vertex],
            v => {
                let j = v - 2;
                let jm = (j + 3) % 4;
                [self.at_second[0][jm], self.at_first[0][j], self.at_first[1][j], self.at_second[1][jm]]
            }
        }
    }

    fn from_lengths(lat: &[[f64; 4]; 2], base: &[f64; 4]) -> Result<Self, OctaError> {
        let mut fa = FaceAngles::default();
        for a in 0..2 {
            for s in 0..4 {
                let (p, q, e) = (lat[a][s], lat[a][(s + 1) % 4], base[s]);
                let infeasible = |_| OctaError::InfeasibleCap(format!("face ({a},{s}) sides {p}, {q}, {e}"));
                fa.at_apex[a][s] = angle_from_sides(p, q, e).map_err(infeasible)?;
                fa.at_first[a][s] = angle_from_sides(p, e, q).map_err(infeasible)?;
                fa.at_second[a][s] = angle_from_sides(q, e, p).map_err(infeasible)?;
            }
        }
        Ok(fa)
    }

    fn all(&self) -> impl Iterator<Item = f64> + '_ {
        (0..2).flat_map(move |a| (0..4).flat_map(move |s| [self.at_apex[a][s], self.at_first[a][s], self.at_second[a][s]]))
    }
}

/// Complete metric description of one octahedron.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OctahedronSpec {
    pub subtype: Option<SubType>,
    pub labels: OctaLabels,
    /// `lateral[a][j] = |apex_a base_j|`.
    pub lateral: [[f64; 4]; 2],
    /// `base[j] = |base_j base_{j+1}|`.
    pub base: [f64; 4],
    /// Vertex types in point order for type-III specs.
    pub vertex_types: Option<[VertexType; 6]>,
    pub face_angles: FaceAngles,
}

impl Serialize for OctaLabels {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.ordered().serialize(s)
    }
}

impl<'de> Deserialize<'de> for OctaLabels {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = <[VertexLabel; 6]>::deserialize(d)?;
        Ok(OctaLabels { apex: [v[0], v[1]], base: [v[2], v[3], v[4], v[5]] })
    }
}

impl OctahedronSpec {
    /// Spec from twelve lengths with face angles from the law of cosines.
    pub fn from_lengths(
        subtype: Option<SubType>,
        labels: OctaLabels,
        lateral: [[f64; 4]; 2],
        base: [f64; 4],
        vertex_types: Option<[VertexType; 6]>,
    ) -> Result<Self, OctaError> {
        for &l in lateral.iter().flatten().chain(base.iter()) {
            if !(l > 0.0 && l.is_finite()) {
                return Err(OctaError::InfeasibleCap(format!("edge length {l} must be positive")));
            }
        }
        let face_angles = FaceAngles::from_lengths(&lateral, &base)?;
        let spec = OctahedronSpec { subtype, labels, lateral, base, vertex_types, face_angles };
        spec.check_nondegenerate()?;
        Ok(spec)
    }

    /// Spec measured from six points in point order.
    pub fn from_points(labels: OctaLabels, pts: &[Point3; 6]) -> Result<Self, OctaError> {
        let mut lateral = [[0.0; 4]; 2];
        for (a, row) in lateral.iter_mut().enumerate() {
            for (j, l) in row.iter_mut().enumerate() {
                *l = pts[a].distance(pts[2 + j]);
            }
        }
        let base = [0, 1, 2, 3].map(|j| pts[2 + j].distance(pts[2 + (j + 1) % 4]));
        OctahedronSpec::from_lengths(None, labels, lateral, base, None)
    }

    pub fn length(&self, e: OctaEdge) -> f64 {
        match e {
            OctaEdge::Lateral { apex, base } => self.lateral[apex][base],
            OctaEdge::Base { index } => self.base[index],
        }
    }

    /// All 12 edges with their endpoint labels and lengths.
    pub fn edge_lengths(&self) -> Vec<(VertexLabel, VertexLabel, f64)> {
        OctaEdge::all()
            .iter()
            .map(|&e| {
                let (p, q) = self.labels.endpoints(e);
                (p, q, self.length(e))
            })
            .collect()
    }

    pub fn longest_edge(&self) -> f64 {
        self.lateral.iter().flatten().chain(self.base.iter()).fold(0.0, |m, &l| m.max(l))
    }

    /// Same octahedron with every length multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        let mut s = self.clone();
        for l in s.lateral.iter_mut().flatten() {
            *l *= c;
        }
        for l in s.base.iter_mut() {
            *l *= c;
        }
        s
    }

    /// Same octahedron with the roles of the two apexes exchanged.
    pub fn swap_apexes(&self) -> Self {
        let mut s = self.clone();
        s.lateral.swap(0, 1);
        s.labels.apex.swap(0, 1);
        s.face_angles.at_apex.swap(0, 1);
        s.face_angles.at_first.swap(0, 1);
        s.face_angles.at_second.swap(0, 1);
        if let Some(t) = s.vertex_types.as_mut() {
            t.swap(0, 1);
        }
        s
    }

    fn check_nondegenerate(&self) -> Result<(), OctaError> {
        for x in self.face_angles.all() {
            if !(x > DEGENERATE_ANGLE && x < PI - DEGENERATE_ANGLE) {
                return Err(OctaError::Degenerate(format!("face angle {x} too close to 0 or pi")));
            }
        }
        Ok(())
    }

    /// Largest violation of the edge-length equalities for the sub-type.
    pub fn length_relation_error(&self) -> f64 {
        let (l0, l1, b) = (&self.lateral[0], &self.lateral[1], &self.base);
        let pairs: Vec<(f64, f64)> = match self.subtype {
            Some(SubType::IOee) => vec![
                (l1[0], l0[2]),
                (l1[1], l0[3]),
                (l1[2], l0[0]),
                (l1[3], l0[1]),
                (b[2], b[0]),
                (b[3], b[1]),
            ],
            Some(SubType::IiAee) => vec![
                (l1[0], l0[2]),
                (l1[1], l0[1]),
                (l1[2], l0[0]),
                (l1[3], l0[3]),
                (b[1], b[0]),
                (b[3], b[2]),
            ],
            Some(SubType::IiOee) => vec![
                (l0[2], l0[0]),
                (l0[3], l0[1]),
                (b[2], b[0]),
                (b[3], b[1]),
                (l1[2], l1[0]),
                (l1[3], l1[1]),
            ],
            _ => vec![],
        };
        pairs.into_iter().map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    /// Largest violation of the opposite-angle relations at the six vertices.
    pub fn angle_relation_error(&self) -> f64 {
        let Some(types) = self.vertex_types else { return 0.0 };
        let mut worst: f64 = 0.0;
        for (v, t) in types.iter().enumerate() {
            let f = self.face_angles.around(v);
            for (x, y) in [(f[0], f[2]), (f[1], f[3])] {
                worst = worst.max((t.relate(x) - y).abs());
            }
        }
        worst
    }
}

/// Builds the full spec of an octahedron from its cap parameters.
pub fn complete_spec(subtype: SubType, params: &CapParams) -> Result<OctahedronSpec, OctaError> {
    complete_spec_labeled(subtype, params, OctaLabels::default())
}

pub fn complete_spec_labeled(
    subtype: SubType,
    params: &CapParams,
    labels: OctaLabels,
) -> Result<OctahedronSpec, OctaError> {
    match (subtype.is_type_three(), params) {
        (false, CapParams::Lengths { lateral, base, apex }) => {
            let l0 = *lateral;
            let (bases, l1) = match subtype {
                SubType::IOee => ([base[0], base[1], base[0], base[1]], [l0[2], l0[3], l0[0], l0[1]]),
                SubType::IiAee => ([base[0], base[0], base[1], base[1]], [l0[2], l0[1], l0[0], l0[3]]),
                SubType::IiOee => {
                    let ap = apex.ok_or_else(|| OctaError::InvalidParams("II-OEE needs |X1A0| and |X1B0|".into()))?;
                    let tol = 1e-12 * l0.iter().fold(0.0f64, |m, &x| m.max(x));
                    if (l0[2] - l0[0]).abs() > tol || (l0[3] - l0[1]).abs() > tol {
                        return Err(OctaError::InvalidParams(
                            "II-OEE needs |X0C0| = |X0A0| and |X0D0| = |X0B0|".into(),
                        ));
                    }
                    ([base[0], base[1], base[0], base[1]], [ap[0], ap[1], ap[0], ap[1]])
                }
                _ => unreachable!(),
            };
            if subtype != SubType::IiOee && apex.is_some() {
                return Err(OctaError::InvalidParams(format!("{subtype} takes no apex lengths")));
            }
            OctahedronSpec::from_lengths(Some(subtype), labels, [l0, l1], bases, None)
        }
        (true, CapParams::Angles(cap)) => complete_type_three(subtype, cap, labels),
        _ => Err(OctaError::InvalidParams(format!("cap parameters do not match sub-type {subtype}"))),
    }
}

fn complete_type_three(subtype: SubType, cap: &TypeThreeCap, labels: OctaLabels) -> Result<OctahedronSpec, OctaError> {
    let types = type_three_vertex_types(subtype, cap.oas).expect("type-III sub-type");
    let asa = |side, p, q| {
        solve_triangle(TriangleSpec::Asa { side_pq: side, angle_p: p, angle_q: q })
            .map_err(|e| OctaError::InfeasibleCap(e.to_string()))
    };
    for x in [cap.angle_a0x0b0, cap.angle_b0x0c0, cap.angle_b0a0x0, cap.angle_c0b0x0] {
        if !(x > DEGENERATE_ANGLE && x < PI - DEGENERATE_ANGLE) {
            return Err(OctaError::InvalidParams(format!("cap angle {x} outside (0, pi)")));
        }
    }
    if !(cap.x0a0 > 0.0) {
        return Err(OctaError::InvalidParams("|X0A0| must be positive".into()));
    }
    // face X0 A0 B0: P = X0, Q = A0
    let f0 = asa(cap.x0a0, cap.angle_a0x0b0, cap.angle_b0a0x0)?;
    let x0b0 = f0.opposite[1];
    // face X0 B0 C0: P = X0, Q = B0
    let f1 = asa(x0b0, cap.angle_b0x0c0, cap.angle_c0b0x0)?;
    let x0c0 = f1.opposite[1];
    let a = [
        cap.angle_a0x0b0,
        cap.angle_b0x0c0,
        types[0].relate(cap.angle_a0x0b0),
        types[0].relate(cap.angle_b0x0c0),
    ];
    let input = TypeThreeInput {
        apex_angles: a,
        lateral: [Some(cap.x0a0), Some(x0b0), Some(x0c0), None],
        types,
        variant: cap.variant,
    };
    let all = solve_type_three(&input)?;
    let chosen = all.get(cap.root).ok_or(OctaError::RootIndex { requested: cap.root, available: all.len() })?;
    let chosen = chosen.as_ref().map_err(|e| e.clone())?;
    chosen.to_spec(subtype, labels)
}

/// A type-III cap with three known lateral lengths from apex 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypeThreeInput {
    /// Face angles at apex 0, sector `s` between base `s` and `s + 1`.
    pub apex_angles: [f64; 4],
    /// Exactly one entry is `None`: the base vertex found by closure.
    pub lateral: [Option<f64>; 4],
    pub types: [VertexType; 6],
    pub variant: ClosureVariant,
}

/// Lengths and angles of one solved type-III octahedron.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypeThreeSolution {
    pub lateral: [[f64; 4]; 2],
    pub base: [f64; 4],
    pub face_angles: FaceAngles,
    pub types: [VertexType; 6],
    /// Closure angles `(I2, B1)` in the rotated labeling.
    pub closure: (f64, f64),
}

impl TypeThreeSolution {
    pub fn to_spec(&self, subtype: SubType, labels: OctaLabels) -> Result<OctahedronSpec, OctaError> {
        let spec = OctahedronSpec {
            subtype: Some(subtype),
            labels,
            lateral: self.lateral,
            base: self.base,
            vertex_types: Some(self.types),
            face_angles: self.face_angles,
        };
        spec.check_nondegenerate()?;
        Ok(spec)
    }
}

/// Quantities of the two known faces in the rotated labeling where the
/// unknown base vertex is `V3`.
struct RotatedCap {
    r: usize,
    l: [f64; 3],
    alpha: [f64; 4],
    len1: f64,
    len2: f64,
    beta1: f64,
    psi: f64,
    eps: f64,
    gamma2: f64,
    b2: f64,
    i1: f64,
}

fn rotated_cap(input: &TypeThreeInput) -> Result<RotatedCap, OctaError> {
    let unknown = match input.lateral.iter().filter(|l| l.is_none()).count() {
        1 => input.lateral.iter().position(|l| l.is_none()).expect("one unknown"),
        n => {
            return Err(OctaError::InvalidParams(format!(
                "type-III cap needs exactly three known laterals, got {}",
                4 - n
            )))
        }
    };
    let r = (unknown + 1) % 4;
    let orig = |s: usize| (s + r) % 4;
    let l = [0, 1, 2].map(|s| input.lateral[orig(s)].expect("known lateral"));
    let alpha = [0, 1, 2, 3].map(|s| input.apex_angles[orig(s)]);
    let tx0 = input.types[0];
    if (tx0.relate(alpha[0]) - alpha[2]).abs() > 1e-12 || (tx0.relate(alpha[1]) - alpha[3]).abs() > 1e-12 {
        return Err(OctaError::InvalidParams("apex angles violate the apex vertex type".into()));
    }
    let sas = |p, q, ang| {
        solve_triangle(TriangleSpec::Sas { side_pq: p, side_pr: q, angle_p: ang })
            .map_err(|e| OctaError::InfeasibleCap(e.to_string()))
    };
    // face X V0 V1 with P = X, Q = V0, R = V1
    let f0 = sas(l[0], l[1], alpha[0])?;
    // face X V1 V2 with P = X, Q = V1, R = V2
    let f1 = sas(l[1], l[2], alpha[1])?;
    let t1 = input.types[2 + orig(1)];
    Ok(RotatedCap {
        r,
        l,
        alpha,
        len1: f0.opposite[0],
        len2: f1.opposite[0],
        beta1: f0.angles[1],
        psi: f0.angles[2],
        eps: f1.angles[1],
        gamma2: f1.angles[2],
        b2: t1.relate(f0.angles[2]),
        i1: t1.relate(f1.angles[1]),
    })
}

/// Closure problem of a type-III cap.
pub fn type_three_closure_problem(input: &TypeThreeInput) -> Result<ClosureProblem, OctaError> {
    let rc = rotated_cap(input)?;
    ClosureProblem::new(rc.len1, rc.len2, rc.b2, rc.i1, rc.beta1, rc.gamma2, input.variant).map_err(OctaError::NoRealClosure)
}

/// Solves the cap for every admissible closure root, in root order. Each
/// entry is the solution or the reason that root is infeasible.
pub fn solve_type_three(input: &TypeThreeInput) -> Result<Vec<Result<TypeThreeSolution, OctaError>>, OctaError> {
    let problem = type_three_closure_problem(input)?;
    let roots = solve_closure(&problem).map_err(OctaError::NoRealClosure)?;
    Ok(roots.iter().map(|rt| solve_type_three_at(input, rt.i2, rt.b1)).collect())
}

/// Completes the octahedron from given closure angles `(I2, B1)`. Any
/// pair satisfying the linear closure relation gives consistent lengths;
/// only roots of the full closure give a flexible octahedron.
pub fn solve_type_three_at(input: &TypeThreeInput, i2: f64, b1: f64) -> Result<TypeThreeSolution, OctaError> {
    let rc = rotated_cap(input)?;
    let RotatedCap { r, l, alpha, len1, len2, beta1, psi, eps, gamma2, b2, i1 } = rc;
    let orig = |s: usize| (s + r) % 4;
    let tv = |s: usize| input.types[2 + orig(s)];
    let infeasible = |e: crate::geometry::GeometryError| OctaError::InfeasibleCap(e.to_string());
    let asa = |side, p, q| solve_triangle(TriangleSpec::Asa { side_pq: side, angle_p: p, angle_q: q }).map_err(infeasible);
    // apex 0 sectors 2 and 3
    let v0_x_v3 = tv(0).relate(b1);
    let v2_x_v3 = tv(2).relate(i2);
    let s3 = asa(l[0], alpha[3], v0_x_v3)?; // P = X, Q = V0, R = V3
    let s2 = asa(l[2], alpha[2], v2_x_v3)?; // P = X, Q = V2, R = V3
    let l3 = s3.opposite[1];
    check_same(l3, s2.opposite[1], "|X V3|")?;
    let (len3, len4) = (s2.opposite[0], s3.opposite[0]); // |V2V3|, |V3V0|
    let x_v3_v2 = s2.angles[2];
    let x_v3_v0 = s3.angles[2];
    // apex 1 faces
    let y0 = asa(len1, b1, i1)?; // P = V0, Q = V1
    let y1 = asa(len2, b2, i2)?; // P = V1, Q = V2
    let y_v2_first = tv(2).relate(gamma2);
    let y_v3_second = tv(3).relate(x_v3_v0);
    let y2 = asa(len3, y_v2_first, y_v3_second)?; // P = V2, Q = V3
    let y_v3_first = tv(3).relate(x_v3_v2);
    let y_v0_second = tv(0).relate(beta1);
    let y3 = asa(len4, y_v3_first, y_v0_second)?; // P = V3, Q = V0
    let m = [y0.opposite[1], y0.opposite[0], y1.opposite[0], y2.opposite[0]];
    check_same(m[1], y1.opposite[1], "|X' V1|")?;
    check_same(m[2], y2.opposite[1], "|X' V2|")?;
    check_same(m[3], y3.opposite[1], "|X' V3|")?;
    check_same(m[0], y3.opposite[0], "|X' V0|")?;
    let mut sol = TypeThreeSolution {
        lateral: [[0.0; 4]; 2],
        base: [0.0; 4],
        face_angles: FaceAngles::default(),
        types: input.types,
        closure: (i2, b1),
    };
    let rot_lat0 = [l[0], l[1], l[2], l3];
    let rot_base = [len1, len2, len3, len4];
    let rot_apex0 = [alpha[0], alpha[1], alpha[2], alpha[3]];
    let rot_first0 = [beta1, eps, v2_x_v3, x_v3_v0];
    let rot_second0 = [psi, gamma2, x_v3_v2, v0_x_v3];
    let rot_apex1 = [y0.angles[2], y1.angles[2], y2.angles[2], y3.angles[2]];
    let rot_first1 = [b1, b2, y_v2_first, y_v3_first];
    let rot_second1 = [i1, i2, y_v3_second, y_v0_second];
    for s in 0..4 {
        let o = orig(s);
        sol.lateral[0][o] = rot_lat0[s];
        sol.lateral[1][o] = m[s];
        sol.base[o] = rot_base[s];
        sol.face_angles.at_apex[0][o] = rot_apex0[s];
        sol.face_angles.at_first[0][o] = rot_first0[s];
        sol.face_angles.at_second[0][o] = rot_second0[s];
        sol.face_angles.at_apex[1][o] = rot_apex1[s];
        sol.face_angles.at_first[1][o] = rot_first1[s];
        sol.face_angles.at_second[1][o] = rot_second1[s];
    }
    for x in sol.face_angles.all() {
        if !(x > DEGENERATE_ANGLE && x < PI - DEGENERATE_ANGLE) {
            return Err(OctaError::Degenerate(format!("face angle {x} too close to 0 or pi")));
        }
    }
    Ok(sol)
}

fn check_same(x: f64, y: f64, what: &str) -> Result<(), OctaError> {
    if (x - y).abs() <= 1e-9 * x.abs().max(y.abs()) {
        Ok(())
    } else {
        Err(OctaError::Inconsistent(format!("{what}: {x} vs {y}")))
    }
}

impl From<ClosureError> for OctaError {
    fn from(e: ClosureError) -> Self {
        OctaError::NoRealClosure(e)
    }
}
