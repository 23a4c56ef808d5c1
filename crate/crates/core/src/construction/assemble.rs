use std::collections::{BTreeMap, BTreeSet};

use super::composite::{base_label, build_composite, CompositeModel, StageLink};
use super::plan::{ConstructionPlan, Stage, TorusSpec};
use super::ring::{build_ring_structure, build_torus16, extract_torus, RingStructure};
use super::ConstructionError;
use crate::geometry::{face_metrics, trilaterate_detailed, Homothety, Point3};
use crate::octahedron::{
    flex_with_hint, select_index, FlexError, Flexible, OctaLabels, OctahedronSpec, SubType, Tracker, VertexLabel,
};

/// Generator of the octahedra of a construction as functions of the
/// flexion variable of `P_0`.
#[derive(Debug, Clone, PartialEq)]
pub enum Realizer {
    Chain(CompositeModel),
    /// Hexadecahedron `P_0, P_1, P_2` closed by the homothety of `P_0`
    /// about `X_0` with factor `2 - f`.
    Torus16 { p0: OctahedronSpec, f: f64 },
    Ring(RingStructure),
}

impl Realizer {
    pub fn p0(&self) -> &OctahedronSpec {
        match self {
            Realizer::Chain(m) => &m.octahedra[0],
            Realizer::Torus16 { p0, .. } => p0,
            Realizer::Ring(r) => &r.p0,
        }
    }

    /// Labels of every realized octahedron in realization order.
    pub fn octa_labels(&self) -> Vec<OctaLabels> {
        match self {
            Realizer::Chain(m) => m.octahedra.iter().map(|p| p.labels).collect(),
            Realizer::Torus16 { .. } => {
                let mut l: Vec<OctaLabels> = (0..3).map(OctaLabels::at_level).collect();
                let mut last = OctaLabels::at_level(3);
                last.apex = [VertexLabel::x(0), VertexLabel::x(3)];
                l.push(last);
                l
            }
            Realizer::Ring(r) => r.octa_labels(),
        }
    }

    /// Length scale of the construction.
    pub fn scale(&self) -> f64 {
        match self {
            Realizer::Chain(m) => m.scale(),
            Realizer::Torus16 { p0, f } => p0.longest_edge() * (2.0 - f),
            Realizer::Ring(r) => r.scale(),
        }
    }

    /// Points of every octahedron (apex 0, apex 1, base 0..4) and the
    /// largest consistency residual.
    pub fn realize_octahedra(&self, phi: f64, hint: Option<&[Point3]>) -> Result<(Vec<[Point3; 6]>, f64), FlexError> {
        let p0 = flex_with_hint(self.p0(), phi, hint.map(|h| &h[..6]))?;
        let pts0 = p0.points;
        match self {
            Realizer::Chain(m) => {
                let scale = m.scale();
                let mut out = vec![pts0];
                let mut residual = p0.residual;
                for (i, link) in m.links.iter().enumerate() {
                    let prev = out[i];
                    let xi = prev[1];
                    let spec = &m.octahedra[i + 1];
                    let next = match *link {
                        StageLink::Homothety { factor } => {
                            let h = Homothety::new(xi, factor).map_err(|e| FlexError::Degenerate(e.to_string()))?;
                            [xi, h.apply(prev[0]), h.apply(prev[2]), h.apply(prev[3]), h.apply(prev[4]), h.apply(prev[5])]
                        }
                        StageLink::Rays { ratios, merged } => {
                            let base = [0, 1, 2, 3].map(|j| if merged[j] { prev[2 + j] } else { xi + (prev[2 + j] - xi) * ratios[j] });
                            let d = spec.lateral[1];
                            let mut cands = Vec::with_capacity(2);
                            let mut worst_disc = f64::NAN;
                            for s in [1i8, -1] {
                                match trilaterate_detailed(base[0], base[1], base[2], [d[0], d[1], d[2]], s) {
                                    Ok(t) => {
                                        let r = ((t.point - base[3]).norm() - d[3]).abs();
                                        cands.push((t.point, r, s));
                                    }
                                    Err(crate::geometry::GeometryError::NoRealIntersection { discriminant }) => worst_disc = discriminant,
                                    Err(e) => return Err(FlexError::Degenerate(e.to_string())),
                                }
                            }
                            if cands.is_empty() {
                                return Err(FlexError::OutOfRange { phi, discriminant: worst_disc });
                            }
                            let h = hint.map(|h| &h[6 * (i + 1) + 1..6 * (i + 1) + 2]);
                            let k = select_index(&cands, |c| c.1, |c| vec![c.2], h, &|c: &(Point3, f64, i8)| vec![c.0], scale)
                                .ok_or_else(|| FlexError::Inconsistent {
                                    phi,
                                    residual: cands.iter().map(|c| c.1).fold(f64::INFINITY, f64::min),
                                })?;
                            residual = residual.max(cands[k].1);
                            [xi, cands[k].0, base[0], base[1], base[2], base[3]]
                        }
                    };
                    out.push(next);
                }
                Ok((out, residual))
            }
            Realizer::Torus16 { f, .. } => {
                let h1 = Homothety::new(pts0[1], *f).map_err(|e| FlexError::Degenerate(e.to_string()))?;
                let p1 = [pts0[1], h1.apply(pts0[0]), h1.apply(pts0[2]), h1.apply(pts0[3]), h1.apply(pts0[4]), h1.apply(pts0[5])];
                let h2 = Homothety::new(p1[1], 1.0 / f).map_err(|e| FlexError::Degenerate(e.to_string()))?;
                let p2 = [p1[1], h2.apply(p1[0]), h2.apply(p1[2]), h2.apply(p1[3]), h2.apply(p1[4]), h2.apply(p1[5])];
                let h3 = Homothety::new(pts0[0], 2.0 - f).map_err(|e| FlexError::Degenerate(e.to_string()))?;
                let p3 = [pts0[0], h3.apply(pts0[1]), h3.apply(pts0[2]), h3.apply(pts0[3]), h3.apply(pts0[4]), h3.apply(pts0[5])];
                Ok((vec![pts0, p1, p2, p3], p0.residual))
            }
            Realizer::Ring(r) => Ok((r.octahedra_points(&pts0), p0.residual)),
        }
    }
}

/// Realized construction at one value of the flexion variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub phi: f64,
    /// Aligned with [`FlexiblePolyhedron::vertices`].
    pub points: Vec<Point3>,
    pub octahedra: Vec<[Point3; 6]>,
    pub residual: f64,
}

/// Closed face complex over vertex labels with a coordinate generator.
#[derive(Debug, Clone, PartialEq)]
pub struct FlexiblePolyhedron {
    pub name: String,
    pub subtype: Option<SubType>,
    pub genus: u32,
    /// Face vertices in label order.
    pub vertices: Vec<VertexLabel>,
    /// Oriented loops of indices into `vertices`.
    pub faces: Vec<Vec<usize>>,
    pub realizer: Realizer,
    pub seed: f64,
    /// Apexes whose caps close a genus-0 chain.
    pub end_caps: Vec<VertexLabel>,
    sources: Vec<(usize, usize)>,
    scale: f64,
}

impl FlexiblePolyhedron {
    pub fn new(
        name: &str,
        subtype: Option<SubType>,
        genus: u32,
        face_labels: &[Vec<VertexLabel>],
        realizer: Realizer,
        seed: f64,
        end_caps: Vec<VertexLabel>,
    ) -> Result<Self, ConstructionError> {
        let vertices: Vec<VertexLabel> = face_labels.iter().flatten().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let index: BTreeMap<VertexLabel, usize> = vertices.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let faces = face_labels.iter().map(|f| f.iter().map(|l| index[l]).collect()).collect();
        let mut first: BTreeMap<VertexLabel, (usize, usize)> = BTreeMap::new();
        for (o, labels) in realizer.octa_labels().iter().enumerate() {
            for (k, l) in labels.ordered().iter().enumerate() {
                first.entry(*l).or_insert((o, k));
            }
        }
        let sources = vertices
            .iter()
            .map(|l| first.get(l).copied().ok_or_else(|| ConstructionError::InvalidPlan(format!("vertex {l} is not realized"))))
            .collect::<Result<Vec<_>, _>>()?;
        let scale = realizer.scale();
        Ok(FlexiblePolyhedron { name: name.into(), subtype, genus, vertices, faces, realizer, seed, end_caps, sources, scale })
    }

    pub fn face_labels(&self) -> Vec<Vec<VertexLabel>> {
        self.faces.iter().map(|f| f.iter().map(|&i| self.vertices[i]).collect()).collect()
    }

    pub fn index_of(&self, label: VertexLabel) -> Option<usize> {
        self.vertices.binary_search(&label).ok()
    }

    /// Undirected edges as sorted index pairs, in sorted order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut set = BTreeSet::new();
        for f in &self.faces {
            for i in 0..f.len() {
                let (a, b) = (f[i], f[(i + 1) % f.len()]);
                set.insert((a.min(b), a.max(b)));
            }
        }
        set.into_iter().collect()
    }

    /// Faces around each vertex, in face order.
    pub fn incident_faces(&self, v: usize) -> Vec<usize> {
        (0..self.faces.len()).filter(|&f| self.faces[f].contains(&v)).collect()
    }

    pub fn realize(&self, phi: f64, hint: Option<&[Point3]>) -> Result<Realization, FlexError> {
        let (octahedra, residual) = self.realizer.realize_octahedra(phi, hint)?;
        let points = self.sources.iter().map(|&(o, k)| octahedra[o][k]).collect();
        Ok(Realization { phi, points, octahedra, residual })
    }

    pub fn coords(&self, r: &Realization) -> BTreeMap<VertexLabel, Point3> {
        self.vertices.iter().copied().zip(r.points.iter().copied()).collect()
    }

    /// Longest edge over all octahedra of the construction.
    pub fn length_scale(&self) -> f64 {
        self.scale
    }
}

impl Flexible for FlexiblePolyhedron {
    type State = Realization;
    fn realize(&self, phi: f64, hint: Option<&[Point3]>) -> Result<Realization, FlexError> {
        FlexiblePolyhedron::realize(self, phi, hint)
    }
    fn tracked_points(state: &Realization) -> Vec<Point3> {
        state.octahedra.iter().flatten().copied().collect()
    }
    fn residual(state: &Realization) -> f64 {
        state.residual
    }
    fn scale(&self) -> f64 {
        self.scale
    }
    fn seed(&self) -> f64 {
        self.seed
    }
}

/// Coordinates of every face vertex at `phi`, on the branch continuous
/// with the seed configuration.
pub fn propagate_flex(poly: &FlexiblePolyhedron, phi: f64) -> Result<BTreeMap<VertexLabel, Point3>, FlexError> {
    let mut tr = Tracker::start(poly, poly.seed).map_err(|_| FlexError::SeedInvalid { phi: poly.seed })?;
    tr.advance_to(phi)?;
    Ok(poly.coords(&tr.state))
}

/// Drops repeated consecutive labels; `None` if fewer than three remain.
fn collapse(face: Vec<VertexLabel>) -> Option<Vec<VertexLabel>> {
    let mut out: Vec<VertexLabel> = Vec::with_capacity(face.len());
    for l in face {
        if out.last() != Some(&l) {
            out.push(l);
        }
    }
    while out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    (out.len() >= 3).then_some(out)
}

/// Cap at `X_0`, one band per extension stage and the cap at `X_n`.
pub fn assemble_genus0(plan: &ConstructionPlan) -> Result<FlexiblePolyhedron, ConstructionError> {
    plan.validate()?;
    if !matches!(plan.stages.last(), Some(Stage::Close)) {
        return Err(ConstructionError::InvalidPlan("genus-0 plans end with a closing cap".into()));
    }
    let model = build_composite(plan)?;
    let n = model.octahedra.len();
    let b = |i: usize, j: usize| base_label(&model, i, j % 4);
    let mut faces = Vec::with_capacity(4 * (n + 1));
    let x0 = model.octahedra[0].labels.apex[0];
    let xn = model.octahedra[n - 1].labels.apex[1];
    for s in 0..4 {
        faces.push(vec![b(0, s), x0, b(0, s + 1)]);
    }
    for i in 1..n {
        for s in 0..4 {
            faces.push(vec![b(i - 1, s), b(i - 1, s + 1), b(i, s + 1), b(i, s)]);
        }
    }
    for s in 0..4 {
        faces.push(vec![b(n - 1, s + 1), xn, b(n - 1, s)]);
    }
    let faces: Vec<Vec<VertexLabel>> = faces.into_iter().filter_map(collapse).collect();
    let poly = FlexiblePolyhedron::new(&plan.name, Some(plan.subtype), 0, &faces, Realizer::Chain(model), plan.phi_seed, vec![x0, xn])?;
    check_faces_at_seed(&poly)?;
    Ok(poly)
}

/// Every face spans a nondegenerate polygon at the seed.
pub(crate) fn check_faces_at_seed(poly: &FlexiblePolyhedron) -> Result<(), ConstructionError> {
    let r = poly.realize(poly.seed, None).map_err(|_| FlexError::SeedInvalid { phi: poly.seed })?;
    if r.residual > crate::octahedron::FLEX_TOLERANCE * poly.length_scale() {
        return Err(FlexError::SeedInvalid { phi: poly.seed }.into());
    }
    let tol = 1e-9 * poly.length_scale();
    for (k, f) in poly.faces.iter().enumerate() {
        let pts: Vec<Point3> = f.iter().map(|&i| r.points[i]).collect();
        let labels: Vec<String> = f.iter().map(|&i| poly.vertices[i].to_string()).collect();
        let area = face_metrics(&pts).map(|m| m.area).unwrap_or(0.0);
        if area <= tol * tol {
            return Err(ConstructionError::DegenerateFace(format!("face {k} ({}) has area {area:e}", labels.join(" "))));
        }
    }
    Ok(())
}

impl FlexiblePolyhedron {
    /// A single octahedron as a closed polyhedron with eight faces.
    pub fn from_octahedron(name: &str, spec: OctahedronSpec, seed: f64) -> Result<Self, ConstructionError> {
        let (x0, x1) = (spec.labels.apex[0], spec.labels.apex[1]);
        let b = spec.labels.base;
        let mut faces = vec![];
        for s in 0..4 {
            faces.push(vec![b[s], x0, b[(s + 1) % 4]]);
        }
        for s in 0..4 {
            faces.push(vec![b[(s + 1) % 4], x1, b[s]]);
        }
        let subtype = spec.subtype;
        FlexiblePolyhedron::new(name, subtype, 0, &faces, Realizer::Chain(CompositeModel::new(spec, None)), seed, vec![x0, x1])
    }
}

/// Builds the polyhedron described by a plan.
pub fn assemble(plan: &ConstructionPlan) -> Result<FlexiblePolyhedron, ConstructionError> {
    plan.validate()?;
    match &plan.torus {
        None => assemble_genus0(plan),
        Some(TorusSpec::Sixteen { f }) => build_torus16(&plan.name, &plan.cap, *f, plan.phi_seed),
        Some(TorusSpec::Ring { m, n, scales, selection }) => {
            let structure = build_ring_structure(&plan.cap, *m, *n, scales, plan.phi_seed)?;
            extract_torus(&plan.name, &structure, selection)
        }
    }
}
