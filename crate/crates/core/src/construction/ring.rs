use super::assemble::{check_faces_at_seed, FlexiblePolyhedron, Realizer};
use super::plan::{RingBand, RingPair};
use super::ConstructionError;
use crate::geometry::Point3;
use crate::octahedron::{complete_spec, flexion_range, track_grid, CapParams, OctaLabels, OctahedronSpec, SubType, VertexLabel};

/// Bound, relative to the structure scale, on the disagreement between the
/// two constructions of a ring vertex.
pub const RING_TOLERANCE: f64 = 1e-8;

/// Octahedron spanning the bottom apex of copy `j` and the top apex of
/// copy `k`; it is `P_0` scaled by `span` about that bottom apex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingOctahedron {
    pub pair: RingPair,
    pub span: f64,
}

/// Quad in sector `sector` between two octahedra sharing an apex; indices
/// into [`RingStructure::octahedra`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct RingQuad {
    pub from: usize,
    pub to: usize,
    pub sector: usize,
}

/// Copies of a type-I octahedron translated along its axis of motion and
/// every homothetic octahedron between their apexes.
#[derive(Debug, Clone, PartialEq)]
pub struct RingStructure {
    pub p0: OctahedronSpec,
    pub m: usize,
    pub n: usize,
    /// `f_1 = 1, f_2, .., f_M`.
    pub scales: Vec<f64>,
    /// Offsets of the copies along `X_1 - X_0`: `f_k - 1`.
    pub offsets: Vec<f64>,
    pub octahedra: Vec<RingOctahedron>,
    pub candidates: Vec<RingQuad>,
    pub seed: f64,
}

impl RingStructure {
    pub fn index_of(&self, pair: RingPair) -> Option<usize> {
        self.octahedra.iter().position(|o| o.pair == pair)
    }

    pub fn octa_labels(&self) -> Vec<OctaLabels> {
        self.octahedra
            .iter()
            .enumerate()
            .map(|(i, o)| OctaLabels {
                apex: [VertexLabel::x(2 * (o.pair.0 as u32 - 1)), VertexLabel::x(2 * (o.pair.1 as u32 - 1) + 1)],
                base: [0, 1, 2, 3].map(|j| VertexLabel::base(j, i as u32)),
            })
            .collect()
    }

    pub fn scale(&self) -> f64 {
        self.p0.longest_edge() * self.octahedra.iter().map(|o| o.span).fold(1.0, f64::max)
    }

    /// Realized octahedra from a realized `P_0`.
    pub fn octahedra_points(&self, p0: &[Point3; 6]) -> Vec<[Point3; 6]> {
        let (x0, x1) = (p0[0], p0[1]);
        let d = x1 - x0;
        self.octahedra
            .iter()
            .map(|o| {
                let bottom = x0 + d * self.offsets[o.pair.0 - 1];
                let top = x0 + d * (self.offsets[o.pair.1 - 1] + 1.0);
                let b = [0, 1, 2, 3].map(|j| bottom + (p0[2 + j] - x0) * o.span);
                [bottom, top, b[0], b[1], b[2], b[3]]
            })
            .collect()
    }

    /// Largest distance between each base vertex placed from its bottom
    /// apex and from its top apex.
    pub fn closure_error(&self, p0: &[Point3; 6]) -> f64 {
        let (x0, x1) = (p0[0], p0[1]);
        let d = x1 - x0;
        let pts = self.octahedra_points(p0);
        let mut worst: f64 = 0.0;
        for (o, p) in self.octahedra.iter().zip(&pts) {
            let top = x0 + d * (self.offsets[o.pair.1 - 1] + 1.0);
            for j in 0..4 {
                let from_top = top + (p0[2 + j] - x1) * o.span;
                worst = worst.max(from_top.distance(p[2 + j]));
            }
        }
        worst
    }

    pub fn quad_labels(&self, q: RingQuad) -> [VertexLabel; 4] {
        let (a, b, s) = (q.from as u32, q.to as u32, q.sector);
        let t = (s + 1) % 4;
        [VertexLabel::base(s, a), VertexLabel::base(t, a), VertexLabel::base(t, b), VertexLabel::base(s, b)]
    }
}

/// Ring structure of `m` copies of a type-I octahedron with scales
/// `f_2 .. f_M` (a leading `f_1 = 1` may be included). Octahedra joining
/// copies more than `n` apart are omitted.
pub fn build_ring_structure(
    cap: &CapParams,
    m: usize,
    n: usize,
    scales: &[f64],
    seed: f64,
) -> Result<RingStructure, ConstructionError> {
    let mismatch = |s: String| Err(ConstructionError::RingMismatch(s));
    if m < 2 || n < 1 {
        return mismatch(format!("need at least two copies and one level, got M = {m}, N = {n}"));
    }
    let scales: Vec<f64> = if scales.len() + 1 == m {
        std::iter::once(1.0).chain(scales.iter().copied()).collect()
    } else if scales.len() == m && scales[0] == 1.0 {
        scales.to_vec()
    } else {
        return mismatch(format!("{} scales do not describe {m} copies", scales.len()));
    };
    if scales.iter().any(|f| !f.is_finite()) || scales.windows(2).any(|w| w[1] <= w[0]) {
        return mismatch(format!("scales {scales:?} must strictly increase, otherwise copies coincide and no levels form"));
    }
    let p0 = complete_spec(SubType::IOee, cap)?;
    let offsets: Vec<f64> = scales.iter().map(|f| f - 1.0).collect();
    let mut octahedra = vec![];
    for j in 1..=m {
        for k in 1..=m {
            let span = offsets[k - 1] + 1.0 - offsets[j - 1];
            if span > RING_TOLERANCE && j.abs_diff(k) <= n {
                octahedra.push(RingOctahedron { pair: (j, k), span });
            }
        }
    }
    let mut candidates = vec![];
    for a in 0..octahedra.len() {
        for b in a + 1..octahedra.len() {
            let (pa, pb) = (octahedra[a].pair, octahedra[b].pair);
            if pa.0 == pb.0 || pa.1 == pb.1 {
                candidates.extend((0..4).map(|sector| RingQuad { from: a, to: b, sector }));
            }
        }
    }
    let structure = RingStructure { p0, m, n, scales, offsets, octahedra, candidates, seed };
    let range = flexion_range(&structure.p0, seed)?;
    let scale = structure.scale();
    for (phi, st) in track_grid(&structure.p0, seed, &range.grid(3))? {
        let err = structure.closure_error(&st.points);
        if err > RING_TOLERANCE * scale {
            return mismatch(format!("vertices disagree by {err:e} at {phi}"));
        }
    }
    Ok(structure)
}

/// Closed torus from a selection of bands; orientation follows the first
/// selected quad.
pub fn extract_torus(name: &str, structure: &RingStructure, selection: &[RingBand]) -> Result<FlexiblePolyhedron, ConstructionError> {
    let not_closed = |s: String| Err(ConstructionError::NotClosed(s));
    if selection.is_empty() {
        return not_closed("empty selection".into());
    }
    let mut quads = vec![];
    for band in selection {
        let (Some(a), Some(b)) = (structure.index_of(band.from), structure.index_of(band.to)) else {
            return not_closed(format!("band {:?} -> {:?} is not in the structure", band.from, band.to));
        };
        let (pa, pb) = (band.from, band.to);
        if a == b || !(pa.0 == pb.0 || pa.1 == pb.1) {
            return not_closed(format!("octahedra {pa:?} and {pb:?} share no apex"));
        }
        let sectors: Vec<usize> = if band.sectors.is_empty() { (0..4).collect() } else { band.sectors.clone() };
        for s in sectors {
            if s >= 4 {
                return not_closed(format!("sector {s} out of range"));
            }
            quads.push(structure.quad_labels(RingQuad { from: a, to: b, sector: s }).to_vec());
        }
    }
    let faces = orient_consistently(quads)?;
    let poly = FlexiblePolyhedron::new(name, Some(SubType::IOee), 1, &faces, Realizer::Ring(structure.clone()), structure.seed, vec![])?;
    let (v, e, f) = (poly.vertices.len() as i64, poly.edges().len() as i64, poly.faces.len() as i64);
    if v - e + f != 0 {
        return not_closed(format!("Euler characteristic {} is not that of a torus", v - e + f));
    }
    check_faces_at_seed(&poly)?;
    Ok(poly)
}

/// Orients faces by propagation across shared edges. Every edge must
/// belong to exactly two faces and all faces must be reachable.
pub(crate) fn orient_consistently(mut faces: Vec<Vec<VertexLabel>>) -> Result<Vec<Vec<VertexLabel>>, ConstructionError> {
    use std::collections::BTreeMap;
    let mut by_edge: BTreeMap<(VertexLabel, VertexLabel), Vec<usize>> = BTreeMap::new();
    for (i, f) in faces.iter().enumerate() {
        for k in 0..f.len() {
            let (a, b) = (f[k], f[(k + 1) % f.len()]);
            by_edge.entry((a.min(b), a.max(b))).or_default().push(i);
        }
    }
    if let Some((e, fs)) = by_edge.iter().find(|(_, fs)| fs.len() != 2) {
        return Err(ConstructionError::NotClosed(format!("edge {}-{} lies on {} faces", e.0, e.1, fs.len())));
    }
    let has_directed = |f: &[VertexLabel], a: VertexLabel, b: VertexLabel| (0..f.len()).any(|k| f[k] == a && f[(k + 1) % f.len()] == b);
    let mut flip: Vec<Option<bool>> = vec![None; faces.len()];
    flip[0] = Some(false);
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let mut fi = faces[i].clone();
        if flip[i] == Some(true) {
            fi.reverse();
        }
        for k in 0..fi.len() {
            let (a, b) = (fi[k], fi[(k + 1) % fi.len()]);
            for &g in &by_edge[&(a.min(b), a.max(b))] {
                if g == i {
                    continue;
                }
                let need = has_directed(&faces[g], a, b);
                match flip[g] {
                    None => {
                        flip[g] = Some(need);
                        queue.push_back(g);
                    }
                    Some(x) if x != need => return Err(ConstructionError::NotClosed("surface is not orientable".into())),
                    _ => {}
                }
            }
        }
    }
    if flip.iter().any(|f| f.is_none()) {
        return Err(ConstructionError::NotClosed("selection is disconnected".into()));
    }
    for (f, fl) in faces.iter_mut().zip(flip) {
        if fl == Some(true) {
            f.reverse();
        }
    }
    Ok(faces)
}

/// Sixteen-quad torus from the hexadecahedron with contraction `f`.
pub fn build_torus16(name: &str, cap: &CapParams, f: f64, seed: f64) -> Result<FlexiblePolyhedron, ConstructionError> {
    if !(f > 0.0 && f < 1.0) {
        return Err(ConstructionError::InvalidPlan(format!("contraction factor {f} outside (0, 1)")));
    }
    let p0 = complete_spec(SubType::IOee, cap)?;
    let b = |s: usize, l: u32| VertexLabel::base(s % 4, l);
    let mut faces = vec![];
    for (u, v) in [(0, 1), (1, 2), (2, 3), (3, 0)] {
        for s in 0..4 {
            faces.push(vec![b(s, u), b(s + 1, u), b(s + 1, v), b(s, v)]);
        }
    }
    let poly = FlexiblePolyhedron::new(name, Some(SubType::IOee), 1, &faces, Realizer::Torus16 { p0, f }, seed, vec![])?;
    check_faces_at_seed(&poly)?;
    Ok(poly)
}
