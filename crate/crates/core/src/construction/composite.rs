use super::plan::{ConstructionPlan, EdgeExtensions, ScaleSpec, Stage};
use super::ConstructionError;
use crate::octahedron::{
    complete_spec, complete_spec_labeled, solve_type_three, type_three_vertex_types, CapParams, ClosureVariant,
    OasAssignment, OctaLabels, OctahedronSpec, SubType, TypeThreeInput, VertexLabel,
};

/// Extensions shorter than this, relative to the longest edge, merge the
/// new base vertex into the previous one.
pub const MERGE_TOLERANCE: f64 = 1e-9;

/// How `P_i` is placed relative to `P_{i-1}` around the shared apex `X_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StageLink {
    /// `P_i` is the image of `P_{i-1}` under the homothety about `X_i`.
    Homothety { factor: f64 },
    /// `base_j(i) = X_i + ratios[j] (base_j(i-1) - X_i)`; the new apex is
    /// found by trilateration.
    Rays { ratios: [f64; 4], merged: [bool; 4] },
}

/// Chain of octahedra `P_0 .. P_{n-1}` where `P_i` has apexes `X_i` and
/// `X_{i+1}` and shares the cap at `X_i` with `P_{i-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeModel {
    /// `None` for an unclassified single octahedron.
    pub subtype: Option<SubType>,
    pub variant: Option<ClosureVariant>,
    pub octahedra: Vec<OctahedronSpec>,
    /// `links[i - 1]` produces `octahedra[i]`.
    pub links: Vec<StageLink>,
}

impl CompositeModel {
    pub fn new(p0: OctahedronSpec, variant: Option<ClosureVariant>) -> Self {
        CompositeModel { subtype: p0.subtype, variant, octahedra: vec![p0], links: vec![] }
    }

    fn classified(&self) -> Result<SubType, ConstructionError> {
        self.subtype.ok_or_else(|| ConstructionError::InvalidStage {
            stage: self.octahedra.len(),
            reason: "an unclassified octahedron cannot be extended".into(),
        })
    }

    pub fn last(&self) -> &OctahedronSpec {
        self.octahedra.last().expect("nonempty chain")
    }

    /// Longest edge over all octahedra.
    pub fn scale(&self) -> f64 {
        self.octahedra.iter().map(|p| p.longest_edge()).fold(0.0, f64::max)
    }

    fn push(mut self, p: OctahedronSpec, link: StageLink) -> Self {
        self.octahedra.push(p);
        self.links.push(link);
        self
    }

    fn next_level(&self) -> u32 {
        self.octahedra.len() as u32
    }

    /// Labels of `P_i` with zero-extension vertices merged into `P_{i-1}`.
    fn next_labels(&self, merged: [bool; 4]) -> OctaLabels {
        let i = self.next_level();
        let prev = self.last();
        let mut labels = OctaLabels::at_level(i);
        for j in 0..4 {
            if merged[j] {
                labels.base[j] = prev.labels.base[j];
            }
        }
        labels
    }
}

/// Appends the homothety image of the last octahedron about its far apex.
pub fn extend_scale(model: CompositeModel, spec: ScaleSpec) -> Result<CompositeModel, ConstructionError> {
    let stage = model.octahedra.len();
    let s = spec.resolve(model.last().lateral[1][0]);
    if !(s.is_finite() && s > 0.0 && s != 1.0) {
        return Err(ConstructionError::InvalidStage {
            stage,
            reason: format!("scale factor {s} must be positive and differ from 1"),
        });
    }
    Ok(extend_scale_unchecked(model, s))
}

/// [`extend_scale`] without the `s != 1` guard.
pub fn extend_scale_unchecked(model: CompositeModel, s: f64) -> CompositeModel {
    assert!(s > 0.0, "homothety factor must be positive");
    let mut p = model.last().swap_apexes().scaled(s);
    p.labels = OctaLabels::at_level(model.next_level());
    model.push(p, StageLink::Homothety { factor: s })
}

fn zero_allowance(subtype: SubType) -> usize {
    match subtype {
        SubType::IOee | SubType::IiAee => 1,
        SubType::IiOee => 0,
        SubType::IiiOae => 3,
        SubType::IiiOas => 2,
    }
}

/// Ratios and merge flags from new and previous lateral lengths at `X_i`.
fn rays_link(
    prev: &OctahedronSpec,
    lateral: [f64; 4],
    scale: f64,
    subtype: SubType,
    stage: usize,
) -> Result<StageLink, ConstructionError> {
    let tol = MERGE_TOLERANCE * scale;
    let merged = [0, 1, 2, 3].map(|j| (lateral[j] - prev.lateral[1][j]).abs() <= tol);
    let zeros = merged.iter().filter(|&&m| m).count();
    let allowed = zero_allowance(subtype);
    if zeros > allowed {
        return Err(ConstructionError::ZeroRuleViolation { stage, zeros, allowed });
    }
    let ratios = [0, 1, 2, 3].map(|j| if merged[j] { 1.0 } else { lateral[j] / prev.lateral[1][j] });
    Ok(StageLink::Rays { ratios, merged })
}

/// Appends an octahedron whose cap at `X_i` extends the base rays of the
/// last octahedron by the given lengths, the rest solved so that the new
/// octahedron is a Bricard octahedron of the same sub-type.
pub fn extend_edges(model: CompositeModel, ext: &EdgeExtensions) -> Result<CompositeModel, ConstructionError> {
    let stage = model.octahedra.len();
    let prev = model.last().clone();
    let scale = model.scale();
    let known = ext.lengths.iter().filter(|l| l.is_some()).count();
    let given = [0, 1, 2, 3].map(|j| ext.lengths[j].map(|e| prev.lateral[1][j] + e));
    let invalid = |reason: String| ConstructionError::InvalidStage { stage, reason };
    let subtype = model.classified()?;
    match subtype {
        SubType::IiOee => Err(invalid("II-OEE stages respecify the cap instead".into())),
        SubType::IOee | SubType::IiAee => {
            let alpha = prev.face_angles.at_apex[1];
            let pairs = equal_base_pairs(subtype);
            let lateral = match known {
                4 => {
                    let l = given.map(|g| g.expect("four given"));
                    let b = bases(&l, &alpha);
                    for (p, q) in pairs {
                        if (b[p] - b[q]).abs() > 1e-9 * scale {
                            return Err(invalid(format!(
                                "extensions give base edges {} and {} that should be equal",
                                b[p], b[q]
                            )));
                        }
                    }
                    l
                }
                2 => {
                    let mut sols = solve_two_laterals(&alpha, &given, &pairs, prev.lateral[1]);
                    let target = {
                        let r: Vec<f64> = (0..4).filter_map(|j| given[j].map(|g| g / prev.lateral[1][j])).collect();
                        r.iter().sum::<f64>() / r.len() as f64
                    };
                    let cost = |l: &[f64; 4]| -> f64 {
                        (0..4).filter(|&j| given[j].is_none()).map(|j| (l[j] / prev.lateral[1][j] - target).abs()).sum()
                    };
                    sols.sort_by(|a, b| cost(a).total_cmp(&cost(b)));
                    let idx = ext.root.unwrap_or(0);
                    if sols.is_empty() {
                        return Err(ConstructionError::NoRealRoot {
                            stage,
                            reason: "the law-of-cosines system has no positive solution".into(),
                        });
                    }
                    *sols.get(idx).ok_or_else(|| invalid(format!("solution {idx} requested, {} found", sols.len())))?
                }
                n => return Err(invalid(format!("{subtype} stages take two or four extensions, got {n}"))),
            };
            let link = rays_link(&prev, lateral, scale, subtype, stage)?;
            let merged = match link {
                StageLink::Rays { merged, .. } => merged,
                _ => unreachable!(),
            };
            let b = bases(&lateral, &alpha);
            let base = match subtype {
                SubType::IOee => [b[0], b[1]],
                _ => [b[0], b[2]],
            };
            let labels = model.next_labels(merged);
            let p = complete_spec_labeled(subtype, &CapParams::Lengths { lateral, base, apex: None }, labels)
                .map_err(|source| ConstructionError::Stage { stage, source })?;
            Ok(model.push(p, link))
        }
        SubType::IiiOae | SubType::IiiOas => {
            let unknown = match known {
                3 => given.iter().position(|g| g.is_none()).expect("one unknown"),
                4 => 3,
                n => return Err(invalid(format!("type-III stages take three or four extensions, got {n}"))),
            };
            let oas = ext.oas.unwrap_or(OasAssignment::containing(unknown));
            let types = type_three_vertex_types(subtype, oas).expect("type-III sub-type");
            let mut lateral = given;
            lateral[unknown] = None;
            let input = TypeThreeInput {
                apex_angles: prev.face_angles.at_apex[1],
                lateral,
                types,
                variant: model.variant.unwrap_or_default(),
            };
            let roots = solve_type_three(&input).map_err(|e| ConstructionError::NoRealRoot { stage, reason: e.to_string() })?;
            let tol = MERGE_TOLERANCE * scale;
            let acceptable = |l: &[f64; 4]| {
                let trivial = (0..4).all(|j| (l[j] - prev.lateral[1][j]).abs() <= tol);
                let matches = known < 4 || (l[3] - given[3].expect("given")).abs() <= 1e-9 * scale;
                !trivial && matches
            };
            let sol = match ext.root {
                Some(r) => roots
                    .get(r)
                    .ok_or_else(|| invalid(format!("closure root {r} requested, {} admissible", roots.len())))?
                    .clone()
                    .map_err(|source| ConstructionError::Stage { stage, source })?,
                None => {
                    let found = roots.iter().flatten().find(|s| acceptable(&s.lateral[0])).copied();
                    match found {
                        Some(s) => s,
                        None => {
                            let why = roots
                                .iter()
                                .map(|r| match r {
                                    Ok(_) => "reproduces the previous octahedron or misses the given extension".to_string(),
                                    Err(e) => e.to_string(),
                                })
                                .collect::<Vec<_>>()
                                .join("; ");
                            return Err(ConstructionError::NoRealRoot { stage, reason: format!("no usable closure root ({why})") });
                        }
                    }
                }
            };
            if known == 4 && !acceptable(&sol.lateral[0]) {
                return Err(invalid("the chosen root does not reproduce the given extensions".into()));
            }
            let link = rays_link(&prev, sol.lateral[0], scale, subtype, stage)?;
            let merged = match link {
                StageLink::Rays { merged, .. } => merged,
                _ => unreachable!(),
            };
            let labels = model.next_labels(merged);
            let p = sol.to_spec(subtype, labels).map_err(|source| ConstructionError::Stage { stage, source })?;
            Ok(model.push(p, link))
        }
    }
}

/// II-OEE stage: keep `retain` times the cap at `X_i` and choose new apex
/// lengths freely.
pub fn respecify_cap(model: CompositeModel, apex: [f64; 2], retain: f64) -> Result<CompositeModel, ConstructionError> {
    let stage = model.octahedra.len();
    if model.subtype != Some(SubType::IiOee) {
        return Err(ConstructionError::InvalidStage { stage, reason: "cap respecification applies to II-OEE only".into() });
    }
    let prev = model.last().clone();
    let lateral = prev.lateral[1].map(|l| retain * l);
    let base = [retain * prev.base[0], retain * prev.base[1]];
    let link = rays_link(&prev, lateral, model.scale(), SubType::IiOee, stage)?;
    let labels = model.next_labels([false; 4]);
    let p = complete_spec_labeled(SubType::IiOee, &CapParams::Lengths { lateral, base, apex: Some(apex) }, labels)
        .map_err(|source| ConstructionError::Stage { stage, source })?;
    Ok(model.push(p, link))
}

/// Base pairs that must be equal for the sub-type.
fn equal_base_pairs(subtype: SubType) -> [(usize, usize); 2] {
    match subtype {
        SubType::IOee | SubType::IiOee => [(0, 2), (1, 3)],
        _ => [(0, 1), (2, 3)],
    }
}

fn bases(l: &[f64; 4], alpha: &[f64; 4]) -> [f64; 4] {
    [0, 1, 2, 3].map(|s| base_sq(l, alpha, s).max(0.0).sqrt())
}

fn base_sq(l: &[f64; 4], alpha: &[f64; 4], s: usize) -> f64 {
    let (p, q) = (l[s], l[(s + 1) % 4]);
    p * p + q * q - 2.0 * p * q * alpha[s].cos()
}

/// All positive solutions for the two unknown laterals such that the base
/// pairs are equal. Known entries are fixed; `reference` sets the search
/// scale.
fn solve_two_laterals(
    alpha: &[f64; 4],
    given: &[Option<f64>; 4],
    pairs: &[(usize, usize); 2],
    reference: [f64; 4],
) -> Vec<[f64; 4]> {
    let unknown: Vec<usize> = (0..4).filter(|&j| given[j].is_none()).collect();
    let (iu, iw) = (unknown[0], unknown[1]);
    let lat = |u: f64, w: f64| {
        let mut l = given.map(|g| g.unwrap_or(0.0));
        l[iu] = u;
        l[iw] = w;
        l
    };
    let constraint = |k: usize, l: &[f64; 4]| base_sq(l, alpha, pairs[k].0) - base_sq(l, alpha, pairs[k].1);
    // quadratic coefficients in w at fixed u
    let coeffs = |k: usize, u: f64| {
        let f0 = constraint(k, &lat(u, 0.0));
        let fp = constraint(k, &lat(u, 1.0));
        let fm = constraint(k, &lat(u, -1.0));
        (0.5 * (fp + fm) - f0, 0.5 * (fp - fm), f0)
    };
    let lead = |k: usize| coeffs(k, 1.0).0.abs();
    let (e1, e2) = if lead(0) >= lead(1) { (0, 1) } else { (1, 0) };
    let (a_lead, b_lead, _) = coeffs(e1, 1.0);
    if a_lead.abs() < 1e-12 && b_lead.abs() < 1e-12 && coeffs(e1, 2.0).1.abs() < 1e-12 {
        return vec![];
    }
    let w_of = |u: f64, branch: usize| -> Option<f64> {
        let (a, b, c) = coeffs(e1, u);
        let w = if a.abs() <= 1e-12 * (b.abs() + c.abs()).max(1e-300) {
            if branch == 1 || b == 0.0 {
                return None;
            }
            -c / b
        } else {
            let disc = b * b - 4.0 * a * c;
            if disc < 0.0 {
                return None;
            }
            let sq = disc.sqrt();
            let sgn = if branch == 0 { 1.0 } else { -1.0 };
            (-b + sgn * sq) / (2.0 * a)
        };
        (w > 0.0 && w.is_finite()).then_some(w)
    };
    let g = |u: f64, branch: usize| w_of(u, branch).map(|w| (constraint(e2, &lat(u, w)), w));
    let lref = reference.iter().fold(0.0f64, |m, &x| m.max(x));
    let (lo, hi) = (1e-3 * lref, 1e3 * lref);
    let samples = 6000;
    let us: Vec<f64> = (0..=samples).map(|i| lo * (hi / lo).powf(i as f64 / samples as f64)).collect();
    let mut out: Vec<[f64; 4]> = vec![];
    for branch in 0..2 {
        let mut prev: Option<(f64, f64)> = None;
        for &u in &us {
            let cur = g(u, branch).map(|(v, _)| (u, v));
            if let (Some((u0, v0)), Some((u1, v1))) = (prev, cur) {
                if v0 == 0.0 || v0.signum() != v1.signum() {
                    let (mut a, mut b, mut va) = (u0, u1, v0);
                    for _ in 0..200 {
                        let mid = 0.5 * (a + b);
                        if mid == a || mid == b {
                            break;
                        }
                        match g(mid, branch) {
                            Some((vm, _)) if vm.signum() == va.signum() && vm != 0.0 => {
                                a = mid;
                                va = vm;
                            }
                            Some(_) => b = mid,
                            None => break,
                        }
                    }
                    let u = 0.5 * (a + b);
                    if let Some((v, w)) = g(u, branch) {
                        let l = lat(u, w);
                        let size = base_sq(&l, alpha, pairs[e2].0).abs().max(1e-300);
                        if v.abs() <= 1e-9 * size && !out.iter().any(|o| (0..4).all(|j| (o[j] - l[j]).abs() <= 1e-9 * lref)) {
                            out.push(l);
                        }
                    }
                }
            }
            prev = cur;
        }
    }
    out
}

/// Executes every non-closing stage of a plan.
pub fn build_composite(plan: &ConstructionPlan) -> Result<CompositeModel, ConstructionError> {
    plan.validate()?;
    let p0 = complete_spec(plan.subtype, &plan.cap)?;
    let variant = match plan.cap {
        CapParams::Angles(c) => Some(c.variant),
        _ => None,
    };
    let mut model = CompositeModel::new(p0, variant);
    for st in &plan.stages {
        model = match st {
            Stage::Scale(spec) => extend_scale(model, *spec)?,
            Stage::Edges(ext) => extend_edges(model, ext)?,
            Stage::RespecifyCap { apex, retain } => respecify_cap(model, *apex, *retain)?,
            Stage::Close | Stage::TorusClose => break,
        };
    }
    Ok(model)
}

/// Label of base vertex `j` of octahedron `i` after merges.
pub(crate) fn base_label(model: &CompositeModel, i: usize, j: usize) -> VertexLabel {
    model.octahedra[i].labels.base[j]
}
