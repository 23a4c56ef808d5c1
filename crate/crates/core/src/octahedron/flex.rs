use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::labels::VertexLabel;
use super::spec::OctahedronSpec;
use super::FlexError;
use crate::geometry::{trilaterate_detailed, GeometryError, Point3};

/// Residual bound, relative to the longest edge, for calling a state flexible.
pub const FLEX_TOLERANCE: f64 = 1e-9;
/// Residual bound, relative to the longest edge, above which no state is returned.
pub const INCONSISTENT_TOLERANCE: f64 = 1e-6;
/// Largest parameter step used when tracking a branch.
pub const TRACK_STEP: f64 = TAU / 2048.0;

/// Realized octahedron at one value of the flexion variable.
#[derive(Debug, Clone, PartialEq)]
pub struct FlexState {
    pub phi: f64,
    /// Points in order apex 0, apex 1, base 0..4.
    pub points: [Point3; 6],
    pub labels: [VertexLabel; 6],
    /// `| |X1 - D0| - spec |`.
    pub residual: f64,
    /// Branches used to place `C0` and `X1`.
    pub branch_signs: [i8; 2],
    /// Discriminants of the two trilaterations before clamping.
    pub discriminants: [f64; 2],
}

impl FlexState {
    pub fn coords(&self) -> BTreeMap<VertexLabel, Point3> {
        self.labels.iter().copied().zip(self.points.iter().copied()).collect()
    }
}

/// Candidate realization for one branch pair.
#[derive(Debug, Clone, Copy)]
struct Candidate {
    points: [Point3; 6],
    residual: f64,
    signs: [i8; 2],
    disc: [f64; 2],
}

fn candidates(spec: &OctahedronSpec, phi: f64) -> Result<Vec<Candidate>, FlexError> {
    let l0 = &spec.lateral[0];
    let l1 = &spec.lateral[1];
    let fa = &spec.face_angles;
    let x0 = Point3::ORIGIN;
    let a0 = Point3::new(0.0, 0.0, l0[0]);
    let (sb, cb) = fa.at_apex[0][0].sin_cos();
    let b0 = Point3::new(l0[1] * sb, 0.0, l0[1] * cb);
    let (sd, cd) = fa.at_apex[0][3].sin_cos();
    let (sp, cp) = phi.sin_cos();
    let d0 = Point3::new(l0[3] * sd * cp, l0[3] * sd * sp, l0[3] * cd);
    let mut out = Vec::with_capacity(4);
    let mut last_err = None;
    for s1 in [1i8, -1] {
        let c = match trilaterate_detailed(x0, b0, d0, [l0[2], spec.base[1], spec.base[2]], s1) {
            Ok(t) => t,
            Err(e) => {
                last_err = Some(e);
                continue;
            }
        };
        for s2 in [1i8, -1] {
            let y = match trilaterate_detailed(a0, b0, c.point, [l1[0], l1[1], l1[2]], s2) {
                Ok(t) => t,
                Err(e) => {
                    last_err = Some(e);
                    continue;
                }
            };
            let residual = ((y.point - d0).norm() - l1[3]).abs();
            out.push(Candidate {
                points: [x0, y.point, a0, b0, c.point, d0],
                residual,
                signs: [s1, s2],
                disc: [c.discriminant, y.discriminant],
            });
        }
    }
    if out.is_empty() {
        return Err(match last_err {
            Some(GeometryError::NoRealIntersection { discriminant }) => FlexError::OutOfRange { phi, discriminant },
            _ => FlexError::OutOfRange { phi, discriminant: f64::NAN },
        });
    }
    Ok(out)
}

/// Sum of vertex displacements between two point lists.
pub(crate) fn displacement(a: &[Point3], b: &[Point3]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p.distance(*q)).sum()
}

/// Picks a candidate index: with a hint, the closest among the best
/// residual tier; otherwise the smallest residual with ties resolved
/// toward positive branch signs.
fn select<T, F>(cands: &[T], residual: F, signs: impl Fn(&T) -> Vec<i8>, hint: Option<(&[Point3], &dyn Fn(&T) -> Vec<Point3>)>, scale: f64) -> Option<usize>
where
    F: Fn(&T) -> f64,
{
    let flex_tol = FLEX_TOLERANCE * scale;
    let hard_tol = INCONSISTENT_TOLERANCE * scale;
    let tier: Vec<usize> = {
        let good: Vec<usize> = (0..cands.len()).filter(|&i| residual(&cands[i]) <= flex_tol).collect();
        if !good.is_empty() {
            good
        } else {
            (0..cands.len()).filter(|&i| residual(&cands[i]) <= hard_tol).collect()
        }
    };
    if tier.is_empty() {
        return None;
    }
    if let Some((h, pts)) = hint {
        return tier.into_iter().min_by(|&i, &j| {
            let di = displacement(&pts(&cands[i]), h);
            let dj = displacement(&pts(&cands[j]), h);
            di.partial_cmp(&dj).unwrap_or(std::cmp::Ordering::Equal)
        });
    }
    let best = tier.iter().map(|&i| residual(&cands[i])).fold(f64::INFINITY, f64::min);
    let tie = 1e-12 * scale;
    tier.into_iter()
        .filter(|&i| residual(&cands[i]) <= best + tie)
        .max_by_key(|&i| {
            let s = signs(&cands[i]);
            // later trilaterations dominate the preference
            s.iter().rev().fold(0i64, |acc, &x| acc * 2 + i64::from(x > 0))
        })
}

pub(crate) fn select_index<T>(
    cands: &[T],
    residual: impl Fn(&T) -> f64,
    signs: impl Fn(&T) -> Vec<i8>,
    hint: Option<&[Point3]>,
    points: &dyn Fn(&T) -> Vec<Point3>,
    scale: f64,
) -> Option<usize> {
    select(cands, residual, signs, hint.map(|h| (h, points)), scale)
}

/// Realizes `spec` at `phi`. `hint` is a predicted point list in point
/// order used for branch continuity.
pub fn flex_with_hint(spec: &OctahedronSpec, phi: f64, hint: Option<&[Point3]>) -> Result<FlexState, FlexError> {
    if !phi.is_finite() {
        return Err(FlexError::InvalidPhi(phi));
    }
    let cands = candidates(spec, phi)?;
    let scale = spec.longest_edge();
    let idx = select_index(
        &cands,
        |c| c.residual,
        |c| c.signs.to_vec(),
        hint,
        &|c: &Candidate| c.points.to_vec(),
        scale,
    )
    .ok_or_else(|| FlexError::Inconsistent {
        phi,
        residual: cands.iter().map(|c| c.residual).fold(f64::INFINITY, f64::min),
    })?;
    let c = cands[idx];
    Ok(FlexState {
        phi,
        points: c.points,
        labels: spec.labels.ordered(),
        residual: c.residual,
        branch_signs: c.signs,
        discriminants: c.disc,
    })
}

/// Flexion variable of realized points (apex0, apex1, base0..3): the
/// dihedral at `X0 A0` from `B0` to `D0`.
pub fn flexion_variable(pts: &[Point3; 6]) -> Result<f64, crate::geometry::GeometryError> {
    crate::geometry::dihedral_angle(pts[0], pts[2], pts[3], pts[5])
}

/// Realizes `spec` at `phi`; `previous` selects the continuous branch.
pub fn flex(spec: &OctahedronSpec, phi: f64, previous: Option<&FlexState>) -> Result<FlexState, FlexError> {
    flex_with_hint(spec, phi, previous.map(|p| &p.points[..]))
}

/// Interval of the flexion variable around a seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlexionInterval {
    pub lo: f64,
    pub hi: f64,
    pub samples_validated: usize,
    /// The motion closes up over a full turn; `[lo, hi]` spans one period.
    pub periodic: bool,
}

impl FlexionInterval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, phi: f64) -> bool {
        phi >= self.lo && phi <= self.hi
    }

    /// `n` evenly spaced samples covering the closed interval.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        match n {
            0 => vec![],
            1 => vec![0.5 * (self.lo + self.hi)],
            _ => (0..n).map(|i| self.lo + self.width() * i as f64 / (n - 1) as f64).collect(),
        }
    }
}

/// Anything realizable as a function of the flexion variable.
pub trait Flexible {
    type State: Clone;
    fn realize(&self, phi: f64, hint: Option<&[Point3]>) -> Result<Self::State, FlexError>;
    fn tracked_points(state: &Self::State) -> Vec<Point3>;
    fn residual(state: &Self::State) -> f64;
    /// Length scale for tolerances.
    fn scale(&self) -> f64;
    fn seed(&self) -> f64;
}

impl Flexible for OctahedronSpec {
    type State = FlexState;
    fn realize(&self, phi: f64, hint: Option<&[Point3]>) -> Result<FlexState, FlexError> {
        flex_with_hint(self, phi, hint)
    }
    fn tracked_points(state: &FlexState) -> Vec<Point3> {
        state.points.to_vec()
    }
    fn residual(state: &FlexState) -> f64 {
        state.residual
    }
    fn scale(&self) -> f64 {
        self.longest_edge()
    }
    fn seed(&self) -> f64 {
        PI / 2.0
    }
}

fn extrapolate(prev: &[Point3], last: &[Point3], t: f64) -> Vec<Point3> {
    last.iter().zip(prev).map(|(l, p)| *l + (*l - *p) * t).collect()
}

/// Branch tracker advancing in small steps with linear prediction.
pub struct Tracker<'a, M: Flexible> {
    model: &'a M,
    phis: [f64; 2],
    pts: [Vec<Point3>; 2],
    count: usize,
    pub state: M::State,
    pub phi: f64,
    tol: f64,
}

impl<'a, M: Flexible> Tracker<'a, M> {
    /// Starts at `phi` with no branch history.
    pub fn start(model: &'a M, phi: f64) -> Result<Self, FlexError> {
        let state = model.realize(phi, None)?;
        let tol = FLEX_TOLERANCE * model.scale();
        if M::residual(&state) > tol {
            return Err(FlexError::Inconsistent { phi, residual: M::residual(&state) });
        }
        let p = M::tracked_points(&state);
        Ok(Tracker { model, phis: [phi, phi], pts: [p.clone(), p], count: 1, state, phi, tol })
    }

    /// Continues from realized states at `earlier` (optional) and `phi`.
    pub fn resume(model: &'a M, earlier: Option<(f64, &M::State)>, phi: f64, state: M::State) -> Self {
        let tol = FLEX_TOLERANCE * model.scale();
        let p = M::tracked_points(&state);
        match earlier {
            Some((q, s)) if q != phi => {
                Tracker { model, phis: [q, phi], pts: [M::tracked_points(s), p], count: 2, state, phi, tol }
            }
            _ => Tracker { model, phis: [phi, phi], pts: [p.clone(), p], count: 1, state, phi, tol },
        }
    }

    fn predict(&self, phi: f64) -> Vec<Point3> {
        if self.count < 2 || self.phis[1] == self.phis[0] {
            return self.pts[1].clone();
        }
        let t = (phi - self.phis[1]) / (self.phis[1] - self.phis[0]);
        extrapolate(&self.pts[0], &self.pts[1], t)
    }

    /// Tries a single step to `phi` without committing it.
    pub fn probe(&self, phi: f64) -> Result<M::State, FlexError> {
        let hint = self.predict(phi);
        let s = self.model.realize(phi, Some(&hint))?;
        let r = M::residual(&s);
        if r > self.tol {
            return Err(FlexError::Inconsistent { phi, residual: r });
        }
        // reject jumps to a different assembly mode
        let jump = displacement(&M::tracked_points(&s), &hint) / hint.len().max(1) as f64;
        if jump > 0.25 * self.model.scale() {
            return Err(FlexError::Inconsistent { phi, residual: r });
        }
        Ok(s)
    }

    pub fn commit(&mut self, phi: f64, state: M::State) {
        self.phis = [self.phis[1], phi];
        self.pts = [std::mem::take(&mut self.pts[1]), M::tracked_points(&state)];
        self.count += 1;
        self.state = state;
        self.phi = phi;
    }

    /// Advances to `target` in steps of at most [`TRACK_STEP`].
    pub fn advance_to(&mut self, target: f64) -> Result<(), FlexError> {
        while (target - self.phi).abs() > 0.0 {
            let step = (target - self.phi).clamp(-TRACK_STEP, TRACK_STEP);
            let next = if (target - self.phi).abs() <= TRACK_STEP { target } else { self.phi + step };
            let s = self.probe(next)?;
            self.commit(next, s);
        }
        Ok(())
    }
}

/// Maximal interval around `seed` on which the tracked branch realizes
/// with residual within tolerance. Endpoints are bisected to 1e-12 rad.
pub fn flexion_range<M: Flexible>(model: &M, seed: f64) -> Result<FlexionInterval, FlexError> {
    let start = Tracker::start(model, seed).map_err(|_| FlexError::SeedInvalid { phi: seed })?;
    let mut validated = 1;
    let mut ends = [seed; 2];
    for (k, dir) in [1.0f64, -1.0].into_iter().enumerate() {
        let mut tr = Tracker { model, phis: start.phis, pts: start.pts.clone(), count: 1, state: start.state.clone(), phi: seed, tol: start.tol };
        loop {
            let next = tr.phi + dir * TRACK_STEP;
            if (next - seed).abs() >= TAU {
                return Ok(FlexionInterval { lo: seed - PI, hi: seed + PI, samples_validated: validated, periodic: true });
            }
            match tr.probe(next) {
                Ok(s) => {
                    tr.commit(next, s);
                    validated += 1;
                }
                Err(_) => {
                    let (mut good, mut bad) = (tr.phi, next);
                    while (bad - good).abs() > 1e-12 {
                        let mid = 0.5 * (good + bad);
                        if mid == good || mid == bad {
                            break;
                        }
                        match tr.probe(mid) {
                            Ok(_) => good = mid,
                            Err(_) => bad = mid,
                        }
                    }
                    ends[k] = good;
                    break;
                }
            }
        }
    }
    Ok(FlexionInterval { lo: ends[1], hi: ends[0], samples_validated: validated, periodic: false })
}

/// Tracked states at every grid value, following the branch of the seed.
/// The grid is processed in sorted order; output follows the sorted grid.
pub fn track_grid<M: Flexible>(model: &M, seed: f64, grid: &[f64]) -> Result<Vec<(f64, M::State)>, FlexError> {
    let mut sorted: Vec<f64> = grid.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let split = sorted.partition_point(|&p| p < seed);
    let start = Tracker::start(model, seed)?;
    let mut out: Vec<(f64, M::State)> = Vec::with_capacity(sorted.len());
    let mut down: Vec<(f64, M::State)> = Vec::with_capacity(split);
    {
        let mut tr = Tracker { model, phis: start.phis, pts: start.pts.clone(), count: 1, state: start.state.clone(), phi: seed, tol: start.tol };
        for &p in sorted[..split].iter().rev() {
            tr.advance_to(p)?;
            down.push((p, tr.state.clone()));
        }
    }
    down.reverse();
    out.extend(down);
    let mut tr = start;
    for &p in &sorted[split..] {
        tr.advance_to(p)?;
        out.push((p, tr.state.clone()));
    }
    Ok(out)
}
