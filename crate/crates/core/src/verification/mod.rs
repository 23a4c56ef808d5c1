//! Numerical certification of flexibility and of the flexion invariants.

mod certificate;
mod invariants;
mod rigidity;
mod topology;

pub use certificate::{
    flat_positions, flex_certificate, CertificateOptions, FlatPosition, FlexCertificate, Verdict, FLAT_TOLERANCE,
    MIN_DIHEDRAL_VARIATION,
};
pub use invariants::{
    invariant_sweep, measure_grid, sample_metrics, summarize, unwrapped_dihedrals, CheckKind, InvariantRecord,
    InvariantReport, InvariantTolerances, SampleMetrics, SurfaceStructure,
};
pub use rigidity::{first_order_flex_dim, polyhedron_constraints, RigidityConstraint, NULLITY_THRESHOLD};
pub use topology::{topology_check, TopologyReport};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::construction::FlexiblePolyhedron;
use crate::exec::Exec;
use crate::geometry::GeometryError;
use crate::octahedron::{track_grid, FlexError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Flex(#[from] FlexError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("surface is not closed: {0}")]
    NotClosed(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("empty sample grid")]
    EmptyGrid,
}

/// First-order flex dimensions over sampled states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RigiditySummary {
    pub samples: usize,
    pub min_dim: usize,
    pub max_dim: usize,
    /// Fraction of samples with a nontrivial first-order flex.
    pub fraction_flexible: f64,
    pub pass: bool,
}

/// Least fraction of sampled states with dimension at least 7.
pub const RIGIDITY_PASS_FRACTION: f64 = 0.95;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub samples: usize,
    pub rigidity_samples: usize,
    pub tolerances: InvariantTolerances,
    pub exec: Exec,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { samples: 200, rigidity_samples: 20, tolerances: InvariantTolerances::default(), exec: Exec::Parallel }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub model: String,
    pub topology: TopologyReport,
    pub expected_genus: u32,
    pub certificate: FlexCertificate,
    pub invariants: InvariantReport,
    pub rigidity: RigiditySummary,
    pub pass: bool,
}

/// First-order flex dimension at evenly spaced interior points of the range.
pub fn rigidity_survey(poly: &FlexiblePolyhedron, range: &crate::octahedron::FlexionInterval, samples: usize, exec: Exec) -> Result<RigiditySummary, VerifyError> {
    let mut grid = range.grid(samples + 2);
    grid.pop();
    grid.remove(0);
    let states = track_grid(poly, poly.seed, &grid)?;
    let constraints = polyhedron_constraints(&poly.faces);
    let dims = exec.map(&states, |(_, r)| first_order_flex_dim(&r.points, &constraints)).into_iter().collect::<Result<Vec<_>, _>>()?;
    let flexible = dims.iter().filter(|&&d| d >= 7).count();
    let fraction_flexible = if dims.is_empty() { 0.0 } else { flexible as f64 / dims.len() as f64 };
    Ok(RigiditySummary {
        samples: dims.len(),
        min_dim: dims.iter().copied().min().unwrap_or(0),
        max_dim: dims.iter().copied().max().unwrap_or(0),
        fraction_flexible,
        pass: !dims.is_empty() && fraction_flexible >= RIGIDITY_PASS_FRACTION,
    })
}

/// Topology, flex certificate, invariant sweep over the certified range and
/// the rigidity cross-check.
pub fn verify(poly: &FlexiblePolyhedron, opts: &VerifyOptions) -> Result<VerificationReport, VerifyError> {
    let topology = topology_check(&poly.faces);
    let certificate = flex_certificate(poly, &CertificateOptions { samples: opts.samples, exec: opts.exec })?;
    let grid = certificate.range.grid(opts.samples.max(2));
    let invariants = invariant_sweep(poly, &grid, &opts.tolerances, opts.exec)?;
    let rigidity = rigidity_survey(poly, &certificate.range, opts.rigidity_samples, opts.exec)?;
    let pass = topology.is_closed_orientable()
        && topology.genus == Some(poly.genus)
        && certificate.verdict == Verdict::Flexible
        && invariants.pass
        && rigidity.pass;
    Ok(VerificationReport { model: poly.name.clone(), topology, expected_genus: poly.genus, certificate, invariants, rigidity, pass })
}

#[cfg(test)]
mod tests;
