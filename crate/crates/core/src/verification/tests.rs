use super::*;
use crate::catalog;
use crate::construction::assemble;
use crate::geometry::{AxisLine, Point3, RigidMotion};
use crate::octahedron::{flexion_range, flexion_variable, OctaLabels, OctahedronSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Apex0, apex1, then the base quadrilateral.
const REGULAR: [[f64; 3]; 6] = [[0.0, 0.0, 1.0], [0.0, 0.0, -1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, -1.0, 0.0]];

fn octahedron_faces() -> Vec<Vec<usize>> {
    let mut faces = vec![];
    for s in 0..4 {
        let (b, c) = (2 + s, 2 + (s + 1) % 4);
        faces.push(vec![b, 0, c]);
        faces.push(vec![c, 1, b]);
    }
    faces
}

fn points(raw: &[[f64; 3]]) -> Vec<Point3> {
    raw.iter().map(|&a| Point3::from_array(a)).collect()
}

/// Regular octahedron with each vertex moved by up to `jitter`.
fn jittered(rng: &mut ChaCha8Rng, jitter: f64) -> [Point3; 6] {
    REGULAR.map(|a| Point3::from_array(a) + Point3::new(rng.gen_range(-jitter..jitter), rng.gen_range(-jitter..jitter), rng.gen_range(-jitter..jitter)))
}

fn octahedron_model(name: &str, pts: &[Point3; 6]) -> crate::construction::FlexiblePolyhedron {
    let spec = OctahedronSpec::from_points(OctaLabels::default(), pts).unwrap();
    crate::construction::FlexiblePolyhedron::from_octahedron(name, spec, flexion_variable(pts).unwrap()).unwrap()
}

fn motion(angle: f64, shift: Point3) -> RigidMotion {
    let axis = AxisLine::new(Point3::new(0.3, -1.0, 2.0), Point3::new(1.0, 2.0, -0.5)).unwrap();
    let mut m = RigidMotion::about_axis(&axis, angle);
    m.translation += shift;
    m
}

#[test]
fn octahedron_topology() {
    let t = topology_check(&octahedron_faces());
    assert_eq!((t.vertices, t.edges, t.faces, t.euler), (6, 12, 8, 2));
    assert_eq!(t.genus, Some(0));
    assert!(t.is_closed_orientable() && t.connected);
}

#[test]
fn torus_topology() {
    let poly = assemble(&catalog::torus16()).unwrap();
    let t = topology_check(&poly.faces);
    assert_eq!((t.vertices, t.edges, t.faces, t.euler, t.genus), (16, 32, 16, 0, Some(1)));
    let ring = assemble(&catalog::ring_torus32()).unwrap();
    let t = topology_check(&ring.faces);
    assert_eq!((t.vertices, t.edges, t.faces, t.euler, t.genus), (32, 64, 32, 0, Some(1)));
}

#[test]
fn open_and_misoriented_surfaces_are_flagged() {
    let mut faces = octahedron_faces();
    faces.truncate(6);
    let t = topology_check(&faces);
    assert_eq!(t.boundary_edges, 4);
    assert_eq!(t.genus, None);
    assert!(!t.is_closed_orientable());

    let mut faces = octahedron_faces();
    faces[0].reverse();
    let t = topology_check(&faces);
    assert_eq!(t.misoriented_edges, 3);
    assert_eq!(t.genus, None);

    let mut faces = octahedron_faces();
    faces.extend(octahedron_faces().iter().map(|f| f.iter().map(|i| i + 6).collect()));
    let t = topology_check(&faces);
    assert!(!t.connected);
    assert_eq!(t.genus, None);

    let mut faces = octahedron_faces();
    faces.push(vec![2, 0, 3]);
    assert_eq!(topology_check(&faces).nonmanifold_edges, 3);
}

#[test]
fn decahedron_sweep_holds_every_invariant() {
    let poly = assemble(&catalog::decahedron()).unwrap();
    let range = flexion_range(&poly, poly.seed).unwrap();
    let report = invariant_sweep(&poly, &range.grid(200), &InvariantTolerances::default(), Exec::Parallel).unwrap();
    assert_eq!(report.samples, 200);
    assert!(report.pass, "{:?}", report.failures().map(|r| &r.name).collect::<Vec<_>>());
    assert!(report.worst_relative_drift("edge") <= 1e-10);
    assert!(report.worst_relative_drift("area") <= 1e-10);
    let sum = report.record("solid angle sum").unwrap();
    assert!(sum.max_deviation.unwrap() <= 1e-9);
    assert_eq!(report.trace.len(), 200);
    assert_eq!(report.trace[0].len(), report.records.len());
}

#[test]
fn metrics_are_invariant_under_rigid_motions() {
    let poly = assemble(&catalog::hendecahedron()).unwrap();
    let s = SurfaceStructure::new(&poly).unwrap();
    let r = poly.realize(0.8, None).unwrap();
    let a = sample_metrics(&s, 0.8, &r.points, 0.0).unwrap();
    let m = motion(1.1, Point3::new(5.0, -3.0, 7.0));
    let moved: Vec<Point3> = r.points.iter().map(|&p| m.apply(p)).collect();
    let b = sample_metrics(&s, 0.8, &moved, 0.0).unwrap();
    let close = |x: &[f64], y: &[f64], tol: f64| x.iter().zip(y).all(|(p, q)| (p - q).abs() <= tol);
    assert!(close(&a.edge_lengths, &b.edge_lengths, 1e-12 * 20.0));
    assert!(close(&a.face_areas, &b.face_areas, 1e-12 * 400.0));
    assert!(close(&a.dihedrals, &b.dihedrals, 1e-12));
    assert!(close(&a.cap_solid_angles, &b.cap_solid_angles, 1e-11));
    assert!((a.volume - b.volume).abs() <= 1e-12 * 8000.0);
}

#[test]
fn sweep_is_independent_of_grid_order_and_executor() {
    let poly = assemble(&catalog::ii_aee_32()).unwrap();
    let range = flexion_range(&poly, poly.seed).unwrap();
    let grid = range.grid(40);
    let mut shuffled = grid.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in (1..shuffled.len()).rev() {
        shuffled.swap(i, rng.gen_range(0..=i));
    }
    let tol = InvariantTolerances::default();
    let a = invariant_sweep(&poly, &grid, &tol, Exec::Sequential).unwrap();
    let b = invariant_sweep(&poly, &shuffled, &tol, Exec::Sequential).unwrap();
    let c = invariant_sweep(&poly, &grid, &tol, Exec::Parallel).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, c);
    assert_eq!(a.trace, c.trace);
}

#[test]
fn open_surfaces_are_not_swept() {
    let mut poly = assemble(&catalog::octahedron_i_oee()).unwrap();
    poly.faces.pop();
    assert!(matches!(SurfaceStructure::new(&poly), Err(VerifyError::NotClosed(_))));
}

#[test]
fn convex_octahedron_has_only_rigid_motions() {
    let c = polyhedron_constraints(&octahedron_faces());
    assert_eq!(c.len(), 12);
    assert_eq!(first_order_flex_dim(&points(&REGULAR), &c).unwrap(), 6);
}

#[test]
fn bricard_octahedra_have_an_extra_first_order_flex() {
    for plan in [catalog::octahedron_iii_oae(), catalog::octahedron_i_oee(), catalog::octahedron_ii_aee()] {
        let poly = assemble(&plan).unwrap();
        let r = poly.realize(poly.seed + 0.1, None).unwrap();
        assert!(first_order_flex_dim(&r.points, &polyhedron_constraints(&poly.faces)).unwrap() >= 7, "{}", poly.name);
    }
}

#[test]
fn quads_are_held_planar() {
    let poly = assemble(&catalog::torus16()).unwrap();
    let c = polyhedron_constraints(&poly.faces);
    assert!(c.iter().any(|r| matches!(r, RigidityConstraint::Coplanar(_))));
    let r = poly.realize(0.4, None).unwrap();
    assert!(first_order_flex_dim(&r.points, &c).unwrap() >= 7);
}

#[test]
fn degenerate_frameworks_are_rejected() {
    let mut pts = points(&REGULAR);
    pts[3] = pts[2];
    let c = polyhedron_constraints(&octahedron_faces());
    assert!(matches!(first_order_flex_dim(&pts, &c), Err(VerifyError::DegenerateInput(_))));
    let c = vec![RigidityConstraint::Bar(0, 9)];
    assert!(matches!(first_order_flex_dim(&points(&REGULAR), &c), Err(VerifyError::DegenerateInput(_))));
}

#[test]
fn hendecahedron_certificate_finds_two_flat_positions() {
    let poly = assemble(&catalog::hendecahedron()).unwrap();
    let cert = flex_certificate(&poly, &CertificateOptions::default()).unwrap();
    assert_eq!(cert.verdict, Verdict::Flexible);
    assert_eq!(cert.flat_positions.len(), 2);
    for f in &cert.flat_positions {
        assert!(f.deviation <= FLAT_TOLERANCE * poly.length_scale(), "{f:?}");
    }
}

#[test]
fn generic_octahedra_are_certified_rigid() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for k in 0..5 {
        let pts = jittered(&mut rng, 0.3);
        let poly = octahedron_model(&format!("random {k}"), &pts);
        let cert = flex_certificate(&poly, &CertificateOptions::default()).unwrap();
        assert_eq!(cert.verdict, Verdict::Rigid, "{k}: {cert:?}");
        assert!(cert.max_dihedral_variation < MIN_DIHEDRAL_VARIATION);
    }
}

#[test]
fn composite_dihedrals_vary() {
    let poly = assemble(&catalog::ii_aee_32()).unwrap();
    let cert = flex_certificate(&poly, &CertificateOptions { samples: 100, exec: Exec::Parallel }).unwrap();
    assert_eq!(cert.verdict, Verdict::Flexible);
    assert!(cert.max_dihedral_variation >= MIN_DIHEDRAL_VARIATION);
    assert!(cert.max_residual <= cert.residual_tolerance);
    assert!(cert.flat_positions.is_empty());
}

#[test]
fn verify_report_is_reproducible() {
    let poly = assemble(&catalog::decahedron()).unwrap();
    let opts = VerifyOptions { samples: 60, rigidity_samples: 5, ..VerifyOptions::default() };
    let a = verify(&poly, &opts).unwrap();
    let b = verify(&poly, &VerifyOptions { exec: Exec::Sequential, ..opts }).unwrap();
    assert!(a.pass);
    assert_eq!(a, b);
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn type_three_caps_are_reported_but_not_enforced() {
    let poly = assemble(&catalog::decahedron()).unwrap();
    let range = flexion_range(&poly, poly.seed).unwrap();
    let report = invariant_sweep(&poly, &range.grid(50), &InvariantTolerances::default(), Exec::Parallel).unwrap();
    let caps: Vec<&InvariantRecord> = report.records.iter().filter(|r| r.name.starts_with("solid angle X")).collect();
    assert_eq!(caps.len(), 2);
    assert!(caps.iter().all(|r| r.target == Some(std::f64::consts::TAU) && !r.enforced));
    assert!(report.pass);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn perturbed_convex_octahedra_stay_rigid(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = jittered(&mut rng, 0.2);
        prop_assert_eq!(first_order_flex_dim(&pts, &polyhedron_constraints(&octahedron_faces())).unwrap(), 6);
    }

    #[test]
    fn flex_dimension_ignores_rigid_motions(angle in -3.0f64..3.0, dx in -10.0f64..10.0, phi in 0.3f64..2.3) {
        let poly = assemble(&catalog::octahedron_ii_aee()).unwrap();
        let r = poly.realize(phi, None).unwrap();
        let m = motion(angle, Point3::new(dx, 1.0, -dx));
        let moved: Vec<Point3> = r.points.iter().map(|&p| m.apply(p)).collect();
        let c = polyhedron_constraints(&poly.faces);
        prop_assert_eq!(first_order_flex_dim(&moved, &c).unwrap(), first_order_flex_dim(&r.points, &c).unwrap());
    }

    #[test]
    fn chain_topology_is_a_sphere(n in 1usize..8) {
        let poly = assemble(&catalog::scaling_chain(crate::octahedron::SubType::IOee, n)).unwrap();
        let t = topology_check(&poly.faces);
        prop_assert_eq!(t.vertices, 4 * n + 2);
        prop_assert_eq!(t.faces, 4 * (n + 1));
        prop_assert_eq!(t.genus, Some(0));
    }
}
