use super::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI, TAU};

fn p(x: f64, y: f64, z: f64) -> Point3 {
    Point3::new(x, y, z)
}

fn close(a: Point3, b: Point3, tol: f64) -> bool {
    (a - b).max_abs() <= tol
}

/// Quaternion rotation, written independently of the Rodrigues form.
fn quaternion_rotate(v: Point3, axis: Point3, angle: f64) -> Point3 {
    let k = axis / axis.norm();
    let (s, w) = (0.5 * angle).sin_cos();
    let q = [w, k.x * s, k.y * s, k.z * s];
    let m = [
        [1.0 - 2.0 * (q[2] * q[2] + q[3] * q[3]), 2.0 * (q[1] * q[2] - q[0] * q[3]), 2.0 * (q[1] * q[3] + q[0] * q[2])],
        [2.0 * (q[1] * q[2] + q[0] * q[3]), 1.0 - 2.0 * (q[1] * q[1] + q[3] * q[3]), 2.0 * (q[2] * q[3] - q[0] * q[1])],
        [2.0 * (q[1] * q[3] - q[0] * q[2]), 2.0 * (q[2] * q[3] + q[0] * q[1]), 1.0 - 2.0 * (q[1] * q[1] + q[2] * q[2])],
    ];
    p(
        m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
        m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
        m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
    )
}

#[test]
fn quarter_turn_about_z() {
    let r = rotate_about_axis(p(1.0, 0.0, 0.0), &AxisLine::z_axis(), FRAC_PI_2);
    assert!(close(r, p(0.0, 1.0, 0.0), 1e-15));
}

#[test]
fn zero_angle_is_identity() {
    let axis = AxisLine::new(p(1.0, -2.0, 0.5), p(0.3, 0.4, 1.2)).unwrap();
    let q = p(3.0, 1.0, -7.0);
    assert_eq!(rotate_about_axis(q, &axis, 0.0), q);
}

#[test]
fn rotation_matches_quaternion_oracle() {
    let r = rotate_about_axis(p(1.0, 2.0, 3.0), &AxisLine::z_axis(), PI / 6.0);
    let o = quaternion_rotate(p(1.0, 2.0, 3.0), p(0.0, 0.0, 1.0), PI / 6.0);
    assert!(close(r, o, 1e-14));
    let expected = p(
        (PI / 6.0).cos() - 2.0 * (PI / 6.0).sin(),
        (PI / 6.0).sin() + 2.0 * (PI / 6.0).cos(),
        3.0,
    );
    assert!(close(r, expected, 1e-14));
}

#[test]
fn rigid_motion_about_axis_agrees_with_point_rotation() {
    let axis = AxisLine::new(p(0.5, 1.0, -1.0), p(1.0, 1.0, 0.2)).unwrap();
    let m = RigidMotion::about_axis(&axis, 1.1);
    let q = p(2.0, -3.0, 4.0);
    assert!(close(m.apply(q), rotate_about_axis(q, &axis, 1.1), 1e-13));
    let twice = m.compose(&m);
    assert!(close(twice.apply(q), rotate_about_axis(q, &axis, 2.2), 1e-12));
}

#[test]
fn trilaterate_unit_cases() {
    let (c1, c2, c3) = (p(0.0, 0.0, 0.0), p(1.0, 0.0, 0.0), p(0.0, 1.0, 0.0));
    let s = 2f64.sqrt();
    assert!(close(trilaterate(c1, c2, c3, 1.0, s, s, 1).unwrap(), p(0.0, 0.0, 1.0), 1e-15));
    assert!(close(trilaterate(c1, c2, c3, 1.0, s, s, -1).unwrap(), p(0.0, 0.0, -1.0), 1e-15));
}

#[test]
fn trilaterate_errors() {
    let (c1, c2, c3) = (p(0.0, 0.0, 0.0), p(1.0, 0.0, 0.0), p(0.0, 1.0, 0.0));
    assert!(matches!(
        trilaterate(c1, c2, c3, 0.1, 0.1, 0.1, 1),
        Err(GeometryError::NoRealIntersection { .. })
    ));
    assert_eq!(
        trilaterate(c1, c2, p(2.0, 0.0, 0.0), 1.0, 1.0, 1.0, 1),
        Err(GeometryError::DegenerateCenters)
    );
}

#[test]
fn trilaterate_round_trip_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut rp = || p(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < 10_000 {
        let (c1, c2, c3, q) = (rp(), rp(), rp(), rp());
        let n = (c2 - c1).cross(c3 - c1);
        // keep the centers well conditioned and the target off their plane
        if n.norm() < 1.0 || (q - c1).dot(n).abs() / n.norm() < 0.05 {
            continue;
        }
        let branch = if (q - c1).dot(n) > 0.0 { 1 } else { -1 };
        let r = trilaterate(c1, c2, c3, q.distance(c1), q.distance(c2), q.distance(c3), branch).unwrap();
        worst = worst.max((r - q).norm());
        done += 1;
    }
    assert!(worst <= 1e-11 * 20.0, "worst round-trip error {worst}");
}

#[test]
fn tangency_is_clamped() {
    let (c1, c2, c3) = (p(0.0, 0.0, 0.0), p(2.0, 0.0, 0.0), p(0.0, 2.0, 0.0));
    // the three unit-ish spheres touch the plane at (1,1,0)
    let d = 2f64.sqrt();
    let t = trilaterate_detailed(c1, c2, c3, [d, d, d * (1.0 + 1e-15)], 1).unwrap();
    assert!(t.point.z.abs() < 1e-6);
}

#[test]
fn asa_equilateral() {
    let t = solve_triangle(TriangleSpec::Asa { side_pq: 1.0, angle_p: FRAC_PI_3, angle_q: FRAC_PI_3 }).unwrap();
    for s in t.opposite {
        assert!((s - 1.0).abs() < 1e-15);
    }
}

#[test]
fn asa_decahedron_cap_face() {
    let d = PI / 180.0;
    let t = solve_triangle(TriangleSpec::Asa { side_pq: 10.0, angle_p: 17.0 * d, angle_q: 65.0 * d }).unwrap();
    assert!((t.angles[2] - 98.0 * d).abs() < 1e-14);
    // |A0B0| opposite the 17 degree angle, |X0B0| opposite 65 degrees
    assert!((t.opposite[0] - 2.95245008853).abs() < 1e-10);
    assert!((t.opposite[1] - 9.15214592538).abs() < 1e-10);
    // law-of-cosines oracle on the same triangle
    let (a, b, c) = (t.opposite[0], t.opposite[1], 10.0);
    let cos_p = (b * b + c * c - a * a) / (2.0 * b * c);
    assert!((cos_p - (17.0 * d).cos()).abs() < 1e-13);
}

#[test]
fn sas_right_triangle() {
    let t = solve_triangle(TriangleSpec::Sas { side_pq: 3.0, side_pr: 4.0, angle_p: FRAC_PI_2 }).unwrap();
    assert!((t.side_qr() - 5.0).abs() < 1e-15);
    assert!((t.angles.iter().sum::<f64>() - PI).abs() < 1e-15);
}

#[test]
fn invalid_triangles() {
    assert!(solve_triangle(TriangleSpec::Asa { side_pq: 1.0, angle_p: 2.0, angle_q: 1.2 }).is_err());
    assert!(solve_triangle(TriangleSpec::Sas { side_pq: -1.0, side_pr: 1.0, angle_p: 1.0 }).is_err());
}

#[test]
fn dihedral_flat_cases() {
    let (a, b) = (p(0.0, 0.0, 0.0), p(0.0, 0.0, 1.0));
    assert_eq!(dihedral_angle(a, b, p(1.0, 0.0, 0.3), p(2.0, 0.0, 0.7)).unwrap(), 0.0);
    assert!((dihedral_angle(a, b, p(1.0, 0.0, 0.3), p(-2.0, 0.0, 0.7)).unwrap() - PI).abs() < 1e-15);
    assert_eq!(dihedral_angle(a, b, p(0.0, 0.0, 3.0), p(1.0, 0.0, 0.0)), Err(GeometryError::DegenerateWing));
}

#[test]
fn dihedral_cube_edge_interior() {
    // faces x=0 (traverses origin -> e_z) and y=0 (traverses e_z -> origin)
    let v = interior_dihedral(p(0.0, 0.0, 0.0), p(0.0, 0.0, 1.0), p(0.0, 1.0, 0.0), p(1.0, 0.0, 0.0)).unwrap();
    assert!((v - FRAC_PI_2).abs() < 1e-15);
}

#[test]
fn dihedral_swapped_wings_sum_to_full_turn() {
    let (a, b, r1, r2) = (p(0.1, 0.2, 0.3), p(1.0, -1.0, 2.0), p(3.0, 0.0, 1.0), p(-1.0, 2.0, 0.5));
    let s = dihedral_angle(a, b, r1, r2).unwrap() + dihedral_angle(a, b, r2, r1).unwrap();
    assert!((s - TAU).abs() < 1e-14);
}

fn cube_corner_fan() -> Vec<[Point3; 3]> {
    let o = Point3::ORIGIN;
    let (ex, ey, ez) = (p(1.0, 0.0, 0.0), p(0.0, 1.0, 0.0), p(0.0, 0.0, 1.0));
    vec![[o, ex, ez], [o, ez, ey], [o, ey, ex]]
}

#[test]
fn solid_angle_cube_corner() {
    let w = solid_angle(Point3::ORIGIN, &cube_corner_fan()).unwrap();
    assert!((w - FRAC_PI_2).abs() < 1e-14);
}

#[test]
fn solid_angle_complement_and_full_cover() {
    let fan = cube_corner_fan();
    let rev: Vec<[Point3; 3]> = fan.iter().rev().map(|t| [t[0], t[2], t[1]]).collect();
    let a = solid_angle(Point3::ORIGIN, &fan).unwrap();
    let b = solid_angle(Point3::ORIGIN, &rev).unwrap();
    assert!((a + b - 4.0 * PI).abs() < 1e-13);
    // a shrinking reversed cone approaches the whole sphere
    let eps = 1e-4;
    let ring = [p(eps, 0.0, 1.0), p(0.0, eps, 1.0), p(-eps, -eps, 1.0)];
    let w = solid_angle_ring(Point3::ORIGIN, &ring).unwrap();
    assert!((w - 4.0 * PI).abs() < 1e-6);
}

#[test]
fn solid_angle_flat_vertex_is_half_sphere() {
    let ring = [p(1.0, 0.0, 0.0), p(0.0, 1.0, 0.0), p(-1.0, 0.2, 0.0), p(0.0, -1.0, 0.0)];
    let w = solid_angle_ring(Point3::ORIGIN, &ring).unwrap();
    assert!((w - TAU).abs() < 1e-14);
}

#[test]
fn solid_angle_broken_fan() {
    let mut fan = cube_corner_fan();
    fan[1][1] = p(5.0, 5.0, 5.0);
    assert!(matches!(solid_angle(Point3::ORIGIN, &fan), Err(GeometryError::BrokenFan { .. })));
}

/// Spherical triangle area by the Van Oosterom-Strackee formula.
fn spherical_triangle(a: Point3, b: Point3, c: Point3) -> f64 {
    let (a, b, c) = (a / a.norm(), b / b.norm(), c / c.norm());
    2.0 * a.dot(b.cross(c)).atan2(1.0 + a.dot(b) + b.dot(c) + c.dot(a))
}

#[test]
fn solid_angle_matches_spherical_area_for_convex_cones() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let k = rng.gen_range(3..7);
        let mut angles: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..TAU)).collect();
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let h = rng.gen_range(0.3..3.0);
        let ring: Vec<Point3> = angles.iter().map(|t| p(t.cos(), t.sin(), h)).collect();
        // the cone is convex and contains the z-axis only if no gap exceeds pi
        let max_gap = (0..k)
            .map(|i| if i + 1 < k { angles[i + 1] - angles[i] } else { angles[0] + TAU - angles[k - 1] })
            .fold(0.0, f64::max);
        if max_gap >= PI - 1e-3 {
            continue;
        }
        // ring runs counterclockwise seen from +z; the outward fan runs the other way
        let cw: Vec<Point3> = ring.iter().rev().copied().collect();
        let w = solid_angle_ring(Point3::ORIGIN, &cw).unwrap();
        let axis = p(0.0, 0.0, 1.0);
        let oracle: f64 = (0..k).map(|i| spherical_triangle(axis, ring[i], ring[(i + 1) % k])).sum();
        assert!((w - oracle).abs() < 1e-12, "{w} vs {oracle}");
    }
}

fn unit_cube() -> FaceComplex {
    let points = vec![
        p(0.0, 0.0, 0.0),
        p(1.0, 0.0, 0.0),
        p(1.0, 1.0, 0.0),
        p(0.0, 1.0, 0.0),
        p(0.0, 0.0, 1.0),
        p(1.0, 0.0, 1.0),
        p(1.0, 1.0, 1.0),
        p(0.0, 1.0, 1.0),
    ];
    let faces = vec![
        vec![0, 3, 2, 1],
        vec![4, 5, 6, 7],
        vec![0, 1, 5, 4],
        vec![2, 3, 7, 6],
        vec![1, 2, 6, 5],
        vec![0, 4, 7, 3],
    ];
    FaceComplex { points, faces }
}

#[test]
fn cube_volume() {
    assert!((oriented_volume(&unit_cube()).unwrap() - 1.0).abs() < 1e-15);
}

#[test]
fn doubly_covered_square_has_zero_volume() {
    let c = FaceComplex {
        points: vec![p(0.0, 0.0, 0.0), p(1.0, 0.0, 0.0), p(1.0, 1.0, 0.0), p(0.0, 1.0, 0.0)],
        faces: vec![vec![0, 1, 2, 3], vec![0, 3, 2, 1]],
    };
    assert_eq!(oriented_volume(&c).unwrap(), 0.0);
}

#[test]
fn open_complex_rejected() {
    let mut c = unit_cube();
    c.faces.pop();
    assert!(matches!(oriented_volume(&c), Err(GeometryError::NotClosed { .. })));
}

#[test]
fn square_and_triangle_metrics() {
    let sq = [p(0.0, 0.0, 0.0), p(1.0, 0.0, 0.0), p(1.0, 1.0, 0.0), p(0.0, 1.0, 0.0)];
    let m = face_metrics(&sq).unwrap();
    assert!((m.area - 1.0).abs() < 1e-15);
    assert!(m.planarity_deviation < 1e-15);
    let tri = [p(0.3, 1.0, 2.0), p(-1.0, 4.0, 0.1), p(2.0, 2.0, 7.0)];
    assert_eq!(face_metrics(&tri).unwrap().planarity_deviation, 0.0);
    let line = [p(0.0, 0.0, 0.0), p(1.0, 1.0, 1.0), p(2.0, 2.0, 2.0)];
    assert_eq!(face_metrics(&line), Err(GeometryError::DegenerateFace));
}

#[test]
fn skew_quad_deviation_matches_brute_force_plane() {
    let quad = [p(0.0, 0.0, 0.0), p(1.0, 0.0, 0.0), p(1.0, 1.0, 1.0), p(0.0, 1.0, 0.0)];
    let m = face_metrics(&quad).unwrap();
    assert!(m.planarity_deviation > 0.0);
    // brute force: scan unit normals for the least-squares plane
    let c = quad.iter().fold(Point3::ORIGIN, |a, &q| a + q) / 4.0;
    let eval = |theta: f64, ph: f64| {
        let n = p(theta.sin() * ph.cos(), theta.sin() * ph.sin(), theta.cos());
        let ss: f64 = quad.iter().map(|q| (*q - c).dot(n).powi(2)).sum();
        let dev = quad.iter().map(|q| (*q - c).dot(n).abs()).fold(0.0, f64::max);
        (ss, dev)
    };
    let mut best = (f64::INFINITY, 0.0, 0.0, 0.0);
    let steps = 400;
    for i in 0..=steps {
        let theta = PI * i as f64 / steps as f64;
        for j in 0..(2 * steps) {
            let ph = PI * j as f64 / steps as f64;
            let (ss, dev) = eval(theta, ph);
            if ss < best.0 {
                best = (ss, dev, theta, ph);
            }
        }
    }
    let (t0, p0) = (best.2, best.3);
    let span = 2.0 * PI / steps as f64;
    for i in 0..=steps {
        let theta = t0 - span + 2.0 * span * i as f64 / steps as f64;
        for j in 0..=steps {
            let ph = p0 - span + 2.0 * span * j as f64 / steps as f64;
            let (ss, dev) = eval(theta, ph);
            if ss < best.0 {
                best = (ss, dev, theta, ph);
            }
        }
    }
    assert!((m.planarity_deviation - best.1).abs() < 5e-5, "{} vs {}", m.planarity_deviation, best.1);
}

fn arb_point() -> impl Strategy<Value = Point3> {
    (-10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64).prop_map(|(x, y, z)| p(x, y, z))
}

proptest! {
    #[test]
    fn rotation_preserves_distances(a in arb_point(), b in arb_point(), o in arb_point(), d in arb_point(), angle in -7.0..7.0f64) {
        prop_assume!(d.norm() > 1e-3);
        let axis = AxisLine::new(o, d).unwrap();
        let (ra, rb) = (rotate_about_axis(a, &axis, angle), rotate_about_axis(b, &axis, angle));
        let before = a.distance(b);
        prop_assert!((ra.distance(rb) - before).abs() <= 1e-13 * before.max(1.0) * 10.0);
        prop_assert!((axis.distance_to(ra) - axis.distance_to(a)).abs() <= 1e-12 * 20.0);
    }

    #[test]
    fn solved_triangles_obey_law_of_cosines(side in 0.1..10.0f64, ap in 0.05..3.0f64, frac in 0.05..0.95f64) {
        let aq = (PI - ap) * frac;
        prop_assume!(PI - ap - aq > 0.01);
        let t = solve_triangle(TriangleSpec::Asa { side_pq: side, angle_p: ap, angle_q: aq }).unwrap();
        for i in 0..3 {
            let (a, b, c) = (t.opposite[i], t.opposite[(i + 1) % 3], t.opposite[(i + 2) % 3]);
            let lhs = a * a;
            let rhs = b * b + c * c - 2.0 * b * c * t.angles[i].cos();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (b * b + c * c));
        }
    }

    #[test]
    fn sas_then_asa_round_trip(b in 0.1..10.0f64, c in 0.1..10.0f64, ap in 0.05..3.09f64) {
        let t = solve_triangle(TriangleSpec::Sas { side_pq: c, side_pr: b, angle_p: ap }).unwrap();
        prop_assert!((t.angles.iter().sum::<f64>() - PI).abs() < 1e-13);
        let u = solve_triangle(TriangleSpec::Asa { side_pq: c, angle_p: ap, angle_q: t.angles[1] }).unwrap();
        prop_assert!((u.opposite[1] - b).abs() <= 1e-11 * b.max(c));
    }

    #[test]
    fn volume_is_translation_invariant(shift in arb_point(), sx in 0.5..3.0f64, sy in 0.5..3.0f64) {
        let mut c = unit_cube();
        for q in &mut c.points {
            q.x *= sx;
            q.y *= sy;
        }
        let v = oriented_volume(&c).unwrap();
        for q in &mut c.points {
            *q += shift;
        }
        let w = oriented_volume(&c).unwrap();
        prop_assert!((v - w).abs() <= 1e-10 * v.abs());
    }

    #[test]
    fn fan_and_reversal_sum_to_full_sphere(pts in proptest::collection::vec(arb_point(), 3..7)) {
        let ok = pts.iter().all(|q| q.norm() > 0.5)
            && (0..pts.len()).all(|i| pts[i].cross(pts[(i + 1) % pts.len()]).norm() > 0.1);
        prop_assume!(ok);
        let rev: Vec<Point3> = pts.iter().rev().copied().collect();
        let a = solid_angle_ring(Point3::ORIGIN, &pts).unwrap();
        let b = solid_angle_ring(Point3::ORIGIN, &rev).unwrap();
        prop_assert!((a + b - 4.0 * PI).abs() <= 1e-10);
    }
}
