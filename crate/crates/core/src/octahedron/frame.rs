use super::flex::FlexState;
use super::subtype::SubType;
use super::FlexError;
use crate::geometry::{Point3, RigidMotion};

/// Symmetry check tolerance relative to the point cloud size.
const SYMMETRY_TOLERANCE: f64 = 1e-9;

fn unit(v: Point3) -> Result<Point3, FlexError> {
    v.normalized().ok_or(FlexError::SymmetryNotFound("degenerate frame vector".into()))
}

fn pick_larger(a: Point3, b: Point3) -> Point3 {
    if a.norm() >= b.norm() {
        a
    } else {
        b
    }
}

/// Rigid motion putting six points (apex 0, apex 1, base 0..4) into the
/// symmetric coordinate model of the sub-type:
///
/// * I-OEE: apexes on the z-axis symmetric about the origin, half-turn axis = y-axis.
/// * II-AEE: mirror plane z = 0 through `B0, D0`; `X0, X1, A0, C0` in x = 0.
/// * II-OEE: mirror plane z = 0 through `X0, X1`; base in x = 0.
/// * III: `X0` at the origin, `A0` on +z, `B0` in the x-z plane with x > 0.
pub fn canonical_motion(pts: &[Point3; 6], subtype: SubType) -> Result<RigidMotion, FlexError> {
    let [x0, x1, a, b, c, d] = *pts;
    let frame = |o: Point3, ey: Point3, ez: Point3| -> Result<RigidMotion, FlexError> {
        let ex = unit(ey.cross(ez))?;
        Ok(RigidMotion::to_frame(o, ex, ey, ez))
    };
    let motion = match subtype {
        SubType::IiiOae | SubType::IiiOas => {
            let ez = unit(a - x0)?;
            let w = b - x0;
            let ex = unit(w - ez * w.dot(ez))?;
            return Ok(RigidMotion::to_frame(x0, ex, ez.cross(ex), ez));
        }
        SubType::IOee => {
            let o = (x0 + x1) * 0.5;
            let ez = unit(x0 - x1)?;
            let n = pick_larger((a - c).cross(x0 - x1), (b - d).cross(x0 - x1));
            let mut ey = unit(n)?;
            if ((a + c) * 0.5 - o).dot(ey) < 0.0 {
                ey = -ey;
            }
            let ey = unit(ey - ez * ey.dot(ez))?;
            frame(o, ey, ez)?
        }
        SubType::IiAee => {
            let o = (x0 + x1) * 0.5;
            let ez = unit(x0 - x1)?;
            let m = (a + c) * 0.5 - o;
            let n = pick_larger(ez.cross(m), ez.cross(a - o));
            let mut ex = unit(n)?;
            if (b - o).dot(ex) < 0.0 {
                ex = -ex;
            }
            let ey = unit(ez.cross(ex))?;
            RigidMotion::to_frame(o, ex, ey, ez)
        }
        SubType::IiOee => {
            let o = (a + c) * 0.5;
            let ez = unit(a - c)?;
            let m = (b + d) * 0.5 - o;
            let mut ex = unit(pick_larger(ez.cross(m), ez.cross(b - o)))?;
            if (x0 - o).dot(ex) < 0.0 {
                ex = -ex;
            }
            let ey = unit(ez.cross(ex))?;
            RigidMotion::to_frame(o, ex, ey, ez)
        }
    };
    let framed: Vec<Point3> = pts.iter().map(|p| motion.apply(*p)).collect();
    let size = framed.iter().map(|p| p.norm()).fold(0.0, f64::max).max(1e-300);
    let tol = SYMMETRY_TOLERANCE * size;
    let bad = |msg: &str| Err(FlexError::SymmetryNotFound(msg.to_string()));
    let half_turn = |p: Point3| Point3::new(-p.x, p.y, -p.z);
    let mirror = |p: Point3| Point3::new(p.x, p.y, -p.z);
    let near = |p: Point3, q: Point3| (p - q).norm() <= tol;
    let [fx0, fx1, fa, fb, fc, fd] = [framed[0], framed[1], framed[2], framed[3], framed[4], framed[5]];
    match subtype {
        SubType::IOee => {
            if !(near(half_turn(fx0), fx1) && near(half_turn(fa), fc) && near(half_turn(fb), fd)) {
                return bad("half-turn symmetry violated");
            }
        }
        SubType::IiAee => {
            let coplanar = [fx0, fx1, fa, fc].iter().all(|p| p.x.abs() <= tol);
            if !(near(mirror(fx0), fx1) && near(mirror(fa), fc) && fb.z.abs() <= tol && fd.z.abs() <= tol && coplanar) {
                return bad("mirror symmetry through B0, D0 violated");
            }
        }
        SubType::IiOee => {
            let coplanar = [fa, fb, fc, fd].iter().all(|p| p.x.abs() <= tol);
            if !(near(mirror(fa), fc) && near(mirror(fb), fd) && fx0.z.abs() <= tol && fx1.z.abs() <= tol && coplanar) {
                return bad("mirror symmetry through X0, X1 violated");
            }
        }
        _ => {}
    }
    Ok(motion)
}

/// State moved into the symmetric coordinate model of `subtype`.
pub fn canonical_frame(state: &FlexState, subtype: SubType) -> Result<FlexState, FlexError> {
    let m = canonical_motion(&state.points, subtype)?;
    let mut out = state.clone();
    for p in out.points.iter_mut() {
        *p = m.apply(*p);
    }
    Ok(out)
}
