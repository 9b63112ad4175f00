//! Rotation group SO(3) with the bi-invariant metric `<w1, w2> = 2 w1.w2`.
//!
//! Points are row-major rotation matrices. A tangent at `R` is stored as the
//! axis-angle vector `w` of the geometric tangent `R hat(w)`, so that
//! `dist(R1, R2) = ||Log(R1^T R2)||_F`. Parallel transport along
//! `R Exp(t xi)` acts on body coordinates as the rotation `Exp(-t xi / 2)`,
//! and the Jacobi operator has eigenvalue 0 along `xi` and `theta^2 / 4` on
//! the orthogonal plane.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Quaternion, UnitQuaternion, Vector3};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{
    mat_from_slice, mat_to_vec, orthogonality_defect, project_to_rotation, rot_exp, rot_log, rotate,
};
use crate::manifold::{INJECTIVITY_MARGIN, LOG_MARGIN, MEMBERSHIP_TOL};

pub const EXP_BOUND: f64 = PI - INJECTIVITY_MARGIN;

fn vec3(s: &[f64]) -> Vector3<f64> {
    Vector3::new(s[0], s[1], s[2])
}

fn to_vec(v: Vector3<f64>) -> Vec<f64> {
    vec![v.x, v.y, v.z]
}

fn finish(r: Matrix3<f64>) -> Vec<f64> {
    if orthogonality_defect(&r) > MEMBERSHIP_TOL {
        mat_to_vec(&project_to_rotation(&r))
    } else {
        mat_to_vec(&r)
    }
}

pub fn check_point(p: &[f64]) -> Result<()> {
    let r = mat_from_slice(p);
    let defect = orthogonality_defect(&r);
    let det = r.determinant();
    if defect > MEMBERSHIP_TOL || (det - 1.0).abs() > MEMBERSHIP_TOL {
        return Err(Error::NotOnManifold(format!(
            "rotation has orthogonality defect {defect} and determinant {det}"
        )));
    }
    Ok(())
}

pub fn inner(x: &[f64], y: &[f64]) -> f64 {
    2.0 * (x[0] * y[0] + x[1] * y[1] + x[2] * y[2])
}

pub fn exp(p: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    let w = vec3(x);
    let angle = w.norm();
    if angle > EXP_BOUND {
        return Err(Error::TangentTooLong {
            norm: angle,
            bound: EXP_BOUND,
        });
    }
    Ok(finish(mat_from_slice(p) * rot_exp(&w)))
}

fn relative_log(p: &[f64], q: &[f64]) -> Result<Vector3<f64>> {
    let rel = mat_from_slice(p).transpose() * mat_from_slice(q);
    let xi = rot_log(&rel);
    let theta = xi.norm();
    // the trace angle catches what the axis-angle norm may round away
    let c = (0.5 * (rel.trace() - 1.0)).clamp(-1.0, 1.0);
    if theta >= PI - LOG_MARGIN || c <= (PI - LOG_MARGIN).cos() {
        return Err(Error::NotInDomain(format!(
            "relative rotation angle {theta} is at the cut locus"
        )));
    }
    Ok(xi)
}

pub fn log(p: &[f64], q: &[f64]) -> Result<Vec<f64>> {
    Ok(to_vec(relative_log(p, q)?))
}

fn check_reach(t: f64, theta: f64) -> Result<()> {
    let reach = t.abs() * theta;
    if !(0.0..=1.0).contains(&t) && reach > EXP_BOUND {
        return Err(Error::ExtensionOutOfRange {
            reach,
            bound: EXP_BOUND,
        });
    }
    Ok(())
}

pub fn geo(p: &[f64], q: &[f64], t: f64) -> Result<Vec<f64>> {
    let xi = relative_log(p, q)?;
    check_reach(t, xi.norm())?;
    Ok(finish(mat_from_slice(p) * rot_exp(&(xi * t))))
}

pub fn transp(p: &[f64], q: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    let xi = relative_log(p, q)?;
    Ok(to_vec(rotate(&(xi * -0.5), &vec3(x))))
}

/// See `sphere::adj_start` for `guarded`.
pub fn adj_start(p: &[f64], q: &[f64], t: f64, w: &[f64], guarded: bool) -> Result<Vec<f64>> {
    let xi = relative_log(p, q)?;
    let theta = xi.norm();
    if guarded {
        check_reach(t, theta)?;
    }
    if theta == 0.0 {
        return Ok(w.iter().map(|c| (1.0 - t) * c).collect());
    }
    let back = rotate(&(xi * (0.5 * t)), &vec3(w));
    let axis = xi / theta;
    let along = axis * back.dot(&axis);
    let across = back - along;
    let half = 0.5 * theta;
    let f = if half < 1e-6 {
        let s = 1.0 - t;
        s * (1.0 + (1.0 - s * s) * half * half / 6.0)
    } else {
        ((1.0 - t) * half).sin() / half.sin()
    };
    Ok(to_vec(along * (1.0 - t) + across * f))
}

pub fn basis() -> Vec<Vec<f64>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    vec![vec![s, 0.0, 0.0], vec![0.0, s, 0.0], vec![0.0, 0.0, s]]
}

pub fn random_point<R: Rng + ?Sized>(rng: &mut R) -> Vec<f64> {
    loop {
        let c: Vec<f64> = (0..4)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let q = Quaternion::new(c[0], c[1], c[2], c[3]);
        if q.norm() > 1e-6 {
            let r = UnitQuaternion::from_quaternion(q).to_rotation_matrix();
            return finish(*r.matrix());
        }
    }
}
