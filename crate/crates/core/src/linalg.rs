//! Small dense helpers for 3x3 rotations and symmetric matrices.

use nalgebra::{Matrix3, SymmetricEigen, Vector3};

use crate::error::{Error, Result};

/// Eigenvalues at or below this are rejected as not positive definite.
pub const SPD_EIGEN_FLOOR: f64 = 1e-12;

pub fn hat(w: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -w.z, w.y, w.z, 0.0, -w.x, -w.y, w.x, 0.0)
}

pub fn vee(m: &Matrix3<f64>) -> Vector3<f64> {
    Vector3::new(m[(2, 1)], m[(0, 2)], m[(1, 0)])
}

/// Rodrigues' formula for the rotation with axis-angle vector `w`.
pub fn rot_exp(w: &Vector3<f64>) -> Matrix3<f64> {
    let theta2 = w.norm_squared();
    let theta = theta2.sqrt();
    let k = hat(w);
    let (a, b) = if theta < 1e-4 {
        (
            1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0,
            0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0,
        )
    } else {
        (theta.sin() / theta, (1.0 - theta.cos()) / theta2)
    };
    Matrix3::identity() + k * a + k * k * b
}

/// Rotation angle and axis-angle vector of a rotation matrix.
///
/// The angle comes from `atan2` so it is accurate at both ends of `[0, pi]`.
/// Above 3.0 rad the axis is read off the symmetric part, which stays
/// well conditioned where the skew part vanishes.
pub fn rot_log(r: &Matrix3<f64>) -> Vector3<f64> {
    let skew = vee(&(r - r.transpose())) * 0.5;
    let s = skew.norm();
    let c = 0.5 * (r.trace() - 1.0);
    let theta = s.atan2(c);
    if theta < 1e-4 {
        let t2 = theta * theta;
        return skew * (1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0);
    }
    if theta <= 3.0 {
        return skew * (theta / s);
    }
    // (R + R^T)/2 - cos(theta) I = (1 - cos(theta)) n n^T
    let sym = (r + r.transpose()) * 0.5 - Matrix3::identity() * c;
    let mut col = 0;
    for i in 1..3 {
        if sym[(i, i)] > sym[(col, col)] {
            col = i;
        }
    }
    let mut n: Vector3<f64> = sym.column(col).into_owned();
    n /= n.norm();
    if n.dot(&skew) < 0.0 {
        n = -n;
    }
    n * theta
}

/// Rotation by axis-angle vector `w` applied to `v`.
pub fn rotate(w: &Vector3<f64>, v: &Vector3<f64>) -> Vector3<f64> {
    rot_exp(w) * v
}

/// Nearest rotation in Frobenius norm.
pub fn project_to_rotation(m: &Matrix3<f64>) -> Matrix3<f64> {
    let svd = m.svd(true, true);
    let u = svd.u.unwrap();
    let v_t = svd.v_t.unwrap();
    let mut r = u * v_t;
    if r.determinant() < 0.0 {
        let mut u = u;
        u.column_mut(2).neg_mut();
        r = u * v_t;
    }
    r
}

/// Orthogonality defect `||R^T R - I||_F`.
pub fn orthogonality_defect(r: &Matrix3<f64>) -> f64 {
    (r.transpose() * r - Matrix3::identity()).norm()
}

pub fn symmetrize(m: &Matrix3<f64>) -> Matrix3<f64> {
    (m + m.transpose()) * 0.5
}

fn sym_eigen(m: &Matrix3<f64>) -> SymmetricEigen<f64, nalgebra::U3> {
    SymmetricEigen::new(symmetrize(m))
}

fn sym_apply(m: &Matrix3<f64>, f: impl Fn(f64) -> f64) -> Matrix3<f64> {
    let eig = sym_eigen(m);
    let d = Matrix3::from_diagonal(&eig.eigenvalues.map(f));
    symmetrize(&(eig.eigenvectors * d * eig.eigenvectors.transpose()))
}

/// Matrix logarithm of an SPD matrix.
pub fn spd_log(m: &Matrix3<f64>) -> Result<Matrix3<f64>> {
    let eig = sym_eigen(m);
    let min = eig.eigenvalues.min();
    if !(min > SPD_EIGEN_FLOOR) {
        return Err(Error::NotSpd(min));
    }
    let d = Matrix3::from_diagonal(&eig.eigenvalues.map(f64::ln));
    Ok(symmetrize(
        &(eig.eigenvectors * d * eig.eigenvectors.transpose()),
    ))
}

/// Matrix exponential of a symmetric matrix.
pub fn sym_exp(m: &Matrix3<f64>) -> Matrix3<f64> {
    sym_apply(m, f64::exp)
}

/// Smallest eigenvalue of the symmetric part of `m`.
pub fn min_sym_eigenvalue(m: &Matrix3<f64>) -> f64 {
    sym_eigen(m).eigenvalues.min()
}

pub fn mat_from_slice(s: &[f64]) -> Matrix3<f64> {
    Matrix3::from_row_slice(&s[..9])
}

pub fn mat_to_vec(m: &Matrix3<f64>) -> Vec<f64> {
    let mut out = Vec::with_capacity(9);
    for i in 0..3 {
        for j in 0..3 {
            out.push(m[(i, j)]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn rodrigues_round_trip_over_angle_range() {
        let axis = Vector3::new(0.3, -0.5, 0.8).normalize();
        for k in 0..=60 {
            let theta = k as f64 * 0.05;
            if theta >= PI {
                break;
            }
            let w = axis * theta;
            let back = rot_log(&rot_exp(&w));
            assert_relative_eq!(back, w, epsilon = 1e-10);
        }
    }

    #[test]
    fn log_near_pi_uses_symmetric_part() {
        let axis = Vector3::new(1.0, 2.0, -0.5).normalize();
        let w = axis * (PI - 1e-7);
        let back = rot_log(&rot_exp(&w));
        assert_relative_eq!(back, w, epsilon = 1e-7);
    }

    #[test]
    fn spd_log_rejects_indefinite() {
        let m = Matrix3::from_diagonal(&Vector3::new(1.0, 0.0, 2.0));
        assert!(matches!(spd_log(&m), Err(Error::NotSpd(_))));
    }

    #[test]
    fn projection_repairs_drift() {
        let r = rot_exp(&Vector3::new(0.1, 0.2, 0.3));
        let noisy = r + Matrix3::repeat(1e-7);
        let fixed = project_to_rotation(&noisy);
        assert!(orthogonality_defect(&fixed) < 1e-14);
        assert_relative_eq!(fixed.determinant(), 1.0, epsilon = 1e-14);
    }
}
