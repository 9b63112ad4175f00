//! Symmetric positive-definite 3x3 matrices with the log-Euclidean metric.
//!
//! Tangents live in the matrix-log chart, where the metric is Frobenius and
//! the geometry is flat: transport is the identity and the Jacobi
//! coefficients are exactly `1 - t` and `t`.

use nalgebra::Matrix3;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{
    mat_from_slice, mat_to_vec, min_sym_eigenvalue, spd_log, sym_exp, SPD_EIGEN_FLOOR,
};
use crate::manifold::MEMBERSHIP_TOL;

fn asymmetry(m: &Matrix3<f64>) -> f64 {
    (m - m.transpose()).norm()
}

pub fn check_point(p: &[f64]) -> Result<()> {
    let m = mat_from_slice(p);
    let asym = asymmetry(&m);
    if asym > MEMBERSHIP_TOL * (1.0 + m.norm()) {
        return Err(Error::NotOnManifold(format!("matrix asymmetry {asym}")));
    }
    let min = min_sym_eigenvalue(&m);
    if !(min > SPD_EIGEN_FLOOR) {
        return Err(Error::NotSpd(min));
    }
    Ok(())
}

pub fn check_tangent(x: &[f64]) -> Result<()> {
    let m = mat_from_slice(x);
    let asym = asymmetry(&m);
    if asym > MEMBERSHIP_TOL * (1.0 + m.norm()) {
        return Err(Error::NotOnManifold(format!("tangent asymmetry {asym}")));
    }
    Ok(())
}

fn chart(p: &[f64]) -> Result<Matrix3<f64>> {
    spd_log(&mat_from_slice(p))
}

fn from_chart(m: &Matrix3<f64>) -> Result<Vec<f64>> {
    let out = sym_exp(m);
    let min = min_sym_eigenvalue(&out);
    if !(min > SPD_EIGEN_FLOOR) {
        return Err(Error::NotSpd(min));
    }
    Ok(mat_to_vec(&out))
}

pub fn exp(p: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    from_chart(&(chart(p)? + mat_from_slice(x)))
}

pub fn log(p: &[f64], q: &[f64]) -> Result<Vec<f64>> {
    Ok(mat_to_vec(&(chart(q)? - chart(p)?)))
}

pub fn geo(p: &[f64], q: &[f64], t: f64) -> Result<Vec<f64>> {
    from_chart(&(chart(p)? * (1.0 - t) + chart(q)? * t))
}

pub fn basis() -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(6);
    for i in 0..3 {
        let mut e = vec![0.0; 9];
        e[3 * i + i] = 1.0;
        out.push(e);
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let mut e = vec![0.0; 9];
        e[3 * i + j] = s;
        e[3 * j + i] = s;
        out.push(e);
    }
    out
}

pub fn random_point<R: Rng + ?Sized>(rng: &mut R) -> Vec<f64> {
    let mut m = Matrix3::zeros();
    for i in 0..3 {
        for j in i..3 {
            let v = 0.5 * rng.sample::<f64, _>(StandardNormal);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    mat_to_vec(&sym_exp(&m))
}
