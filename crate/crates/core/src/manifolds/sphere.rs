//! Unit sphere S^n embedded in R^(n+1).
//!
//! Points are unit vectors, tangents are ambient vectors orthogonal to the
//! base point. Along a geodesic of length L the Jacobi operator has
//! eigenvalue 0 on the velocity direction and L^2 on every normal
//! direction.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use super::euclidean::inner;
use crate::error::{Error, Result};
use crate::manifold::{INJECTIVITY_MARGIN, LOG_MARGIN, MEMBERSHIP_TOL};

pub const EXP_BOUND: f64 = PI - INJECTIVITY_MARGIN;

fn norm(x: &[f64]) -> f64 {
    inner(x, x).sqrt()
}

fn combine(a: f64, x: &[f64], b: f64, y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(u, v)| a * u + b * v).collect()
}

fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    let n = norm(&v);
    v.iter_mut().for_each(|c| *c /= n);
    v
}

pub fn check_point(p: &[f64]) -> Result<()> {
    let n = norm(p);
    if (n - 1.0).abs() > MEMBERSHIP_TOL {
        return Err(Error::NotOnManifold(format!("sphere point has norm {n}")));
    }
    Ok(())
}

pub fn check_tangent(p: &[f64], x: &[f64]) -> Result<()> {
    let d = inner(p, x);
    if d.abs() > MEMBERSHIP_TOL * (1.0 + norm(x)) {
        return Err(Error::NotOnManifold(format!(
            "sphere tangent has normal component {d}"
        )));
    }
    Ok(())
}

/// Point at arc length `angle` along the great circle through `p` with unit
/// direction `u`.
fn walk(p: &[f64], u: &[f64], angle: f64) -> Vec<f64> {
    normalized(combine(angle.cos(), p, angle.sin(), u))
}

/// Velocity direction at arc length `angle` along the same great circle.
fn heading(p: &[f64], u: &[f64], angle: f64) -> Vec<f64> {
    combine(-angle.sin(), p, angle.cos(), u)
}

pub fn exp(p: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    let nx = norm(x);
    if nx > EXP_BOUND {
        return Err(Error::TangentTooLong {
            norm: nx,
            bound: EXP_BOUND,
        });
    }
    if nx == 0.0 {
        return Ok(p.to_vec());
    }
    let u: Vec<f64> = x.iter().map(|c| c / nx).collect();
    Ok(walk(p, &u, nx))
}

/// Returns `(theta, u)` with `log_p(q) = theta * u`; `u` is empty when
/// `theta == 0`.
fn polar_log(p: &[f64], q: &[f64]) -> Result<(f64, Vec<f64>)> {
    if p == q {
        return Ok((0.0, Vec::new()));
    }
    let d = inner(p, q);
    let v = combine(1.0, q, -d, p);
    let s = norm(&v);
    let theta = s.atan2(d);
    if theta >= PI - LOG_MARGIN {
        return Err(Error::NotInDomain(format!(
            "sphere points are (nearly) antipodal, angle {theta}"
        )));
    }
    if s == 0.0 {
        return Ok((0.0, Vec::new()));
    }
    Ok((theta, v.into_iter().map(|c| c / s).collect()))
}

pub fn log(p: &[f64], q: &[f64]) -> Result<Vec<f64>> {
    let (theta, u) = polar_log(p, q)?;
    if theta == 0.0 {
        return Ok(vec![0.0; p.len()]);
    }
    Ok(u.into_iter().map(|c| c * theta).collect())
}

pub fn geo(p: &[f64], q: &[f64], t: f64) -> Result<Vec<f64>> {
    let (theta, u) = polar_log(p, q)?;
    let reach = t.abs() * theta;
    if !(0.0..=1.0).contains(&t) && reach > EXP_BOUND {
        return Err(Error::ExtensionOutOfRange {
            reach,
            bound: EXP_BOUND,
        });
    }
    if theta == 0.0 {
        return Ok(p.to_vec());
    }
    Ok(walk(p, &u, t * theta))
}

pub fn transp(p: &[f64], q: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    let (theta, u) = polar_log(p, q)?;
    if theta == 0.0 {
        return Ok(x.to_vec());
    }
    let a = inner(x, &u);
    let arrived = heading(p, &u, theta);
    Ok(x.iter()
        .zip(&u)
        .zip(&arrived)
        .map(|((xi, ui), vi)| xi - a * ui + a * vi)
        .collect())
}

/// `sin((1 - t) L) / sin(L)`, continuous at `L = 0`.
fn normal_coefficient(t: f64, len: f64) -> f64 {
    if len < 1e-6 {
        let s = 1.0 - t;
        return s * (1.0 + (1.0 - s * s) * len * len / 6.0);
    }
    ((1.0 - t) * len).sin() / len.sin()
}

/// `guarded = false` skips the extension check, for callers that have
/// already checked the same geodesic from its other end.
pub fn adj_start(p: &[f64], q: &[f64], t: f64, w: &[f64], guarded: bool) -> Result<Vec<f64>> {
    let (theta, u) = polar_log(p, q)?;
    let reach = t.abs() * theta;
    if guarded && !(0.0..=1.0).contains(&t) && reach > EXP_BOUND {
        return Err(Error::ExtensionOutOfRange {
            reach,
            bound: EXP_BOUND,
        });
    }
    if theta == 0.0 {
        return Ok(w.iter().map(|c| (1.0 - t) * c).collect());
    }
    let at = walk(p, &u, t * theta);
    let along = heading(p, &u, t * theta);
    let a = inner(w, &along);
    let radial = inner(w, &at);
    let f = normal_coefficient(t, theta);
    Ok(w.iter()
        .zip(&along)
        .zip(&at)
        .zip(&u)
        .map(|(((wi, vi), gi), ui)| {
            let normal = wi - a * vi - radial * gi;
            (1.0 - t) * a * ui + f * normal
        })
        .collect())
}

pub fn basis(p: &[f64]) -> Vec<Vec<f64>> {
    let ambient = p.len();
    let mut order: Vec<usize> = (0..ambient).collect();
    order.sort_by(|&a, &b| p[a].abs().total_cmp(&p[b].abs()));
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(ambient - 1);
    for &i in &order[..ambient - 1] {
        let mut v = vec![0.0; ambient];
        v[i] = 1.0;
        // Two Gram-Schmidt passes against p and the accepted vectors.
        for _ in 0..2 {
            let d = inner(&v, p);
            v.iter_mut().zip(p).for_each(|(a, b)| *a -= d * b);
            for b in &out {
                let d = inner(&v, b);
                v.iter_mut().zip(b).for_each(|(a, c)| *a -= d * c);
            }
        }
        out.push(normalized(v));
    }
    out
}

pub fn random_point<R: Rng + ?Sized>(ambient: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..ambient)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        if norm(&v) > 1e-6 {
            return normalized(v);
        }
    }
}
