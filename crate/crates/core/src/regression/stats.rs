use super::DataSet;
use crate::bezier::{spline_eval, ControlGrid};
use crate::error::{Error, Result};
use crate::manifold::{Manifold, Point};

use super::objective;

const MEAN_TOL: f64 = 1e-10;
const MEAN_MAX_ITER: usize = 100;
/// Variances at or below this count as zero.
pub const VARIANCE_FLOOR: f64 = 1e-24;

#[derive(Debug, Clone, PartialEq)]
pub struct FrechetMean {
    pub point: Point,
    pub converged: bool,
    pub iterations: usize,
}

/// Weighted intrinsic mean by the fixed-point iteration
/// `x <- exp_x(sum w_j log_x(q_j) / sum w_j)`, started from the first point.
pub fn frechet_mean(
    m: &Manifold,
    points: &[Point],
    weights: Option<&[f64]>,
) -> Result<FrechetMean> {
    if points.is_empty() {
        return Err(Error::InvalidData("mean of an empty point set".into()));
    }
    let uniform;
    let w = match weights {
        Some(w) => {
            if w.len() != points.len() {
                return Err(Error::InvalidData(
                    "one weight per point is required".into(),
                ));
            }
            w
        }
        None => {
            uniform = vec![1.0; points.len()];
            &uniform
        }
    };
    let total: f64 = w.iter().sum();
    if !(total > 0.0) {
        return Err(Error::InvalidData(
            "weights must have a positive sum".into(),
        ));
    }
    let mut x = points[0].clone();
    for it in 1..=MEAN_MAX_ITER {
        let mut step = m.zero_tangent();
        for (q, wj) in points.iter().zip(w) {
            step.axpy(wj / total, &m.log(&x, q)?);
        }
        let size = m.norm(&x, &step)?;
        x = m.exp(&x, &step)?;
        if size <= MEAN_TOL {
            return Ok(FrechetMean {
                point: x,
                converged: true,
                iterations: it,
            });
        }
    }
    Ok(FrechetMean {
        point: x,
        converged: false,
        iterations: MEAN_MAX_ITER,
    })
}

/// `(1/N) min_q sum_j dist(q, q_j)^2`, evaluated at the Fréchet mean.
pub fn total_variance(m: &Manifold, points: &[Point]) -> Result<f64> {
    let mean = frechet_mean(m, points, None)?.point;
    let mut acc = 0.0;
    for q in points {
        acc += m.dist(&mean, q)?.powi(2);
    }
    Ok(acc / points.len() as f64)
}

/// Manifold R²: `1 - (2/N) E / var`, data times in spline parameters.
pub fn r_squared(m: &Manifold, grid: &ControlGrid, data: &DataSet) -> Result<f64> {
    if data.len() < 2 {
        return Err(Error::InvalidData("R² needs at least two samples".into()));
    }
    let var = total_variance(m, data.points())?;
    if var <= VARIANCE_FLOOR {
        return Err(Error::ZeroVariance);
    }
    let e = objective(m, grid, data)?;
    Ok(1.0 - (2.0 / data.len() as f64) * e / var)
}

/// Upper bound on R² for data grouped by identical times: no curve can beat
/// the mean of every group, so the unexplained variance is at least the
/// size-weighted mean of the within-group variances.
pub fn r2_upper_bound(m: &Manifold, data: &DataSet) -> Result<f64> {
    let mut groups: Vec<(f64, Vec<Point>)> = Vec::new();
    for (t, q) in data.iter() {
        match groups.iter_mut().find(|(g, _)| *g == t) {
            Some((_, members)) => members.push(q.clone()),
            None => groups.push((t, vec![q.clone()])),
        }
    }
    if groups.len() < 2 {
        return Err(Error::InvalidData(
            "the R² bound needs at least two time groups".into(),
        ));
    }
    let var = total_variance(m, data.points())?;
    if var <= VARIANCE_FLOOR {
        return Err(Error::ZeroVariance);
    }
    let n = data.len() as f64;
    let mut within = 0.0;
    for (_, members) in &groups {
        within += members.len() as f64 / n * total_variance(m, members)?;
    }
    Ok(1.0 - within / var)
}

/// Draw from `Q(t) = exp_{B(t)}(eps)` with isotropic Gaussian `eps`.
pub fn sample_model(
    m: &Manifold,
    grid: &ControlGrid,
    t: f64,
    sigma: f64,
    seed: u64,
) -> Result<Point> {
    if !(sigma >= 0.0) {
        return Err(Error::InvalidData(format!(
            "sigma {sigma} must be non-negative"
        )));
    }
    let b = spline_eval(m, grid, t)?.point;
    if sigma == 0.0 {
        return Ok(b);
    }
    let eps = m.random_tangent(&b, sigma, seed)?;
    m.exp(&b, &eps)
}
