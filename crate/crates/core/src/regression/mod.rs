//! Least-squares Bézier spline regression on manifolds.

mod gradient;
mod init;
mod solver;
mod stats;

pub use gradient::{gradient, objective, objective_and_gradient};
pub use init::{initialize, resample};
pub use solver::{descend, fit, fit_from, Descent, FitResult, SolverOptions, StopReason};
pub use stats::{
    frechet_mean, r2_upper_bound, r_squared, sample_model, total_variance, FrechetMean,
    VARIANCE_FLOOR,
};

use serde::{Deserialize, Serialize};

use crate::bezier::SplineConfig;
use crate::error::{Error, Result};
use crate::manifold::{Manifold, Point};

/// Timestamped manifold-valued observations `(t_j, q_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSet {
    times: Vec<f64>,
    points: Vec<Point>,
}

impl DataSet {
    pub fn new(samples: Vec<(f64, Point)>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidData("data set is empty".into()));
        }
        if let Some((t, _)) = samples.iter().find(|(t, _)| !t.is_finite()) {
            return Err(Error::InvalidData(format!("non-finite time {t}")));
        }
        let (times, points) = samples.into_iter().unzip();
        Ok(DataSet { times, points })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &Point)> {
        self.times.iter().copied().zip(self.points.iter())
    }

    /// Checks every observation against the manifold's membership predicate.
    pub fn validate(&self, m: &Manifold) -> Result<()> {
        for (j, p) in self.points.iter().enumerate() {
            m.check_point(p)
                .map_err(|e| Error::InvalidData(format!("sample {j}: {e}")))?;
        }
        Ok(())
    }

    pub fn with_times(&self, times: Vec<f64>) -> Result<Self> {
        DataSet::new(times.into_iter().zip(self.points.iter().cloned()).collect())
    }
}

/// Affine map from data time to spline parameter, `(t - offset) * scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeMap {
    pub offset: f64,
    pub scale: f64,
}

impl TimeMap {
    pub const IDENTITY: TimeMap = TimeMap {
        offset: 0.0,
        scale: 1.0,
    };

    /// Open splines stretch `[min t, max t]` onto `[0, L]`; closed splines
    /// take the times as spline parameters.
    pub fn for_config(config: &SplineConfig, data: &DataSet) -> Result<Self> {
        if config.is_closed() {
            return Ok(TimeMap::IDENTITY);
        }
        let lo = data.times.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = data.times.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(hi > lo) {
            return Err(Error::InvalidData(
                "open spline fits need at least two distinct times".into(),
            ));
        }
        Ok(TimeMap {
            offset: lo,
            scale: config.domain_len() / (hi - lo),
        })
    }

    pub fn apply(&self, t: f64) -> f64 {
        (t - self.offset) * self.scale
    }

    /// Maps data times to spline parameters; open-spline parameters are
    /// clamped to `[0, L]` so rounding never leaves the domain.
    pub fn map(&self, config: &SplineConfig, data: &DataSet) -> Result<DataSet> {
        let len = config.domain_len();
        let times = data
            .times
            .iter()
            .map(|&t| {
                let s = self.apply(t);
                if config.is_closed() {
                    s
                } else {
                    s.clamp(0.0, len)
                }
            })
            .collect();
        data.with_times(times)
    }
}
