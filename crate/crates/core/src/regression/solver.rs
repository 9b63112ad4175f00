//! Riemannian gradient descent with Armijo backtracking.

use super::{frechet_mean, initialize, objective_and_gradient, r_squared, DataSet, TimeMap};
use crate::bezier::{expand, ControlGrid, FreeParams, SplineConfig};
use crate::error::{Error, Result};
use crate::manifold::{Manifold, Point, Tangent};

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    pub initial_step: f64,
    pub armijo_slope: f64,
    pub shrink_factor: f64,
    pub max_shrinks: usize,
    pub step_growth: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_iterations: 500,
            gradient_tolerance: 1e-6,
            initial_step: 1.0,
            armijo_slope: 1e-4,
            shrink_factor: 0.5,
            max_shrinks: 25,
            step_growth: 2.0,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = self.max_iterations > 0
            && self.gradient_tolerance > 0.0
            && self.initial_step > 0.0
            && self.armijo_slope > 0.0
            && self.max_shrinks > 0
            && self.step_growth > 0.0;
        if !positive || !(self.shrink_factor > 0.0 && self.shrink_factor < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "invalid solver options {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    GradientTolerance,
    MaxIterations,
    LineSearchFailed,
}

/// Outcome of one descent run.
#[derive(Debug, Clone)]
pub struct Descent {
    pub free: FreeParams,
    pub objective_trace: Vec<f64>,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub stop: StopReason,
}

impl Descent {
    pub fn objective(&self) -> f64 {
        *self
            .objective_trace
            .last()
            .expect("trace holds the initial value")
    }
}

#[derive(Debug, Clone)]
pub struct FitResult {
    pub grid: ControlGrid,
    pub objective: f64,
    /// Objective after every accepted iterate, starting with the initial one.
    pub objective_trace: Vec<f64>,
    pub gradient_norm: f64,
    pub converged: bool,
    pub stop: StopReason,
    pub r_squared: f64,
    pub iterations: usize,
    pub time_map: TimeMap,
    /// Whether the constant-curve baseline beat the regular run.
    pub from_baseline: bool,
}

fn sq_norm(m: &Manifold, free: &FreeParams, grads: &[Tangent]) -> Result<f64> {
    let mut acc = 0.0;
    for (p, g) in free.points.iter().zip(grads) {
        acc += m.inner(p, g, g)?;
    }
    Ok(acc)
}

fn step(m: &Manifold, free: &FreeParams, grads: &[Tangent], s: f64) -> Result<FreeParams> {
    let points = free
        .points
        .iter()
        .zip(grads)
        .map(|(p, g)| m.exp(p, &g.scale(-s)))
        .collect::<Result<Vec<Point>>>()?;
    Ok(FreeParams { points })
}

/// Gradient descent on the free control points.
///
/// Candidates whose evaluation leaves the geodesic domain are treated as
/// rejected steps, so the trace stays non-increasing.
pub fn descend(
    m: &Manifold,
    config: &SplineConfig,
    data: &DataSet,
    start: FreeParams,
    options: &SolverOptions,
) -> Result<Descent> {
    options.validate()?;
    let max_step = options.initial_step * 1024.0;
    let mut free = start;
    let (mut e, mut grads) = objective_and_gradient(m, config, &free, data)?;
    let mut trace = vec![e];
    let mut s = options.initial_step;
    let mut iterations = 0;
    let mut stop = StopReason::MaxIterations;
    let mut gn2 = sq_norm(m, &free, &grads)?;

    while iterations < options.max_iterations {
        if gn2.sqrt() < options.gradient_tolerance {
            stop = StopReason::GradientTolerance;
            break;
        }
        let mut accepted = None;
        for _ in 0..=options.max_shrinks {
            let candidate = step(m, &free, &grads, s)
                .and_then(|c| objective_and_gradient(m, config, &c, data).map(|eg| (c, eg)));
            if let Ok((c, (ec, gc))) = candidate {
                if ec <= e - options.armijo_slope * s * gn2 {
                    accepted = Some((c, ec, gc));
                    break;
                }
            }
            s *= options.shrink_factor;
        }
        let Some((c, ec, gc)) = accepted else {
            stop = StopReason::LineSearchFailed;
            break;
        };
        free = c;
        e = ec;
        grads = gc;
        gn2 = sq_norm(m, &free, &grads)?;
        trace.push(e);
        iterations += 1;
        s = (s * options.step_growth).min(max_step);
    }
    if stop == StopReason::MaxIterations && gn2.sqrt() < options.gradient_tolerance {
        stop = StopReason::GradientTolerance;
    }
    Ok(Descent {
        free,
        objective_trace: trace,
        gradient_norm: gn2.sqrt(),
        iterations,
        stop,
    })
}

/// Fits a spline to data whose times are already spline parameters,
/// starting from `start`.
///
/// The constant curve at the Fréchet mean of the data is also considered;
/// when it is better than the regular result it is refined and returned,
/// which makes `R² >= 0` hold for every result.
pub fn fit_from(
    m: &Manifold,
    config: &SplineConfig,
    data: &DataSet,
    start: FreeParams,
    options: &SolverOptions,
) -> Result<FitResult> {
    if data.len() < 2 {
        return Err(Error::InvalidData(
            "fitting needs at least two samples".into(),
        ));
    }
    let mut run = descend(m, config, data, start, options)?;
    let mut from_baseline = false;

    let mean = frechet_mean(m, data.points(), None)?.point;
    let baseline = ControlGrid::constant(config.clone(), &mean).restrict();
    let (e_base, _) = objective_and_gradient(m, config, &baseline, data)?;
    if e_base < run.objective() {
        let refined = descend(m, config, data, baseline, options)?;
        if refined.objective() < run.objective() {
            run = refined;
            from_baseline = true;
        }
    }

    let grid = expand(m, config, &run.free)?;
    let r_squared = r_squared(m, &grid, data)?;
    Ok(FitResult {
        objective: run.objective(),
        converged: run.stop == StopReason::GradientTolerance,
        grid,
        gradient_norm: run.gradient_norm,
        stop: run.stop,
        r_squared,
        iterations: run.iterations,
        objective_trace: run.objective_trace,
        time_map: TimeMap::IDENTITY,
        from_baseline,
    })
}

/// Fits a spline with the geodesic-polygon initialization. Data times are
/// mapped to spline parameters first (see [`TimeMap::for_config`]).
pub fn fit(
    m: &Manifold,
    config: &SplineConfig,
    data: &DataSet,
    options: &SolverOptions,
) -> Result<FitResult> {
    data.validate(m)?;
    let map = TimeMap::for_config(config, data)?;
    let mapped = map.map(config, data)?;
    let start = initialize(m, config, &mapped)?;
    let mut result = fit_from(m, config, &mapped, start, options)?;
    result.time_map = map;
    Ok(result)
}
