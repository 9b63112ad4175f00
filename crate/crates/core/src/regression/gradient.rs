//! Sum-of-squared-error objective and its exact Riemannian gradient.
//!
//! For every datum the residual `-log_{B(t_j)}(q_j)` is pushed from the apex
//! of the de Casteljau triangle down to the control points. Each node
//! `beta_a^l = gamma(s; beta_a^(l-1), beta_(a+1)^(l-1))` hands the adjoint
//! start differential to its left child and the adjoint end differential
//! to its right child. Gradients at determined points are finally chained
//! through `b = gamma(-lambda; c, a)` onto the joint and the inner point.

use rayon::prelude::*;

use super::DataSet;
use crate::bezier::{expand, spline_eval, ControlGrid, FreeParams, SplineConfig};
use crate::error::Result;
use crate::manifold::{Manifold, Tangent};

/// `E = 1/2 sum_j dist(B(t_j), q_j)^2`, with `t_j` in spline parameters.
pub fn objective(m: &Manifold, grid: &ControlGrid, data: &DataSet) -> Result<f64> {
    let terms = data
        .times()
        .par_iter()
        .zip(data.points().par_iter())
        .map(|(&t, q)| {
            let b = spline_eval(m, grid, t)?.point;
            let d = m.dist(&b, q)?;
            Ok(d * d)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(0.5 * terms.iter().sum::<f64>())
}

struct Term {
    sq_dist: f64,
    indices: Vec<usize>,
    grads: Vec<Tangent>,
}

fn datum_term(m: &Manifold, grid: &ControlGrid, t: f64, q: &crate::Point) -> Result<Term> {
    let eval = spline_eval(m, grid, t)?;
    let residual = m.log(&eval.point, q)?;
    let sq_dist = m.inner(&eval.point, &residual, &residual)?;
    let s = eval.local_t;
    let levels = &eval.triangle.levels;
    let mut upper = vec![-residual];
    for l in (1..levels.len()).rev() {
        let lower = &levels[l - 1];
        let mut next = vec![m.zero_tangent(); lower.len()];
        for (a, w) in upper.iter().enumerate() {
            next[a] += &m.adj_d_geo_start(&lower[a], &lower[a + 1], s, w)?;
            next[a + 1] += &m.adj_d_geo_end(&lower[a], &lower[a + 1], s, w)?;
        }
        upper = next;
    }
    Ok(Term {
        sq_dist,
        indices: grid.config().segment_indices(eval.segment),
        grads: upper,
    })
}

/// Objective value and gradient with respect to every free control point.
pub fn objective_and_gradient(
    m: &Manifold,
    config: &SplineConfig,
    free: &FreeParams,
    data: &DataSet,
) -> Result<(f64, Vec<Tangent>)> {
    let grid = expand(m, config, free)?;
    let terms = data
        .times()
        .par_iter()
        .zip(data.points().par_iter())
        .map(|(&t, q)| datum_term(m, &grid, t, q))
        .collect::<Result<Vec<Term>>>()?;

    let mut full = vec![m.zero_tangent(); config.point_count()];
    let mut sum = 0.0;
    for term in &terms {
        sum += term.sq_dist;
        for (&i, g) in term.indices.iter().zip(&term.grads) {
            full[i] += g;
        }
    }

    let points = grid.points();
    let joints = config.joints();
    let mut determined = vec![false; config.point_count()];
    for j in joints.iter().rev() {
        determined[j.determined] = true;
        let g = std::mem::replace(&mut full[j.determined], m.zero_tangent());
        let (c, a) = (&points[j.joint], &points[j.inner]);
        full[j.joint] += &m.adj_d_geo_start(c, a, -j.lambda, &g)?;
        full[j.inner] += &m.adj_d_geo_end(c, a, -j.lambda, &g)?;
    }
    let grads = full
        .into_iter()
        .zip(determined)
        .filter(|(_, d)| !d)
        .map(|(g, _)| g)
        .collect();
    Ok((0.5 * sum, grads))
}

/// Riemannian gradient of `objective . expand` at the free points.
pub fn gradient(
    m: &Manifold,
    config: &SplineConfig,
    free: &FreeParams,
    data: &DataSet,
) -> Result<Vec<Tangent>> {
    Ok(objective_and_gradient(m, config, free, data)?.1)
}
