//! Manifold-valued Bézier curves and composite C¹ Bézier splines.
//!
//! A spline with `L` segments of orders `k_0, ..., k_{L-1}` is stored as its
//! `K + 1` distinct control points, flattened segment by segment with each
//! shared joint stored once. For closed splines the very first point
//! `p^(0)_0` is dropped and represented by the last one.
//!
//! C¹ continuity removes one degree of freedom per joint: the first inner
//! point of the following segment is determined by reflecting the last
//! inner point of the preceding segment through the joint along their
//! common geodesic. [`FreeParams`] holds the remaining points.

use crate::error::{Error, Result};
use crate::manifold::{Manifold, Point, Tangent};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplineConfig {
    degrees: Vec<usize>,
    closed: bool,
}

/// One C¹ joint: `points[determined] = exp_c(-lambda log_c(points[inner]))`
/// with `c = points[joint]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Joint {
    pub determined: usize,
    pub inner: usize,
    pub joint: usize,
    pub lambda: f64,
    /// Parameter at which the geodesic from `inner` to `determined` passes
    /// through the joint.
    pub alignment: f64,
}

impl SplineConfig {
    pub fn new(degrees: Vec<usize>, closed: bool) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::InvalidConfig(
                "at least one segment is required".into(),
            ));
        }
        if degrees.contains(&0) {
            return Err(Error::InvalidConfig(
                "segment orders must be at least 1".into(),
            ));
        }
        if closed {
            if degrees.len() < 2 {
                return Err(Error::InvalidConfig(
                    "a closed spline needs at least two segments".into(),
                ));
            }
            if degrees[0] < 3 || degrees[degrees.len() - 1] < 3 {
                return Err(Error::InvalidConfig(
                    "first and last segment of a closed spline must be at least cubic".into(),
                ));
            }
        }
        Ok(SplineConfig { degrees, closed })
    }

    pub fn open(degrees: Vec<usize>) -> Result<Self> {
        Self::new(degrees, false)
    }

    pub fn closed(degrees: Vec<usize>) -> Result<Self> {
        Self::new(degrees, true)
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn segments(&self) -> usize {
        self.degrees.len()
    }

    /// Length of the parameter domain `[0, L]`.
    pub fn domain_len(&self) -> f64 {
        self.degrees.len() as f64
    }

    /// `K`, one less than the number of distinct control points.
    pub fn k_total(&self) -> usize {
        let sum: usize = self.degrees.iter().sum();
        if self.closed {
            sum - 1
        } else {
            sum
        }
    }

    pub fn point_count(&self) -> usize {
        self.k_total() + 1
    }

    pub fn free_count(&self) -> usize {
        self.point_count() - self.joints().len()
    }

    /// Flattened index of control point `j` of segment `seg`.
    pub fn index(&self, seg: usize, j: usize) -> usize {
        let offset: usize = self.degrees[..seg].iter().sum();
        if self.closed {
            (offset + j + self.point_count() - 1) % self.point_count()
        } else {
            offset + j
        }
    }

    /// Segment control-point indices into the flattened grid.
    pub fn segment_indices(&self, seg: usize) -> Vec<usize> {
        (0..=self.degrees[seg])
            .map(|j| self.index(seg, j))
            .collect()
    }

    /// C¹ joints in evaluation order: every determined point only depends
    /// on points with an earlier position in this list or on free points.
    pub fn joints(&self) -> Vec<Joint> {
        let l = self.segments();
        let mut out = Vec::new();
        let mut push = |prev: usize, next: usize| {
            let (kp, kn) = (self.degrees[prev] as f64, self.degrees[next] as f64);
            out.push(Joint {
                determined: self.index(next, 1),
                inner: self.index(prev, self.degrees[prev] - 1),
                joint: self.index(next, 0),
                lambda: kp / kn,
                alignment: kn / (kp + kn),
            });
        };
        for i in 1..l {
            push(i - 1, i);
        }
        if self.closed {
            push(l - 1, 0);
        }
        out
    }

    fn is_determined(&self) -> Vec<bool> {
        let mut mask = vec![false; self.point_count()];
        for j in self.joints() {
            mask[j.determined] = true;
        }
        mask
    }

    /// Segment index and local parameter of spline parameter `t`.
    pub fn locate(&self, t: f64) -> Result<(usize, f64)> {
        let len = self.domain_len();
        if !t.is_finite() {
            return Err(Error::DomainError { t, len });
        }
        let tau = if self.closed {
            let r = t.rem_euclid(len);
            if r >= len {
                0.0
            } else {
                r
            }
        } else {
            if !(0.0..=len).contains(&t) {
                return Err(Error::DomainError { t, len });
            }
            t
        };
        let seg = (tau.floor() as usize).min(self.segments() - 1);
        Ok((seg, tau - seg as f64))
    }
}

/// The de Casteljau triangle: `levels[l][i]` is `beta_i^l(t)`.
#[derive(Debug, Clone)]
pub struct Triangle {
    pub levels: Vec<Vec<Point>>,
}

impl Triangle {
    pub fn apex(&self) -> &Point {
        &self.levels[self.levels.len() - 1][0]
    }
}

/// Generalized de Casteljau evaluation of a Bézier curve at `t`.
pub fn decasteljau(m: &Manifold, points: &[&Point], t: f64) -> Result<(Point, Triangle)> {
    if points.len() < 2 {
        return Err(Error::InvalidConfig(
            "a Bézier curve needs at least two control points".into(),
        ));
    }
    let mut levels: Vec<Vec<Point>> = Vec::with_capacity(points.len());
    levels.push(points.iter().map(|p| (*p).clone()).collect());
    for l in 1..points.len() {
        let prev = &levels[l - 1];
        let next = prev
            .windows(2)
            .map(|w| m.geo(&w[0], &w[1], t))
            .collect::<Result<Vec<_>>>()?;
        levels.push(next);
    }
    let tri = Triangle { levels };
    Ok((tri.apex().clone(), tri))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveEnd {
    Start,
    End,
}

/// Velocity of a Bézier curve at one of its endpoints:
/// `k log_{p_0}(p_1)` or `-k log_{p_k}(p_{k-1})`.
pub fn endpoint_velocity(m: &Manifold, points: &[&Point], which: CurveEnd) -> Result<Tangent> {
    let k = points.len() - 1;
    match which {
        CurveEnd::Start => Ok(m.log(points[0], points[1])?.scale(k as f64)),
        CurveEnd::End => Ok(m.log(points[k], points[k - 1])?.scale(-(k as f64))),
    }
}

/// Solves the joint condition for the first inner point of the following
/// segment: `b = gamma(-lambda; c, a)`.
pub fn c1_determine(m: &Manifold, a: &Point, c: &Point, lambda: f64) -> Result<Point> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "joint ratio {lambda} must be positive"
        )));
    }
    m.geo(c, a, -lambda)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FreeParams {
    pub points: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControlGrid {
    config: SplineConfig,
    points: Vec<Point>,
}

impl ControlGrid {
    pub fn new(config: SplineConfig, points: Vec<Point>) -> Result<Self> {
        if points.len() != config.point_count() {
            return Err(Error::InvalidConfig(format!(
                "expected {} distinct control points, got {}",
                config.point_count(),
                points.len()
            )));
        }
        Ok(ControlGrid { config, points })
    }

    /// All control points equal to `p`.
    pub fn constant(config: SplineConfig, p: &Point) -> Self {
        let points = vec![p.clone(); config.point_count()];
        ControlGrid { config, points }
    }

    pub fn config(&self) -> &SplineConfig {
        &self.config
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn segment(&self, seg: usize) -> Vec<&Point> {
        self.config
            .segment_indices(seg)
            .into_iter()
            .map(|i| &self.points[i])
            .collect()
    }

    /// Drops the determined points.
    pub fn restrict(&self) -> FreeParams {
        let mask = self.config.is_determined();
        FreeParams {
            points: self
                .points
                .iter()
                .zip(mask)
                .filter(|(_, d)| !d)
                .map(|(p, _)| p.clone())
                .collect(),
        }
    }

    /// Distance of each determined point from its value `gamma(-lambda; c, a)`.
    pub fn c1_residuals(&self, m: &Manifold) -> Result<Vec<f64>> {
        self.config
            .joints()
            .iter()
            .map(|j| {
                let a = &self.points[j.inner];
                let b = &self.points[j.determined];
                let c = &self.points[j.joint];
                m.dist(&c1_determine(m, a, c, j.lambda)?, b)
            })
            .collect()
    }

    /// Norm of the velocity jump at every joint, from the endpoint velocity
    /// formulas of the adjacent segments.
    pub fn velocity_jumps(&self, m: &Manifold) -> Result<Vec<f64>> {
        let l = self.config.segments();
        let pairs: Vec<(usize, usize)> = (1..l)
            .map(|i| (i - 1, i))
            .chain(self.config.is_closed().then_some((l - 1, 0)))
            .collect();
        pairs
            .into_iter()
            .map(|(prev, next)| {
                let a = self.segment(prev);
                let b = self.segment(next);
                let out = endpoint_velocity(m, &a, CurveEnd::End)?;
                let inn = endpoint_velocity(m, &b, CurveEnd::Start)?;
                m.norm(b[0], &(&out - &inn))
            })
            .collect()
    }
}

/// Inserts the determined points, producing a C¹ control grid.
pub fn expand(m: &Manifold, config: &SplineConfig, free: &FreeParams) -> Result<ControlGrid> {
    if free.points.len() != config.free_count() {
        return Err(Error::InvalidConfig(format!(
            "expected {} free control points, got {}",
            config.free_count(),
            free.points.len()
        )));
    }
    let mask = config.is_determined();
    let mut slots: Vec<Option<Point>> = vec![None; config.point_count()];
    let mut it = free.points.iter();
    for (slot, det) in slots.iter_mut().zip(&mask) {
        if !det {
            *slot = it.next().cloned();
        }
    }
    for j in config.joints() {
        let a = slots[j.inner]
            .as_ref()
            .expect("inner point precedes its joint");
        let c = slots[j.joint]
            .as_ref()
            .expect("joint precedes its determined point");
        let b = c1_determine(m, a, c, j.lambda)?;
        slots[j.determined] = Some(b);
    }
    let points = slots
        .into_iter()
        .map(|p| p.expect("all slots filled"))
        .collect();
    ControlGrid::new(config.clone(), points)
}

#[derive(Debug, Clone)]
pub struct SplineEval {
    pub point: Point,
    pub segment: usize,
    pub local_t: f64,
    pub triangle: Triangle,
}

/// Evaluates the spline at `t`; open splines are defined on `[0, L]`,
/// closed ones for every real `t` (taken mod `L`).
pub fn spline_eval(m: &Manifold, grid: &ControlGrid, t: f64) -> Result<SplineEval> {
    let (segment, local_t) = grid.config.locate(t)?;
    let (point, triangle) = decasteljau(m, &grid.segment(segment), local_t)?;
    Ok(SplineEval {
        point,
        segment,
        local_t,
        triangle,
    })
}
