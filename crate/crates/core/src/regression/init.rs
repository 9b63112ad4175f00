use super::DataSet;
use crate::bezier::{decasteljau, ControlGrid, FreeParams, SplineConfig};
use crate::error::{Error, Result};
use crate::manifold::{Manifold, Point};

/// Geodesic-polygon initial guess.
///
/// Each knot `i` takes the datum whose (spline-parameter) time is nearest,
/// ties going to the smaller index; closed splines measure that distance
/// cyclically. Segment `i` gets control points equally spaced along the
/// geodesic between corners `i` and `i + 1`, and the determined points are
/// then dropped.
pub fn initialize(m: &Manifold, config: &SplineConfig, data: &DataSet) -> Result<FreeParams> {
    if data.is_empty() {
        return Err(Error::InvalidData(
            "cannot initialize from an empty data set".into(),
        ));
    }
    let l = config.segments();
    let len = config.domain_len();
    let knots = if config.is_closed() { l } else { l + 1 };
    let mut corners: Vec<&Point> = Vec::with_capacity(l + 1);
    for i in 0..knots {
        let knot = i as f64;
        let gap = |t: f64| {
            if config.is_closed() {
                let d = (t.rem_euclid(len) - knot).abs();
                d.min(len - d)
            } else {
                (t - knot).abs()
            }
        };
        let mut best = 0;
        for j in 1..data.len() {
            if gap(data.times()[j]) < gap(data.times()[best]) {
                best = j;
            }
        }
        corners.push(&data.points()[best]);
    }
    if config.is_closed() {
        corners.push(corners[0]);
    }

    let mut points: Vec<Option<Point>> = vec![None; config.point_count()];
    for seg in 0..l {
        let k = config.degrees()[seg];
        for j in 0..=k {
            let p = m.geo(corners[seg], corners[seg + 1], j as f64 / k as f64)?;
            points[config.index(seg, j)] = Some(p);
        }
    }
    let points = points
        .into_iter()
        .map(|p| p.expect("every index is covered"))
        .collect();
    Ok(ControlGrid::new(config.clone(), points)?.restrict())
}

/// Re-expresses each segment with a new order by sampling the old segment
/// at equally spaced parameters. Used for warm starts across orders.
pub fn resample(m: &Manifold, grid: &ControlGrid, target: &SplineConfig) -> Result<ControlGrid> {
    let from = grid.config();
    if from.segments() != target.segments() || from.is_closed() != target.is_closed() {
        return Err(Error::InvalidConfig(
            "resampling keeps the segment count and closedness".into(),
        ));
    }
    let mut points: Vec<Option<Point>> = vec![None; target.point_count()];
    for seg in 0..target.segments() {
        let k = target.degrees()[seg];
        let old = grid.segment(seg);
        for j in 0..=k {
            let (p, _) = decasteljau(m, &old, j as f64 / k as f64)?;
            points[target.index(seg, j)] = Some(p);
        }
    }
    ControlGrid::new(
        target.clone(),
        points
            .into_iter()
            .map(|p| p.expect("every index is covered"))
            .collect(),
    )
}
