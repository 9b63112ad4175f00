//! Finite-difference references for validating the closed-form geometry.
//!
//! Nothing in the fitting path calls into this module.

use crate::error::{Error, Result};
use crate::manifold::{Manifold, Point, Tangent};

/// Central-difference differential of `p -> gamma(t; p, q)` in direction `x`,
/// expressed at `gamma(t; p, q)`.
pub fn fd_d_geo(
    m: &Manifold,
    p: &Point,
    q: &Point,
    t: f64,
    x: &Tangent,
    h: f64,
) -> Result<Tangent> {
    if !(1e-7..=1e-3).contains(&h) {
        return Err(Error::InvalidData(format!(
            "finite-difference step {h} outside [1e-7, 1e-3]"
        )));
    }
    let base = m.geo(p, q, t)?;
    let plus = m.geo(&m.exp(p, &x.scale(h))?, q, t)?;
    let minus = m.geo(&m.exp(p, &x.scale(-h))?, q, t)?;
    let d = &m.log(&base, &plus)? - &m.log(&base, &minus)?;
    Ok(d.scale(0.5 / h))
}

/// Central-difference derivative of a scalar function along `exp_p(s x)`.
pub fn fd_directional<F>(m: &Manifold, p: &Point, x: &Tangent, h: f64, f: F) -> Result<f64>
where
    F: Fn(&Point) -> Result<f64>,
{
    let plus = f(&m.exp(p, &x.scale(h))?)?;
    let minus = f(&m.exp(p, &x.scale(-h))?)?;
    Ok((plus - minus) / (2.0 * h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifolds::ManifoldDescriptor;

    #[test]
    fn euclidean_is_exact() {
        let m = Manifold::new(ManifoldDescriptor::Euclidean { n: 2 }).unwrap();
        let (p, q) = (Point::new(vec![0.5, -1.0]), Point::new(vec![2.0, 3.0]));
        let x = Tangent::new(vec![1.0, 2.0]);
        let d = fd_d_geo(&m, &p, &q, 0.3, &x, 1e-5).unwrap();
        for (a, b) in d.as_slice().iter().zip(x.scale(0.7).as_slice()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn sphere_tangential_component_is_affine() {
        let m = Manifold::new(ManifoldDescriptor::Sphere { n: 2 }).unwrap();
        let p = Point::new(vec![1.0, 0.0, 0.0]);
        let q = Point::new(vec![0.0, 0.8, 0.6]);
        let x = m.log(&p, &q).unwrap().scale(0.4);
        let t = 0.35;
        let d = fd_d_geo(&m, &p, &q, t, &x, 1e-5).unwrap();
        let want = (1.0 - t) * m.norm(&p, &x).unwrap();
        assert!((m.norm(&p, &d).unwrap() - want).abs() < 1e-8);
    }

    #[test]
    fn rejects_bad_step() {
        let m = Manifold::new(ManifoldDescriptor::Euclidean { n: 1 }).unwrap();
        let p = Point::new(vec![0.0]);
        assert!(fd_d_geo(&m, &p, &p, 0.5, &Tangent::new(vec![1.0]), 0.1).is_err());
    }
}
