//! The Riemannian interface shared by every manifold family.
//!
//! A [`Manifold`] is built from a [`ManifoldDescriptor`] and dispatches each
//! operation to its family, or componentwise for products and powers.
//! Points and tangents are flat `f64` payloads whose layout is fixed per
//! family:
//!
//! | family       | point payload          | tangent payload             |
//! |--------------|------------------------|-----------------------------|
//! | `euclidean`  | `n` coordinates        | `n` coordinates             |
//! | `sphere`     | unit vector in R^(n+1) | ambient vector, orthogonal  |
//! | `so3`        | 9, row-major rotation  | 3, body axis-angle          |
//! | `spd3`       | 9, row-major SPD       | 9, symmetric log-chart      |
//! | product/power| concatenated factors   | concatenated factors        |
//!
//! Adjoint geodesic differentials use the closed-form Jacobi fields of the
//! implemented symmetric spaces: in a parallel eigenframe of the Jacobi
//! operator each component is scaled by a scalar coefficient and
//! transported.

use std::ops::{Add, AddAssign, Mul, Neg, Range, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::manifolds::{euclidean, so3, spd3, sphere, ManifoldDescriptor};

/// Membership and tangency tolerance.
pub const MEMBERSHIP_TOL: f64 = 1e-9;
/// Subtracted from the theoretical injectivity radius for exp and extensions.
pub const INJECTIVITY_MARGIN: f64 = 1e-6;
/// Distance to the cut locus below which log is refused.
pub const LOG_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(payload: Vec<f64>) -> Self {
        Point(payload)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

/// Tangent vector payload. The base point is carried by the caller.
#[derive(Debug, Clone, PartialEq)]
pub struct Tangent(Vec<f64>);

impl Tangent {
    pub fn new(payload: Vec<f64>) -> Self {
        Tangent(payload)
    }

    pub fn zeros(len: usize) -> Self {
        Tangent(vec![0.0; len])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn scale(&self, s: f64) -> Tangent {
        Tangent(self.0.iter().map(|v| v * s).collect())
    }

    /// `self += a * x`
    pub fn axpy(&mut self, a: f64, x: &Tangent) {
        self.0.iter_mut().zip(&x.0).for_each(|(s, v)| *s += a * v);
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl From<Vec<f64>> for Tangent {
    fn from(v: Vec<f64>) -> Self {
        Tangent(v)
    }
}

impl Add for &Tangent {
    type Output = Tangent;
    fn add(self, rhs: &Tangent) -> Tangent {
        Tangent(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Add for Tangent {
    type Output = Tangent;
    fn add(self, rhs: Tangent) -> Tangent {
        &self + &rhs
    }
}

impl AddAssign<&Tangent> for Tangent {
    fn add_assign(&mut self, rhs: &Tangent) {
        self.0.iter_mut().zip(&rhs.0).for_each(|(a, b)| *a += b);
    }
}

impl Sub for &Tangent {
    type Output = Tangent;
    fn sub(self, rhs: &Tangent) -> Tangent {
        Tangent(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Sub for Tangent {
    type Output = Tangent;
    fn sub(self, rhs: Tangent) -> Tangent {
        &self - &rhs
    }
}

impl Mul<f64> for &Tangent {
    type Output = Tangent;
    fn mul(self, s: f64) -> Tangent {
        self.scale(s)
    }
}

impl Mul<f64> for Tangent {
    type Output = Tangent;
    fn mul(self, s: f64) -> Tangent {
        self.scale(s)
    }
}

impl Neg for Tangent {
    type Output = Tangent;
    fn neg(self) -> Tangent {
        self.scale(-1.0)
    }
}

#[derive(Debug, Clone)]
enum Family {
    Euclidean(usize),
    Sphere(usize),
    So3,
    Spd3,
    Product(Vec<Manifold>),
    Power(Box<Manifold>, usize),
}

/// A Riemannian manifold together with its operation table.
#[derive(Debug, Clone)]
pub struct Manifold {
    descriptor: ManifoldDescriptor,
    family: Family,
    dim: usize,
    point_len: usize,
    tangent_len: usize,
}

struct Part<'a> {
    factor: &'a Manifold,
    point: Range<usize>,
    tangent: Range<usize>,
}

impl Manifold {
    pub fn new(descriptor: ManifoldDescriptor) -> Result<Self> {
        descriptor.validate()?;
        let (family, dim, point_len, tangent_len) = match &descriptor {
            ManifoldDescriptor::Euclidean { n } => (Family::Euclidean(*n), *n, *n, *n),
            ManifoldDescriptor::Sphere { n } => (Family::Sphere(*n), *n, n + 1, n + 1),
            ManifoldDescriptor::So3 => (Family::So3, 3, 9, 3),
            ManifoldDescriptor::Spd3 => (Family::Spd3, 6, 9, 9),
            ManifoldDescriptor::Product { factors } => {
                let factors = factors
                    .iter()
                    .cloned()
                    .map(Manifold::new)
                    .collect::<Result<Vec<_>>>()?;
                let dim = factors.iter().map(|f| f.dim).sum();
                let pl = factors.iter().map(|f| f.point_len).sum();
                let tl = factors.iter().map(|f| f.tangent_len).sum();
                (Family::Product(factors), dim, pl, tl)
            }
            ManifoldDescriptor::Power { base, count } => {
                let base = Manifold::new((**base).clone())?;
                let (d, pl, tl) = (
                    base.dim * count,
                    base.point_len * count,
                    base.tangent_len * count,
                );
                (Family::Power(Box::new(base), *count), d, pl, tl)
            }
        };
        Ok(Manifold {
            descriptor,
            family,
            dim,
            point_len,
            tangent_len,
        })
    }

    pub fn descriptor(&self) -> &ManifoldDescriptor {
        &self.descriptor
    }

    /// Intrinsic dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point_len(&self) -> usize {
        self.point_len
    }

    pub fn tangent_len(&self) -> usize {
        self.tangent_len
    }

    fn parts(&self) -> Vec<Part<'_>> {
        let mut out = Vec::new();
        let (mut po, mut to) = (0, 0);
        match &self.family {
            Family::Product(factors) => {
                for f in factors {
                    out.push(Part {
                        factor: f,
                        point: po..po + f.point_len,
                        tangent: to..to + f.tangent_len,
                    });
                    po += f.point_len;
                    to += f.tangent_len;
                }
            }
            Family::Power(base, count) => {
                for _ in 0..*count {
                    out.push(Part {
                        factor: base,
                        point: po..po + base.point_len,
                        tangent: to..to + base.tangent_len,
                    });
                    po += base.point_len;
                    to += base.tangent_len;
                }
            }
            _ => {}
        }
        out
    }

    fn expect_point(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.point_len {
            return Err(Error::DimensionMismatch {
                expected: self.point_len,
                got: p.len(),
            });
        }
        Ok(())
    }

    fn expect_tangent(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.tangent_len {
            return Err(Error::DimensionMismatch {
                expected: self.tangent_len,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Membership predicate within [`MEMBERSHIP_TOL`].
    pub fn check_point(&self, p: &Point) -> Result<()> {
        self.expect_point(p.as_slice())?;
        self.check_point_raw(p.as_slice())
    }

    fn check_point_raw(&self, p: &[f64]) -> Result<()> {
        match &self.family {
            Family::Euclidean(_) => {
                if p.iter().all(|v| v.is_finite()) {
                    Ok(())
                } else {
                    Err(Error::NotOnManifold("non-finite coordinate".into()))
                }
            }
            Family::Sphere(_) => sphere::check_point(p),
            Family::So3 => so3::check_point(p),
            Family::Spd3 => spd3::check_point(p),
            _ => self
                .parts()
                .iter()
                .try_for_each(|part| part.factor.check_point_raw(&p[part.point.clone()])),
        }
    }

    /// Tangency predicate at `p` within [`MEMBERSHIP_TOL`].
    pub fn check_tangent(&self, p: &Point, x: &Tangent) -> Result<()> {
        self.expect_point(p.as_slice())?;
        self.expect_tangent(x.as_slice())?;
        self.check_tangent_raw(p.as_slice(), x.as_slice())
    }

    fn check_tangent_raw(&self, p: &[f64], x: &[f64]) -> Result<()> {
        match &self.family {
            Family::Sphere(_) => sphere::check_tangent(p, x),
            Family::Spd3 => spd3::check_tangent(x),
            Family::Euclidean(_) | Family::So3 => Ok(()),
            _ => self.parts().iter().try_for_each(|part| {
                part.factor
                    .check_tangent_raw(&p[part.point.clone()], &x[part.tangent.clone()])
            }),
        }
    }

    pub fn zero_tangent(&self) -> Tangent {
        Tangent::zeros(self.tangent_len)
    }

    pub fn exp(&self, p: &Point, x: &Tangent) -> Result<Point> {
        self.expect_point(p.as_slice())?;
        self.expect_tangent(x.as_slice())?;
        if x.as_slice().iter().all(|&c| c == 0.0) {
            return Ok(p.clone());
        }
        self.exp_raw(p.as_slice(), x.as_slice()).map(Point)
    }

    fn exp_raw(&self, p: &[f64], x: &[f64]) -> Result<Vec<f64>> {
        match &self.family {
            Family::Euclidean(_) => Ok(euclidean::exp(p, x)),
            Family::Sphere(_) => sphere::exp(p, x),
            Family::So3 => so3::exp(p, x),
            Family::Spd3 => spd3::exp(p, x),
            _ => self.concat_points(|part| {
                part.factor
                    .exp_raw(&p[part.point.clone()], &x[part.tangent.clone()])
            }),
        }
    }

    pub fn log(&self, p: &Point, q: &Point) -> Result<Tangent> {
        self.expect_point(p.as_slice())?;
        self.expect_point(q.as_slice())?;
        self.log_raw(p.as_slice(), q.as_slice()).map(Tangent)
    }

    fn log_raw(&self, p: &[f64], q: &[f64]) -> Result<Vec<f64>> {
        match &self.family {
            Family::Euclidean(_) => Ok(euclidean::log(p, q)),
            Family::Sphere(_) => sphere::log(p, q),
            Family::So3 => so3::log(p, q),
            Family::Spd3 => spd3::log(p, q),
            _ => self.concat_tangents(|part| {
                part.factor
                    .log_raw(&p[part.point.clone()], &q[part.point.clone()])
            }),
        }
    }

    pub fn inner(&self, p: &Point, x: &Tangent, y: &Tangent) -> Result<f64> {
        self.expect_point(p.as_slice())?;
        self.expect_tangent(x.as_slice())?;
        self.expect_tangent(y.as_slice())?;
        Ok(self.inner_raw(x.as_slice(), y.as_slice()))
    }

    // Every implemented metric is independent of the base point in its
    // chosen tangent representation.
    fn inner_raw(&self, x: &[f64], y: &[f64]) -> f64 {
        match &self.family {
            Family::Euclidean(_) | Family::Sphere(_) | Family::Spd3 => euclidean::inner(x, y),
            Family::So3 => so3::inner(x, y),
            _ => self
                .parts()
                .iter()
                .map(|part| {
                    part.factor
                        .inner_raw(&x[part.tangent.clone()], &y[part.tangent.clone()])
                })
                .sum(),
        }
    }

    pub fn norm(&self, p: &Point, x: &Tangent) -> Result<f64> {
        Ok(self.inner(p, x, x)?.sqrt())
    }

    pub fn dist(&self, p: &Point, q: &Point) -> Result<f64> {
        let v = self.log(p, q)?;
        Ok(self.inner_raw(v.as_slice(), v.as_slice()).sqrt())
    }

    /// Geodesic `t -> gamma(t; p, q)`; `t` may leave `[0, 1]` while the
    /// extension stays inside the injectivity bound.
    pub fn geo(&self, p: &Point, q: &Point, t: f64) -> Result<Point> {
        self.expect_point(p.as_slice())?;
        self.expect_point(q.as_slice())?;
        let out = self.geo_raw(p.as_slice(), q.as_slice(), t)?;
        if t == 0.0 {
            Ok(p.clone())
        } else if t == 1.0 {
            Ok(q.clone())
        } else {
            Ok(Point(out))
        }
    }

    fn geo_raw(&self, p: &[f64], q: &[f64], t: f64) -> Result<Vec<f64>> {
        match &self.family {
            Family::Euclidean(_) => Ok(euclidean::geo(p, q, t)),
            Family::Sphere(_) => sphere::geo(p, q, t),
            Family::So3 => so3::geo(p, q, t),
            Family::Spd3 => spd3::geo(p, q, t),
            _ => self.concat_points(|part| {
                part.factor
                    .geo_raw(&p[part.point.clone()], &q[part.point.clone()], t)
            }),
        }
    }

    /// Parallel transport of `x` from `p` to `q` along the minimizing geodesic.
    pub fn transp(&self, p: &Point, q: &Point, x: &Tangent) -> Result<Tangent> {
        self.expect_point(p.as_slice())?;
        self.expect_point(q.as_slice())?;
        self.expect_tangent(x.as_slice())?;
        self.transp_raw(p.as_slice(), q.as_slice(), x.as_slice())
            .map(Tangent)
    }

    fn transp_raw(&self, p: &[f64], q: &[f64], x: &[f64]) -> Result<Vec<f64>> {
        match &self.family {
            Family::Euclidean(_) | Family::Spd3 => Ok(x.to_vec()),
            Family::Sphere(_) => sphere::transp(p, q, x),
            Family::So3 => so3::transp(p, q, x),
            _ => self.concat_tangents(|part| {
                part.factor.transp_raw(
                    &p[part.point.clone()],
                    &q[part.point.clone()],
                    &x[part.tangent.clone()],
                )
            }),
        }
    }

    /// Adjoint of the differential of `p -> gamma(t; p, q)`, mapping `w` at
    /// `gamma(t)` to a tangent at `p`.
    pub fn adj_d_geo_start(&self, p: &Point, q: &Point, t: f64, w: &Tangent) -> Result<Tangent> {
        self.expect_point(p.as_slice())?;
        self.expect_point(q.as_slice())?;
        self.expect_tangent(w.as_slice())?;
        self.adj_start_raw(p.as_slice(), q.as_slice(), t, w.as_slice(), true)
            .map(Tangent)
    }

    /// Adjoint of the differential of `q -> gamma(t; p, q)`, via
    /// `gamma(t; p, q) = gamma(1 - t; q, p)`. The extension is checked from
    /// `p`, as in [`Manifold::geo`], since the reversed reach `|1 - t| L`
    /// is longer than the geodesic's own.
    pub fn adj_d_geo_end(&self, p: &Point, q: &Point, t: f64, w: &Tangent) -> Result<Tangent> {
        self.expect_point(p.as_slice())?;
        self.expect_point(q.as_slice())?;
        self.expect_tangent(w.as_slice())?;
        if !(0.0..=1.0).contains(&t) {
            self.geo_raw(p.as_slice(), q.as_slice(), t)?;
        }
        self.adj_start_raw(q.as_slice(), p.as_slice(), 1.0 - t, w.as_slice(), false)
            .map(Tangent)
    }

    fn adj_start_raw(
        &self,
        p: &[f64],
        q: &[f64],
        t: f64,
        w: &[f64],
        guarded: bool,
    ) -> Result<Vec<f64>> {
        match &self.family {
            Family::Euclidean(_) | Family::Spd3 => {
                if matches!(self.family, Family::Spd3) {
                    // domain checks only; the chart is flat
                    spd3::log(p, q)?;
                }
                Ok(euclidean::adj_start(t, w))
            }
            Family::Sphere(_) => sphere::adj_start(p, q, t, w, guarded),
            Family::So3 => so3::adj_start(p, q, t, w, guarded),
            _ => self.concat_tangents(|part| {
                part.factor.adj_start_raw(
                    &p[part.point.clone()],
                    &q[part.point.clone()],
                    t,
                    &w[part.tangent.clone()],
                    guarded,
                )
            }),
        }
    }

    fn concat_points(&self, f: impl Fn(&Part<'_>) -> Result<Vec<f64>>) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.point_len);
        for part in self.parts() {
            out.extend(f(&part)?);
        }
        Ok(out)
    }

    fn concat_tangents(&self, f: impl Fn(&Part<'_>) -> Result<Vec<f64>>) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.tangent_len);
        for part in self.parts() {
            out.extend(f(&part)?);
        }
        Ok(out)
    }

    /// `dim()` tangents at `p`, orthonormal under [`Manifold::inner`].
    pub fn orthonormal_basis(&self, p: &Point) -> Result<Vec<Tangent>> {
        self.expect_point(p.as_slice())?;
        Ok(self
            .basis_raw(p.as_slice())
            .into_iter()
            .map(Tangent)
            .collect())
    }

    fn basis_raw(&self, p: &[f64]) -> Vec<Vec<f64>> {
        match &self.family {
            Family::Euclidean(n) => euclidean::basis(*n),
            Family::Sphere(_) => sphere::basis(p),
            Family::So3 => so3::basis(),
            Family::Spd3 => spd3::basis(),
            _ => {
                let mut out = Vec::with_capacity(self.dim);
                for part in self.parts() {
                    for b in part.factor.basis_raw(&p[part.point.clone()]) {
                        let mut full = vec![0.0; self.tangent_len];
                        full[part.tangent.clone()].copy_from_slice(&b);
                        out.push(full);
                    }
                }
                out
            }
        }
    }

    pub fn random_point(&self, seed: u64) -> Point {
        self.random_point_with(&mut ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn random_point_with<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        Point(self.random_point_raw(rng))
    }

    fn random_point_raw<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match &self.family {
            Family::Euclidean(n) => euclidean::random_point(*n, rng),
            Family::Sphere(n) => sphere::random_point(n + 1, rng),
            Family::So3 => so3::random_point(rng),
            Family::Spd3 => spd3::random_point(rng),
            _ => {
                let mut out = Vec::with_capacity(self.point_len);
                for part in self.parts() {
                    out.extend(part.factor.random_point_raw(rng));
                }
                out
            }
        }
    }

    /// Isotropic Gaussian tangent: coefficients i.i.d. `N(0, scale^2)`
    /// against [`Manifold::orthonormal_basis`].
    pub fn random_tangent(&self, p: &Point, scale: f64, seed: u64) -> Result<Tangent> {
        self.random_tangent_with(p, scale, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn random_tangent_with<R: Rng + ?Sized>(
        &self,
        p: &Point,
        scale: f64,
        rng: &mut R,
    ) -> Result<Tangent> {
        let mut out = self.zero_tangent();
        if scale == 0.0 {
            return Ok(out);
        }
        for b in self.orthonormal_basis(p)? {
            let c: f64 = rng.sample(StandardNormal);
            out.axpy(scale * c, &b);
        }
        Ok(out)
    }
}
