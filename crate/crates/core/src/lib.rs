//! Intrinsic Bézier spline regression for manifold-valued data.
//!
//! Splines are evaluated with the generalized de Casteljau algorithm and
//! fitted by Riemannian gradient descent, with gradients propagated back
//! through the tree of geodesics by adjoint Jacobi fields. The [`shape`]
//! module maps corresponded triangle meshes into the differential
//! coordinates shape space `(SO(3) x Sym+(3))^m` so shape trajectories can
//! be regressed with the same machinery.

// Negated comparisons such as `!(x > 0.0)` deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bezier;
pub mod error;
pub mod io;
pub mod linalg;
pub mod manifold;
pub mod manifolds;
pub mod oracle;
pub mod regression;
pub mod shape;

pub use bezier::{ControlGrid, FreeParams, SplineConfig};
pub use error::{Error, Result};
pub use manifold::{Manifold, Point, Tangent};
pub use manifolds::{make_manifold, ManifoldDescriptor};
pub use regression::{DataSet, FitResult, SolverOptions};
