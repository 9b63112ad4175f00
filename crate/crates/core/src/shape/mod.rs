//! Differential-coordinates shape space for corresponded triangle meshes.
//!
//! A mesh is encoded relative to a reference by the per-face deformation
//! gradient `D = R S`, giving one point of `power(product(so3, spd3), m)`.

mod coords;
mod mesh;
mod procrustes;
mod reconstruct;
mod template;

pub use coords::{encode, face_frame, polar_decompose, DiffCoords, MIN_DETERMINANT};
pub use mesh::{TriMesh, MIN_FACE_AREA};
pub use procrustes::{optimal_rotation, procrustes_align};
pub use reconstruct::{is_connected, reconstruct};
pub use template::build_template;
