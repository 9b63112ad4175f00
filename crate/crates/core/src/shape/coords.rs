//! Per-face deformation gradients and their rotation/stretch encoding.

use nalgebra::Matrix3;
use rayon::prelude::*;

use super::mesh::TriMesh;
use crate::error::{Error, Result};
use crate::linalg::{mat_from_slice, mat_to_vec, symmetrize};
use crate::manifold::Point;

/// Deformation gradients with determinant at or below this are rejected.
pub const MIN_DETERMINANT: f64 = 1e-12;

/// Frame with columns `v1 - v0`, `v2 - v0` and the unit face normal.
pub fn face_frame(mesh: &TriMesh, face: usize) -> Result<Matrix3<f64>> {
    let [a, b, c] = mesh.face_vertices(face);
    let e1 = b - a;
    let e2 = c - a;
    let n = e1.cross(&e2);
    let len = n.norm();
    if !(len > 2.0 * super::mesh::MIN_FACE_AREA) {
        return Err(Error::DegenerateFace(face));
    }
    Ok(Matrix3::from_columns(&[e1, e2, n / len]))
}

fn polar_face(d: &Matrix3<f64>, face: usize) -> Result<(Matrix3<f64>, Matrix3<f64>)> {
    if !(d.determinant() > MIN_DETERMINANT) {
        return Err(Error::OrientationFlip(face));
    }
    let svd = d.svd(true, true);
    let u = svd.u.unwrap();
    let v_t = svd.v_t.unwrap();
    let r = u * v_t;
    let s = symmetrize(&(v_t.transpose() * Matrix3::from_diagonal(&svd.singular_values) * v_t));
    Ok((r, s))
}

/// Right polar decomposition `D = R S` with `R` a rotation and `S` SPD.
///
/// Computed from the SVD `D = U Σ Vᵀ` as `R = U Vᵀ`, `S = V Σ Vᵀ`. Fails
/// with `OrientationFlip(0)` when `det D <= 1e-12`.
pub fn polar_decompose(d: &Matrix3<f64>) -> Result<(Matrix3<f64>, Matrix3<f64>)> {
    polar_face(d, 0)
}

/// Differential coordinates: one `(R, S)` pair per face.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffCoords {
    pub faces: Vec<(Matrix3<f64>, Matrix3<f64>)>,
}

impl DiffCoords {
    pub fn identity(faces: usize) -> Self {
        DiffCoords {
            faces: vec![(Matrix3::identity(), Matrix3::identity()); faces],
        }
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    /// Point on `power(product(so3, spd3), m)`.
    pub fn to_point(&self) -> Point {
        let mut out = Vec::with_capacity(18 * self.faces.len());
        for (r, s) in &self.faces {
            out.extend(mat_to_vec(r));
            out.extend(mat_to_vec(s));
        }
        Point::new(out)
    }

    pub fn from_point(p: &Point) -> Result<Self> {
        let x = p.as_slice();
        if x.is_empty() || !x.len().is_multiple_of(18) {
            return Err(Error::DimensionMismatch {
                expected: 18 * (x.len() / 18).max(1),
                got: x.len(),
            });
        }
        let faces = x
            .chunks_exact(18)
            .map(|c| (mat_from_slice(&c[..9]), mat_from_slice(&c[9..])))
            .collect();
        Ok(DiffCoords { faces })
    }

    /// Per-face deformation gradients `R S`.
    pub fn gradients(&self) -> Vec<Matrix3<f64>> {
        self.faces.iter().map(|(r, s)| r * s).collect()
    }
}

/// Encodes `mesh` relative to `reference` face by face.
pub fn encode(mesh: &TriMesh, reference: &TriMesh) -> Result<DiffCoords> {
    reference.check_correspondence(mesh)?;
    let faces = (0..mesh.face_count())
        .into_par_iter()
        .map(|f| {
            let target = face_frame(mesh, f)?;
            let source = face_frame(reference, f)?;
            let inv = source.try_inverse().ok_or(Error::DegenerateFace(f))?;
            polar_face(&(target * inv), f)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DiffCoords { faces })
}
