//! Intrinsic mean template of a mesh collection.

use super::coords::{encode, DiffCoords};
use super::mesh::TriMesh;
use super::reconstruct::reconstruct;
use crate::error::{Error, Result};
use crate::manifolds::{make_manifold, ManifoldDescriptor};
use crate::regression::frechet_mean;

/// Mean shape of `meshes` and each mesh's coordinates relative to it.
///
/// Meshes are encoded against the first one, averaged on the shape space,
/// and the mean is reconstructed with vertex 0 pinned. Every mesh is then
/// re-encoded against that template.
pub fn build_template(meshes: &[TriMesh]) -> Result<(TriMesh, Vec<DiffCoords>)> {
    let first = meshes
        .first()
        .ok_or_else(|| Error::InvalidData("no meshes given".into()))?;
    let initial: Vec<_> = meshes
        .iter()
        .map(|m| encode(m, first).map(|c| c.to_point()))
        .collect::<Result<_>>()?;
    let space = make_manifold(&ManifoldDescriptor::shape_space(first.face_count()))?;
    let mean = frechet_mean(&space, &initial, None)?;
    let template = reconstruct(&DiffCoords::from_point(&mean.point)?, first, 0)?;
    let coords = meshes
        .iter()
        .map(|m| encode(m, &template))
        .collect::<Result<_>>()?;
    Ok((template, coords))
}
