//! Generalized Procrustes alignment of corresponded meshes.

use nalgebra::{Matrix3, Vector3};

use super::mesh::TriMesh;
use crate::error::{Error, Result};

const MOVEMENT_TOL: f64 = 1e-10;
const MAX_ITERATIONS: usize = 100;
const RANK_TOL: f64 = 1e-12;

/// Rotation minimizing `sum |R x_i - y_i|^2` for centered point sets.
pub fn optimal_rotation(x: &[Vector3<f64>], y: &[Vector3<f64>]) -> Result<Matrix3<f64>> {
    let m: Matrix3<f64> = x.iter().zip(y).map(|(a, b)| b * a.transpose()).sum();
    let svd = m.svd(true, true);
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(f64::total_cmp);
    if sv[0] < RANK_TOL && sv[1] < RANK_TOL {
        return Err(Error::DegenerateConfiguration(format!(
            "cross-covariance has singular values {:.3e}, {:.3e}, {:.3e}",
            sv[2], sv[1], sv[0]
        )));
    }
    let u = svd.u.unwrap();
    let v_t = svd.v_t.unwrap();
    let d = (u * v_t).determinant().signum();
    Ok(u * Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, d)) * v_t)
}

fn centered(mesh: &TriMesh) -> Vec<Vector3<f64>> {
    let c = mesh.centroid();
    mesh.vertices().iter().map(|v| v - c).collect()
}

fn rms_distance(a: &[Vector3<f64>], b: &[Vector3<f64>]) -> f64 {
    let s: f64 = a.iter().zip(b).map(|(p, q)| (p - q).norm_squared()).sum();
    (s / a.len() as f64).sqrt()
}

/// Rigidly aligns every mesh to the common mean shape.
///
/// Each mesh is centered at its vertex centroid. The first centered mesh seeds
/// the mean; then every mesh is rotated onto the mean, the mean is recomputed,
/// and the loop stops once the mean moves by at most 1e-10 (RMS per vertex).
pub fn procrustes_align(meshes: &[TriMesh]) -> Result<Vec<TriMesh>> {
    let Some(first) = meshes.first() else {
        return Ok(Vec::new());
    };
    for m in &meshes[1..] {
        first.check_correspondence(m)?;
    }
    let centered: Vec<Vec<Vector3<f64>>> = meshes.iter().map(centered).collect();
    let mut current = centered.clone();
    let mut mean = centered[0].clone();
    for _ in 0..MAX_ITERATIONS {
        for (cur, src) in current.iter_mut().zip(&centered) {
            let r = optimal_rotation(src, &mean)?;
            *cur = src.iter().map(|v| r * v).collect();
        }
        let next: Vec<Vector3<f64>> = (0..mean.len())
            .map(|i| current.iter().map(|c| c[i]).sum::<Vector3<f64>>() / current.len() as f64)
            .collect();
        let moved = rms_distance(&next, &mean);
        mean = next;
        if moved <= MOVEMENT_TOL {
            break;
        }
    }
    current
        .into_iter()
        .map(|v| first.with_vertices(v))
        .collect()
}
