//! Mesh recovery from differential coordinates by sparse least squares.

use nalgebra::{DMatrix, Vector3};
use nalgebra_sparse::factorization::CscCholesky;
use nalgebra_sparse::{CooMatrix, CscMatrix};

use super::coords::{face_frame, DiffCoords};
use super::mesh::TriMesh;
use crate::error::{Error, Result};

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// True when every vertex is reachable from every other through faces.
pub fn is_connected(mesh: &TriMesh) -> bool {
    let mut parent: Vec<usize> = (0..mesh.vertex_count()).collect();
    for &[a, b, c] in mesh.faces() {
        for (x, y) in [(a, b), (a, c)] {
            let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
            parent[rx] = ry;
        }
    }
    let root = find(&mut parent, 0);
    (0..parent.len()).all(|i| find(&mut parent, i) == root)
}

/// Vertex positions whose face edges best match the encoded gradients.
///
/// Minimizes `sum_f |(x1 - x0) - R S e1|^2 + |(x2 - x0) - R S e2|^2`, where
/// `e1`, `e2` are the reference edges of face `f`, with vertex `anchor`
/// pinned to its reference position.
pub fn reconstruct(coords: &DiffCoords, reference: &TriMesh, anchor: usize) -> Result<TriMesh> {
    let n = reference.vertex_count();
    if coords.len() != reference.face_count() {
        return Err(Error::DimensionMismatch {
            expected: reference.face_count(),
            got: coords.len(),
        });
    }
    if anchor >= n {
        return Err(Error::InvalidData(format!(
            "anchor vertex {anchor} out of range for {n} vertices"
        )));
    }
    if !is_connected(reference) {
        return Err(Error::DisconnectedMesh);
    }
    let pinned = reference.vertices()[anchor];
    let slot = |v: usize| -> Option<usize> {
        match v.cmp(&anchor) {
            std::cmp::Ordering::Less => Some(v),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some(v - 1),
        }
    };

    let mut lhs = CooMatrix::new(n - 1, n - 1);
    let mut rhs = DMatrix::<f64>::zeros(n - 1, 3);
    let mut add_rhs = |v: usize, x: Vector3<f64>| {
        if let Some(r) = slot(v) {
            for k in 0..3 {
                rhs[(r, k)] += x[k];
            }
        }
    };
    for (f, &[v0, v1, v2]) in reference.faces().iter().enumerate() {
        let frame = face_frame(reference, f)?;
        let (r, s) = &coords.faces[f];
        let d = r * s;
        for (vj, e) in [(v1, frame.column(0)), (v2, frame.column(1))] {
            let target = d * e;
            // Edge term |x_j - x_0 - target|^2 in normal-equation form.
            add_rhs(vj, target);
            add_rhs(v0, -target);
            for (a, b, w) in [(v0, v0, 1.0), (vj, vj, 1.0), (v0, vj, -1.0), (vj, v0, -1.0)] {
                match (slot(a), slot(b)) {
                    (Some(i), Some(j)) => lhs.push(i, j, w),
                    (Some(_), None) => add_rhs(a, -w * pinned),
                    _ => {}
                }
            }
        }
    }
    let lhs = CscMatrix::from(&lhs);
    let chol = CscCholesky::factor(&lhs).map_err(|e| Error::SolverFailure(format!("{e:?}")))?;
    let x = chol.solve(&rhs);
    if !x.iter().all(|v| v.is_finite()) {
        return Err(Error::SolverFailure("non-finite solution".into()));
    }
    let vertices = (0..n)
        .map(|v| match slot(v) {
            Some(r) => Vector3::new(x[(r, 0)], x[(r, 1)], x[(r, 2)]),
            None => pinned,
        })
        .collect();
    reference.with_vertices(vertices)
}
