//! Triangle meshes and Wavefront OBJ text.

use std::fmt::Write as _;

use nalgebra::Vector3;

use crate::error::{Error, Result};

/// Faces with area at or below this are rejected.
pub const MIN_FACE_AREA: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    vertices: Vec<Vector3<f64>>,
    faces: Vec<[usize; 3]>,
}

impl TriMesh {
    /// Builds a mesh, checking index ranges and face areas.
    pub fn new(vertices: Vec<Vector3<f64>>, faces: Vec<[usize; 3]>) -> Result<Self> {
        if faces.is_empty() {
            return Err(Error::InvalidData("mesh has no faces".into()));
        }
        for (f, face) in faces.iter().enumerate() {
            if let Some(&i) = face.iter().find(|&&i| i >= vertices.len()) {
                return Err(Error::InvalidData(format!(
                    "face {f} references vertex {i} but the mesh has {} vertices",
                    vertices.len()
                )));
            }
        }
        if !vertices.iter().all(|v| v.iter().all(|x| x.is_finite())) {
            return Err(Error::InvalidData("non-finite vertex coordinate".into()));
        }
        let mesh = TriMesh { vertices, faces };
        for f in 0..mesh.faces.len() {
            if !(mesh.face_area(f) > MIN_FACE_AREA) {
                return Err(Error::DegenerateFace(f));
            }
        }
        Ok(mesh)
    }

    pub fn vertices(&self) -> &[Vector3<f64>] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn face_vertices(&self, f: usize) -> [Vector3<f64>; 3] {
        let [a, b, c] = self.faces[f];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn face_area(&self, f: usize) -> f64 {
        let [a, b, c] = self.face_vertices(f);
        0.5 * (b - a).cross(&(c - a)).norm()
    }

    pub fn centroid(&self) -> Vector3<f64> {
        let sum: Vector3<f64> = self.vertices.iter().sum();
        sum / self.vertices.len() as f64
    }

    /// Same connectivity with new vertex positions.
    pub fn with_vertices(&self, vertices: Vec<Vector3<f64>>) -> Result<Self> {
        if vertices.len() != self.vertices.len() {
            return Err(Error::DimensionMismatch {
                expected: self.vertices.len(),
                got: vertices.len(),
            });
        }
        TriMesh::new(vertices, self.faces.clone())
    }

    /// Applies `f` to every vertex.
    pub fn map_vertices(&self, f: impl Fn(&Vector3<f64>) -> Vector3<f64>) -> Result<Self> {
        self.with_vertices(self.vertices.iter().map(f).collect())
    }

    /// Checks that `other` has the same vertex count and face list.
    pub fn check_correspondence(&self, other: &TriMesh) -> Result<()> {
        if let Some(f) = (0..self.faces.len().max(other.faces.len()))
            .find(|&f| self.faces.get(f) != other.faces.get(f))
        {
            return Err(Error::Correspondence(f));
        }
        if self.vertices.len() != other.vertices.len() {
            return Err(Error::DimensionMismatch {
                expected: self.vertices.len(),
                got: other.vertices.len(),
            });
        }
        Ok(())
    }

    /// Largest vertex distance to a corresponded mesh.
    pub fn max_vertex_distance(&self, other: &TriMesh) -> f64 {
        self.vertices
            .iter()
            .zip(&other.vertices)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Parses `v` and `f` records. Face corners may carry `/vt/vn` suffixes,
    /// which are dropped; other record types are ignored.
    pub fn from_obj_str(text: &str) -> Result<Self> {
        let mut vertices = Vec::new();
        let mut faces = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            let mut tokens = line.split_whitespace();
            let bad = |msg: &str| Error::InvalidData(format!("OBJ line {}: {msg}", lineno + 1));
            match tokens.next() {
                Some("v") => {
                    let coords: Vec<f64> = tokens
                        .take(3)
                        .map(|t| t.parse::<f64>().map_err(|_| bad("bad vertex coordinate")))
                        .collect::<Result<_>>()?;
                    if coords.len() != 3 {
                        return Err(bad("vertex needs three coordinates"));
                    }
                    vertices.push(Vector3::new(coords[0], coords[1], coords[2]));
                }
                Some("f") => {
                    let corners: Vec<&str> = tokens.collect();
                    if corners.len() != 3 {
                        return Err(bad("only triangular faces are supported"));
                    }
                    let mut face = [0usize; 3];
                    for (slot, corner) in face.iter_mut().zip(&corners) {
                        let idx = corner.split('/').next().unwrap_or("");
                        let i: usize = idx.parse().map_err(|_| bad("bad face index"))?;
                        if i == 0 {
                            return Err(bad("face indices are 1-based"));
                        }
                        *slot = i - 1;
                    }
                    faces.push(face);
                }
                _ => {}
            }
        }
        TriMesh::new(vertices, faces)
    }

    /// OBJ text with 6 significant digits per coordinate.
    pub fn to_obj_string(&self) -> String {
        let mut out = String::new();
        for v in &self.vertices {
            let _ = writeln!(out, "v {} {} {}", fmt_g6(v.x), fmt_g6(v.y), fmt_g6(v.z));
        }
        for [a, b, c] in &self.faces {
            let _ = writeln!(out, "f {} {} {}", a + 1, b + 1, c + 1);
        }
        out
    }
}

/// `%g`-style formatting with 6 significant digits.
pub(crate) fn fmt_g6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!(
            "{}e{}{:02}",
            trim_zeros(mantissa.into()),
            if exp < 0 { '-' } else { '+' },
            exp.abs()
        )
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}
