#![allow(dead_code)]

use std::f64::consts::PI;

use rbspline::bezier::{expand, FreeParams};
use rbspline::regression::objective;
use rbspline::{
    make_manifold, ControlGrid, DataSet, Manifold, ManifoldDescriptor, Point, SplineConfig, Tangent,
};

pub fn shape_space(faces: usize) -> ManifoldDescriptor {
    ManifoldDescriptor::shape_space(faces)
}

/// The families exercised by the kernel suite, with a metric-norm bound that
/// keeps exp inside the injectivity region.
pub fn kernel_families() -> Vec<(&'static str, Manifold, f64)> {
    let so3_bound = 2f64.sqrt() * PI;
    vec![
        (
            "euclidean(3)",
            make_manifold(&ManifoldDescriptor::Euclidean { n: 3 }).unwrap(),
            3.0,
        ),
        (
            "sphere(2)",
            make_manifold(&ManifoldDescriptor::Sphere { n: 2 }).unwrap(),
            PI,
        ),
        (
            "sphere(4)",
            make_manifold(&ManifoldDescriptor::Sphere { n: 4 }).unwrap(),
            PI,
        ),
        (
            "so3",
            make_manifold(&ManifoldDescriptor::So3).unwrap(),
            so3_bound,
        ),
        (
            "spd3",
            make_manifold(&ManifoldDescriptor::Spd3).unwrap(),
            3.0,
        ),
        (
            "power(product(so3,spd3),5)",
            make_manifold(&shape_space(5)).unwrap(),
            so3_bound,
        ),
    ]
}

pub fn sphere2() -> Manifold {
    make_manifold(&ManifoldDescriptor::Sphere { n: 2 }).unwrap()
}

/// Tangent at `p` with metric norm `len`.
pub fn tangent_of_norm(m: &Manifold, p: &Point, len: f64, seed: u64) -> Tangent {
    let x = m.random_tangent(p, 1.0, seed).unwrap();
    let n = m.norm(p, &x).unwrap();
    x.scale(len / n)
}

/// Point at distance `d` from `p` in a random direction.
pub fn point_at(m: &Manifold, p: &Point, d: f64, seed: u64) -> Point {
    m.exp(p, &tangent_of_norm(m, p, d, seed)).unwrap()
}

/// Random free points clustered around a random centre.
pub fn random_free(m: &Manifold, config: &SplineConfig, spread: f64, seed: u64) -> FreeParams {
    let centre = m.random_point(seed);
    FreeParams {
        points: (0..config.free_count())
            .map(|i| point_at(m, &centre, spread, seed * 1000 + i as u64 + 1))
            .collect(),
    }
}

pub fn random_grid(m: &Manifold, config: &SplineConfig, spread: f64, seed: u64) -> ControlGrid {
    expand(m, config, &random_free(m, config, spread, seed)).unwrap()
}

/// Samples `B(t) exp`-perturbed by `noise` at each time.
pub fn noisy_samples(
    m: &Manifold,
    grid: &ControlGrid,
    times: &[f64],
    noise: f64,
    seed: u64,
) -> DataSet {
    let samples = times
        .iter()
        .enumerate()
        .map(|(j, &t)| {
            let b = rbspline::bezier::spline_eval(m, grid, t).unwrap().point;
            let q = if noise > 0.0 {
                let eps = m.random_tangent(&b, noise, seed * 7919 + j as u64).unwrap();
                m.exp(&b, &eps).unwrap()
            } else {
                b
            };
            (t, q)
        })
        .collect();
    DataSet::new(samples).unwrap()
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Maximum over free points of `|g_fd - g|/|g|`, with `g_fd` assembled from
/// central differences along an orthonormal basis.
pub fn gradient_fd_error(
    m: &Manifold,
    config: &SplineConfig,
    free: &FreeParams,
    data: &DataSet,
    grads: &[Tangent],
    h: f64,
) -> f64 {
    let energy = |f: &FreeParams| objective(m, &expand(m, config, f).unwrap(), data).unwrap();
    let mut worst: f64 = 0.0;
    for (i, p) in free.points.iter().enumerate() {
        let basis = m.orthonormal_basis(p).unwrap();
        let mut diff2 = 0.0;
        let mut norm2 = 0.0;
        for b in &basis {
            let shifted = |s: f64| {
                let mut f = free.clone();
                f.points[i] = m.exp(p, &b.scale(s)).unwrap();
                energy(&f)
            };
            let fd = (shifted(h) - shifted(-h)) / (2.0 * h);
            let an = m.inner(p, &grads[i], b).unwrap();
            diff2 += (fd - an).powi(2);
            norm2 += an * an;
        }
        let scale = norm2.sqrt().max(1e-8);
        worst = worst.max(diff2.sqrt() / scale);
    }
    worst
}

/// Wavy `nx` x `ny` grid surface, two triangles per cell.
pub fn grid_mesh(nx: usize, ny: usize) -> rbspline::shape::TriMesh {
    use nalgebra::Vector3;
    let mut v = Vec::new();
    for j in 0..=ny {
        for i in 0..=nx {
            let (x, y) = (i as f64, j as f64);
            v.push(Vector3::new(x, y, 0.3 * (0.9 * x).sin() * (0.6 * y).cos()));
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut f = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            f.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            f.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    rbspline::shape::TriMesh::new(v, f).unwrap()
}

/// Reference mesh under a stretch field that is periodic in `t` with period 2.
pub fn periodic_deformation(mesh: &rbspline::shape::TriMesh, t: f64) -> rbspline::shape::TriMesh {
    use nalgebra::Vector3;
    let phase = std::f64::consts::PI * t;
    mesh.map_vertices(|v| {
        Vector3::new(
            v.x * (1.0 + 0.25 * phase.sin()),
            v.y * (1.0 + 0.15 * phase.cos()) + 0.1 * v.x * phase.sin(),
            v.z * (1.0 + 0.3 * (phase + 0.5).sin()),
        )
    })
    .unwrap()
}
