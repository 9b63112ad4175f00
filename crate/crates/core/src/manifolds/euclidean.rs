//! Flat space: exp is translation, every Jacobi coefficient is affine.

use rand::Rng;
use rand_distr::StandardNormal;

pub fn exp(p: &[f64], x: &[f64]) -> Vec<f64> {
    p.iter().zip(x).map(|(a, b)| a + b).collect()
}

pub fn log(p: &[f64], q: &[f64]) -> Vec<f64> {
    q.iter().zip(p).map(|(a, b)| a - b).collect()
}

pub fn inner(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn geo(p: &[f64], q: &[f64], t: f64) -> Vec<f64> {
    p.iter().zip(q).map(|(a, b)| a + t * (b - a)).collect()
}

pub fn adj_start(t: f64, w: &[f64]) -> Vec<f64> {
    w.iter().map(|v| (1.0 - t) * v).collect()
}

pub fn basis(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            e
        })
        .collect()
}

pub fn random_point<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect()
}
