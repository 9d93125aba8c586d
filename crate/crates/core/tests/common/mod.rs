#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scssc_core::cube::PixelMatrix;
use scssc_core::Geometry;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut impl Rng) -> f64 {
    let u: f64 = rng.random::<f64>().max(1e-300);
    let v: f64 = rng.random();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

pub fn unit(mut v: Vec<f64>) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= n);
    v
}

pub fn random_unit(rng: &mut impl Rng, dim: usize) -> Vec<f64> {
    unit((0..dim).map(|_| gaussian(rng)).collect())
}

/// `count` unit vectors stacked column-major.
pub fn random_unit_columns(rng: &mut impl Rng, dim: usize, count: usize) -> Vec<f64> {
    (0..count).flat_map(|_| random_unit(rng, dim)).collect()
}

pub fn pixels(dim: usize, rows: usize, cols: usize, data: Vec<f64>) -> PixelMatrix {
    PixelMatrix::new(dim, Geometry::new(rows, cols).unwrap(), data).unwrap()
}

/// Orthonormal basis of a random `sub`-dimensional subspace of `R^dim`, column-major.
pub fn random_basis(rng: &mut impl Rng, dim: usize, sub: usize) -> Vec<f64> {
    let mut basis: Vec<f64> = Vec::with_capacity(dim * sub);
    for _ in 0..sub {
        let mut v: Vec<f64> = (0..dim).map(|_| gaussian(rng)).collect();
        for b in basis.chunks(dim) {
            let p: f64 = b.iter().zip(&v).map(|(a, c)| a * c).sum();
            v.iter_mut().zip(b).for_each(|(x, a)| *x -= p * a);
        }
        basis.extend(unit(v));
    }
    basis
}

/// Unit point drawn from the span of `basis`.
pub fn point_in(rng: &mut impl Rng, basis: &[f64], dim: usize) -> Vec<f64> {
    let sub = basis.len() / dim;
    let w: Vec<f64> = (0..sub).map(|_| gaussian(rng)).collect();
    unit(
        (0..dim)
            .map(|i| (0..sub).map(|s| basis[s * dim + i] * w[s]).sum())
            .collect(),
    )
}

pub fn brute_force_best_trace(counts: &[u64], n: usize) -> u64 {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = 0;
    permute(&mut perm, 0, &mut |p| {
        best = best.max((0..n).map(|i| counts[i * n + p[i]]).sum());
    });
    best
}

fn permute(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, f);
        p.swap(k, i);
    }
}
