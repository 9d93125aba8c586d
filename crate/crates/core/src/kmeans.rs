//! Seeded k-means (k-means++ initialization, Lloyd iterations, restarts).

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::math::{sq_dist, sqrt};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansParams {
    pub k: usize,
    pub seed: u64,
    pub restarts: usize,
    pub max_iter: usize,
    /// Stop once no centroid moves farther than this.
    pub tol: f64,
}

impl KMeansParams {
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            seed,
            restarts: 10,
            max_iter: 300,
            tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    /// Cluster of every point in `1..=k`, numbered by first appearance.
    pub labels: Vec<u32>,
    /// `k × dim` row-major, in label order.
    pub centroids: Vec<f64>,
    pub inertia: f64,
}

/// Clusters the row-major `n × dim` point set.
pub fn kmeans(points: &[f64], dim: usize, params: &KMeansParams) -> Result<KMeansResult> {
    let k = params.k;
    if dim == 0 || points.len() % dim != 0 {
        return Err(Error::dim(
            "point buffer is not a multiple of the dimension",
        ));
    }
    let n = points.len() / dim;
    if k == 0 || n < k {
        return Err(Error::param(alloc::format!(
            "cannot form {k} clusters from {n} points"
        )));
    }
    let distinct = count_distinct(points, dim, k);
    if distinct < k {
        return Err(Error::DegenerateClusters { distinct, k });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut best: Option<(f64, Vec<usize>)> = None;
    for _ in 0..params.restarts.max(1) {
        let init = plus_plus(points, dim, k, &mut rng);
        let (assign, inertia) = lloyd(points, dim, init, params);
        if best.as_ref().map_or(true, |(b, _)| inertia < *b) {
            best = Some((inertia, assign));
        }
    }
    let (inertia, assign) = best.expect("at least one restart");
    // Canonical numbering by first appearance.
    let mut rename = vec![u32::MAX; k];
    let mut next = 0;
    let labels: Vec<u32> = assign
        .iter()
        .map(|&a| {
            if rename[a] == u32::MAX {
                next += 1;
                rename[a] = next;
            }
            rename[a]
        })
        .collect();
    let mut centroids = vec![0.0; k * dim];
    let mut counts = vec![0usize; k];
    for (j, &l) in labels.iter().enumerate() {
        let c = l as usize - 1;
        counts[c] += 1;
        for (acc, v) in centroids[c * dim..(c + 1) * dim]
            .iter_mut()
            .zip(&points[j * dim..(j + 1) * dim])
        {
            *acc += v;
        }
    }
    for (c, &cnt) in counts.iter().enumerate() {
        centroids[c * dim..(c + 1) * dim]
            .iter_mut()
            .for_each(|v| *v /= cnt.max(1) as f64);
    }
    Ok(KMeansResult {
        labels,
        centroids,
        inertia,
    })
}

fn count_distinct(points: &[f64], dim: usize, cap: usize) -> usize {
    let mut seen: Vec<&[f64]> = Vec::new();
    for p in points.chunks_exact(dim) {
        if !seen.contains(&p) {
            seen.push(p);
            if seen.len() >= cap {
                break;
            }
        }
    }
    seen.len()
}

fn plus_plus(points: &[f64], dim: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = points.len() / dim;
    let point = |j: usize| &points[j * dim..(j + 1) * dim];
    let mut centers = Vec::with_capacity(k * dim);
    centers.extend_from_slice(point(rng.random_range(0..n)));
    let mut d2: Vec<f64> = (0..n).map(|j| sq_dist(point(j), &centers[..dim])).collect();
    for c in 1..k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = None;
            for (j, &w) in d2.iter().enumerate() {
                acc += w;
                if w > 0.0 && acc > target {
                    chosen = Some(j);
                    break;
                }
            }
            // Rounding can leave `target` beyond the last partial sum.
            chosen.unwrap_or_else(|| d2.iter().rposition(|&w| w > 0.0).expect("total > 0"))
        } else {
            rng.random_range(0..n)
        };
        centers.extend_from_slice(point(pick));
        let new = &centers[c * dim..(c + 1) * dim];
        for (j, d) in d2.iter_mut().enumerate() {
            *d = d.min(sq_dist(point(j), new));
        }
    }
    centers
}

fn nearest(p: &[f64], centers: &[f64], dim: usize) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, center) in centers.chunks_exact(dim).enumerate() {
        let d = sq_dist(p, center);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn lloyd(
    points: &[f64],
    dim: usize,
    mut centers: Vec<f64>,
    params: &KMeansParams,
) -> (Vec<usize>, f64) {
    let n = points.len() / dim;
    let k = centers.len() / dim;
    let mut assign = vec![0usize; n];
    let mut dist = vec![0.0; n];
    for _ in 0..params.max_iter {
        for j in 0..n {
            let (c, d) = nearest(&points[j * dim..(j + 1) * dim], &centers, dim);
            assign[j] = c;
            dist[j] = d;
        }
        let mut sums = vec![0.0; k * dim];
        let mut counts = vec![0usize; k];
        for j in 0..n {
            counts[assign[j]] += 1;
            for (s, v) in sums[assign[j] * dim..(assign[j] + 1) * dim]
                .iter_mut()
                .zip(&points[j * dim..])
            {
                *s += v;
            }
        }
        let mut moved: f64 = 0.0;
        let mut taken = vec![false; n];
        for c in 0..k {
            let new: Vec<f64> = if counts[c] > 0 {
                sums[c * dim..(c + 1) * dim]
                    .iter()
                    .map(|s| s / counts[c] as f64)
                    .collect()
            } else {
                // Empty cluster: restart it at the worst-served point.
                let mut far = None;
                for j in 0..n {
                    if !taken[j] && far.map_or(true, |f: usize| dist[j] > dist[f]) {
                        far = Some(j);
                    }
                }
                let f = far.expect("n >= k");
                taken[f] = true;
                dist[f] = 0.0;
                points[f * dim..(f + 1) * dim].to_vec()
            };
            moved = moved.max(sqrt(sq_dist(&new, &centers[c * dim..(c + 1) * dim])));
            centers[c * dim..(c + 1) * dim].copy_from_slice(&new);
        }
        if moved < params.tol {
            break;
        }
    }
    let mut inertia = 0.0;
    for j in 0..n {
        let (c, d) = nearest(&points[j * dim..(j + 1) * dim], &centers, dim);
        assign[j] = c;
        inertia += d;
    }
    (assign, inertia)
}
