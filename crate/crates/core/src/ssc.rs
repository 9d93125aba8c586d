//! Full sparse subspace clustering, used as a baseline on small problems.
//!
//! Every pixel is coded against all other pixels (no self-representation),
//! the symmetric affinity `|C| + |C|ᵀ` is normalized and its leading
//! eigenvectors are clustered. Cost grows as `O(N³)`, hence the size cap.

use alloc::vec;
use alloc::vec::Vec;

use crate::cube::PixelMatrix;
use crate::exec::Executor;
use crate::kmeans::{kmeans, KMeansParams};
use crate::lasso::{lasso_excluding, Dictionary, LassoParams};
use crate::linalg::SymmetricEigen;
use crate::math::{dot, sqrt};
use crate::sparse::{sparsify, CscMatrix};
use crate::{Error, Result};

/// Default upper bound on the pixel count.
pub const SSC_SIZE_CAP: usize = 3000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SscParams {
    pub lasso: LassoParams,
    pub k: usize,
    pub seed: u64,
    pub restarts: usize,
    pub cap: usize,
}

impl SscParams {
    pub fn new(tau: f64, k: usize) -> Self {
        Self {
            lasso: LassoParams::new(tau),
            k,
            seed: 0,
            restarts: 10,
            cap: SSC_SIZE_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SscOutput {
    pub labels: Vec<u32>,
    /// `N × N` self-representation with an empty diagonal.
    pub coefficients: CscMatrix,
}

/// Clusters the unit-norm columns of `x` with full SSC.
pub fn ssc_small_oracle<E: Executor>(
    x: &PixelMatrix,
    params: &SscParams,
    exec: &E,
) -> Result<SscOutput> {
    let n = x.n();
    if n > params.cap {
        return Err(Error::TooLarge { n, cap: params.cap });
    }
    if params.k == 0 || params.k > n {
        return Err(Error::param("cluster count must lie in 1..=N"));
    }
    params.lasso.validate()?;
    let dict = Dictionary::new(x.as_slice(), x.dim())?;
    let columns = exec.map(n, |j| {
        lasso_excluding(&dict, x.column(j), Some(j), &params.lasso)
            .map(|s| sparsify(&s.coefficients, crate::coding::STORAGE_THRESHOLD))
            .map_err(|e| e.at_pixel(j))
    });
    let columns: Vec<_> = columns.into_iter().collect::<Result<_>>()?;
    let c = CscMatrix::from_columns(n, columns);

    // Normalized affinity D^{-1/2} (|C| + |C|ᵀ) D^{-1/2}, dense row-major.
    let mut w = vec![0.0; n * n];
    for (i, j, v) in c.triplets() {
        w[i * n + j] += v.abs();
        w[j * n + i] += v.abs();
    }
    let deg: Vec<f64> = w.chunks_exact(n).map(|r| r.iter().sum::<f64>()).collect();
    let inv: Vec<f64> = deg
        .iter()
        .map(|&d| 1.0 / sqrt(d.max(crate::embedding::DEGREE_FLOOR)))
        .collect();
    exec.for_each_chunk_mut(&mut w, n, |i, row| {
        for (j, v) in row.iter_mut().enumerate() {
            *v *= inv[i] * inv[j];
        }
    });
    let eig = SymmetricEigen::top_k(w, n, params.k, exec);
    let k = params.k;
    let mut points = vec![0.0; n * k];
    for i in 0..k {
        for (j, v) in eig.vector(i).iter().enumerate() {
            points[j * k + i] = *v;
        }
    }
    for row in points.chunks_exact_mut(k) {
        let nrm = sqrt(dot(row, row));
        if nrm > 0.0 {
            row.iter_mut().for_each(|v| *v /= nrm);
        }
    }
    let mut km = KMeansParams::new(k, params.seed);
    km.restarts = params.restarts;
    let labels = kmeans(&points, k, &km)?.labels;
    Ok(SscOutput {
        labels,
        coefficients: c,
    })
}
