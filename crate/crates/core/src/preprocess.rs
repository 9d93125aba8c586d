//! Spectral feature reduction (PCA) and per-pixel unit normalization.

use alloc::vec;
use alloc::vec::Vec;

use crate::cube::PixelMatrix;
use crate::linalg::{householder_r, jacobi_svd};
use crate::math::{floor, norm2};
use crate::{Error, Result};

/// Principal axes of a pixel matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// `bands × components`, column-major, orthonormal columns.
    pub basis: Vec<f64>,
    /// Variance captured by each component, descending.
    pub explained_variance: Vec<f64>,
    bands: usize,
}

impl PcaModel {
    pub fn bands(&self) -> usize {
        self.bands
    }

    pub fn components(&self) -> usize {
        self.explained_variance.len()
    }

    pub fn axis(&self, i: usize) -> &[f64] {
        &self.basis[i * self.bands..(i + 1) * self.bands]
    }

    /// Scores on the first `d` components: `basisᵀ (x - mean)`.
    pub fn project(&self, x: &PixelMatrix, d: usize) -> Result<PixelMatrix> {
        if x.dim() != self.bands {
            return Err(Error::dim("pixel dimension differs from the fitted model"));
        }
        if d == 0 || d > self.components() {
            return Err(Error::param(alloc::format!(
                "cannot project onto {d} of {} components",
                self.components()
            )));
        }
        let mut out = Vec::with_capacity(d * x.n());
        let mut centered = vec![0.0; self.bands];
        for col in x.columns() {
            for ((c, v), m) in centered.iter_mut().zip(col).zip(&self.mean) {
                *c = v - m;
            }
            for i in 0..d {
                out.push(crate::math::dot(self.axis(i), &centered));
            }
        }
        PixelMatrix::new(d, x.geometry(), out)
    }
}

/// Feature dimension kept after PCA: `floor(fraction · bands)`, at least 3,
/// never more than `bands`.
pub fn reduced_dim(bands: usize, fraction: f64) -> usize {
    let d = floor(fraction * bands as f64) as usize;
    d.max(3).min(bands)
}

/// Fits PCA on the pixels of `x` and returns the model with `d` components.
///
/// The principal axes come from the SVD of the centered data: a Householder
/// QR first compresses the `N × L` matrix to `L × L`, then one-sided Jacobi
/// produces the right singular vectors. Each axis is signed so that its
/// largest-magnitude entry is positive.
pub fn pca_fit(x: &PixelMatrix, d: usize) -> Result<PcaModel> {
    let (bands, n) = (x.dim(), x.n());
    if n < 2 {
        return Err(Error::param("PCA needs at least two pixels"));
    }
    if d == 0 || d > bands.min(n) {
        return Err(Error::param(alloc::format!(
            "target dimension {d} outside 1..={}",
            bands.min(n)
        )));
    }
    let mut mean = vec![0.0; bands];
    for col in x.columns() {
        for (m, v) in mean.iter_mut().zip(col) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    // Column-major N × L centered data.
    let mut a = vec![0.0; n * bands];
    let mut scale: f64 = 0.0;
    for (j, col) in x.columns().enumerate() {
        for b in 0..bands {
            let v = col[b] - mean[b];
            a[b * n + j] = v;
            scale = scale.max(col[b].abs());
        }
    }
    let svd = if n >= bands {
        let r = householder_r(&a, n, bands);
        jacobi_svd(&r, bands, bands)
    } else {
        jacobi_svd(&a, n, bands)
    };
    let top = svd.singular_values[0];
    if top <= 1e-13 * scale.max(f64::MIN_POSITIVE) * crate::math::sqrt(n as f64) {
        return Err(Error::ZeroVariance);
    }
    let mut basis = Vec::with_capacity(bands * d);
    for i in 0..d {
        let mut axis = svd.v[i * bands..(i + 1) * bands].to_vec();
        let mut best = 0;
        for (k, v) in axis.iter().enumerate() {
            if v.abs() > axis[best].abs() {
                best = k;
            }
        }
        if axis[best] < 0.0 {
            axis.iter_mut().for_each(|v| *v = -*v);
        }
        basis.extend_from_slice(&axis);
    }
    let explained_variance = svd.singular_values[..d]
        .iter()
        .map(|s| s * s / (n as f64 - 1.0))
        .collect();
    Ok(PcaModel {
        mean,
        basis,
        explained_variance,
        bands,
    })
}

/// Fits PCA with `d` components and returns the model and the `d × N` scores.
pub fn pca_fit_project(x: &PixelMatrix, d: usize) -> Result<(PcaModel, PixelMatrix)> {
    let model = pca_fit(x, d)?;
    let scores = model.project(x, d)?;
    Ok((model, scores))
}

/// Scales every column to unit Euclidean norm.
pub fn unit_normalize(x: &PixelMatrix) -> Result<PixelMatrix> {
    let mut out = x.clone();
    for j in 0..out.n() {
        let col = out.column_mut(j);
        let nrm = norm2(col);
        if nrm <= f64::MIN_POSITIVE || !nrm.is_finite() {
            return Err(Error::ZeroColumn(j));
        }
        col.iter_mut().for_each(|v| *v /= nrm);
    }
    Ok(out)
}

/// Min-max scales each row (channel) of `x` to `[0, 1]`; constant channels map to 0.
pub fn minmax_channels(x: &PixelMatrix) -> PixelMatrix {
    let dim = x.dim();
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for col in x.columns() {
        for b in 0..dim {
            lo[b] = lo[b].min(col[b]);
            hi[b] = hi[b].max(col[b]);
        }
    }
    let mut out = x.clone();
    for j in 0..out.n() {
        for (b, v) in out.column_mut(j).iter_mut().enumerate() {
            let span = hi[b] - lo[b];
            *v = if span > 0.0 { (*v - lo[b]) / span } else { 0.0 };
        }
    }
    out
}

/// Three-channel `[0, 1]` image from the leading components of a fitted model,
/// zero-padded when fewer than three components exist.
pub fn false_color(model: &PcaModel, x: &PixelMatrix) -> Result<PixelMatrix> {
    let c = model.components().min(3);
    let scores = minmax_channels(&model.project(x, c)?);
    if c == 3 {
        return Ok(scores);
    }
    let mut data = Vec::with_capacity(3 * x.n());
    for col in scores.columns() {
        data.extend_from_slice(col);
        data.extend(core::iter::repeat(0.0).take(3 - c));
    }
    PixelMatrix::new(3, x.geometry(), data)
}
