//! Coefficient smoothing and the affinity-free spectral embedding.
//!
//! The affinity between pixels `i` and `j` is `c̃_iᵀ c̃_j` for the
//! abs-normalized coefficient columns `c̃`. It is never formed: degrees come
//! from `C̃ᵀα` with `α = Σ_j c̃_j`, and the leading right singular vectors of
//! `B = C̃ D^{-1/2}` are recovered from the small `M × M` Gram matrix `BBᵀ`.

use alloc::vec;
use alloc::vec::Vec;

use crate::coding::{CoefficientMatrix, CoefficientStage};
use crate::exec::Executor;
use crate::grid::Geometry;
use crate::linalg::Tridiagonal;
use crate::math::{dot, sqrt};
use crate::sparse::CscMatrix;
use crate::{Error, Result};

/// Degrees below this are raised to it before taking `D^{-1/2}`.
pub const DEGREE_FLOOR: f64 = 1e-12;

/// Averages every coefficient row over a `kernel × kernel` spatial window.
///
/// Each row is viewed as an image in the pixel linearization of `geometry`
/// and cross-correlated with the box kernel `1/K²` using zero padding; the
/// window for output `(r, c)` starts at `(r − a, c − a)` with
/// `a = floor((K − 1) / 2)`. `K = 1` returns the input unchanged.
pub fn smooth_coefficients<E: Executor>(
    c: &CoefficientMatrix,
    geometry: Geometry,
    kernel: usize,
    exec: &E,
) -> Result<CoefficientMatrix> {
    if c.matrix.cols() != geometry.len() {
        return Err(Error::dim(
            "coefficient columns do not match the scene geometry",
        ));
    }
    if kernel == 0 || kernel > geometry.rows.min(geometry.cols) {
        return Err(Error::param(alloc::format!(
            "kernel size {kernel} must lie in 1..={}",
            geometry.rows.min(geometry.cols)
        )));
    }
    if kernel == 1 {
        return Ok(CoefficientMatrix {
            matrix: c.matrix.clone(),
            stage: CoefficientStage::Smoothed,
        });
    }
    let rows = c.matrix.transpose();
    let anchor = (kernel - 1) / 2;
    let weight = 1.0 / (kernel * kernel) as f64;
    let n = geometry.len();
    let smoothed = exec.map(rows.cols(), |i| {
        let (pix, val) = rows.column(i);
        let mut acc = vec![0.0; n];
        let mut touched = Vec::new();
        for (&j, &v) in pix.iter().zip(val) {
            let (r, cc) = geometry.unindex(j);
            // Input (r, c) feeds outputs r + a − u for u in 0..K.
            let r_hi = (r + anchor).min(geometry.rows - 1);
            let r_lo = (r + anchor + 1).saturating_sub(kernel);
            let c_hi = (cc + anchor).min(geometry.cols - 1);
            let c_lo = (cc + anchor + 1).saturating_sub(kernel);
            for oc in c_lo..=c_hi {
                for or in r_lo..=r_hi {
                    let o = geometry.index(or, oc);
                    if acc[o] == 0.0 {
                        touched.push(o);
                    }
                    acc[o] += v;
                }
            }
        }
        touched.sort_unstable();
        touched.dedup();
        let mut idx = Vec::with_capacity(touched.len());
        let mut out = Vec::with_capacity(touched.len());
        for o in touched {
            let v = acc[o] * weight;
            if v != 0.0 {
                idx.push(o);
                out.push(v);
            }
        }
        (idx, out)
    });
    let by_row = CscMatrix::from_columns(n, smoothed);
    Ok(CoefficientMatrix {
        matrix: by_row.transpose(),
        stage: CoefficientStage::Smoothed,
    })
}

/// `c̃_j = |ĉ_j| / ‖ĉ_j‖₂`. Zero columns stay zero; their indices are returned.
pub fn normalize_abs_columns(c: &CoefficientMatrix) -> (CoefficientMatrix, Vec<usize>) {
    let mut m = c.matrix.clone();
    let mut zero = Vec::new();
    for j in 0..m.cols() {
        let col = m.column_values_mut(j);
        col.iter_mut().for_each(|v| *v = v.abs());
        let nrm = sqrt(dot(col, col));
        if nrm > 0.0 {
            col.iter_mut().for_each(|v| *v /= nrm);
        } else {
            zero.push(j);
        }
    }
    (
        CoefficientMatrix {
            matrix: m,
            stage: CoefficientStage::Normalized,
        },
        zero,
    )
}

/// Degrees of the implicit affinity `C̃ᵀC̃`.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeVector {
    /// `α = Σ_j c̃_j`, length `M`.
    pub alpha: Vec<f64>,
    /// `D_i = c̃_iᵀ α`, length `N`.
    pub degrees: Vec<f64>,
}

impl DegreeVector {
    /// `max(D_i, DEGREE_FLOOR)^{-1/2}`.
    pub fn inv_sqrt(&self) -> Vec<f64> {
        self.degrees
            .iter()
            .map(|&d| 1.0 / sqrt(d.max(DEGREE_FLOOR)))
            .collect()
    }
}

pub fn degrees(c: &CoefficientMatrix) -> DegreeVector {
    let m = &c.matrix;
    let mut alpha = vec![0.0; m.rows()];
    for j in 0..m.cols() {
        let (r, v) = m.column(j);
        for (&i, &x) in r.iter().zip(v) {
            alpha[i] += x;
        }
    }
    let degrees = (0..m.cols())
        .map(|j| {
            let (r, v) = m.column(j);
            r.iter().zip(v).map(|(&i, &x)| x * alpha[i]).sum()
        })
        .collect();
    DegreeVector { alpha, degrees }
}

/// Leading right singular vectors of `B = C̃ D^{-1/2}` as an `N × k`
/// row-major point set, plus the singular values.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub points: Vec<f64>,
    pub k: usize,
    pub singular_values: Vec<f64>,
}

impl Embedding {
    pub fn n(&self) -> usize {
        self.points.len() / self.k
    }

    pub fn point(&self, j: usize) -> &[f64] {
        &self.points[j * self.k..(j + 1) * self.k]
    }

    /// Scales every nonzero row to unit length.
    pub fn normalize_rows(&mut self) {
        for row in self.points.chunks_exact_mut(self.k) {
            let nrm = sqrt(dot(row, row));
            if nrm > 0.0 {
                row.iter_mut().for_each(|v| *v /= nrm);
            }
        }
    }
}

/// `B = C̃ D^{-1/2}` in CSC form.
pub fn scaled_coefficients(c: &CoefficientMatrix, d: &DegreeVector) -> CscMatrix {
    let scale = d.inv_sqrt();
    let mut b = c.matrix.clone();
    for (j, s) in scale.iter().enumerate() {
        b.column_values_mut(j).iter_mut().for_each(|v| *v *= s);
    }
    b
}

/// Dense row-major `BBᵀ`. Row `a` sums `B_aj B_bj` over ascending `j`, so the
/// result is exactly symmetric and independent of scheduling.
pub fn gram<E: Executor>(b: &CscMatrix, exec: &E) -> Vec<f64> {
    let m = b.rows();
    let bt = b.transpose();
    let rows = exec.map(m, |a| {
        let mut out = vec![0.0; m];
        let (cols, vals) = bt.column(a);
        for (&j, &baj) in cols.iter().zip(vals) {
            let (r, v) = b.column(j);
            for (&i, &bij) in r.iter().zip(v) {
                out[i] += baj * bij;
            }
        }
        out
    });
    rows.concat()
}

/// Spectral embedding from the top `k` right singular vectors of `C̃ D^{-1/2}`.
///
/// With `BBᵀ = U Λ Uᵀ` the right vectors are `P = Bᵀ U Λ^{-1/2}`; each is
/// signed so that its largest-magnitude entry is positive.
pub fn spectral_embed<E: Executor>(
    c: &CoefficientMatrix,
    d: &DegreeVector,
    k: usize,
    exec: &E,
) -> Result<Embedding> {
    let (m, n) = (c.matrix.rows(), c.matrix.cols());
    if k == 0 || k > m.min(n) {
        return Err(Error::param(alloc::format!(
            "k = {k} must lie in 1..={}",
            m.min(n)
        )));
    }
    let b = scaled_coefficients(c, d);
    let g = gram(&b, exec);
    let tri = Tridiagonal::reduce(g, m, exec);
    let eig = tri.top_k(k);
    let top = eig.values.first().copied().unwrap_or(0.0).max(0.0);
    let cutoff = top * (m.max(n) as f64) * f64::EPSILON;
    let rank = tri.count_above(cutoff);
    if top <= 0.0 || eig.values[k - 1] <= cutoff {
        return Err(Error::RankDeficient {
            requested: k,
            rank: if top <= 0.0 { 0 } else { rank },
        });
    }
    let sigma: Vec<f64> = eig.values.iter().map(|&l| sqrt(l)).collect();
    // P_{j,i} = (b_j · u_i) / σ_i
    let rows = exec.map(n, |j| {
        let (r, v) = b.column(j);
        (0..k)
            .map(|i| {
                let u = eig.vector(i);
                r.iter().zip(v).map(|(&a, &x)| x * u[a]).sum::<f64>() / sigma[i]
            })
            .collect::<Vec<f64>>()
    });
    let mut points = rows.concat();
    for i in 0..k {
        let mut best = 0;
        for j in 0..n {
            if points[j * k + i].abs() > points[best * k + i].abs() {
                best = j;
            }
        }
        if points[best * k + i] < 0.0 {
            for j in 0..n {
                points[j * k + i] = -points[j * k + i];
            }
        }
    }
    Ok(Embedding {
        points,
        k,
        singular_values: sigma,
    })
}
