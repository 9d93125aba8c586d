//! Scene containers: the raw spectral cube, the column-per-pixel feature
//! matrix and ground-truth labels.

use alloc::vec::Vec;

use crate::grid::Geometry;
use crate::{Error, Result};

/// A hyperspectral scene of `rows × cols` pixels with `bands` values each.
///
/// Values are stored pixel-interleaved in linear pixel order:
/// `values[j * bands + b]` with `j = geometry.index(r, c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCube {
    geometry: Geometry,
    bands: usize,
    values: Vec<f64>,
    wavelengths: Option<Vec<f64>>,
}

impl SpectralCube {
    /// Builds a cube from values already in linear pixel order.
    pub fn new(geometry: Geometry, bands: usize, values: Vec<f64>) -> Result<Self> {
        if bands == 0 {
            return Err(Error::param("cube must have at least one band"));
        }
        if values.len() != geometry.len() * bands {
            return Err(Error::dim(alloc::format!(
                "{} values for a {}x{}x{} cube",
                values.len(),
                geometry.rows,
                geometry.cols,
                bands
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self {
            geometry,
            bands,
            values,
            wavelengths: None,
        })
    }

    /// Builds a cube from a closure evaluated at every `(row, col, band)`.
    pub fn from_fn(
        geometry: Geometry,
        bands: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(geometry.len() * bands);
        for j in 0..geometry.len() {
            let (r, c) = geometry.unindex(j);
            for b in 0..bands {
                values.push(f(r, c, b));
            }
        }
        Self::new(geometry, bands, values)
    }

    pub fn with_wavelengths(mut self, wavelengths: Vec<f64>) -> Result<Self> {
        if wavelengths.len() != self.bands {
            return Err(Error::dim("wavelength count differs from band count"));
        }
        self.wavelengths = Some(wavelengths);
        Ok(self)
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn bands(&self) -> usize {
        self.bands
    }

    pub fn wavelengths(&self) -> Option<&[f64]> {
        self.wavelengths.as_deref()
    }

    #[inline]
    pub fn value(&self, r: usize, c: usize, band: usize) -> f64 {
        self.values[self.geometry.index(r, c) * self.bands + band]
    }

    /// Spectrum of the pixel at linear index `j`.
    #[inline]
    pub fn pixel(&self, j: usize) -> &[f64] {
        &self.values[j * self.bands..(j + 1) * self.bands]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// `dim × n` real matrix with one column per pixel, stored column-contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct PixelMatrix {
    dim: usize,
    geometry: Geometry,
    data: Vec<f64>,
}

impl PixelMatrix {
    pub fn new(dim: usize, geometry: Geometry, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("feature dimension must be positive"));
        }
        if data.len() != dim * geometry.len() {
            return Err(Error::dim(alloc::format!(
                "{} values for {} columns of dimension {}",
                data.len(),
                geometry.len(),
                dim
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self {
            dim,
            geometry,
            data,
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.geometry.len()
    }

    #[inline]
    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.dim..(j + 1) * self.dim]
    }

    #[inline]
    pub fn column_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.dim..(j + 1) * self.dim]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Gathers the given columns into a contiguous `dim × idx.len()` block.
    pub fn gather(&self, idx: &[usize]) -> Vec<f64> {
        let mut out = Vec::with_capacity(idx.len() * self.dim);
        for &j in idx {
            out.extend_from_slice(self.column(j));
        }
        out
    }
}

/// Rearranges a cube into its `L × N` pixel matrix.
pub fn vectorize(cube: &SpectralCube) -> PixelMatrix {
    PixelMatrix {
        dim: cube.bands,
        geometry: cube.geometry,
        data: cube.values.clone(),
    }
}

/// Inverse of [`vectorize`].
pub fn unvectorize(x: &PixelMatrix) -> SpectralCube {
    SpectralCube {
        geometry: x.geometry,
        bands: x.dim,
        values: x.data.clone(),
        wavelengths: None,
    }
}

/// Reference labels, one per pixel in linear order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    pub labels: Vec<u32>,
    pub num_classes: u32,
    /// Pixels carrying this label are excluded from evaluation.
    pub ignore_label: u32,
}

impl GroundTruth {
    /// Builds ground truth with `0` as the unlabeled marker and `k = max label`.
    pub fn new(labels: Vec<u32>) -> Self {
        let num_classes = labels.iter().copied().max().unwrap_or(0);
        Self {
            labels,
            num_classes,
            ignore_label: 0,
        }
    }

    pub fn with_ignore_label(mut self, ignore_label: u32) -> Self {
        self.ignore_label = ignore_label;
        self
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Number of pixels that take part in evaluation.
    pub fn labeled_count(&self) -> usize {
        self.labels
            .iter()
            .filter(|&&l| l != self.ignore_label)
            .count()
    }
}
