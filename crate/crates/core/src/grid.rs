//! Spatial geometry and the pixel linearization used by every stage.
//!
//! Pixel `(r, c)` of an `rows × cols` image is stored at linear index
//! `j = c * rows + r` (0-based, column-major). Reshapes between coefficient
//! rows and spatial grids all go through this module.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Spatial size of a scene.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Geometry {
    pub rows: usize,
    pub cols: usize,
}

impl Geometry {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::param("geometry must have positive rows and cols"));
        }
        Ok(Self { rows, cols })
    }

    /// Number of pixels.
    #[inline]
    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, r: usize, c: usize) -> usize {
        debug_assert!(r < self.rows && c < self.cols);
        c * self.rows + r
    }

    #[inline]
    pub fn unindex(&self, j: usize) -> (usize, usize) {
        debug_assert!(j < self.len());
        (j % self.rows, j / self.rows)
    }

    /// Linear indices in row-major scan order (row 0 left to right, then row 1, ...).
    pub fn row_major_order(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.rows).flat_map(move |r| (0..self.cols).map(move |c| self.index(r, c)))
    }
}

/// A real-valued image stored row-major, `data[r * cols + c]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub geometry: Geometry,
    pub data: Vec<f64>,
}

impl Grid {
    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.geometry.cols + c]
    }
}

/// Reshapes a length-`N` row (linear pixel order) into a spatial grid.
pub fn row_to_grid(row: &[f64], geometry: Geometry) -> Result<Grid> {
    if row.len() != geometry.len() {
        return Err(Error::dim(alloc::format!(
            "row of length {} does not match {}x{} geometry",
            row.len(),
            geometry.rows,
            geometry.cols
        )));
    }
    let mut data = Vec::with_capacity(row.len());
    for r in 0..geometry.rows {
        for c in 0..geometry.cols {
            data.push(row[geometry.index(r, c)]);
        }
    }
    Ok(Grid { geometry, data })
}

/// Inverse of [`row_to_grid`].
pub fn grid_to_row(grid: &Grid) -> Vec<f64> {
    let g = grid.geometry;
    let mut row = alloc::vec![0.0; g.len()];
    for r in 0..g.rows {
        for c in 0..g.cols {
            row[g.index(r, c)] = grid.data[r * g.cols + c];
        }
    }
    row
}
