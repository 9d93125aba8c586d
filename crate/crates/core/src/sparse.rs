//! Compressed sparse column storage for coefficient matrices.

use alloc::vec;
use alloc::vec::Vec;

/// `rows × cols` sparse matrix, column-compressed, row indices ascending
/// within each column.
#[derive(Debug, Clone, PartialEq)]
pub struct CscMatrix {
    rows: usize,
    cols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CscMatrix {
    /// Assembles a matrix from per-column `(row, value)` lists; rows must be
    /// ascending and `< rows`.
    pub fn from_columns<I>(rows: usize, columns: I) -> Self
    where
        I: IntoIterator<Item = (Vec<usize>, Vec<f64>)>,
    {
        let mut col_ptr = vec![0];
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        for (r, v) in columns {
            debug_assert_eq!(r.len(), v.len());
            debug_assert!(r.windows(2).all(|w| w[0] < w[1]));
            debug_assert!(r.last().map_or(true, |&x| x < rows));
            row_idx.extend_from_slice(&r);
            values.extend_from_slice(&v);
            col_ptr.push(row_idx.len());
        }
        Self {
            rows,
            cols: col_ptr.len() - 1,
            col_ptr,
            row_idx,
            values,
        }
    }

    /// Keeps entries of a column-major dense matrix with `|v| >= threshold`.
    pub fn from_dense(rows: usize, cols: usize, dense: &[f64], threshold: f64) -> Self {
        assert_eq!(dense.len(), rows * cols);
        Self::from_columns(
            rows,
            (0..cols).map(|j| sparsify(&dense[j * rows..(j + 1) * rows], threshold)),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Row indices and values of column `j`.
    #[inline]
    pub fn column(&self, j: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.col_ptr[j], self.col_ptr[j + 1]);
        (&self.row_idx[a..b], &self.values[a..b])
    }

    pub fn column_values_mut(&mut self, j: usize) -> &mut [f64] {
        let (a, b) = (self.col_ptr[j], self.col_ptr[j + 1]);
        &mut self.values[a..b]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, v) = self.column(j);
        r.binary_search(&i).map_or(0.0, |p| v[p])
    }

    /// Column-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.rows * self.cols];
        for j in 0..self.cols {
            let (r, v) = self.column(j);
            for (&i, &x) in r.iter().zip(v) {
                d[j * self.rows + i] = x;
            }
        }
        d
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.rows + 1];
        for &i in &self.row_idx {
            counts[i + 1] += 1;
        }
        for i in 0..self.rows {
            counts[i + 1] += counts[i];
        }
        let col_ptr = counts.clone();
        let mut next = counts;
        let mut row_idx = vec![0; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for j in 0..self.cols {
            let (r, v) = self.column(j);
            for (&i, &x) in r.iter().zip(v) {
                row_idx[next[i]] = j;
                values[next[i]] = x;
                next[i] += 1;
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            col_ptr,
            row_idx,
            values,
        }
    }

    /// `(row, col, value)` triplets in column order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.cols).flat_map(move |j| {
            let (r, v) = self.column(j);
            r.iter().zip(v).map(move |(&i, &x)| (i, j, x))
        })
    }
}

/// `(indices, values)` of entries with `|v| >= threshold`.
pub fn sparsify(dense: &[f64], threshold: f64) -> (Vec<usize>, Vec<f64>) {
    let mut idx = Vec::new();
    let mut val = Vec::new();
    for (i, &v) in dense.iter().enumerate() {
        if v != 0.0 && v.abs() >= threshold {
            idx.push(i);
            val.push(v);
        }
    }
    (idx, val)
}
