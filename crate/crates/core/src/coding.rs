//! Sparse coding of every pixel against the exemplar dictionary.

use alloc::vec::Vec;

use crate::cube::PixelMatrix;
use crate::exec::Executor;
use crate::lasso::{lasso_excluding, LassoParams};
use crate::selection::ExemplarDictionary;
use crate::sparse::{sparsify, CscMatrix};
use crate::{Error, Result};

/// Coefficients with magnitude below this are not stored.
pub const STORAGE_THRESHOLD: f64 = 1e-10;

/// Processing stage of a coefficient matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientStage {
    Raw,
    Smoothed,
    Normalized,
}

/// `M × N` coefficients relating exemplars (rows) to pixels (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientMatrix {
    pub matrix: CscMatrix,
    pub stage: CoefficientStage,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodingParams {
    pub lasso: LassoParams,
    /// Forbid an exemplar pixel from using its own dictionary column.
    pub exclude_self: bool,
}

/// Solves one LASSO per pixel against the exemplars.
pub fn code_against_dictionary<E: Executor>(
    x: &PixelMatrix,
    dict: &ExemplarDictionary,
    params: &CodingParams,
    exec: &E,
) -> Result<CoefficientMatrix> {
    if dict.is_empty() {
        return Err(Error::param("exemplar dictionary is empty"));
    }
    if dict.dim != x.dim() {
        return Err(Error::dim("dictionary and pixel dimensions differ"));
    }
    params.lasso.validate()?;
    let a = dict.as_dictionary()?;
    let mut atom_of = alloc::vec![usize::MAX; x.n()];
    if params.exclude_self {
        for (pos, &j) in dict.indices.iter().enumerate() {
            atom_of[j] = pos;
        }
    }
    let columns = exec.map(x.n(), |j| {
        let exclude = (atom_of[j] != usize::MAX).then_some(atom_of[j]);
        lasso_excluding(&a, x.column(j), exclude, &params.lasso)
            .map(|s| sparsify(&s.coefficients, STORAGE_THRESHOLD))
            .map_err(|e| e.at_pixel(j))
    });
    let columns: Vec<_> = columns.into_iter().collect::<Result<_>>()?;
    Ok(CoefficientMatrix {
        matrix: CscMatrix::from_columns(dict.len(), columns),
        stage: CoefficientStage::Raw,
    })
}
