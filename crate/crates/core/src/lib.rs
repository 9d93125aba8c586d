//! Similarity-constrained sparse subspace clustering (SC-SSC) for hyperspectral
//! land-cover segmentation.
//!
//! The crate is `no_std` and only needs an allocator. It covers every numerical
//! stage of the pipeline:
//!
//! | Stage | Module |
//! |-------|--------|
//! | pixel linearization, scene types | [`grid`], [`cube`] |
//! | PCA + unit normalization | [`preprocess`] |
//! | SLIC superpixels | [`superpixels`] |
//! | LASSO self-representation | [`lasso`], [`coding`] |
//! | exemplar selection (lazy greedy) | [`selection`] |
//! | smoothing, implicit degrees, Gram-based SVD, k-means | [`embedding`], [`kmeans`] |
//! | evaluation | [`metrics`] |
//! | full SSC baseline for small problems | [`ssc`] |
//! | stage orchestration | [`pipeline`] |
//!
//! File formats, wall-clock timing and multi-threaded execution live in the
//! companion `scssc` crate; here parallelism is abstracted behind
//! [`pipeline::Executor`] so that results never depend on how work is scheduled.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod coding;
pub mod cube;
pub mod embedding;
mod error;
mod exec;
pub mod grid;
pub mod kmeans;
pub mod lasso;
pub mod linalg;
mod math;
pub mod metrics;
pub mod pipeline;
pub mod preprocess;
pub mod selection;
pub mod sparse;
pub mod ssc;
pub mod superpixels;

pub use error::{Error, Result};
pub use exec::{Executor, Sequential};
pub use grid::Geometry;
