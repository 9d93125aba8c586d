//! Dense linear algebra kernels used by PCA and the spectral embedding.

mod qr;
mod svd;
mod symeig;

pub use qr::householder_r;
pub use svd::{jacobi_svd, Svd};
pub use symeig::{SymmetricEigen, Tridiagonal};
