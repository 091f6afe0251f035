//! Dense linear algebra kernel: matrix type, norms, QR, SVD, power iteration
//! and randomized truncated SVD.

mod factors;
pub mod io;
mod matrix;
mod qr;
mod rsvd;
mod spectral;
mod svd;

pub use factors::LowRankFactors;
pub(crate) use factors::scale_columns;
pub use matrix::{fro_norm, max_norm, DenseMatrix};
pub use qr::{householder_qr, qr_thin};
pub use rsvd::{rsvd_subspace, rsvd_truncate, subspace_truncate, DEFAULT_OVERSAMPLING, DEFAULT_POWER_ITERS};
pub use spectral::{spectral_norm, spectral_norm_estimate, SpectralEstimate, DENSE_SPECTRAL_CUTOFF};
pub use svd::{singular_values, svd_dense};
