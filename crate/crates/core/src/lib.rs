//! Low-rank approximation in the maximum (Chebyshev) norm.
//!
//! * [`matcore`]: dense kernel (norms, QR, Jacobi SVD, randomized SVD, matrix
//!   text format);
//! * [`diagnostics`]: spikiness, coherence and closed-form distance bounds;
//! * [`embeddings`]: randomized constructive approximants;
//! * [`apsolve`]: alternating projections and bisection on `ε`;
//! * [`genmat`]: seeded matrix families;
//! * [`harness`]: parameter sweeps with CSV and SVG output.

pub mod apsolve;
pub mod diagnostics;
pub mod embeddings;
pub mod error;
pub mod genmat;
pub mod harness;
pub mod matcore;
pub mod rng;

pub use error::{Error, Result};
pub use matcore::{DenseMatrix, LowRankFactors};
pub use rng::Rng;
