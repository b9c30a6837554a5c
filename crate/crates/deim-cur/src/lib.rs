//! DEIM-based CUR matrix factorization.
//!
//! Given a matrix `A`, this crate selects `k` rows `p` and columns `q` by
//! applying discrete empirical interpolation to (exact or approximate)
//! singular vectors, assembles `A ~= C U R` from actual rows and columns of
//! `A`, and certifies the result against a computable error bound
//! `(eta_p + eta_q) * sigma_{k+1}`. Singular vectors can come from a dense
//! economy SVD or from a one-pass incremental QR factorization with
//! threshold deflation. Leverage-score and pivoted-QR selection strategies
//! are included for comparison, along with generators for the synthetic
//! matrix families used by the test suite and a Matrix Market / CSV CLI.
//!
//! With the default `parallel` feature, large matrix products and rank
//! sweeps run on a rayon pool; results are bitwise identical to the
//! sequential fallback (build with `--no-default-features`).

pub mod baselines;
pub mod cli;
pub mod cur;
pub mod deim;
pub mod error;
pub mod incqr;
pub mod io;
pub mod matrix;
pub mod qr;
pub mod selection;
pub mod svd;
pub mod synth;
mod util;

pub use error::{Error, Result};
pub use matrix::DenseMatrix;
pub use selection::{IndexSelection, SelectionSource};
pub use svd::{economy_svd, spectral_norm, subspace_angle, truncate_svd, RankKSvd, SvdKind};
