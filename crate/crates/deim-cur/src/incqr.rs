//! One-pass incremental QR factorization with threshold deflation. Columns
//! are orthogonalized as they arrive; whenever a row of R carries a
//! negligible share of the Frobenius mass it is removed together with the
//! matching column of Q, keeping the basis small at a certified loss
//! `tol * deletions * ||R||_F` in the Frobenius norm.

use crate::error::{Error, Result};
use crate::matrix::{dot, DenseMatrix};
use crate::qr::{dgks_orthogonalize, DgksOutcome};
use crate::svd::{economy_svd, RankKSvd, SvdKind};

/// Number of columns between exact recomputations of the row-norm
/// accumulator.
const ROWNORM_REFRESH: usize = 256;

/// Default size of the initial block that is factorized before deflation
/// checks begin.
pub fn default_initial_block(m: usize) -> usize {
    10.min(m).max(1)
}

/// Running state of the one-pass factorization.
#[derive(Debug, Clone)]
pub struct IncrementalQrState {
    m: usize,
    q_cols: Vec<Vec<f64>>,
    r_rows: Vec<Vec<f64>>,
    rownorms: Vec<f64>,
    deletions: usize,
    tol: f64,
    columns_processed: usize,
    initial_block: usize,
    early_stop: Option<f64>,
    stopped: bool,
}

impl IncrementalQrState {
    /// `tol` controls deflation aggressiveness (`tol = 0` never deflates and
    /// reproduces a plain thin QR); the first `initial_block` columns are
    /// absorbed without deflation checks.
    pub fn new(m: usize, tol: f64, initial_block: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::EmptyMatrix { rows: 0, cols: 1 });
        }
        if !(tol >= 0.0 && tol.is_finite()) {
            return Err(Error::InvalidSpec(format!("tol {tol} must be finite and >= 0")));
        }
        if initial_block == 0 || initial_block > m {
            return Err(Error::InvalidSpec(format!(
                "initial block {initial_block} outside 1..={m}"
            )));
        }
        Ok(Self {
            m,
            q_cols: Vec::new(),
            r_rows: Vec::new(),
            rownorms: Vec::new(),
            deletions: 0,
            tol,
            columns_processed: 0,
            initial_block,
            early_stop: None,
            stopped: false,
        })
    }

    /// Enables the optional early stop: processing halts once
    /// `||R||_F >= (1 - tol) * a_fnorm`. Off by default; requires the
    /// caller to know the Frobenius norm of the full matrix.
    pub fn with_early_stop(mut self, a_fnorm: f64) -> Self {
        self.early_stop = Some(a_fnorm);
        self
    }

    pub fn basis_size(&self) -> usize {
        self.q_cols.len()
    }

    pub fn columns_processed(&self) -> usize {
        self.columns_processed
    }

    pub fn deletions(&self) -> usize {
        self.deletions
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Squared row norms of R, as maintained incrementally.
    pub fn rownorms(&self) -> &[f64] {
        &self.rownorms
    }

    /// True once the early-stop criterion has fired.
    pub fn stopped(&self) -> bool {
        self.stopped
    }

    /// Certified Frobenius-norm error bound of the current factorization:
    /// `tol * deletions * ||R||_F`, with `||R||_F` recomputed exactly.
    pub fn certificate(&self) -> f64 {
        self.tol * self.deletions as f64 * self.r_fnorm_exact()
    }

    fn r_fnorm_exact(&self) -> f64 {
        self.r_rows
            .iter()
            .map(|row| dot(row, row))
            .sum::<f64>()
            .sqrt()
    }

    /// Materializes (Q, R) if any basis vectors exist.
    pub fn factors(&self) -> Option<(DenseMatrix, DenseMatrix)> {
        if self.q_cols.is_empty() || self.columns_processed == 0 {
            return None;
        }
        let q = DenseMatrix::from_columns(&self.q_cols).expect("basis columns nonempty");
        let k = self.r_rows.len();
        let n = self.columns_processed;
        let mut data = vec![0.0; k * n];
        for (i, row) in self.r_rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                data[j * k + i] = v;
            }
        }
        Some((q, DenseMatrix::from_raw(k, n, data)))
    }

    /// Absorbs one column: orthogonalize against the current basis, extend
    /// R, then (past the initial block) delete the minimum-norm row of R if
    /// it fails the relative threshold test. A column whose orthogonal
    /// remainder is negligible extends R without growing the basis; that
    /// case discards only a component of norm ~rho and does not count as a
    /// deletion.
    pub fn push_column(&mut self, col: &[f64]) -> Result<()> {
        if col.len() != self.m {
            return Err(Error::ColumnLengthMismatch {
                expected: self.m,
                found: col.len(),
            });
        }
        match dgks_orthogonalize(&self.q_cols, col)? {
            DgksOutcome::Extended {
                coeffs,
                norm,
                direction,
            } => {
                for ((row, &c), rn) in self
                    .r_rows
                    .iter_mut()
                    .zip(coeffs.iter())
                    .zip(self.rownorms.iter_mut())
                {
                    row.push(c);
                    *rn += c * c;
                }
                let mut new_row = vec![0.0; self.columns_processed];
                new_row.push(norm);
                self.r_rows.push(new_row);
                self.rownorms.push(norm * norm);
                self.q_cols.push(direction);
                self.columns_processed += 1;
                if self.columns_processed > self.initial_block {
                    self.maybe_deflate();
                }
            }
            DgksOutcome::Dependent { coeffs } => {
                for ((row, &c), rn) in self
                    .r_rows
                    .iter_mut()
                    .zip(coeffs.iter())
                    .zip(self.rownorms.iter_mut())
                {
                    row.push(c);
                    *rn += c * c;
                }
                self.columns_processed += 1;
            }
        }
        if self.columns_processed % ROWNORM_REFRESH == 0 {
            for (rn, row) in self.rownorms.iter_mut().zip(&self.r_rows) {
                *rn = dot(row, row);
            }
        }
        if let Some(a_fnorm) = self.early_stop {
            if self.r_fnorm_exact() >= (1.0 - self.tol) * a_fnorm {
                self.stopped = true;
            }
        }
        Ok(())
    }

    fn maybe_deflate(&mut self) {
        let k = self.rownorms.len();
        if k == 0 {
            return;
        }
        let mut i_min = 0;
        for i in 1..k {
            if self.rownorms[i] < self.rownorms[i_min] {
                i_min = i;
            }
        }
        let sigma = self.rownorms[i_min];
        let fnorm_sq: f64 = self.rownorms.iter().sum();
        if sigma <= self.tol * self.tol * (fnorm_sq - sigma) {
            // swap with the last row/column, then truncate
            self.q_cols.swap_remove(i_min);
            self.r_rows.swap_remove(i_min);
            self.rownorms.swap_remove(i_min);
            self.deletions += 1;
        }
    }

    /// Finalizes into factors plus the deletion count and certificate.
    pub fn finish(self) -> Result<IncrementalQr> {
        if self.columns_processed == 0 {
            return Err(Error::EmptyStream);
        }
        let certificate = self.certificate();
        let deletions = self.deletions;
        let (q, r) = self.factors().ok_or(Error::ZeroRank)?;
        Ok(IncrementalQr {
            q,
            r,
            deletions,
            certificate,
        })
    }
}

/// Finished one-pass factorization `A ~= Q R`.
#[derive(Debug, Clone)]
pub struct IncrementalQr {
    pub q: DenseMatrix,
    pub r: DenseMatrix,
    pub deletions: usize,
    pub certificate: f64,
}

/// Runs the one-pass factorization over a column stream. Each column is
/// read exactly once; the stream may be any source of length-m vectors in
/// order.
pub fn incremental_qr<I>(stream: I, tol: f64, initial_block: usize) -> Result<IncrementalQr>
where
    I: IntoIterator,
    I::Item: AsRef<[f64]>,
{
    let mut iter = stream.into_iter();
    let first = iter.next().ok_or(Error::EmptyStream)?;
    let m = first.as_ref().len();
    let mut state = IncrementalQrState::new(m, tol, initial_block.min(m).max(1))?;
    state.push_column(first.as_ref())?;
    for col in iter {
        state.push_column(col.as_ref())?;
        if state.stopped() {
            break;
        }
    }
    state.finish()
}

/// Lifts the small-factor SVD through Q: with `R = V^ S W^T`, returns
/// `(Q V^, S, W)` tagged as approximate, carrying the QR certificate as its
/// residual estimate.
pub fn approx_svd_from_qr(q: &DenseMatrix, r: &DenseMatrix, certificate: f64) -> Result<RankKSvd> {
    if q.cols() != r.rows() {
        return Err(Error::DimensionMismatch(format!(
            "Q has {} columns but R has {} rows",
            q.cols(),
            r.rows()
        )));
    }
    let inner = economy_svd(r);
    let v = q.matmul(inner.v());
    Ok(RankKSvd::from_parts_unchecked(
        v,
        inner.s().to_vec(),
        inner.w().clone(),
        certificate,
        SvdKind::Approximate,
    ))
}
