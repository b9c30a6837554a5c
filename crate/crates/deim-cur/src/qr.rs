//! Gram-Schmidt kernels: single-vector orthogonalization with one
//! re-orthogonalization pass, thin QR built on it, and column-pivoted QR
//! used for pivot-based index selection.

use crate::error::{Error, Result};
use crate::matrix::{axpy, dot, norm2, DenseMatrix};
use crate::selection::{IndexSelection, SelectionSource};

/// Relative threshold below which the orthogonalized remainder is treated as
/// zero: `rho <= DEPENDENCE_FACTOR * ||a||` flags a dependent vector.
pub const DEPENDENCE_FACTOR: f64 = 1e3 * f64::EPSILON;

/// Result of orthogonalizing one vector against an orthonormal basis.
#[derive(Debug, Clone)]
pub enum DgksOutcome {
    /// `a = Q r + rho * q_new` with `||q_new|| = 1`.
    Extended {
        coeffs: Vec<f64>,
        norm: f64,
        direction: Vec<f64>,
    },
    /// The remainder fell below the dependence threshold; `a ~= Q r`.
    Dependent { coeffs: Vec<f64> },
}

/// Orthogonalizes `a` against the orthonormal columns in `basis`, always
/// performing exactly one re-orthogonalization pass (c = Q^T f; f -= Q c;
/// r += c). The basis may be empty, in which case the call is a bare
/// normalization.
pub fn dgks_orthogonalize<S: AsRef<[f64]>>(basis: &[S], a: &[f64]) -> Result<DgksOutcome> {
    let m = a.len();
    for q in basis {
        if q.as_ref().len() != m {
            return Err(Error::ColumnLengthMismatch {
                expected: m,
                found: q.as_ref().len(),
            });
        }
    }
    let a_norm = norm2(a);
    let mut f = a.to_vec();
    let mut coeffs = Vec::with_capacity(basis.len());
    for q in basis {
        let c = dot(q.as_ref(), &f);
        axpy(&mut f, -c, q.as_ref());
        coeffs.push(c);
    }
    // one re-orthogonalization pass, unconditionally
    for (q, r) in basis.iter().zip(coeffs.iter_mut()) {
        let c = dot(q.as_ref(), &f);
        axpy(&mut f, -c, q.as_ref());
        *r += c;
    }
    let rho = norm2(&f);
    if rho <= DEPENDENCE_FACTOR * a_norm {
        return Ok(DgksOutcome::Dependent { coeffs });
    }
    let inv = 1.0 / rho;
    for v in &mut f {
        *v *= inv;
    }
    Ok(DgksOutcome::Extended {
        coeffs,
        norm: rho,
        direction: f,
    })
}

/// Finds a unit vector orthogonal to `basis` by orthogonalizing coordinate
/// vectors in index order. Panics if the basis already spans the space.
pub(crate) fn orthonormal_completion<S: AsRef<[f64]>>(basis: &[S], m: usize) -> Vec<f64> {
    assert!(basis.len() < m, "basis already spans the space");
    for t in 0..m {
        let mut e = vec![0.0; m];
        e[t] = 1.0;
        if let Ok(DgksOutcome::Extended { direction, .. }) = dgks_orthogonalize(basis, &e) {
            return direction;
        }
    }
    unreachable!("no coordinate vector extends a basis of deficient size");
}

/// Thin QR of an m x n matrix with m >= n. Dependent columns get a zero
/// diagonal in R and the basis is completed with a direction orthogonal to
/// everything seen so far, so Q always has n orthonormal columns.
pub fn thin_qr(a: &DenseMatrix) -> (DenseMatrix, DenseMatrix) {
    thin_qr_impl(a, true).expect("completion mode is total")
}

/// Thin QR that fails on the first numerically dependent column.
pub fn thin_qr_strict(a: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    thin_qr_impl(a, false)
}

fn thin_qr_impl(a: &DenseMatrix, complete: bool) -> Result<(DenseMatrix, DenseMatrix)> {
    let (m, n) = (a.rows(), a.cols());
    assert!(m >= n, "thin QR requires rows >= cols, got {}x{}", m, n);
    let mut q_cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut r = vec![0.0; n * n];
    for j in 0..n {
        match dgks_orthogonalize(&q_cols, a.column(j))? {
            DgksOutcome::Extended {
                coeffs,
                norm,
                direction,
            } => {
                for (t, c) in coeffs.into_iter().enumerate() {
                    r[j * n + t] = c;
                }
                r[j * n + j] = norm;
                q_cols.push(direction);
            }
            DgksOutcome::Dependent { coeffs } => {
                if !complete {
                    return Err(Error::RankDeficient {
                        found: j,
                        requested: n,
                    });
                }
                for (t, c) in coeffs.into_iter().enumerate() {
                    r[j * n + t] = c;
                }
                q_cols.push(orthonormal_completion(&q_cols, m));
            }
        }
    }
    let q = DenseMatrix::from_columns(&q_cols)?;
    Ok((q, DenseMatrix::from_raw(n, n, r)))
}

/// First `k` pivots of classical column-pivoted Gram-Schmidt QR: at each
/// step the remaining column of largest 2-norm is selected (ties to the
/// lowest index) and the rest are deflated against its orthonormalized
/// direction.
pub fn column_pivoted_qr(a: &DenseMatrix, k: usize) -> Result<IndexSelection> {
    let (m, n) = (a.rows(), a.cols());
    if k == 0 || k > m.min(n) {
        return Err(Error::RankOutOfRange { k, max: m.min(n) });
    }
    let mut work: Vec<Vec<f64>> = (0..n).map(|j| a.column_vec(j)).collect();
    let mut taken = vec![false; n];
    let mut q_cols: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut pivots = Vec::with_capacity(k);

    let max_initial = (0..n).map(|j| a.column_norm(j)).fold(0.0_f64, f64::max);
    let tol = DEPENDENCE_FACTOR * max_initial;

    for step in 0..k {
        let mut best = usize::MAX;
        let mut best_norm_sq = -1.0;
        for (j, col) in work.iter().enumerate() {
            if taken[j] {
                continue;
            }
            let ns = dot(col, col);
            if ns > best_norm_sq {
                best_norm_sq = ns;
                best = j;
            }
        }
        if best == usize::MAX || best_norm_sq.sqrt() <= tol {
            return Err(Error::RankDeficient {
                found: step,
                requested: k,
            });
        }
        let outcome = dgks_orthogonalize(&q_cols, &work[best])?;
        let direction = match outcome {
            DgksOutcome::Extended { direction, .. } => direction,
            DgksOutcome::Dependent { .. } => {
                return Err(Error::RankDeficient {
                    found: step,
                    requested: k,
                })
            }
        };
        taken[best] = true;
        pivots.push(best);
        for (j, col) in work.iter_mut().enumerate() {
            if !taken[j] {
                let c = dot(&direction, col);
                axpy(col, -c, &direction);
            }
        }
        q_cols.push(direction);
    }
    Ok(IndexSelection::from_zero_based(
        pivots,
        SelectionSource::QrPivot,
    ))
}
