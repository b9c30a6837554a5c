//! Competing index-selection strategies: deterministic top-k leverage
//! scores, leverage-weighted sampling without replacement, and the pivoted
//! QR selection ("QR-CUR").

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::qr::column_pivoted_qr;
use crate::selection::{IndexSelection, SelectionSource};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Squared row norms of an orthonormal-column matrix. For `r` orthonormal
/// columns the scores sum to `r` and each lies in [0, 1].
#[derive(Debug, Clone)]
pub struct LeverageScores {
    scores: Vec<f64>,
    r_used: usize,
}

impl LeverageScores {
    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn r_used(&self) -> usize {
        self.r_used
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// Reporting helper: scores divided by their maximum (all zeros stay
    /// zero). Not used for selection.
    pub fn scaled(&self) -> Vec<f64> {
        let max = self.scores.iter().cloned().fold(0.0_f64, f64::max);
        if max == 0.0 {
            return vec![0.0; self.scores.len()];
        }
        self.scores.iter().map(|s| s / max).collect()
    }
}

/// Computes leverage scores from the rows of `v`. The caller chooses how
/// many leading singular vectors `v` carries; orthonormality of the columns
/// is assumed, not enforced.
pub fn leverage_scores(v: &DenseMatrix) -> LeverageScores {
    let mut scores = vec![0.0; v.rows()];
    for j in 0..v.cols() {
        for (s, x) in scores.iter_mut().zip(v.column(j)) {
            *s += x * x;
        }
    }
    LeverageScores {
        scores,
        r_used: v.cols(),
    }
}

/// Indices of the `k` largest scores, in descending score order; ties go to
/// the lowest index.
pub fn top_k_select(scores: &LeverageScores, k: usize) -> Result<IndexSelection> {
    let n = scores.len();
    if k == 0 || k > n {
        return Err(Error::RankOutOfRange { k, max: n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        scores.scores[b]
            .partial_cmp(&scores.scores[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    order.truncate(k);
    Ok(IndexSelection::from_zero_based(
        order,
        SelectionSource::LeverageTop,
    ))
}

/// Draws `k` distinct indices without replacement, each draw proportional
/// to the remaining scores. The stream is ChaCha20 keyed by `seed` through
/// `seed_from_u64`, consuming one uniform f64 in [0, 1) per draw, so equal
/// seeds give identical selections on every platform.
pub fn sample_select(scores: &LeverageScores, k: usize, seed: u64) -> Result<IndexSelection> {
    let nonzero = scores.scores.iter().filter(|&&s| s > 0.0).count();
    if k == 0 || k > nonzero {
        return Err(Error::InsufficientScores { nonzero, k });
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut remaining = scores.scores.clone();
    let mut picked = Vec::with_capacity(k);
    for _ in 0..k {
        let total: f64 = remaining.iter().sum();
        let target = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut choice = None;
        for (i, &s) in remaining.iter().enumerate() {
            if s <= 0.0 {
                continue;
            }
            acc += s;
            if target < acc {
                choice = Some(i);
                break;
            }
        }
        // rounding can leave target at the very top of the accumulated mass
        let i = choice.unwrap_or_else(|| {
            remaining
                .iter()
                .rposition(|&s| s > 0.0)
                .expect("positive mass remains")
        });
        picked.push(i);
        remaining[i] = 0.0;
    }
    Ok(IndexSelection::from_zero_based(
        picked,
        SelectionSource::LeverageSample,
    ))
}

/// Pivoted-QR selection: `q` holds the first `k` column pivots of `A`, and
/// `p` the first `k` column pivots of `C^T` where `C = A(:, q)`.
pub fn qr_cur_select(a: &DenseMatrix, k: usize) -> Result<(IndexSelection, IndexSelection)> {
    let q = column_pivoted_qr(a, k)?;
    let c = a.select_columns(&q.zero_based());
    let p = column_pivoted_qr(&c.transpose(), k)?;
    Ok((p, q))
}
