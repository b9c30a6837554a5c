//! Shared generators and assertions for the integration suites.
#![allow(dead_code)]

use deim_cur::matrix::DenseMatrix;
use deim_cur::qr::thin_qr_strict;
use deim_cur::synth::{tiered_weights, SparseSumSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use std::cell::Cell;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Dense matrix with entries uniform in [-0.5, 0.5).
pub fn seeded_matrix(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
    let mut r = rng(seed);
    DenseMatrix::from_fn(rows, cols, |_, _| r.gen::<f64>() - 0.5).unwrap()
}

/// Orthonormal columns from the thin QR of a random matrix.
pub fn random_orthonormal(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
    assert!(rows >= cols);
    let (q, _) = thin_qr_strict(&seeded_matrix(rows, cols, seed)).expect("random matrix full rank");
    q
}

/// Exact rank-k product of two seeded factors.
pub fn exact_rank_k(rows: usize, cols: usize, k: usize, seed: u64) -> DenseMatrix {
    let x = seeded_matrix(rows, k, seed ^ 0xA5A5_A5A5);
    let y = seeded_matrix(cols, k, seed ^ 0x5A5A_5A5A);
    x.matmul(&y.transpose())
}

/// Desk-scale sparse nonnegative sum with the 2/j leading weights.
pub fn sparse_sum_mild(m: usize, n: usize, seed: u64) -> DenseMatrix {
    let spec = SparseSumSpec {
        m,
        n,
        density: 0.025,
        weights: tiered_weights(2.0, m.min(n)),
        seed,
    };
    deim_cur::synth::gen_sparse_sum(&spec).unwrap()
}

/// Variant with the 1000/j leading weights (sharper spectral drop).
pub fn sparse_sum_sharp(m: usize, n: usize, seed: u64) -> DenseMatrix {
    let spec = SparseSumSpec {
        m,
        n,
        density: 0.025,
        weights: tiered_weights(1000.0, m.min(n)),
        seed,
    };
    deim_cur::synth::gen_sparse_sum(&spec).unwrap()
}

/// Max deviation of Q^T Q from the identity.
pub fn orthonormality_defect(q: &DenseMatrix) -> f64 {
    let k = q.cols();
    q.transpose()
        .matmul(q)
        .sub(&DenseMatrix::identity(k))
        .max_abs()
}

/// Column iterator adapter that counts how many columns were pulled.
pub struct CountingStream<'a> {
    matrix: &'a DenseMatrix,
    next: usize,
    reads: &'a Cell<usize>,
}

impl<'a> CountingStream<'a> {
    pub fn new(matrix: &'a DenseMatrix, reads: &'a Cell<usize>) -> Self {
        Self {
            matrix,
            next: 0,
            reads,
        }
    }
}

impl<'a> Iterator for CountingStream<'a> {
    type Item = Vec<f64>;

    fn next(&mut self) -> Option<Vec<f64>> {
        if self.next >= self.matrix.cols() {
            return None;
        }
        self.reads.set(self.reads.get() + 1);
        let col = self.matrix.column_vec(self.next);
        self.next += 1;
        Some(col)
    }
}

pub fn median(values: &mut Vec<f64>) -> f64 {
    assert!(!values.is_empty());
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}
