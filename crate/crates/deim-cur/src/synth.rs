//! Deterministic generators for the synthetic test families: sparse
//! nonnegative sums of rank-1 terms with tiered weights, and the
//! lower-triangular growth construction whose selection error constant
//! scales like 2^k.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::qr::thin_qr_strict;
use crate::util::indexed_map;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Specification of a sum of sparse nonnegative rank-1 terms
/// `A = sum_t weights[t] * x_t y_t^T`, fully determined by `seed`.
#[derive(Debug, Clone)]
pub struct SparseSumSpec {
    pub m: usize,
    pub n: usize,
    /// Probability that any entry of a generating vector is nonzero.
    pub density: f64,
    /// One positive coefficient per rank-1 term.
    pub weights: Vec<f64>,
    pub seed: u64,
}

impl SparseSumSpec {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::InvalidSpec("dimensions must be positive".into()));
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return Err(Error::InvalidSpec(format!(
                "density {} outside (0, 1]",
                self.density
            )));
        }
        if self.weights.is_empty() {
            return Err(Error::InvalidSpec("at least one term required".into()));
        }
        if self.weights.len() > self.m.min(self.n) {
            return Err(Error::InvalidSpec(format!(
                "{} terms exceed min(m, n) = {}",
                self.weights.len(),
                self.m.min(self.n)
            )));
        }
        if !self.weights.iter().all(|&w| w > 0.0 && w.is_finite()) {
            return Err(Error::InvalidSpec("weights must be positive".into()));
        }
        Ok(())
    }
}

/// Tiered coefficient pattern: `lead/j` for the first ten terms, `1/j`
/// afterwards (1-based `j`).
pub fn tiered_weights(lead: f64, terms: usize) -> Vec<f64> {
    (1..=terms)
        .map(|j| {
            if j <= 10 {
                lead / j as f64
            } else {
                1.0 / j as f64
            }
        })
        .collect()
}

fn sparse_vector(rng: &mut ChaCha20Rng, len: usize, density: f64) -> Vec<f64> {
    (0..len)
        .map(|_| {
            if rng.gen::<f64>() < density {
                rng.gen::<f64>()
            } else {
                0.0
            }
        })
        .collect()
}

/// Materializes the sum of sparse rank-1 terms. Generating vectors are
/// drawn pairwise (x_1, y_1, x_2, y_2, ...) from one ChaCha20 stream keyed
/// by the spec seed: per entry, one uniform draw decides inclusion and, if
/// included, a second supplies the value in [0, 1).
pub fn gen_sparse_sum(spec: &SparseSumSpec) -> Result<DenseMatrix> {
    spec.validate()?;
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    let mut xs = Vec::with_capacity(spec.weights.len());
    let mut ys = Vec::with_capacity(spec.weights.len());
    for _ in &spec.weights {
        xs.push(sparse_vector(&mut rng, spec.m, spec.density));
        ys.push(sparse_vector(&mut rng, spec.n, spec.density));
    }
    let work = spec.m * spec.n * spec.weights.len();
    let cols = indexed_map(spec.n, work, |c| {
        let mut col = vec![0.0; spec.m];
        for ((w, x), y) in spec.weights.iter().zip(&xs).zip(&ys) {
            let scale = w * y[c];
            if scale != 0.0 {
                for (out, xv) in col.iter_mut().zip(x) {
                    *out += scale * xv;
                }
            }
        }
        col
    });
    DenseMatrix::from_columns(&cols)
}

/// The growth construction: a +-1 lower-triangular pattern `L` and the
/// orthonormal basis `V` from its unpivoted thin QR. Greedy selection on
/// `V` picks rows 1..k and its error constant grows like 2^k.
#[derive(Debug, Clone)]
pub struct GrowthCase {
    m: usize,
    k: usize,
    l: DenseMatrix,
    v: DenseMatrix,
}

impl GrowthCase {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> &DenseMatrix {
        &self.l
    }

    pub fn v(&self) -> &DenseMatrix {
        &self.v
    }
}

pub fn growth_case(m: usize, k: usize) -> Result<GrowthCase> {
    if k < 2 {
        return Err(Error::GrowthRankTooSmall { k });
    }
    if m <= k {
        return Err(Error::GrowthTooSmall { m, k });
    }
    let l = DenseMatrix::from_fn(m, k, |i, j| {
        if i == j {
            1.0
        } else if j < i {
            -1.0
        } else {
            0.0
        }
    })?;
    let (v, _) = thin_qr_strict(&l)?;
    Ok(GrowthCase { m, k, l, v })
}
