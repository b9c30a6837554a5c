//! Economy SVD via one-sided Jacobi with a thin-QR preprocessing step,
//! plus the spectral norm and largest-principal-angle helpers built on it.

use crate::error::{Error, Result};
use crate::matrix::{dot, norm2, DenseMatrix};
use crate::qr::{orthonormal_completion, thin_qr};
use crate::util::unit_f64;

/// Largest min-dimension for which the spectral norm is computed through the
/// dense SVD path; larger matrices fall back to power iteration.
pub const DENSE_CUTOFF: usize = 512;

/// Rotation threshold for the Jacobi sweep, relative to the geometric mean
/// of the paired column norms.
const JACOBI_TOL: f64 = 50.0 * f64::EPSILON;
const JACOBI_MAX_SWEEPS: usize = 60;

const POWER_MAX_ITERS: usize = 1000;
const POWER_REL_TOL: f64 = 1e-9;

/// Singular values closer than this (relative to the largest) are treated
/// as tied when ordering columns.
const SIGMA_TIE_REL: f64 = 1e-12;

/// Whether a factorization is an exact truncation of the input matrix's SVD
/// or an approximation carrying its own residual certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SvdKind {
    Exact,
    Approximate,
}

/// Rank-k singular triplet set: `A ~= V diag(S) W^T` with orthonormal-column
/// V (m x k) and W (n x k), singular values descending.
///
/// `residual_estimate` is the first neglected singular value for exact
/// truncations, or the certified Frobenius residual of an approximate
/// factorization.
#[derive(Debug, Clone)]
pub struct RankKSvd {
    v: DenseMatrix,
    s: Vec<f64>,
    w: DenseMatrix,
    residual_estimate: f64,
    kind: SvdKind,
}

impl RankKSvd {
    /// Validating constructor: checks shapes, descending nonnegative values,
    /// and per-entry orthonormality of both factors within
    /// `100 * eps * k`.
    pub fn new(
        v: DenseMatrix,
        s: Vec<f64>,
        w: DenseMatrix,
        residual_estimate: f64,
        kind: SvdKind,
    ) -> Result<Self> {
        let k = s.len();
        if v.cols() != k || w.cols() != k {
            return Err(Error::DimensionMismatch(format!(
                "V has {} columns, W has {}, expected {}",
                v.cols(),
                w.cols(),
                k
            )));
        }
        if !(0.0..).contains(&residual_estimate) {
            return Err(Error::NonFiniteEntry);
        }
        let tie = SIGMA_TIE_REL * s.first().copied().unwrap_or(0.0);
        for i in 0..k {
            if s[i] < 0.0 || !s[i].is_finite() {
                return Err(Error::NonFiniteEntry);
            }
            if i + 1 < k && s[i + 1] - s[i] > tie {
                return Err(Error::DimensionMismatch(
                    "singular values must be descending".into(),
                ));
            }
        }
        let tol = 100.0 * f64::EPSILON * k as f64;
        for (name, f) in [("V", &v), ("W", &w)] {
            let gram = f.transpose().matmul(f);
            let dev = gram.sub(&DenseMatrix::identity(k)).max_abs();
            if dev > tol {
                return Err(Error::DimensionMismatch(format!(
                    "{name} columns deviate from orthonormality by {dev:.3e}"
                )));
            }
        }
        Ok(Self {
            v,
            s,
            w,
            residual_estimate,
            kind,
        })
    }

    pub(crate) fn from_parts_unchecked(
        v: DenseMatrix,
        s: Vec<f64>,
        w: DenseMatrix,
        residual_estimate: f64,
        kind: SvdKind,
    ) -> Self {
        debug_assert_eq!(v.cols(), s.len());
        debug_assert_eq!(w.cols(), s.len());
        Self {
            v,
            s,
            w,
            residual_estimate,
            kind,
        }
    }

    pub fn v(&self) -> &DenseMatrix {
        &self.v
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }

    pub fn w(&self) -> &DenseMatrix {
        &self.w
    }

    pub fn rank(&self) -> usize {
        self.s.len()
    }

    pub fn residual_estimate(&self) -> f64 {
        self.residual_estimate
    }

    pub fn kind(&self) -> SvdKind {
        self.kind
    }

    /// `V diag(S) W^T`, materialized.
    pub fn reconstruct(&self) -> DenseMatrix {
        let mut vs = self.v.clone();
        vs = DenseMatrix::from_fn(vs.rows(), vs.cols(), |i, j| vs.get(i, j) * self.s[j])
            .expect("scaled factor is finite");
        vs.matmul(&self.w.transpose())
    }
}

/// One-sided Jacobi on a set of columns. Rotations are applied until every
/// pair satisfies |b_p . b_q| <= tol * ||b_p|| ||b_q||. The same rotations
/// are applied to `accum` when present (carrying the right singular
/// vectors).
fn jacobi_sweeps(cols: &mut [Vec<f64>], mut accum: Option<&mut [Vec<f64>]>) {
    let n = cols.len();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let (app, aqq, apq);
                {
                    let bp = &cols[p];
                    let bq = &cols[q];
                    app = dot(bp, bp);
                    aqq = dot(bq, bq);
                    apq = dot(bp, bq);
                }
                if apq.abs() <= JACOBI_TOL * (app * aqq).sqrt() {
                    continue;
                }
                rotated = true;
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_pair(cols, p, q, c, s);
                if let Some(acc) = accum.as_deref_mut() {
                    rotate_pair(acc, p, q, c, s);
                }
            }
        }
        if !rotated {
            break;
        }
    }
}

#[inline]
fn rotate_pair(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (head, tail) = cols.split_at_mut(q);
    let bp = &mut head[p];
    let bq = &mut tail[0];
    for (x, y) in bp.iter_mut().zip(bq.iter_mut()) {
        let xp = *x;
        let yq = *y;
        *x = c * xp - s * yq;
        *y = s * xp + c * yq;
    }
}

fn economy_svd_impl(a: &DenseMatrix, want_vectors: bool) -> (Vec<f64>, Option<(DenseMatrix, DenseMatrix)>) {
    let (m, n) = (a.rows(), a.cols());
    debug_assert!(m >= n);
    let (q0, r0) = thin_qr(a);
    let mut b: Vec<Vec<f64>> = (0..n).map(|j| r0.column_vec(j)).collect();
    let mut w: Option<Vec<Vec<f64>>> = want_vectors.then(|| {
        (0..n)
            .map(|j| {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                e
            })
            .collect()
    });
    jacobi_sweeps(&mut b, w.as_deref_mut());

    let mut order: Vec<usize> = (0..n).collect();
    let sigma: Vec<f64> = b.iter().map(|c| norm2(c)).collect();
    order.sort_by(|&i, &j| sigma[j].partial_cmp(&sigma[i]).unwrap());
    // values separated only by rounding noise are genuine ties; keep tied
    // columns in their original order so degenerate inputs stay put
    let tie = SIGMA_TIE_REL * sigma[order[0]];
    let mut group_start = 0;
    for t in 1..=n {
        if t == n || sigma[order[t - 1]] - sigma[order[t]] > tie {
            order[group_start..t].sort_unstable();
            group_start = t;
        }
    }
    let s_sorted: Vec<f64> = order.iter().map(|&i| sigma[i]).collect();

    if !want_vectors {
        return (s_sorted, None);
    }

    // normalize B columns into the left factor of R0; zero columns get an
    // orthonormal completion so the factor stays full.
    let mut u_cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    for &i in &order {
        if sigma[i] > 0.0 {
            let inv = 1.0 / sigma[i];
            u_cols.push(b[i].iter().map(|v| v * inv).collect());
        } else {
            u_cols.push(orthonormal_completion(&u_cols, n));
        }
    }
    let u_r = DenseMatrix::from_columns(&u_cols).expect("nonempty factor");
    let v = q0.matmul(&u_r);
    let w_cols: Vec<Vec<f64>> = {
        let w = w.expect("accumulator present");
        order.iter().map(|&i| w[i].clone()).collect()
    };
    let w = DenseMatrix::from_columns(&w_cols).expect("nonempty factor");
    (s_sorted, Some((v, w)))
}

/// Full economy SVD: `A = V diag(S) W^T` with `k = min(m, n)` triplets and a
/// zero residual estimate.
pub fn economy_svd(a: &DenseMatrix) -> RankKSvd {
    if a.rows() >= a.cols() {
        let (s, vw) = economy_svd_impl(a, true);
        let (v, w) = vw.expect("vectors requested");
        RankKSvd::from_parts_unchecked(v, s, w, 0.0, SvdKind::Exact)
    } else {
        let t = a.transpose();
        let (s, vw) = economy_svd_impl(&t, true);
        let (v, w) = vw.expect("vectors requested");
        // A^T = V S W^T  =>  A = W S V^T
        RankKSvd::from_parts_unchecked(w, s, v, 0.0, SvdKind::Exact)
    }
}

/// Singular values only, descending. Same Jacobi computation as
/// [`economy_svd`] with the vector bookkeeping skipped.
pub fn singular_values(a: &DenseMatrix) -> Vec<f64> {
    if a.rows() >= a.cols() {
        economy_svd_impl(a, false).0
    } else {
        economy_svd_impl(&a.transpose(), false).0
    }
}

/// Keeps the leading `k` triplets. When `k` is strictly below the input
/// rank, the residual estimate becomes the first discarded singular value;
/// otherwise the input residual estimate is preserved.
pub fn truncate_svd(svd: &RankKSvd, k: usize) -> Result<RankKSvd> {
    let full = svd.rank();
    if k == 0 || k > full {
        return Err(Error::RankOutOfRange { k, max: full });
    }
    let keep: Vec<usize> = (0..k).collect();
    let residual = if k < full {
        svd.s()[k]
    } else {
        svd.residual_estimate()
    };
    Ok(RankKSvd::from_parts_unchecked(
        svd.v().select_columns(&keep),
        svd.s()[..k].to_vec(),
        svd.w().select_columns(&keep),
        residual,
        svd.kind(),
    ))
}

/// Largest singular value. Below [`DENSE_CUTOFF`] this is the exact dense
/// computation; above it, power iteration on A^T A with a relative-change
/// stopping rule of 1e-9 (at most 1000 iterations).
pub fn spectral_norm(a: &DenseMatrix) -> f64 {
    if a.rows().min(a.cols()) <= DENSE_CUTOFF {
        return singular_values(a)[0];
    }
    power_iteration(a)
}

fn power_iteration(a: &DenseMatrix) -> f64 {
    let n = a.cols();
    let mut state = 0x00c0_ffeeu64;
    let mut v: Vec<f64> = (0..n).map(|_| unit_f64(&mut state) - 0.5).collect();
    let nv = norm2(&v);
    for x in &mut v {
        *x /= nv;
    }
    let mut sigma = 0.0;
    for _ in 0..POWER_MAX_ITERS {
        let mut u = a.matvec(&v);
        let nu = norm2(&u);
        if nu == 0.0 {
            return 0.0;
        }
        for x in &mut u {
            *x /= nu;
        }
        let z = a.transpose_matvec(&u);
        let next = norm2(&z);
        if next == 0.0 {
            return 0.0;
        }
        v = z;
        for x in &mut v {
            *x /= next;
        }
        if (next - sigma).abs() <= POWER_REL_TOL * next {
            return next;
        }
        sigma = next;
    }
    sigma
}

/// Largest principal angle between the column spans of two orthonormal
/// matrices of equal shape: arccos of the smallest singular value of
/// V1^T V2, clamped to [0, pi/2].
pub fn subspace_angle(v1: &DenseMatrix, v2: &DenseMatrix) -> Result<f64> {
    if v1.rows() != v2.rows() || v1.cols() != v2.cols() {
        return Err(Error::DimensionMismatch(format!(
            "subspace bases are {}x{} and {}x{}",
            v1.rows(),
            v1.cols(),
            v2.rows(),
            v2.cols()
        )));
    }
    let g = v1.transpose().matmul(v2);
    let s = singular_values(&g);
    let smin = s[s.len() - 1].clamp(0.0, 1.0);
    Ok(smin.acos())
}
