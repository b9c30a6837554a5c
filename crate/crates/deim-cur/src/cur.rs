//! CUR assembly from row/column selections, error certificates, and the
//! rank sweep that drives the CLI and the comparison experiments.
//!
//! Two middle factors are supported: the interpolatory variant
//! `U = A(p,q)^{-1}`, which reproduces the selected rows and columns of `A`
//! exactly, and the orthogonal variant `U = C^I A R^I`, which composes two
//! orthogonal projections and satisfies the
//! `(eta_p + eta_q) * sigma_{k+1}` bound.

use crate::baselines::{leverage_scores, sample_select, top_k_select, qr_cur_select};
use crate::deim::{deim_select, lu_solve_multi, selection_matrix_condition, SINGULAR_FACTOR};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::qr::thin_qr_strict;
use crate::selection::IndexSelection;
use crate::svd::{singular_values, spectral_norm, truncate_svd, RankKSvd, SvdKind};
use crate::util::{indexed_map, splitmix64};
use std::fmt;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurVariant {
    Interpolatory,
    Orthogonal,
}

impl fmt::Display for CurVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CurVariant::Interpolatory => "interpolatory",
            CurVariant::Orthogonal => "orthogonal",
        })
    }
}

/// A rank-k CUR factorization: `C = A(:, q)`, `R = A(p, :)` and a k x k
/// middle factor `U` built per `variant`.
#[derive(Debug, Clone)]
pub struct CurFactorization {
    p: IndexSelection,
    q: IndexSelection,
    c: DenseMatrix,
    u: DenseMatrix,
    r: DenseMatrix,
    variant: CurVariant,
}

impl CurFactorization {
    pub fn p(&self) -> &IndexSelection {
        &self.p
    }

    pub fn q(&self) -> &IndexSelection {
        &self.q
    }

    pub fn c(&self) -> &DenseMatrix {
        &self.c
    }

    pub fn u(&self) -> &DenseMatrix {
        &self.u
    }

    pub fn r(&self) -> &DenseMatrix {
        &self.r
    }

    pub fn variant(&self) -> CurVariant {
        self.variant
    }

    pub fn rank(&self) -> usize {
        self.p.len()
    }

    /// Materializes the product `C U R`.
    pub fn product(&self) -> DenseMatrix {
        self.c.matmul(&self.u.matmul(&self.r))
    }
}

fn validate_selections(a: &DenseMatrix, p: &IndexSelection, q: &IndexSelection) -> Result<usize> {
    let k = p.len();
    if k == 0 || k != q.len() {
        return Err(Error::DimensionMismatch(format!(
            "row selection has {} indices, column selection {}",
            p.len(),
            q.len()
        )));
    }
    if k > a.rows().min(a.cols()) {
        return Err(Error::RankOutOfRange {
            k,
            max: a.rows().min(a.cols()),
        });
    }
    if let Some(&bad) = p.indices().iter().find(|&&i| i > a.rows()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            bound: a.rows(),
        });
    }
    if let Some(&bad) = q.indices().iter().find(|&&i| i > a.cols()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            bound: a.cols(),
        });
    }
    Ok(k)
}

/// Interpolatory variant: `U = A(p, q)^{-1}`, so the product matches the
/// selected columns and rows of `A` exactly.
pub fn build_cur_interpolatory(
    a: &DenseMatrix,
    p: &IndexSelection,
    q: &IndexSelection,
) -> Result<CurFactorization> {
    let k = validate_selections(a, p, q)?;
    let apq = a.submatrix(&p.zero_based(), &q.zero_based());
    let s = singular_values(&apq);
    if s[k - 1] <= SINGULAR_FACTOR * s[0] {
        return Err(Error::InterpolatoryUndefined);
    }
    let mut lu = apq.data().to_vec();
    let mut rhs: Vec<Vec<f64>> = (0..k)
        .map(|j| {
            let mut e = vec![0.0; k];
            e[j] = 1.0;
            e
        })
        .collect();
    if !lu_solve_multi(k, &mut lu, &mut rhs, f64::MIN_POSITIVE) {
        return Err(Error::InterpolatoryUndefined);
    }
    let u = DenseMatrix::from_columns(&rhs)?;
    Ok(CurFactorization {
        p: p.clone(),
        q: q.clone(),
        c: a.select_columns(&q.zero_based()),
        u,
        r: a.select_rows(&p.zero_based()),
        variant: CurVariant::Interpolatory,
    })
}

/// Solves `T X = B` for upper-triangular `T`, column by column.
fn solve_upper(t: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let k = t.rows();
    debug_assert_eq!(t.cols(), k);
    debug_assert_eq!(b.rows(), k);
    let mut out = vec![0.0; k * b.cols()];
    for j in 0..b.cols() {
        let col = &mut out[j * k..(j + 1) * k];
        col.copy_from_slice(b.column(j));
        for i in (0..k).rev() {
            let mut acc = col[i];
            for c in (i + 1)..k {
                acc -= t.get(i, c) * col[c];
            }
            col[i] = acc / t.get(i, i);
        }
    }
    DenseMatrix::from_raw(k, b.cols(), out)
}

/// Orthogonal variant: `U = C^I A R^I` computed through thin QR factors of
/// `C` and `R^T` (never the normal equations). The product equals the
/// two-step orthogonal projection of `A` onto the selected column and row
/// spaces.
pub fn build_cur_orthogonal(
    a: &DenseMatrix,
    p: &IndexSelection,
    q: &IndexSelection,
) -> Result<CurFactorization> {
    validate_selections(a, p, q)?;
    let c = a.select_columns(&q.zero_based());
    let r = a.select_rows(&p.zero_based());
    let (qc, tc) = thin_qr_strict(&c).map_err(|e| match e {
        Error::RankDeficient { .. } => Error::DependentSelection { side: "columns" },
        other => other,
    })?;
    let (qr, tr) = thin_qr_strict(&r.transpose()).map_err(|e| match e {
        Error::RankDeficient { .. } => Error::DependentSelection { side: "rows" },
        other => other,
    })?;
    // U = Tc^{-1} (Qc^T A Qr) Tr^{-T}
    let mid = qc.transpose().matmul(&a.matmul(&qr));
    let y = solve_upper(&tc, &mid);
    let u = solve_upper(&tr, &y.transpose()).transpose();
    Ok(CurFactorization {
        p: p.clone(),
        q: q.clone(),
        c,
        u,
        r,
        variant: CurVariant::Orthogonal,
    })
}

/// Accuracy certificate for a CUR factorization against a rank-k SVD.
#[derive(Debug, Clone)]
pub struct ErrorCertificate {
    pub eta_p: f64,
    pub eta_q: f64,
    /// First neglected singular value for exact SVD inputs; for approximate
    /// inputs, the larger of the two one-sided projection residuals.
    pub sigma_next: f64,
    /// `(eta_p + eta_q) * sigma_next`.
    pub bound: f64,
    /// Spectral norm of `A - C U R`.
    pub observed_error: f64,
}

impl ErrorCertificate {
    fn new(eta_p: f64, eta_q: f64, sigma_next: f64, observed_error: f64) -> Self {
        Self {
            eta_p,
            eta_q,
            sigma_next,
            bound: (eta_p + eta_q) * sigma_next,
            observed_error,
        }
    }
}

impl fmt::Display for ErrorCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "eta_p = {:.6e}, eta_q = {:.6e}, sigma_next = {:.6e}, bound = {:.6e}, observed = {:.6e}",
            self.eta_p, self.eta_q, self.sigma_next, self.bound, self.observed_error
        )
    }
}

/// Certifies a factorization: error constants from the selected rows of the
/// singular vectors, the relevant residual scale, and the observed spectral
/// error. For exact SVD inputs `sigma_next` is the SVD residual estimate;
/// for approximate inputs it is `max(||A(I - W W^T)||, ||(I - V V^T) A||)`.
pub fn error_certificate(
    a: &DenseMatrix,
    svd: &RankKSvd,
    p: &IndexSelection,
    q: &IndexSelection,
    cur: &CurFactorization,
) -> Result<ErrorCertificate> {
    let k = svd.rank();
    if p.len() != k || q.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "certificate rank {} does not match selections ({}, {})",
            k,
            p.len(),
            q.len()
        )));
    }
    let eta_p = selection_matrix_condition(svd.v(), p)?;
    let eta_q = selection_matrix_condition(svd.w(), q)?;
    let sigma_next = match svd.kind() {
        SvdKind::Exact => svd.residual_estimate(),
        SvdKind::Approximate => {
            let col_resid = a.sub(&a.matmul(svd.w()).matmul(&svd.w().transpose()));
            let row_resid = a.sub(&svd.v().matmul(&svd.v().transpose().matmul(a)));
            spectral_norm(&col_resid).max(spectral_norm(&row_resid))
        }
    };
    let observed_error = spectral_norm(&a.sub(&cur.product()));
    Ok(ErrorCertificate::new(eta_p, eta_q, sigma_next, observed_error))
}

/// How rows and columns are selected for a given rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionMethod {
    Deim,
    /// Top-k leverage scores computed from the leading `r` singular vectors.
    LeverageTop { r: usize },
    /// Leverage-weighted sampling without replacement, scores from the
    /// leading `r` singular vectors.
    LeverageSample { r: usize },
    QrPivot,
}

impl fmt::Display for SelectionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl SelectionMethod {
    pub fn name(&self) -> &'static str {
        match self {
            SelectionMethod::Deim => "deim",
            SelectionMethod::LeverageTop { .. } => "ls-top",
            SelectionMethod::LeverageSample { .. } => "ls-sample",
            SelectionMethod::QrPivot => "qr",
        }
    }
}

/// Derives the per-(seed, k, side) sampling stream key so row and column
/// draws are independent and every rank in a sweep is reproducible on its
/// own.
fn sample_seed(seed: u64, k: usize, side: u64) -> u64 {
    let mut s = seed
        ^ (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ side.wrapping_mul(0xD1B5_4A32_D192_ED03);
    splitmix64(&mut s)
}

/// Selects `(p, q)` for rank `k` by `method`. Leverage scores are always
/// computed from the same leading-`r` vectors of the full `svd`, whatever
/// `k` is; DEIM uses the leading `k` vectors; pivoted QR uses only `a`.
pub fn select_for_rank(
    a: &DenseMatrix,
    svd: &RankKSvd,
    method: SelectionMethod,
    k: usize,
    seed: u64,
) -> Result<(IndexSelection, IndexSelection)> {
    match method {
        SelectionMethod::Deim => {
            let trunc = truncate_svd(svd, k)?;
            Ok((deim_select(trunc.v())?, deim_select(trunc.w())?))
        }
        SelectionMethod::LeverageTop { r } => {
            let (sv, sw) = leverage_bases(svd, r)?;
            Ok((
                top_k_select(&leverage_scores(&sv), k)?,
                top_k_select(&leverage_scores(&sw), k)?,
            ))
        }
        SelectionMethod::LeverageSample { r } => {
            let (sv, sw) = leverage_bases(svd, r)?;
            Ok((
                sample_select(&leverage_scores(&sv), k, sample_seed(seed, k, 0))?,
                sample_select(&leverage_scores(&sw), k, sample_seed(seed, k, 1))?,
            ))
        }
        SelectionMethod::QrPivot => qr_cur_select(a, k),
    }
}

fn leverage_bases(svd: &RankKSvd, r: usize) -> Result<(DenseMatrix, DenseMatrix)> {
    if r == 0 || r > svd.rank() {
        return Err(Error::RankOutOfRange {
            k: r,
            max: svd.rank(),
        });
    }
    let keep: Vec<usize> = (0..r).collect();
    Ok((svd.v().select_columns(&keep), svd.w().select_columns(&keep)))
}

/// One rank of a sweep: the certificate (or the error that stopped this
/// rank) and the wall time spent on it.
#[derive(Debug)]
pub struct RankSweepEntry {
    pub k: usize,
    pub outcome: Result<ErrorCertificate>,
    pub elapsed_ms: f64,
}

/// Builds and certifies an orthogonal-variant CUR for every `k` in
/// `1..=k_max`, selecting indices by `method`. Ranks are independent and
/// run on the rayon pool when the `parallel` feature is on; results are
/// collected in `k` order either way, and a failed rank carries its error
/// without stopping the sweep.
pub fn rank_sweep(
    a: &DenseMatrix,
    svd: &RankKSvd,
    method: SelectionMethod,
    k_max: usize,
    seed: u64,
) -> Result<Vec<RankSweepEntry>> {
    if k_max == 0 || k_max > svd.rank() {
        return Err(Error::RankOutOfRange {
            k: k_max,
            max: svd.rank(),
        });
    }
    let work = a.rows() * a.cols() * k_max;
    Ok(indexed_map(k_max, work, |i| {
        let k = i + 1;
        let start = Instant::now();
        let outcome = (|| {
            let (p, q) = select_for_rank(a, svd, method, k, seed)?;
            let cur = build_cur_orthogonal(a, &p, &q)?;
            let trunc = truncate_svd(svd, k)?;
            error_certificate(a, &trunc, &p, &q, &cur)
        })();
        RankSweepEntry {
            k,
            outcome,
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        }
    }))
}
