//! Discrete empirical interpolation: greedy index selection over the
//! columns of a basis matrix, the interpolatory projector it induces, and
//! the conditioning of the selected rows.

use crate::error::{Error, Result};
use crate::matrix::{axpy, DenseMatrix};
use crate::selection::{IndexSelection, SelectionSource};
use crate::svd::singular_values;

/// Relative pivot threshold for declaring a selected submatrix numerically
/// singular.
pub const SINGULAR_FACTOR: f64 = 1e3 * f64::EPSILON;

/// Multiplier on the rounding-noise scale of the residual when deciding
/// argmax ties (the lowest tied index wins). The scale tracks the
/// cancellation mass of the interpolation solve, which can dwarf the
/// residual itself on adversarial bases; exact-arithmetic ties would
/// otherwise resolve on noise. For well-conditioned bases the window stays
/// near 1e-11 relative and never overrides a genuine gap.
const ARGMAX_TIE_FACTOR: f64 = 65536.0 * f64::EPSILON;

/// Row-pivoted Gaussian elimination on a column-major `n x n` system with
/// multiple right-hand sides, solved in place. Returns `false` when a pivot
/// falls below `pivot_floor`.
pub(crate) fn lu_solve_multi(
    n: usize,
    a: &mut [f64],
    rhs: &mut [Vec<f64>],
    pivot_floor: f64,
) -> bool {
    debug_assert_eq!(a.len(), n * n);
    let mut perm: Vec<usize> = (0..n).collect();
    for col in 0..n {
        // pick the largest remaining pivot in this column
        let (mut best, mut best_abs) = (col, 0.0_f64);
        for row in col..n {
            let v = a[col * n + perm[row]].abs();
            if v > best_abs {
                best_abs = v;
                best = row;
            }
        }
        if best_abs <= pivot_floor {
            return false;
        }
        perm.swap(col, best);
        let prow = perm[col];
        let pivot = a[col * n + prow];
        for row in (col + 1)..n {
            let r = perm[row];
            let factor = a[col * n + r] / pivot;
            if factor != 0.0 {
                for c in (col + 1)..n {
                    a[c * n + r] -= factor * a[c * n + prow];
                }
                for b in rhs.iter_mut() {
                    b[r] -= factor * b[prow];
                }
            }
            a[col * n + r] = 0.0;
        }
    }
    // back substitution, then undo the row permutation
    for b in rhs.iter_mut() {
        let mut x = vec![0.0; n];
        for col in (0..n).rev() {
            let mut acc = b[perm[col]];
            for c in (col + 1)..n {
                acc -= a[c * n + perm[col]] * x[c];
            }
            x[col] = acc / a[col * n + perm[col]];
        }
        *b = x;
    }
    true
}

fn solve_selected(
    v: &DenseMatrix,
    p: &[usize],
    width: usize,
    rhs: Vec<f64>,
    pivot_floor: f64,
) -> Option<Vec<f64>> {
    let n = p.len();
    debug_assert_eq!(rhs.len(), n);
    let mut sub = vec![0.0; n * n];
    for c in 0..width.min(n) {
        let col = v.column(c);
        for (r, &pi) in p.iter().enumerate() {
            sub[c * n + r] = col[pi];
        }
    }
    let mut rhs_list = [rhs];
    if lu_solve_multi(n, &mut sub, &mut rhs_list, pivot_floor) {
        let [x] = rhs_list;
        Some(x)
    } else {
        None
    }
}

/// Greedy interpolation-point selection over the columns of `v`, processed
/// left to right: the first index maximizes |v_1|; each later index
/// maximizes the magnitude of v_j minus its interpolatory projection onto
/// the indices already chosen. The residual vanishes at previously selected
/// rows, so indices never repeat.
pub fn deim_select(v: &DenseMatrix) -> Result<IndexSelection> {
    let (m, k) = (v.rows(), v.cols());
    if k > m {
        return Err(Error::DimensionMismatch(format!(
            "basis is {m}x{k}; need at least as many rows as columns"
        )));
    }
    let scale = v.max_abs();
    let pivot_floor = SINGULAR_FACTOR * scale;
    let mut picked: Vec<usize> = Vec::with_capacity(k);

    for j in 0..k {
        let mut r = v.column_vec(j);
        let mut coeff_mass = 0.0;
        if j > 0 {
            // interpolation coefficients, with one refinement pass so the
            // residual stays accurate even when the selected submatrix is
            // badly conditioned
            for _ in 0..2 {
                let rhs: Vec<f64> = picked.iter().map(|&pi| r[pi]).collect();
                let coeffs = solve_selected(v, &picked, j, rhs, pivot_floor)
                    .ok_or(Error::SingularBasis { step: j + 1 })?;
                for (t, &c) in coeffs.iter().enumerate() {
                    axpy(&mut r, -c, v.column(t));
                    coeff_mass += c.abs();
                }
            }
        }
        let max = r.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        if max <= pivot_floor {
            return Err(Error::SingularBasis { step: j + 1 });
        }
        let tie_width = ARGMAX_TIE_FACTOR * (max + scale * coeff_mass);
        let idx = r
            .iter()
            .position(|x| x.abs() >= max - tie_width)
            .expect("max is attained");
        picked.push(idx);
    }
    Ok(IndexSelection::from_zero_based(picked, SelectionSource::Deim))
}

/// Applies the interpolatory projector for `p` onto the span of `v`:
/// returns `V (V(p,:))^{-1} x(p)`, which agrees with `x` exactly on the
/// selected entries.
pub fn interpolatory_project(v: &DenseMatrix, p: &IndexSelection, x: &[f64]) -> Result<Vec<f64>> {
    let (m, k) = (v.rows(), v.cols());
    if p.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "selection has {} indices, basis has {} columns",
            p.len(),
            k
        )));
    }
    if x.len() != m {
        return Err(Error::ColumnLengthMismatch {
            expected: m,
            found: x.len(),
        });
    }
    let pz = p.zero_based();
    if let Some(&bad) = pz.iter().find(|&&i| i >= m) {
        return Err(Error::IndexOutOfRange {
            index: bad + 1,
            bound: m,
        });
    }
    let rhs: Vec<f64> = pz.iter().map(|&i| x[i]).collect();
    let coeffs = solve_selected(v, &pz, k, rhs, SINGULAR_FACTOR * v.max_abs())
        .ok_or(Error::ProjectorUndefined)?;
    let mut out = vec![0.0; m];
    for (t, &c) in coeffs.iter().enumerate() {
        axpy(&mut out, c, v.column(t));
    }
    Ok(out)
}

/// Error constant of a selection: `||(V(p,:))^{-1}||_2`, i.e. the reciprocal
/// of the smallest singular value of the selected square submatrix. Fails
/// when that submatrix is numerically singular.
pub fn selection_matrix_condition(v: &DenseMatrix, p: &IndexSelection) -> Result<f64> {
    let k = v.cols();
    if p.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "selection has {} indices, basis has {} columns",
            p.len(),
            k
        )));
    }
    let pz = p.zero_based();
    if let Some(&bad) = pz.iter().find(|&&i| i >= v.rows()) {
        return Err(Error::IndexOutOfRange {
            index: bad + 1,
            bound: v.rows(),
        });
    }
    let sub = v.select_rows(&pz);
    let s = singular_values(&sub);
    let (smax, smin) = (s[0], s[k - 1]);
    if smin <= SINGULAR_FACTOR * smax {
        return Err(Error::SingularSubmatrix);
    }
    Ok(1.0 / smin)
}
