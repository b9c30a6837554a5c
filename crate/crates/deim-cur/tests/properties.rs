//! Property suites for the module invariants: orthogonality and
//! reconstruction of the dense kernels, greedy-selection guarantees, CUR
//! error bounds, incremental-QR certificates, leverage scores, and I/O
//! round-trips.

mod common;

use common::*;
use deim_cur::baselines::{leverage_scores, sample_select, top_k_select, qr_cur_select};
use deim_cur::cur::{
    build_cur_interpolatory, build_cur_orthogonal, error_certificate, rank_sweep, SelectionMethod,
};
use deim_cur::deim::{deim_select, interpolatory_project, selection_matrix_condition};
use deim_cur::incqr::IncrementalQrState;
use deim_cur::io::{read_matrix_market, write_matrix_market, write_sweep_csv, SweepRecord};
use deim_cur::matrix::DenseMatrix;
use deim_cur::qr::{column_pivoted_qr, dgks_orthogonalize, DgksOutcome};
use deim_cur::svd::{economy_svd, singular_values, spectral_norm, truncate_svd};
use deim_cur::synth::growth_case;
use proptest::prelude::*;
use rand::Rng;

const EPS: f64 = f64::EPSILON;

fn select_rows_by(perm: &[usize], a: &DenseMatrix) -> DenseMatrix {
    a.select_rows(perm)
}

fn random_permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut r = rng(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, r.gen_range(0..=i));
    }
    perm
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn svd_reconstructs_and_factors_are_orthonormal(
        m in 2usize..28,
        n in 2usize..20,
        seed in any::<u64>(),
    ) {
        let a = seeded_matrix(m, n, seed);
        let svd = economy_svd(&a);
        let k = m.min(n);
        let bound = 100.0 * EPS * k as f64 * a.frobenius_norm();
        prop_assert!(a.sub(&svd.reconstruct()).frobenius_norm() <= bound);
        let tol = 100.0 * EPS * k as f64;
        prop_assert!(orthonormality_defect(svd.v()) <= tol);
        prop_assert!(orthonormality_defect(svd.w()) <= tol);
    }

    #[test]
    fn singular_values_invariant_under_permutation(
        m in 2usize..20,
        n in 2usize..16,
        seed in any::<u64>(),
    ) {
        let a = seeded_matrix(m, n, seed);
        let s0 = singular_values(&a);
        let rp = random_permutation(m, seed ^ 1);
        let cp = random_permutation(n, seed ^ 2);
        let permuted = select_rows_by(&rp, &a).select_columns(&cp);
        let s1 = singular_values(&permuted);
        for (x, y) in s0.iter().zip(&s1) {
            prop_assert!((x - y).abs() <= 1e-12 * s0[0].max(1e-300));
        }
    }

    #[test]
    fn dgks_satisfies_postconditions(
        m in 2usize..40,
        j in 0usize..6,
        seed in any::<u64>(),
    ) {
        let j = j.min(m - 1);
        let basis_mat;
        let basis: Vec<Vec<f64>> = if j == 0 {
            Vec::new()
        } else {
            basis_mat = random_orthonormal(m, j, seed);
            (0..j).map(|t| basis_mat.column_vec(t)).collect()
        };
        let mut r = rng(seed ^ 0xD00D);
        let a: Vec<f64> = (0..m).map(|_| r.gen::<f64>() - 0.5).collect();
        let a_norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
        match dgks_orthogonalize(&basis, &a).unwrap() {
            DgksOutcome::Extended { coeffs, norm, direction } => {
                // a = Q r + rho q_new
                let mut resid = a.clone();
                for (q, &c) in basis.iter().zip(&coeffs) {
                    for (x, qv) in resid.iter_mut().zip(q) { *x -= c * qv; }
                }
                for (x, d) in resid.iter_mut().zip(&direction) { *x -= norm * d; }
                let rnorm = resid.iter().map(|v| v * v).sum::<f64>().sqrt();
                prop_assert!(rnorm <= 100.0 * EPS * (m as f64).sqrt() * a_norm);
                for q in &basis {
                    let d: f64 = q.iter().zip(&direction).map(|(x, y)| x * y).sum();
                    prop_assert!(d.abs() <= 100.0 * EPS);
                }
            }
            DgksOutcome::Dependent { coeffs } => {
                let mut resid = a.clone();
                for (q, &c) in basis.iter().zip(&coeffs) {
                    for (x, qv) in resid.iter_mut().zip(q) { *x -= c * qv; }
                }
                let rnorm = resid.iter().map(|v| v * v).sum::<f64>().sqrt();
                prop_assert!(rnorm <= 1e3 * EPS * a_norm * 1.01);
            }
        }
    }

    #[test]
    fn pivoted_qr_respects_descending_orthogonal_norms(
        m in 4usize..30,
        k in 1usize..5,
        seed in any::<u64>(),
    ) {
        // orthogonal columns with strictly decreasing distinct norms
        let n = (k + 2).min(m);
        let q = random_orthonormal(m, n, seed);
        let scaled = DenseMatrix::from_fn(m, n, |i, j| q.get(i, j) * (n - j) as f64).unwrap();
        let perm = column_pivoted_qr(&scaled, k.min(n)).unwrap();
        let expect: Vec<usize> = (1..=k.min(n)).collect();
        prop_assert_eq!(perm.indices(), &expect[..]);
    }

    #[test]
    fn spectral_norm_matches_dense_svd(
        m in 2usize..24,
        n in 2usize..18,
        seed in any::<u64>(),
    ) {
        let a = seeded_matrix(m, n, seed);
        let s = singular_values(&a);
        let sn = spectral_norm(&a);
        prop_assert!((sn - s[0]).abs() <= 1e-6 * s[0].max(1e-300));
    }

    #[test]
    fn deim_is_distinct_and_prefixes_stay_nonsingular(
        m in 2usize..40,
        k in 1usize..8,
        seed in any::<u64>(),
    ) {
        let k = k.min(m);
        let v = random_orthonormal(m, k, seed);
        let p = deim_select(&v).unwrap();
        prop_assert_eq!(p.len(), k);
        // prefix nonsingularity: sigma_min(V[p_1..j, 1..j]) above threshold
        let pz = p.zero_based();
        for j in 1..=k {
            let sub = v.submatrix(&pz[..j], &(0..j).collect::<Vec<_>>());
            let s = singular_values(&sub);
            prop_assert!(s[j - 1] > 1e3 * EPS, "prefix {} singular", j);
        }
    }

    #[test]
    fn interpolatory_projection_matches_on_selected_rows(
        m in 2usize..40,
        k in 1usize..8,
        seed in any::<u64>(),
    ) {
        let k = k.min(m);
        let v = random_orthonormal(m, k, seed);
        let p = deim_select(&v).unwrap();
        let mut r = rng(seed ^ 0xBEEF);
        let x: Vec<f64> = (0..m).map(|_| r.gen::<f64>() * 2.0 - 1.0).collect();
        let proj = interpolatory_project(&v, &p, &x).unwrap();
        for &pi in &p.zero_based() {
            prop_assert!((proj[pi] - x[pi]).abs() <= 1e-12 * x[pi].abs().max(1.0));
        }
    }

    #[test]
    fn deim_condition_respects_growth_bounds(
        m in 2usize..60,
        k in 1usize..8,
        seed in any::<u64>(),
    ) {
        let k = k.min(m);
        let v = random_orthonormal(m, k, seed);
        let p = deim_select(&v).unwrap();
        let eta = selection_matrix_condition(&v, &p).unwrap();
        let fresh = ((m * k) as f64 / 3.0).sqrt() * (2.0_f64).powi(k as i32);
        prop_assert!(eta < fresh, "eta {} above sqrt(mk/3) 2^k = {}", eta, fresh);
        let v1_max = (0..m).map(|i| v.get(i, 0).abs()).fold(0.0_f64, f64::max);
        let legacy = (1.0 + (2.0 * m as f64).sqrt()).powi(k as i32 - 1) / v1_max;
        prop_assert!(eta <= legacy * (1.0 + 1e-12), "eta {} above legacy {}", eta, legacy);
    }

    #[test]
    fn deim_is_permutation_equivariant(
        m in 3usize..30,
        k in 1usize..6,
        seed in any::<u64>(),
    ) {
        let k = k.min(m);
        let v = random_orthonormal(m, k, seed);
        let perm = random_permutation(m, seed ^ 0xFACE);
        let mut inv = vec![0usize; m];
        for (r, &orig) in perm.iter().enumerate() {
            inv[orig] = r;
        }
        let pv = select_rows_by(&perm, &v);
        let p_orig = deim_select(&v).unwrap().zero_based();
        let p_perm = deim_select(&pv).unwrap().zero_based();
        let mapped: Vec<usize> = p_orig.iter().map(|&i| inv[i]).collect();
        prop_assert_eq!(p_perm, mapped);
    }

    #[test]
    fn interpolatory_cur_matches_selected_slices(
        m in 3usize..24,
        n in 3usize..18,
        k in 1usize..5,
        seed in any::<u64>(),
    ) {
        let k = k.min(m.min(n));
        let a = seeded_matrix(m, n, seed);
        let svd = truncate_svd(&economy_svd(&a), k).unwrap();
        let p = deim_select(svd.v()).unwrap();
        let q = deim_select(svd.w()).unwrap();
        let cur = build_cur_interpolatory(&a, &p, &q).unwrap();
        let prod = cur.product();
        let fnorm = a.frobenius_norm();
        let col_err: f64 = q.zero_based().iter().map(|&c| {
            (0..m).map(|i| (prod.get(i, c) - a.get(i, c)).powi(2)).sum::<f64>()
        }).sum::<f64>().sqrt();
        let row_err: f64 = p.zero_based().iter().map(|&r| {
            (0..n).map(|j| (prod.get(r, j) - a.get(r, j)).powi(2)).sum::<f64>()
        }).sum::<f64>().sqrt();
        prop_assert!(col_err <= 1e-10 * fnorm);
        prop_assert!(row_err <= 1e-10 * fnorm);
    }

    #[test]
    fn orthogonal_cur_satisfies_spectral_bound(
        m in 4usize..26,
        n in 4usize..20,
        k in 1usize..6,
        seed in any::<u64>(),
    ) {
        let k = k.min(m.min(n) - 1);
        let a = seeded_matrix(m, n, seed);
        let svd = truncate_svd(&economy_svd(&a), k).unwrap();
        let p = deim_select(svd.v()).unwrap();
        let q = deim_select(svd.w()).unwrap();
        let cur = build_cur_orthogonal(&a, &p, &q).unwrap();
        let cert = error_certificate(&a, &svd, &p, &q, &cur).unwrap();
        let norm_a = spectral_norm(&a);
        prop_assert!(
            cert.observed_error <= cert.bound + 1e-8 * norm_a,
            "observed {} vs bound {}",
            cert.observed_error,
            cert.bound
        );
    }

    #[test]
    fn one_sided_projections_respect_eta_bounds(
        m in 4usize..24,
        n in 4usize..18,
        k in 1usize..5,
        seed in any::<u64>(),
    ) {
        let k = k.min(m.min(n) - 1);
        let a = seeded_matrix(m, n, seed);
        let svd = truncate_svd(&economy_svd(&a), k).unwrap();
        let p = deim_select(svd.v()).unwrap();
        let q = deim_select(svd.w()).unwrap();
        let eta_p = selection_matrix_condition(svd.v(), &p).unwrap();
        let eta_q = selection_matrix_condition(svd.w(), &q).unwrap();
        let sigma_next = svd.residual_estimate();
        let norm_a = spectral_norm(&a);

        let c = a.select_columns(&q.zero_based());
        let (qc, _) = deim_cur::qr::thin_qr_strict(&c).unwrap();
        let col_resid = a.sub(&qc.matmul(&qc.transpose().matmul(&a)));
        prop_assert!(spectral_norm(&col_resid) <= eta_q * sigma_next + 1e-8 * norm_a);

        let r = a.select_rows(&p.zero_based());
        let (qr, _) = deim_cur::qr::thin_qr_strict(&r.transpose()).unwrap();
        let row_resid = a.sub(&a.matmul(&qr).matmul(&qr.transpose()));
        prop_assert!(spectral_norm(&row_resid) <= eta_p * sigma_next + 1e-8 * norm_a);
    }

    #[test]
    fn deim_selections_give_full_rank_slices(
        m in 4usize..24,
        n in 4usize..18,
        k in 1usize..5,
        seed in any::<u64>(),
    ) {
        let k = k.min(m.min(n) - 1);
        let a = seeded_matrix(m, n, seed);
        let svd = truncate_svd(&economy_svd(&a), k).unwrap();
        let p = deim_select(svd.v()).unwrap();
        let q = deim_select(svd.w()).unwrap();
        let eta_q = selection_matrix_condition(svd.w(), &q).unwrap();
        // construction must succeed, and C keeps a guaranteed margin
        let cur = build_cur_orthogonal(&a, &p, &q).unwrap();
        let smin_c = *singular_values(cur.c()).last().unwrap();
        let sigma_k = svd.s()[k - 1];
        let norm_a = spectral_norm(&a);
        prop_assert!(smin_c >= sigma_k / eta_q - 1e-8 * norm_a);
    }

    #[test]
    fn variants_agree_on_exact_rank_k(
        m in 4usize..24,
        n in 4usize..18,
        k in 1usize..5,
        seed in any::<u64>(),
    ) {
        let k = k.min(m.min(n) - 1);
        let a = exact_rank_k(m, n, k, seed);
        let svd = truncate_svd(&economy_svd(&a), k).unwrap();
        let p = deim_select(svd.v()).unwrap();
        let q = deim_select(svd.w()).unwrap();
        let interp = build_cur_interpolatory(&a, &p, &q).unwrap().product();
        let orth = build_cur_orthogonal(&a, &p, &q).unwrap().product();
        let diff = interp.sub(&orth).frobenius_norm();
        prop_assert!(diff <= 1e-9 * spectral_norm(&a).max(1e-300));
    }

    #[test]
    fn incremental_qr_certificate_holds_at_every_prefix(
        m in 4usize..24,
        n in 3usize..18,
        tol_exp in 1usize..6,
        seed in any::<u64>(),
    ) {
        let tol = 10f64.powi(-(tol_exp as i32));
        // mixture of low rank and noise so deflations actually happen
        let base = exact_rank_k(m, n, 2.min(m.min(n)), seed);
        let noise = seeded_matrix(m, n, seed ^ 0xF00D);
        let a = base.sub(&noise.scale(-0.05));
        let mut state = IncrementalQrState::new(m, tol, 2.min(m)).unwrap();
        for j in 0..n {
            state.push_column(a.column(j)).unwrap();
            prop_assert!(state.basis_size() <= m.min(j + 1));
            let (q, r) = state.factors().unwrap();
            let prefix = a.select_columns(&(0..=j).collect::<Vec<_>>());
            let err = prefix.sub(&q.matmul(&r)).frobenius_norm();
            let slack = 100.0 * EPS * (j + 1) as f64 * a.frobenius_norm();
            prop_assert!(
                err <= state.certificate() + slack,
                "prefix {}: err {} certificate {}",
                j + 1,
                err,
                state.certificate()
            );
        }
    }

    #[test]
    fn leverage_scores_sum_to_r_and_stay_unit(
        m in 2usize..40,
        r_cols in 1usize..8,
        seed in any::<u64>(),
    ) {
        let r_cols = r_cols.min(m);
        let v = random_orthonormal(m, r_cols, seed);
        let lev = leverage_scores(&v);
        let sum: f64 = lev.scores().iter().sum();
        prop_assert!((sum - r_cols as f64).abs() <= 1e-8 * r_cols as f64);
        for &s in lev.scores() {
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&s));
        }
    }

    #[test]
    fn top_k_is_sorted_and_deterministic(
        m in 2usize..40,
        r_cols in 1usize..6,
        k in 1usize..8,
        seed in any::<u64>(),
    ) {
        let r_cols = r_cols.min(m);
        let k = k.min(m);
        let lev = leverage_scores(&random_orthonormal(m, r_cols, seed));
        let a = top_k_select(&lev, k).unwrap();
        let b = top_k_select(&lev, k).unwrap();
        prop_assert_eq!(a.indices(), b.indices());
        let picked: Vec<f64> = a.zero_based().iter().map(|&i| lev.scores()[i]).collect();
        for w in picked.windows(2) {
            prop_assert!(w[0] >= w[1]);
        }
        let worst_picked = picked.last().copied().unwrap();
        for (i, &s) in lev.scores().iter().enumerate() {
            if !a.zero_based().contains(&i) {
                prop_assert!(s <= worst_picked + 1e-15);
            }
        }
    }

    #[test]
    fn equal_seeds_sample_identically(
        m in 3usize..30,
        k in 1usize..5,
        seed in any::<u64>(),
        draw_seed in any::<u64>(),
    ) {
        let k = k.min(m);
        let lev = leverage_scores(&random_orthonormal(m, m.min(4), seed));
        let a = sample_select(&lev, k, draw_seed).unwrap();
        let b = sample_select(&lev, k, draw_seed).unwrap();
        prop_assert_eq!(a.indices(), b.indices());
    }

    #[test]
    fn qr_cur_is_row_permutation_equivariant(
        m in 4usize..20,
        n in 4usize..16,
        k in 1usize..4,
        seed in any::<u64>(),
    ) {
        let k = k.min(m.min(n));
        let a = seeded_matrix(m, n, seed);
        let (p0, q0) = qr_cur_select(&a, k).unwrap();
        let perm = random_permutation(m, seed ^ 0xABBA);
        let mut inv = vec![0usize; m];
        for (r, &orig) in perm.iter().enumerate() {
            inv[orig] = r;
        }
        let pa = select_rows_by(&perm, &a);
        let (p1, q1) = qr_cur_select(&pa, k).unwrap();
        prop_assert_eq!(q0.indices(), q1.indices());
        let mapped: Vec<usize> = p0.zero_based().iter().map(|&i| inv[i]).collect();
        prop_assert_eq!(p1.zero_based(), mapped);
    }

    #[test]
    fn growth_bracket_holds_across_shapes(
        m in 3usize..=256,
        k in 2usize..=20,
    ) {
        prop_assume!(m > k);
        let g = growth_case(m, k).unwrap();
        let p = deim_select(g.v()).unwrap();
        let expect: Vec<usize> = (1..=k).collect();
        prop_assert_eq!(p.indices(), &expect[..]);
        let eta = selection_matrix_condition(g.v(), &p).unwrap();
        let two_k = (2.0_f64).powi(k as i32);
        prop_assert!(eta > two_k / 8.0_f64.sqrt());
        prop_assert!(eta < ((m * k) as f64 / 3.0).sqrt() * two_k);
    }

    #[test]
    fn matrix_market_round_trip_is_exact(
        m in 1usize..20,
        n in 1usize..20,
        zero_fraction in 0.0f64..1.0,
        seed in any::<u64>(),
    ) {
        let mut r = rng(seed);
        let a = DenseMatrix::from_fn(m, n, |_, _| {
            if r.gen::<f64>() < zero_fraction {
                0.0
            } else {
                (r.gen::<f64>() - 0.5) * 10f64.powi(r.gen_range(-8..9))
            }
        })
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rt.mtx");
        write_matrix_market(&a, &path).unwrap();
        let b = read_matrix_market(&path).unwrap();
        prop_assert_eq!(a.data(), b.data());
    }

    #[test]
    fn sweep_csv_round_trips_bound_consistency(
        k in 1usize..40,
        eta_p in 1.0f64..1e6,
        eta_q in 1.0f64..1e6,
        sigma in 0.0f64..1e3,
        observed in 0.0f64..1e3,
    ) {
        let rec = SweepRecord {
            k,
            method: "deim".into(),
            observed_error: observed,
            sigma_next: sigma,
            eta_p,
            eta_q,
            bound: (eta_p + eta_q) * sigma,
            elapsed_ms: 0.25,
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("one.csv");
        write_sweep_csv(&[rec], &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
        let (ep, eq): (f64, f64) = (row[4].parse().unwrap(), row[5].parse().unwrap());
        let (sn, bound): (f64, f64) = (row[3].parse().unwrap(), row[6].parse().unwrap());
        let expect = (ep + eq) * sn;
        prop_assert!((bound - expect).abs() <= 1e-12 * expect.abs().max(1e-300));
    }
}

#[test]
fn sampling_marginals_match_scores() {
    // spec'd two-point check: P(index 1) = 0.75 within +-0.02 over 1e4 seeds
    let lev = leverage_scores(
        &DenseMatrix::new(2, 1, vec![0.75f64.sqrt(), 0.25f64.sqrt()]).unwrap(),
    );
    let trials = 10_000;
    let hits = (0..trials)
        .filter(|&s| sample_select(&lev, 1, s as u64).unwrap().indices()[0] == 1)
        .count();
    let freq = hits as f64 / trials as f64;
    assert!((freq - 0.75).abs() <= 0.02, "frequency {freq}");

    // three-point distribution within 3 sigma binomial tolerance
    let scores = [0.5, 0.3, 0.2];
    let v3 = DenseMatrix::new(3, 1, scores.iter().map(|s: &f64| s.sqrt()).collect()).unwrap();
    let lev3 = leverage_scores(&v3);
    let mut counts = [0usize; 3];
    for s in 0..trials {
        counts[sample_select(&lev3, 1, s as u64).unwrap().zero_based()[0]] += 1;
    }
    for (i, &p) in scores.iter().enumerate() {
        let freq = counts[i] as f64 / trials as f64;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!(
            (freq - p).abs() <= 3.0 * sigma,
            "index {i}: freq {freq} vs {p} (3 sigma = {})",
            3.0 * sigma
        );
    }
}

#[test]
fn sparse_sum_density_tracks_expectation() {
    let a = sparse_sum_mild(2000, 200, 31);
    let nonzero = a.data().iter().filter(|&&v| v != 0.0).count();
    let fraction = nonzero as f64 / (a.rows() * a.cols()) as f64;
    let d2 = 0.025f64 * 0.025;
    let expect = 1.0 - (1.0 - d2).powi(200);
    assert!(
        (fraction - expect).abs() <= 0.2 * expect,
        "fraction {fraction} vs expected {expect}"
    );
}

#[test]
fn sharp_weights_sharpen_the_spectral_drop() {
    let mild = sparse_sum_mild(400, 120, 3);
    let sharp = sparse_sum_sharp(400, 120, 3);
    let s_mild = singular_values(&mild);
    let s_sharp = singular_values(&sharp);
    // drop between the 10th and 11th values dominates the next gap
    let mild_drop = s_mild[9] / s_mild[10];
    let mild_next = s_mild[10] / s_mild[11];
    assert!(mild_drop > mild_next, "{mild_drop} vs {mild_next}");
    let sharp_drop = s_sharp[9] / s_sharp[10];
    assert!(sharp_drop > mild_drop, "{sharp_drop} vs {mild_drop}");
}

#[test]
fn rank_sweep_records_failed_ranks_without_stopping() {
    // rank-2 matrix: ranks above 2 cannot build full-rank selections
    let a = exact_rank_k(10, 8, 2, 9);
    let svd = economy_svd(&a);
    let entries = rank_sweep(&a, &svd, SelectionMethod::Deim, 5, 0).unwrap();
    assert_eq!(entries.len(), 5);
    assert!(entries[0].outcome.is_ok());
    assert!(entries[1].outcome.is_ok());
    assert!(entries.iter().skip(2).all(|e| e.outcome.is_err()));
}
