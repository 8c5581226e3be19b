mod common;

use bagmres::spectral::{
    build_w, condition_2, dense_eigenvalues, gram, is_semi_convergent, lambda_max_block, min_nonzero_eig_gram,
    numerical_rank, singular_values, spectral_radius, summarize, symmetric_eigenvalues, GramSide,
};
use bagmres::{DenseMatrix, Error, SparseMatrix};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eigenvalues_sum_to_the_trace(n in 1usize..12, seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let m = common::random_dense(n, n, &mut r);
        let eig = dense_eigenvalues(&m).unwrap();
        prop_assert_eq!(eig.len(), n);
        let re: f64 = eig.iter().map(|z| z.re).sum();
        let im: f64 = eig.iter().map(|z| z.im).sum();
        prop_assert!((re - m.trace()).abs() <= 1e-10 * (1.0 + m.frobenius_norm()));
        prop_assert!(im.abs() <= 1e-10 * (1.0 + m.frobenius_norm()));
    }

    #[test]
    fn singular_values_are_gram_square_roots(m in 1usize..10, n in 1usize..10, seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let a = common::random_dense(m, n, &mut r);
        let sv = singular_values(&a).unwrap();
        let mut eig = symmetric_eigenvalues(&gram(&a, GramSide::AtA)).unwrap();
        eig.reverse();
        for (s, e) in sv.iter().zip(&eig) {
            prop_assert!((s * s - e).abs() <= 1e-10 * (1.0 + eig[0]));
        }
        prop_assert!(sv.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(spectral_radius(&gram(&a, GramSide::AAt)).unwrap() <= sv[0] * sv[0] * (1.0 + 1e-10));
    }

    #[test]
    fn both_gram_sides_share_the_nonzero_spectrum(m in 2usize..10, n in 2usize..10, seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let a = common::random_dense(m, n, &mut r);
        let left = min_nonzero_eig_gram(&a, GramSide::AtA).unwrap();
        let right = min_nonzero_eig_gram(&a, GramSide::AAt).unwrap();
        prop_assert!((left - right).abs() <= 1e-8 * (1.0 + left));
    }

    #[test]
    fn w_matrix_has_unit_trace(m in 1usize..12, n in 1usize..8, seed in any::<u64>()) {
        let (a, _, _) = common::consistent_system(m, n, seed);
        let p = vec![1.0 / m as f64; m];
        let w = build_w(&a, &p).unwrap();
        prop_assert!((w.trace() - 1.0).abs() <= 1e-12);
        prop_assert!(w.is_symmetric());
    }

    #[test]
    fn block_eigenvalue_matches_the_column_space_form(m in 2usize..10, n in 1usize..8, seed in any::<u64>()) {
        let (a, _, _) = common::consistent_system(m, n, seed);
        let rows: Vec<usize> = (0..m).step_by(2).collect();
        let w: Vec<f64> = rows.iter().map(|&i| 1.0 / (1.0 + i as f64)).collect();
        let mut big = DenseMatrix::zeros(n, n);
        for (&i, &wi) in rows.iter().zip(&w) {
            let row: Vec<f64> = (0..n).map(|j| a.get(i, j)).collect();
            for p in 0..n {
                for q in 0..n {
                    big[(p, q)] += wi * row[p] * row[q];
                }
            }
        }
        common::symmetrize(&mut big);
        let direct = *symmetric_eigenvalues(&big).unwrap().last().unwrap();
        let fast = lambda_max_block(&a, &rows, &w).unwrap();
        prop_assert!((direct - fast).abs() <= 1e-10 * (1.0 + direct));
    }

    #[test]
    fn semi_convergence_agrees_with_powers(kind in 0usize..6, seed in any::<u64>()) {
        let h = common::spectrum_case(common::SPECTRUM_KINDS[kind], seed);
        prop_assert_eq!(is_semi_convergent(&h).unwrap(), common::power_limit_exists(&h));
    }
}

#[test]
fn hand_cases_of_semi_convergence() {
    for (name, h, expect) in common::semi_convergence_hand_cases() {
        assert_eq!(is_semi_convergent(&h).unwrap(), expect, "{name}");
        assert_eq!(common::power_limit_exists(&h), expect, "{name}");
    }
}

#[test]
fn condition_number_examples() {
    let d = DenseMatrix::from_diagonal(&[4.0, 2.0, 1.0]);
    assert!((condition_2(&d).unwrap() - 4.0).abs() < 1e-12);
    let singular = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
    assert_eq!(condition_2(&singular).unwrap_err(), Error::Singular);
    assert_eq!(numerical_rank(&singular, 1e-12).unwrap(), 1);
}

#[test]
fn summary_collects_scalars() {
    let d = DenseMatrix::from_diagonal(&[3.0, -5.0, 0.0]);
    let s = summarize(&d).unwrap();
    assert_eq!(s.spectral_radius, 5.0);
    assert_eq!(s.eigenvalues.len(), 3);
    assert!(s.condition_2.is_none());
}

#[test]
fn w_requires_probabilities_summing_to_one() {
    let a = SparseMatrix::identity(3);
    assert!(build_w(&a, &[0.5, 0.5, 0.5]).is_err());
    assert!(build_w(&a, &[0.5, 0.5, 0.0]).is_ok());
}

#[test]
fn clustered_nonsymmetric_spectra_converge() {
    for seed in 0..20 {
        let m = common::nonsymmetric_schur_matrix(16, 8, 0.2, seed);
        let near_identity = m.scaled(1e-3).shifted(1.0);
        assert_eq!(dense_eigenvalues(&near_identity).unwrap().len(), 16);
    }
}
