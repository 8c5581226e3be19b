mod common;

use bagmres::matrix_market::{emit_matrix_market, parse_matrix_market_str, read_matrix_market};
use bagmres::sparse::{diagonal_precondition, gen_random, gen_tridiagonal, symmetric_split};
use bagmres::vector::dot;
use bagmres::{DenseMatrix, Error, SparseMatrix};
use proptest::prelude::*;

fn sparse_strategy(max_dim: usize) -> impl Strategy<Value = SparseMatrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(|(m, n)| {
        proptest::collection::vec((0..m, 0..n, -1e3f64..1e3), 0..3 * (m + n)).prop_map(move |t| {
            SparseMatrix::from_triplets(m, n, &t).unwrap()
        })
    })
}

fn square_strategy(max_dim: usize) -> impl Strategy<Value = SparseMatrix> {
    (1..=max_dim).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n, -10.0f64..10.0), 0..4 * n).prop_map(move |t| {
            SparseMatrix::from_triplets(n, n, &t).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn matrix_market_round_trip_is_exact(a in sparse_strategy(12)) {
        let text = emit_matrix_market(&a);
        let back = parse_matrix_market_str(&text).unwrap();
        prop_assert_eq!(back.to_dense().unwrap(), a.to_dense().unwrap());
    }

    #[test]
    fn transpose_is_the_adjoint(a in sparse_strategy(10), seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let x = common::random_vec(a.n_cols(), &mut r);
        let y = common::random_vec(a.n_rows(), &mut r);
        let lhs = dot(&a.spmv(&x).unwrap(), &y);
        let rhs = dot(&x, &a.spmv_transpose(&y).unwrap());
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()));
    }

    #[test]
    fn spmv_matches_dense_product(a in sparse_strategy(10), seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let x = common::random_vec(a.n_cols(), &mut r);
        let sparse = a.spmv(&x).unwrap();
        let dense = a.to_dense().unwrap().matvec(&x).unwrap();
        prop_assert!(common::rel_diff(&sparse, &dense) <= 1e-13 || dense.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn symmetric_split_reassembles(a in square_strategy(10)) {
        let (h, s) = symmetric_split(&a).unwrap();
        prop_assert!(h.is_symmetric());
        prop_assert_eq!(s.add(&s.transpose()).unwrap().max_abs(), 0.0);
        let back = h.add(&s).unwrap();
        prop_assert!(common::frob_diff(&back, &a.to_dense().unwrap()) <= 1e-12 * (1.0 + back.frobenius_norm()));
    }

    #[test]
    fn jacobi_scaling_gives_unit_diagonal(a in square_strategy(10)) {
        let b = vec![1.0; a.n_rows()];
        let (a_hat, b_hat, f) = diagonal_precondition(&a, &b).unwrap();
        for (i, d) in a.diagonal().iter().enumerate() {
            if *d != 0.0 {
                prop_assert!((a_hat.get(i, i) - 1.0).abs() < 1e-15);
            }
            prop_assert!((b_hat[i] * f[i] - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn row_norms_sum_to_frobenius(a in sparse_strategy(10)) {
        let total: f64 = a.row_norms_sq().iter().sum();
        prop_assert!((total - a.frobenius_sq()).abs() <= 1e-12 * (1.0 + total));
        let dense = a.to_dense().unwrap().frobenius_norm();
        prop_assert!((total.sqrt() - dense).abs() <= 1e-12 * (1.0 + dense));
    }
}

#[test]
fn symmetric_files_expand_to_both_triangles() {
    let text = "%%MatrixMarket matrix coordinate real symmetric\n% comment\n3 3 4\n1 1 4\n2 1 1\n3 2 -2\n3 3 5\n";
    let a = parse_matrix_market_str(text).unwrap();
    assert_eq!(a.nnz(), 6);
    assert_eq!(a.get(0, 1), 1.0);
    assert_eq!(a.get(1, 0), 1.0);
    assert_eq!(a.get(1, 2), -2.0);
    assert_eq!(a.get(1, 1), 0.0);
    let skew = "%%MatrixMarket matrix coordinate real skew-symmetric\n2 2 1\n2 1 3\n";
    let s = parse_matrix_market_str(skew).unwrap();
    assert_eq!(s.get(1, 0), 3.0);
    assert_eq!(s.get(0, 1), -3.0);
}

#[test]
fn malformed_files_report_the_line() {
    let cases = [
        ("%%MatrixMarket matrix array real general\n1 1\n1\n", 1),
        ("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n", 3),
        ("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n", 3),
        ("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 abc\n", 3),
    ];
    for (text, line) in cases {
        match parse_matrix_market_str(text) {
            Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
            other => panic!("expected parse error for {text:?}, got {other:?}"),
        }
    }
}

#[test]
fn missing_file_names_the_path() {
    let err = read_matrix_market("definitely-missing.mtx").unwrap_err();
    assert!(err.to_string().contains("definitely-missing.mtx"));
}

#[test]
fn file_round_trip_through_disk() {
    let a = gen_random(30, 7).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.mtx");
    std::fs::write(&path, emit_matrix_market(&a)).unwrap();
    let back = read_matrix_market(&path).unwrap();
    assert_eq!(back.to_dense().unwrap(), a.to_dense().unwrap());
}

#[test]
fn generators_have_documented_structure() {
    let t = gen_tridiagonal(6).unwrap();
    assert_eq!(t.nnz(), 16);
    assert!(t.to_dense().unwrap().is_symmetric());
    let a = gen_random(50, 3).unwrap();
    assert_eq!(a.to_dense().unwrap(), gen_random(50, 3).unwrap().to_dense().unwrap());
    assert_ne!(a.to_dense().unwrap(), gen_random(50, 4).unwrap().to_dense().unwrap());
    let (h, _) = symmetric_split(&a).unwrap();
    let eig = bagmres::spectral::symmetric_eigenvalues(&h).unwrap();
    assert!(eig[0] > 0.0);
}

#[test]
fn dense_sparse_conversion_round_trips() {
    let mut r = common::rng(1);
    let d = common::random_dense(7, 4, &mut r);
    let s = SparseMatrix::from_dense(&d);
    assert_eq!(s.to_dense().unwrap(), d);
    assert_eq!(s.transpose().to_dense().unwrap(), d.transpose());
    let z = DenseMatrix::zeros(3, 3);
    assert_eq!(SparseMatrix::from_dense(&z).nnz(), 0);
}
