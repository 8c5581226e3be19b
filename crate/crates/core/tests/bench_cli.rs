use std::process::Command;

use bagmres::bench::{
    emit_history, emit_table, format_sci, parse_history, parse_table_csv, run_experiment, ExperimentConfig,
    MatrixSource, MethodParams, RhsMode, TableFormat, METHOD_LABELS,
};
use bagmres::cli::{cli_main, EXIT_CONFIG};
use bagmres::gmres::SolveConfig;
use bagmres::matrix_market::emit_matrix_market;
use bagmres::SparseMatrix;

fn run_cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("bagmres-bench").chain(args.iter().copied());
    let code = cli_main(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn config(matrix: MatrixSource, methods: &[&str]) -> ExperimentConfig {
    ExperimentConfig {
        matrix,
        rhs: RhsMode::OnesSolution,
        methods: methods.iter().map(|s| s.to_string()).collect(),
        params: MethodParams::default(),
        solve: SolveConfig::default(),
        output: None,
    }
}

fn tridiag(n: usize) -> MatrixSource {
    MatrixSource::Generator {
        name: "tridiag".into(),
        n,
        seed: 0,
    }
}

#[test]
fn generated_tridiagonal_run_prints_a_table() {
    let (code, out, _) = run_cli(&["--gen", "tridiag", "--n", "100", "--methods", "no-pre,rpcg-pre"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "| | no-pre | rpcg-pre |");
    assert!(lines[2].starts_with("| error |"));
    assert!(lines[3].starts_with("| iteration |"));
    assert!(lines[4].starts_with("| time |"));
}

#[test]
fn missing_matrix_file_exits_with_config_error() {
    let (code, _, err) = run_cli(&["--matrix", "missing.mtx", "--methods", "no-pre"]);
    assert_eq!(code, EXIT_CONFIG);
    assert!(err.contains("missing.mtx"), "{err}");
}

#[test]
fn invalid_flag_combinations_print_usage() {
    let (code, _, err) = run_cli(&["--methods", "no-pre"]);
    assert_eq!(code, 2);
    assert!(err.to_lowercase().contains("usage"), "{err}");
    let (code, _, _) = run_cli(&["--gen", "tridiag", "--methods", "no-pre"]);
    assert_eq!(code, 2);
    let (code, _, _) = run_cli(&["--gen", "tridiag", "--n", "10", "--methods", "no-pre", "--format", "xml"]);
    assert_eq!(code, 2);
    let (code, _, err) = run_cli(&["--gen", "spiral", "--n", "10", "--methods", "no-pre"]);
    assert_eq!(code, EXIT_CONFIG);
    assert!(err.contains("spiral"));
}

#[test]
fn repeated_seeded_runs_are_byte_identical() {
    let args = [
        "--gen", "random", "--n", "80", "--seed", "5", "--methods", "no-pre,pre-1,pre-adapt,pre-adapt-r,ADI-pre,PCG-pre",
        "--rhs", "random", "--format", "csv", "--no-time",
    ];
    let (c1, o1, e1) = run_cli(&args);
    let (c2, o2, e2) = run_cli(&args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(o1, o2);
    assert_eq!(e1, e2);
    let (_, o3, _) = run_cli(&[
        "--gen", "random", "--n", "80", "--seed", "6", "--methods", "no-pre,pre-1,pre-adapt,pre-adapt-r,ADI-pre,PCG-pre",
        "--rhs", "random", "--format", "csv", "--no-time",
    ]);
    assert_ne!(o1, o3);
}

#[test]
fn unknown_labels_do_not_stop_the_batch() {
    let (code, out, err) = run_cli(&["--gen", "tridiag", "--n", "30", "--methods", "pre-9,no-pre", "--format", "csv"]);
    assert_eq!(code, 0);
    let cols = parse_table_csv(&out).unwrap();
    assert_eq!(cols[0].label, "pre-9");
    assert_eq!(cols[0].iterations, None);
    assert!(cols[1].iterations.is_some());
    assert!(err.contains("pre-9"));
}

#[test]
fn failed_runs_print_dash_and_maxit() {
    let (code, out, err) = run_cli(&[
        "--gen", "random", "--n", "60", "--methods", "no-pre", "--maxit", "2", "--tol", "1e-12", "--no-time",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("| error | - |"), "{out}");
    assert!(out.contains("| iteration | 2 |"), "{out}");
    assert!(err.contains("no convergence"));
}

#[test]
fn csv_table_round_trips_reports() {
    let outcomes = run_experiment(&config(tridiag(60), &METHOD_LABELS)).unwrap();
    let text = emit_table(&outcomes, 300, TableFormat::Csv, true);
    let cols = parse_table_csv(&text).unwrap();
    assert_eq!(cols.len(), outcomes.len());
    for (col, o) in cols.iter().zip(&outcomes) {
        let rep = o.result.as_ref().unwrap();
        assert_eq!(col.label, o.label);
        assert_eq!(col.iterations, Some(rep.iterations));
        assert_eq!(format_sci(col.error.unwrap()), format_sci(rep.relative_residual));
        assert!(col.time.is_some());
    }
}

#[test]
fn every_label_converges_on_the_tridiagonal_problem() {
    let outcomes = run_experiment(&config(tridiag(100), &METHOD_LABELS)).unwrap();
    for o in &outcomes {
        let rep = o.result.as_ref().unwrap();
        assert!(rep.converged(), "{}", o.label);
        assert!(rep.relative_residual <= 1e-6);
        assert!(rep.relative_error.unwrap() < 1e-4, "{}", o.label);
    }
}

#[test]
fn identity_matrix_takes_one_iteration() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("eye.mtx");
    std::fs::write(&path, emit_matrix_market(&SparseMatrix::identity(10))).unwrap();
    let outcomes = run_experiment(&config(MatrixSource::File(path), &["no-pre"])).unwrap();
    let rep = outcomes[0].result.as_ref().unwrap();
    assert!(rep.converged());
    assert_eq!(rep.iterations, 1);
}

#[test]
fn history_files_match_reports() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(tridiag(40), &["no-pre", "ADI-pre"]);
    cfg.output = Some(dir.path().join("hist"));
    let outcomes = run_experiment(&cfg).unwrap();
    for o in &outcomes {
        let rep = o.result.as_ref().unwrap();
        let path = dir.path().join("hist").join(format!("tridiag-n40-{}.csv", o.label));
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, emit_history(rep));
        let rows = parse_history(&text).unwrap();
        assert_eq!(rows.len(), rep.iterations + 1);
        let rel = rep.history.relative_residuals();
        for (k, (it, v)) in rows.iter().enumerate() {
            assert_eq!(*it, k);
            assert_eq!(*v, rel[k]);
        }
        assert!(rows.windows(2).all(|w| w[1].1 <= w[0].1));
    }
}

#[test]
fn batch_isolation_keeps_reports_independent() {
    let alone = run_experiment(&config(tridiag(50), &["pre-adapt"])).unwrap();
    let mixed = run_experiment(&config(tridiag(50), &["pre-9", "no-pre", "pre-adapt"])).unwrap();
    let (a, b) = (alone[0].result.as_ref().unwrap(), mixed[2].result.as_ref().unwrap());
    assert_eq!(a.x, b.x);
    assert_eq!(a.history.residual_norms, b.history.residual_norms);
}

#[test]
fn scientific_format_has_six_digits() {
    assert_eq!(format_sci(8.236983e-7), "8.23698e-07");
    assert_eq!(format_sci(1.0), "1.00000e+00");
    assert_eq!(format_sci(123456.7), "1.23457e+05");
    assert_eq!(format_sci(0.0), "0.00000e+00");
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_bagmres-bench");
    let ok = Command::new(bin)
        .args(["--gen", "tridiag", "--n", "20", "--methods", "no-pre", "--no-time"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("| iteration |"));
    let bad = Command::new(bin).args(["--matrix", "nope.mtx", "--methods", "no-pre"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("nope.mtx"));
}
