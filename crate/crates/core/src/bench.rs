//! Experiment harness: builds a matrix and right-hand side, runs each labelled
//! method once, and renders result tables and convergence histories.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gmres::{ba_gmres_solve, gmres_solve, InnerSpec, SolveConfig, SolveReport};
use crate::kaczmarz::{KaczmarzConfig, RowSelection, StepMode};
use crate::matrix_market::read_matrix_market;
use crate::sparse::{gen_random, gen_tridiagonal, SparseMatrix};

pub const METHOD_LABELS: [&str; 7] = [
    "no-pre",
    "pre-1",
    "pre-adapt",
    "pre-adapt-r",
    "ADI-pre",
    "PCG-pre",
    "rpcg-pre",
];

#[derive(Debug, Clone, PartialEq)]
pub enum MatrixSource {
    File(PathBuf),
    Generator { name: String, n: usize, seed: u64 },
}

impl MatrixSource {
    pub fn load(&self) -> Result<SparseMatrix> {
        match self {
            MatrixSource::File(path) => read_matrix_market(path),
            MatrixSource::Generator { name, n, seed } => match name.as_str() {
                "tridiag" => gen_tridiagonal(*n),
                "random" => gen_random(*n, *seed),
                other => Err(Error::InvalidConfig(format!(
                    "unknown generator \"{other}\" (expected tridiag or random)"
                ))),
            },
        }
    }

    /// Short name used in output file names.
    pub fn name(&self) -> String {
        match self {
            MatrixSource::File(path) => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "matrix".into()),
            MatrixSource::Generator { name, n, .. } => format!("{name}-n{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RhsMode {
    /// `b = A·1`, so the exact solution is known.
    OnesSolution,
    /// Entries uniform in `(−1, 1)`.
    Random(u64),
    /// One value per line.
    FromFile(PathBuf),
}

impl RhsMode {
    /// Right-hand side and, when known, the exact solution.
    pub fn build(&self, a: &SparseMatrix) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
        match self {
            RhsMode::OnesSolution => {
                let ones = vec![1.0; a.n_cols()];
                Ok((a.spmv(&ones)?, Some(ones)))
            }
            RhsMode::Random(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Ok(((0..a.n_rows()).map(|_| rng.random_range(-1.0..1.0)).collect(), None))
            }
            RhsMode::FromFile(path) => {
                let io = |e: std::io::Error| Error::Io {
                    path: path.display().to_string(),
                    message: e.to_string(),
                };
                let text = std::fs::read_to_string(path).map_err(io)?;
                let mut b = Vec::new();
                for (idx, line) in text.lines().enumerate() {
                    let t = line.trim();
                    if t.is_empty() || t.starts_with('%') || t.starts_with('#') {
                        continue;
                    }
                    let v: f64 = t.parse().map_err(|_| Error::Parse {
                        line: idx + 1,
                        message: format!("invalid value \"{t}\""),
                    })?;
                    b.push(v);
                }
                crate::error::check_len(a.n_rows(), b.len())?;
                Ok((b, None))
            }
        }
    }
}

/// Parameters shared by the labelled methods.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodParams {
    /// Kaczmarz relaxation for pre-1 and the ADI shift.
    pub alpha: f64,
    pub delta: f64,
    pub tau: usize,
    pub seed: u64,
    pub split: Option<usize>,
}

impl Default for MethodParams {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            delta: 1.0,
            tau: 4,
            seed: 0,
            split: None,
        }
    }
}

/// Inner method for a label; `None` means plain GMRES.
pub fn inner_for_label(label: &str, params: &MethodParams, n_rows: usize) -> Result<Option<InnerSpec>> {
    let tau = params.tau.clamp(1, n_rows.max(1));
    let kaczmarz = |step_mode, row_selection, block_size| {
        InnerSpec::Kaczmarz(KaczmarzConfig {
            step_mode,
            row_selection,
            block_size,
            ..KaczmarzConfig::default()
        })
    };
    Ok(match label {
        "no-pre" => None,
        "pre-1" => Some(kaczmarz(StepMode::Constant(params.alpha), RowSelection::Cyclic, 1)),
        "pre-adapt" => Some(kaczmarz(StepMode::Adaptive(params.delta), RowSelection::Cyclic, tau)),
        "pre-adapt-r" => Some(kaczmarz(
            StepMode::Adaptive(params.delta),
            RowSelection::Randomized(params.seed),
            tau,
        )),
        "ADI-pre" => Some(InnerSpec::Adi { alpha: params.alpha }),
        "PCG-pre" => Some(InnerSpec::Pcg),
        "rpcg-pre" => Some(InnerSpec::Rpcg { split: params.split }),
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown method label \"{other}\" (expected one of {})",
                METHOD_LABELS.join(", ")
            )))
        }
    })
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub matrix: MatrixSource,
    pub rhs: RhsMode,
    pub methods: Vec<String>,
    pub params: MethodParams,
    pub solve: SolveConfig,
    pub output: Option<PathBuf>,
}

/// One method's result within a batch.
#[derive(Debug, Clone)]
pub struct MethodOutcome {
    pub label: String,
    pub result: std::result::Result<SolveReport, Error>,
}

pub fn run_method(
    a: &SparseMatrix,
    b: &[f64],
    label: &str,
    params: &MethodParams,
    solve: &SolveConfig,
) -> Result<SolveReport> {
    let inner = inner_for_label(label, params, a.n_rows())?;
    let x0 = vec![0.0; a.n_cols()];
    let start = Instant::now();
    let mut report = match &inner {
        None => gmres_solve(a, b, &x0, solve)?,
        Some(spec) => ba_gmres_solve(a, b, &x0, spec, solve)?,
    };
    report.elapsed = start.elapsed();
    report.label = label.to_string();
    Ok(report)
}

/// Loads the matrix once and runs every method; per-method failures are
/// recorded without stopping the batch.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<MethodOutcome>> {
    if config.methods.is_empty() {
        return Err(Error::InvalidConfig("no methods given".into()));
    }
    config.solve.validate()?;
    let a = config.matrix.load()?;
    let (b, x_star) = config.rhs.build(&a)?;
    let mut solve = config.solve.clone();
    solve.exact_solution = x_star;
    let outcomes: Vec<MethodOutcome> = config
        .methods
        .iter()
        .map(|label| MethodOutcome {
            label: label.clone(),
            result: run_method(&a, &b, label, &config.params, &solve),
        })
        .collect();
    if let Some(dir) = &config.output {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io {
            path: dir.display().to_string(),
            message: e.to_string(),
        })?;
        let stem = config.matrix.name();
        for o in &outcomes {
            if let Ok(rep) = &o.result {
                let path = dir.join(format!("{stem}-{}.csv", o.label));
                std::fs::write(&path, emit_history(rep)).map_err(|e| Error::Io {
                    path: path.display().to_string(),
                    message: e.to_string(),
                })?;
            }
        }
    }
    Ok(outcomes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Markdown,
    Csv,
}

/// Scientific notation with 6 significant digits and a two-digit exponent.
pub fn format_sci(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let s = format!("{v:.5e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

/// Table cells for one method: error, iteration, time.
fn cells(o: &MethodOutcome, maxit: usize, with_time: bool) -> [String; 3] {
    match &o.result {
        Ok(rep) => [
            if rep.converged() {
                format_sci(rep.relative_residual)
            } else {
                "-".into()
            },
            if rep.converged() { rep.iterations } else { maxit }.to_string(),
            if with_time {
                format_sci(rep.elapsed.as_secs_f64())
            } else {
                String::new()
            },
        ],
        Err(_) => ["err".into(), "err".into(), "err".into()],
    }
}

/// One column per method with rows `error`, `iteration` and, optionally, `time`.
pub fn emit_table(outcomes: &[MethodOutcome], maxit: usize, format: TableFormat, with_time: bool) -> String {
    let cols: Vec<[String; 3]> = outcomes.iter().map(|o| cells(o, maxit, with_time)).collect();
    let rows: &[(&str, usize)] = if with_time {
        &[("error", 0), ("iteration", 1), ("time", 2)]
    } else {
        &[("error", 0), ("iteration", 1)]
    };
    match format {
        TableFormat::Markdown => {
            let mut out = String::from("| |");
            for o in outcomes {
                let _ = write!(out, " {} |", o.label);
            }
            out.push_str("\n|---|");
            out.push_str(&"---|".repeat(outcomes.len()));
            out.push('\n');
            for &(name, idx) in rows {
                let _ = write!(out, "| {name} |");
                for c in &cols {
                    let _ = write!(out, " {} |", c[idx]);
                }
                out.push('\n');
            }
            out
        }
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = vec!["metric".to_string()];
            header.extend(outcomes.iter().map(|o| o.label.clone()));
            w.write_record(&header).expect("in-memory write");
            for &(name, idx) in rows {
                let mut rec = vec![name.to_string()];
                rec.extend(cols.iter().map(|c| c[idx].clone()));
                w.write_record(&rec).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
        }
    }
}

/// A table column read back from CSV. `None` marks `-` or `err` cells.
#[derive(Debug, Clone, PartialEq)]
pub struct TableColumn {
    pub label: String,
    pub error: Option<f64>,
    pub iterations: Option<usize>,
    pub time: Option<f64>,
}

pub fn parse_table_csv(text: &str) -> Result<Vec<TableColumn>> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).from_reader(text.as_bytes());
    let records: Vec<csv::StringRecord> = r
        .records()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
    let header = records.first().ok_or_else(|| Error::Parse {
        line: 1,
        message: "empty table".into(),
    })?;
    let mut cols: Vec<TableColumn> = header
        .iter()
        .skip(1)
        .map(|label| TableColumn {
            label: label.to_string(),
            error: None,
            iterations: None,
            time: None,
        })
        .collect();
    for (line, rec) in records.iter().enumerate().skip(1) {
        let metric = rec.get(0).unwrap_or_default();
        for (col, cell) in cols.iter_mut().zip(rec.iter().skip(1)) {
            let bad = || Error::Parse {
                line: line + 1,
                message: format!("invalid {metric} cell \"{cell}\""),
            };
            let numeric = !(cell == "-" || cell == "err" || cell.is_empty());
            match metric {
                "error" if numeric => col.error = Some(cell.parse().map_err(|_| bad())?),
                "iteration" if numeric => col.iterations = Some(cell.parse().map_err(|_| bad())?),
                "time" if numeric => col.time = Some(cell.parse().map_err(|_| bad())?),
                "error" | "iteration" | "time" => {}
                other => {
                    return Err(Error::Parse {
                        line: line + 1,
                        message: format!("unknown metric \"{other}\""),
                    })
                }
            }
        }
    }
    Ok(cols)
}

/// `iteration,relative_residual` with one row per outer iteration from 0.
pub fn emit_history(report: &SolveReport) -> String {
    let mut out = String::from("iteration,relative_residual\n");
    for (k, r) in report.history.relative_residuals().iter().enumerate() {
        let _ = writeln!(out, "{k},{r:e}");
    }
    out
}

/// Reads back a history file produced by [`emit_history`].
pub fn parse_history(text: &str) -> Result<Vec<(usize, f64)>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (idx, rec) in r.records().enumerate() {
        let line = idx + 2;
        let rec = rec.map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        let bad = || Error::Parse {
            line,
            message: "expected iteration,relative_residual".into(),
        };
        let k = rec.get(0).ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let v = rec.get(1).ok_or_else(bad)?.parse().map_err(|_| bad())?;
        rows.push((k, v));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sci_format() {
        assert_eq!(format_sci(8.236977e-7), "8.23698e-07");
        assert_eq!(format_sci(1.0), "1.00000e+00");
        assert_eq!(format_sci(12345.0), "1.23450e+04");
        assert_eq!(format_sci(0.0), "0.00000e+00");
    }

    #[test]
    fn unknown_label_is_rejected() {
        assert!(inner_for_label("pre-9", &MethodParams::default(), 4).is_err());
        for l in METHOD_LABELS {
            assert!(inner_for_label(l, &MethodParams::default(), 4).is_ok());
        }
    }
}
