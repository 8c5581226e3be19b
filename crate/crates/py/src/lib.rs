//! Python bindings: sparse matrices, BA-GMRES with inner preconditioners,
//! the stand-alone inner solvers and the dense spectral checks.

use std::path::PathBuf;

use bagmres::adi::adi_solve;
use bagmres::bench::{inner_for_label, MethodParams};
use bagmres::gmres::{ba_gmres_solve, gmres_solve, InnerSpec, SolveConfig, SolveReport};
use bagmres::kaczmarz::{rabk_solve, rk_solve, KaczmarzConfig, RowSelection, StepMode};
use bagmres::matrix_market::{emit_matrix_market, parse_matrix_market_str, read_matrix_market};
use bagmres::preconditioner::DepthMode;
use bagmres::rpcg::{default_split, jacobi_preconditioner, pcg_solve, rpcg_solve, CgOptions, RpcgFactors};
use bagmres::{spectral, DenseMatrix};
use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

create_exception!(bagmres_py, SolverError, PyValueError);

fn to_py(e: bagmres::Error) -> PyErr {
    SolverError::new_err(e.to_string())
}

fn dense(rows: Vec<Vec<f64>>) -> PyResult<DenseMatrix> {
    DenseMatrix::from_rows(&rows).map_err(to_py)
}

/// Compressed-row sparse matrix.
#[pyclass(name = "SparseMatrix", module = "bagmres_py", frozen)]
struct PySparse {
    inner: bagmres::SparseMatrix,
}

#[pymethods]
impl PySparse {
    /// Builds from `(row, col, value)` triplets; duplicates are summed.
    #[staticmethod]
    fn from_triplets(n_rows: usize, n_cols: usize, triplets: Vec<(usize, usize, f64)>) -> PyResult<Self> {
        let inner = bagmres::SparseMatrix::from_triplets(n_rows, n_cols, &triplets).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_dense(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(Self {
            inner: bagmres::SparseMatrix::from_dense(&dense(rows)?),
        })
    }

    #[staticmethod]
    fn identity(n: usize) -> Self {
        Self {
            inner: bagmres::SparseMatrix::identity(n),
        }
    }

    /// Tridiagonal matrix with 10 on the diagonal and 2 beside it.
    #[staticmethod]
    fn tridiagonal(n: usize) -> PyResult<Self> {
        Ok(Self {
            inner: bagmres::sparse::gen_tridiagonal(n).map_err(to_py)?,
        })
    }

    /// Seeded diagonally dominant random matrix.
    #[staticmethod]
    fn random(n: usize, seed: u64) -> PyResult<Self> {
        Ok(Self {
            inner: bagmres::sparse::gen_random(n, seed).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn read_matrix_market(path: PathBuf) -> PyResult<Self> {
        Ok(Self {
            inner: read_matrix_market(path).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn parse_matrix_market(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: parse_matrix_market_str(text).map_err(to_py)?,
        })
    }

    fn to_matrix_market(&self) -> String {
        emit_matrix_market(&self.inner)
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.inner.n_rows(), self.inner.n_cols())
    }

    #[getter]
    fn nnz(&self) -> usize {
        self.inner.nnz()
    }

    fn matvec(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.spmv(&x).map_err(to_py)
    }

    fn rmatvec(&self, y: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.spmv_transpose(&y).map_err(to_py)
    }

    fn diagonal(&self) -> Vec<f64> {
        self.inner.diagonal()
    }

    fn to_dense(&self) -> PyResult<Vec<Vec<f64>>> {
        Ok(self.inner.to_dense().map_err(to_py)?.to_rows())
    }

    fn __repr__(&self) -> String {
        format!(
            "SparseMatrix(shape=({}, {}), nnz={})",
            self.inner.n_rows(),
            self.inner.n_cols(),
            self.inner.nnz()
        )
    }
}

/// Outcome of a GMRES or BA-GMRES solve.
#[pyclass(name = "SolveReport", module = "bagmres_py", frozen, get_all)]
struct PyReport {
    label: String,
    converged: bool,
    iterations: usize,
    relative_residual: f64,
    relative_error: Option<f64>,
    estimate: f64,
    breakdown: bool,
    depth_mode: Option<String>,
    inner_depths: Vec<usize>,
    residual_history: Vec<f64>,
    matvecs: usize,
    inner_steps: usize,
    orthogonalization_dots: usize,
    x: Vec<f64>,
    seconds: f64,
}

impl From<SolveReport> for PyReport {
    fn from(r: SolveReport) -> Self {
        let c = r.operation_counts();
        Self {
            converged: r.converged(),
            residual_history: r.history.relative_residuals(),
            label: r.label,
            iterations: r.iterations,
            relative_residual: r.relative_residual,
            relative_error: r.relative_error,
            estimate: r.estimate,
            breakdown: r.breakdown,
            depth_mode: r.depth_mode.map(|m| m.label().to_string()),
            inner_depths: r.inner_depths,
            matvecs: c.matvecs,
            inner_steps: c.inner_steps,
            orthogonalization_dots: c.orthogonalization_dots,
            x: r.x,
            seconds: r.elapsed.as_secs_f64(),
        }
    }
}

#[pymethods]
impl PyReport {
    fn __repr__(&self) -> String {
        format!(
            "SolveReport(label={:?}, converged={}, iterations={}, relative_residual={:e})",
            self.label, self.converged, self.iterations, self.relative_residual
        )
    }
}

fn start(a: &PySparse, x0: Option<Vec<f64>>) -> Vec<f64> {
    x0.unwrap_or_else(|| vec![0.0; a.inner.n_cols()])
}

fn depth_mode(mode: &str, fixed: Option<usize>) -> PyResult<DepthMode> {
    match (mode, fixed) {
        (_, Some(l)) => Ok(DepthMode::Fixed(l)),
        ("constant", None) => Ok(DepthMode::FirstApplication),
        ("flexible", None) => Ok(DepthMode::Flexible),
        (other, None) => Err(SolverError::new_err(format!(
            "unknown depth mode \"{other}\" (expected constant or flexible)"
        ))),
    }
}

/// Plain full GMRES.
#[pyfunction]
#[pyo3(signature = (a, b, x0=None, tol=1e-6, maxit=300))]
fn gmres(a: &PySparse, b: Vec<f64>, x0: Option<Vec<f64>>, tol: f64, maxit: usize) -> PyResult<PyReport> {
    let cfg = SolveConfig {
        tol,
        maxit,
        ..SolveConfig::default()
    };
    Ok(gmres_solve(&a.inner, &b, &start(a, x0), &cfg).map_err(to_py)?.into())
}

/// BA-GMRES. `inner` is a benchmark label (pre-1, pre-adapt, pre-adapt-r,
/// ADI-pre, PCG-pre, rpcg-pre) or one of jacobi, exact.
#[pyfunction]
#[pyo3(signature = (
    a, b, inner, x0=None, tol=1e-6, maxit=300, eta=0.5, inner_max=None, depth_mode="constant",
    depth=None, alpha=1.0, delta=1.0, tau=4, seed=0, split=None
))]
#[allow(clippy::too_many_arguments)]
fn ba_gmres(
    a: &PySparse,
    b: Vec<f64>,
    inner: &str,
    x0: Option<Vec<f64>>,
    tol: f64,
    maxit: usize,
    eta: f64,
    inner_max: Option<usize>,
    depth_mode: &str,
    depth: Option<usize>,
    alpha: f64,
    delta: f64,
    tau: usize,
    seed: u64,
    split: Option<usize>,
) -> PyResult<PyReport> {
    let spec = match inner {
        "jacobi" => InnerSpec::Jacobi { omega: alpha },
        "exact" => InnerSpec::Exact,
        label => {
            let params = MethodParams {
                alpha,
                delta,
                tau,
                seed,
                split,
            };
            inner_for_label(label, &params, a.inner.n_rows())
                .map_err(to_py)?
                .ok_or_else(|| SolverError::new_err("no-pre has no inner method; use gmres"))?
        }
    };
    let cfg = SolveConfig {
        tol,
        maxit,
        eta,
        inner_max,
        depth_mode: self::depth_mode(depth_mode, depth)?,
        ..SolveConfig::default()
    };
    Ok(ba_gmres_solve(&a.inner, &b, &start(a, x0), &spec, &cfg).map_err(to_py)?.into())
}

/// Single-row Kaczmarz; returns `(x, residual norms)`.
#[pyfunction]
#[pyo3(signature = (a, b, x0=None, alpha=1.0, seed=None, max_steps=1000, residual_factor=1e-6))]
fn kaczmarz(
    a: &PySparse,
    b: Vec<f64>,
    x0: Option<Vec<f64>>,
    alpha: f64,
    seed: Option<u64>,
    max_steps: usize,
    residual_factor: f64,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let cfg = KaczmarzConfig {
        step_mode: StepMode::Constant(alpha),
        row_selection: seed.map_or(RowSelection::Cyclic, RowSelection::Randomized),
        block_size: 1,
        max_steps,
        residual_factor,
    };
    let (x, h) = rk_solve(&a.inner, &b, &start(a, x0), &cfg, None).map_err(to_py)?;
    Ok((x, h.residual_norms))
}

/// Averaged block Kaczmarz with adaptive or constant steps; returns `(x, residual norms)`.
#[pyfunction]
#[pyo3(signature = (a, b, x0=None, tau=4, delta=1.0, adaptive=true, seed=None, max_steps=1000, residual_factor=1e-6))]
#[allow(clippy::too_many_arguments)]
fn block_kaczmarz(
    a: &PySparse,
    b: Vec<f64>,
    x0: Option<Vec<f64>>,
    tau: usize,
    delta: f64,
    adaptive: bool,
    seed: Option<u64>,
    max_steps: usize,
    residual_factor: f64,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let cfg = KaczmarzConfig {
        step_mode: if adaptive {
            StepMode::Adaptive(delta)
        } else {
            StepMode::Constant(2.0 - delta)
        },
        row_selection: seed.map_or(RowSelection::Cyclic, RowSelection::Randomized),
        block_size: tau,
        max_steps,
        residual_factor,
    };
    let (x, h) = rabk_solve(&a.inner, &b, &start(a, x0), &cfg, None).map_err(to_py)?;
    Ok((x, h.residual_norms))
}

/// Jacobi-scaled ADI from zero; returns `(x, residual norms)`.
#[pyfunction]
#[pyo3(signature = (a, b, alpha=1.0, tol=1e-6, maxit=300))]
fn adi(a: &PySparse, b: Vec<f64>, alpha: f64, tol: f64, maxit: usize) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let (x, h) = adi_solve(&a.inner, &b, alpha, tol, maxit).map_err(to_py)?;
    Ok((x, h.residual_norms))
}

/// Jacobi-preconditioned CG; returns `(x, residual norms)`.
#[pyfunction]
#[pyo3(signature = (a, b, x0=None, tol=1e-6, maxit=300))]
fn pcg(a: &PySparse, b: Vec<f64>, x0: Option<Vec<f64>>, tol: f64, maxit: usize) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let opts = CgOptions {
        tol,
        maxit,
        record_iterates: false,
    };
    let (x, h) =
        pcg_solve(&a.inner, jacobi_preconditioner(&a.inner), &b, &start(a, x0), &opts).map_err(to_py)?;
    Ok((x, h.residual_norms))
}

/// Block-preconditioned CG in the original variables; returns `(x, residual norms)`.
#[pyfunction]
#[pyo3(signature = (a, b, x0=None, split=None, tol=1e-6, maxit=300))]
fn rpcg(
    a: &PySparse,
    b: Vec<f64>,
    x0: Option<Vec<f64>>,
    split: Option<usize>,
    tol: f64,
    maxit: usize,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let split = split.unwrap_or_else(|| default_split(a.inner.n_rows()));
    let f = RpcgFactors::from_matrix(&a.inner, split).map_err(to_py)?;
    let opts = CgOptions {
        tol,
        maxit,
        record_iterates: false,
    };
    let (x, h) = rpcg_solve(&a.inner, &f, &b, &start(a, x0), &opts).map_err(to_py)?;
    Ok((x, h.residual_norms))
}

#[pyfunction]
fn eigenvalues(rows: Vec<Vec<f64>>) -> PyResult<Vec<Complex64>> {
    spectral::dense_eigenvalues(&dense(rows)?).map_err(to_py)
}

#[pyfunction]
fn spectral_radius(rows: Vec<Vec<f64>>) -> PyResult<f64> {
    spectral::spectral_radius(&dense(rows)?).map_err(to_py)
}

#[pyfunction]
fn condition_number(rows: Vec<Vec<f64>>) -> PyResult<f64> {
    spectral::condition_2(&dense(rows)?).map_err(to_py)
}

/// Whether `lim Hⁱ` exists.
#[pyfunction]
fn is_semi_convergent(rows: Vec<Vec<f64>>) -> PyResult<bool> {
    spectral::is_semi_convergent(&dense(rows)?).map_err(to_py)
}

/// Runs the benchmark CLI with `argv` (without the program name); returns
/// `(exit code, stdout, stderr)`.
#[pyfunction]
fn run_benchmark(argv: Vec<String>) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let args = std::iter::once("bagmres-bench".to_string()).chain(argv);
    let code = bagmres::cli::cli_main(args, &mut out, &mut err);
    (
        code,
        String::from_utf8_lossy(&out).into_owned(),
        String::from_utf8_lossy(&err).into_owned(),
    )
}

#[pymodule]
fn bagmres_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SolverError", m.py().get_type::<SolverError>())?;
    m.add_class::<PySparse>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(gmres, m)?)?;
    m.add_function(wrap_pyfunction!(ba_gmres, m)?)?;
    m.add_function(wrap_pyfunction!(kaczmarz, m)?)?;
    m.add_function(wrap_pyfunction!(block_kaczmarz, m)?)?;
    m.add_function(wrap_pyfunction!(adi, m)?)?;
    m.add_function(wrap_pyfunction!(pcg, m)?)?;
    m.add_function(wrap_pyfunction!(rpcg, m)?)?;
    m.add_function(wrap_pyfunction!(eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_radius, m)?)?;
    m.add_function(wrap_pyfunction!(condition_number, m)?)?;
    m.add_function(wrap_pyfunction!(is_semi_convergent, m)?)?;
    m.add_function(wrap_pyfunction!(run_benchmark, m)?)?;
    Ok(())
}
