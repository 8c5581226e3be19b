//! Command-line front end for the experiment harness.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{ArgGroup, Parser, ValueEnum};

use crate::bench::{emit_table, run_experiment, ExperimentConfig, MatrixSource, MethodParams, RhsMode, TableFormat};
use crate::gmres::SolveConfig;
use crate::preconditioner::DepthMode;

/// Exit code for invalid configuration.
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Rhs {
    Ones,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Markdown,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Depth {
    Constant,
    Flexible,
}

/// Runs BA-GMRES with inner-iteration preconditioners and prints an
/// error / iteration / time table with one column per method.
#[derive(Debug, Parser)]
#[command(name = "bagmres-bench", version)]
#[command(group(ArgGroup::new("source").required(true).args(["matrix", "gen"])))]
struct Cli {
    /// Matrix Market file.
    #[arg(long, value_name = "PATH")]
    matrix: Option<PathBuf>,
    /// Generated matrix: tridiag or random.
    #[arg(long, value_name = "NAME", requires = "n")]
    gen: Option<String>,
    /// Generated matrix dimension.
    #[arg(long)]
    n: Option<usize>,
    /// Seed for generators, random right-hand sides and randomized inner methods.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated labels: no-pre, pre-1, pre-adapt, pre-adapt-r, ADI-pre, PCG-pre, rpcg-pre.
    #[arg(long, value_delimiter = ',', required = true)]
    methods: Vec<String>,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 300)]
    maxit: usize,
    /// Kaczmarz relaxation (pre-1) and ADI shift.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Extrapolation parameter of the adaptive Kaczmarz step.
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    /// Inner residual factor.
    #[arg(long, default_value_t = 0.5)]
    eta: f64,
    /// Largest inner depth.
    #[arg(long)]
    inner_max: Option<usize>,
    /// Block size of the adaptive Kaczmarz methods.
    #[arg(long, default_value_t = 4)]
    tau: usize,
    /// Split index of the RPCG partition (default n/2).
    #[arg(long)]
    split: Option<usize>,
    /// Inner depth rule: fixed after the first application, or per application.
    #[arg(long, value_enum, default_value_t = Depth::Constant)]
    depth_mode: Depth,
    #[arg(long, value_enum, default_value_t = Rhs::Ones)]
    rhs: Rhs,
    /// Directory for per-method convergence histories.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Markdown)]
    format: Format,
    /// Leave out the wall-time row.
    #[arg(long)]
    no_time: bool,
}

impl Cli {
    fn into_config(self) -> (ExperimentConfig, TableFormat, bool) {
        let matrix = match (self.matrix, self.gen) {
            (Some(path), _) => MatrixSource::File(path),
            (None, Some(name)) => MatrixSource::Generator {
                name,
                n: self.n.unwrap_or(0),
                seed: self.seed,
            },
            (None, None) => unreachable!("clap enforces a matrix source"),
        };
        let rhs = match self.rhs {
            Rhs::Ones => RhsMode::OnesSolution,
            Rhs::Random => RhsMode::Random(self.seed),
        };
        let solve = SolveConfig {
            tol: self.tol,
            maxit: self.maxit,
            inner_max: self.inner_max,
            eta: self.eta,
            depth_mode: match self.depth_mode {
                Depth::Constant => DepthMode::FirstApplication,
                Depth::Flexible => DepthMode::Flexible,
            },
            ..SolveConfig::default()
        };
        let params = MethodParams {
            alpha: self.alpha,
            delta: self.delta,
            tau: self.tau,
            seed: self.seed,
            split: self.split,
        };
        let format = match self.format {
            Format::Markdown => TableFormat::Markdown,
            Format::Csv => TableFormat::Csv,
        };
        let config = ExperimentConfig {
            matrix,
            rhs,
            methods: self.methods,
            params,
            solve,
            output: self.out,
        };
        (config, format, !self.no_time)
    }
}

/// Runs the CLI and returns the process exit code.
pub fn cli_main<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
            } else {
                let _ = write!(stdout, "{text}");
            }
            return e.exit_code();
        }
    };
    let (config, format, with_time) = cli.into_config();
    let outcomes = match run_experiment(&config) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_CONFIG;
        }
    };
    let _ = write!(stdout, "{}", emit_table(&outcomes, config.solve.maxit, format, with_time));
    for o in &outcomes {
        match &o.result {
            Err(e) => {
                let _ = writeln!(stderr, "{}: {e}", o.label);
            }
            Ok(rep) if !rep.converged() => {
                let _ = writeln!(
                    stderr,
                    "{}: no convergence in {} iterations (relative residual {:e})",
                    o.label, rep.iterations, rep.relative_residual
                );
            }
            Ok(_) => {}
        }
    }
    0
}
