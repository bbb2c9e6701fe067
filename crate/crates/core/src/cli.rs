//! Command-line front end of `qinv`.
//!
//! Exit codes: 0 success or isomorphic, 1 not isomorphic, 2 inconclusive,
//! 3 input error, 4 numerical failure. Failures print one line
//! `error[input]: …` or `error[numerical]: …` on the error stream.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::equivalence::{compare_quotient, oracle_compare, GridOptions, QuotientModuleSpec};
use crate::error::Error;
use crate::fmt;
use crate::geometry::invariant_report;
use crate::kernels::{build_kernel, KernelSpec};
use crate::oracle::model_report;
use crate::series::HypersurfaceSpec;

pub const DEFAULT_DEGREE: usize = 12;
pub const DEFAULT_DMODEL: usize = 6;
pub const DEFAULT_RADIUS: f64 = 0.3;
pub const DEFAULT_GRID: usize = 16;
pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_ORACLE_TOL: f64 = 1e-10;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "qinv", version, about = "Unitary invariants of quotient Hilbert modules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that a kernel is Hermitian and nonnegative definite.
    Validate {
        kernel: PathBuf,
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Invariant report along a hypersurface (JSON at --out, CSV next to it).
    Invariants {
        #[arg(long)]
        kernel: PathBuf,
        /// Defaults to the flat hypersurface z1 = 0.
        #[arg(long)]
        hypersurface: Option<PathBuf>,
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_RADIUS)]
        radius: f64,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decide whether two quotient modules are isomorphic.
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Defaults to 1e-8, or 1e-10 with --oracle.
        #[arg(long)]
        tol: Option<f64>,
        /// Compare restricted normalized jet kernels coefficientwise instead.
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Finite-model checks: Gram matrix, eigenvectors, jet identity.
    ModelCheck {
        #[arg(long)]
        kernel: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DMODEL)]
        dmodel: usize,
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_RADIUS)]
        radius: f64,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
    },
}

/// A failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_input_error() { EXIT_INPUT } else { EXIT_NUMERICAL },
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn read_json(path: &Path) -> CliResult<serde_json::Value> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

/// Fills in the default cap, or overrides it with `--degree`.
fn set_cap(kernel: &mut serde_json::Value, degree: Option<usize>) {
    if let Some(obj) = kernel.as_object_mut() {
        match degree {
            Some(d) => {
                obj.insert("cap".into(), d.into());
            }
            None => {
                obj.entry("cap").or_insert(DEFAULT_DEGREE.into());
            }
        }
    }
}

fn parse<T: serde::de::DeserializeOwned>(v: serde_json::Value, path: &Path) -> CliResult<T> {
    serde_json::from_value(v).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_kernel_spec(path: &Path, degree: Option<usize>) -> CliResult<KernelSpec> {
    let mut v = read_json(path)?;
    set_cap(&mut v, degree);
    parse(v, path)
}

/// Accepts a quotient-module spec (has a `kernel` key) or a bare kernel spec.
fn load_module(path: &Path, degree: Option<usize>) -> CliResult<QuotientModuleSpec> {
    let mut v = read_json(path)?;
    if v.get("kernel").is_some() {
        set_cap(&mut v["kernel"], degree);
        if degree.is_some() {
            if let Some(obj) = v.as_object_mut() {
                obj.remove("cap");
            }
        }
        parse(v, path)
    } else {
        set_cap(&mut v, degree);
        Ok(QuotientModuleSpec::new(parse(v, path)?))
    }
}

#[derive(Serialize)]
struct ValidateReport {
    dim: usize,
    cap: usize,
    hermitian: bool,
    nnd: bool,
    #[serde(serialize_with = "fmt::f64")]
    min_eigenvalue: f64,
}

fn json_line<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializes");
    s.push('\n');
    s
}

fn execute(cli: Cli, out: &mut dyn Write) -> CliResult<i32> {
    let emit = |out: &mut dyn Write, s: &str| -> CliResult<()> {
        out.write_all(s.as_bytes())
            .map_err(|e| Failure::input(format!("cannot write output: {e}")))
    };
    match cli.command {
        Command::Validate { kernel, degree } => {
            let spec = load_kernel_spec(&kernel, degree)?;
            let k = build_kernel(&spec)?;
            let check = k.is_nnd(1e-10)?;
            let report = ValidateReport {
                dim: k.dim(),
                cap: k.cap(),
                hermitian: k.is_hermitian(),
                nnd: check.nnd,
                min_eigenvalue: check.min_eigenvalue,
            };
            emit(out, &json_line(&report))?;
            if !check.nnd {
                return Err(Failure::input(format!(
                    "not nnd: most negative eigenvalue {:e}",
                    check.min_eigenvalue
                )));
            }
            Ok(EXIT_OK)
        }
        Command::Invariants {
            kernel,
            hypersurface,
            degree,
            radius,
            grid,
            out: path,
        } => {
            let spec = load_kernel_spec(&kernel, degree)?;
            let z: HypersurfaceSpec = match hypersurface {
                Some(p) => parse(read_json(&p)?, &p)?,
                None => HypersurfaceSpec::flat(1),
            };
            let k = build_kernel(&spec)?;
            let report = invariant_report(&k, &z, radius, grid)?;
            let csv_path = if path.extension().is_some_and(|e| e == "csv") {
                path.with_extension("csv.csv")
            } else {
                path.with_extension("csv")
            };
            write_file(&path, &report.to_json())?;
            write_file(&csv_path, &report.to_csv())?;
            Ok(EXIT_OK)
        }
        Command::Compare {
            a,
            b,
            tol,
            oracle,
            degree,
            radius,
            grid,
        } => {
            let ma = load_module(&a, degree)?;
            let mb = load_module(&b, degree)?;
            let verdict = if oracle {
                oracle_compare(&ma, &mb, tol.unwrap_or(DEFAULT_ORACLE_TOL))?
            } else {
                let mut ma = ma;
                let mut mb = mb;
                if radius.is_some() {
                    ma.radius = radius;
                    mb.radius = radius;
                }
                if grid.is_some() {
                    ma.grid = grid;
                    mb.grid = grid;
                }
                let defaults = GridOptions {
                    radius: DEFAULT_RADIUS,
                    grid: DEFAULT_GRID,
                };
                compare_quotient(&ma, &mb, tol.unwrap_or(DEFAULT_TOL), defaults)?
            };
            emit(out, &verdict.to_json())?;
            Ok(verdict.exit_code())
        }
        Command::ModelCheck {
            kernel,
            dmodel,
            degree,
            radius,
            grid,
        } => {
            let spec = load_kernel_spec(&kernel, degree)?;
            let k = build_kernel(&spec)?;
            let report = model_report(&k, dmodel, radius, grid)?;
            emit(out, &report.to_json())?;
            if !report.holds {
                return Err(Failure {
                    code: EXIT_NUMERICAL,
                    message: "model checks failed".into(),
                });
            }
            Ok(EXIT_OK)
        }
    }
}

/// Runs the command line `argv` (program name first), writing reports to
/// `out` and diagnostics to `err`; returns the exit code.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let msg = e.to_string();
                    let first = msg.lines().next().unwrap_or("invalid arguments");
                    let first = first.trim_start_matches("error: ");
                    let _ = writeln!(err, "error[input]: {first}");
                    EXIT_INPUT
                }
            };
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(f) => {
            let kind = if f.code == EXIT_INPUT { "input" } else { "numerical" };
            let _ = writeln!(err, "error[{kind}]: {}", f.message.replace('\n', " "));
            f.code
        }
    }
}

/// Runs with the process streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}
