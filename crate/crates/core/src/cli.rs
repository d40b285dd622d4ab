//! Command-line front end. [`run`] is the whole program minus process
//! exit, so it can be driven from tests with in-memory writers.
//!
//! Exit codes: 0 on success or a passing verification, 1 when a
//! verification suite records failures, 2 on any input error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::algebra::Element;
use crate::error::Error;
use crate::functionals::HermitianFunctional;
use crate::seminorms::{
    decide_invertibility, empirical_ratio_bounds, equivalence_constants, r_power, r_variational,
};
use crate::verify::{run_suite, Suite, SuiteConfig, DEFAULT_MAX_DIM, DEFAULT_TRIALS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURES: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "cstar-seminorms", version, about = "L1-type seminorms r_a on finite-dimensional C*-algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print r_{a^alpha}(f).
    Norm {
        #[arg(long)]
        algebra_file: PathBuf,
        #[arg(long)]
        functional_file: PathBuf,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = Method::Closed)]
        method: Method,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
    },
    /// Print analytic and sampled constants between r_{a^alpha} and r_{a^beta}.
    Constants {
        #[arg(long)]
        algebra_file: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, allow_negative_numbers = true)]
        beta: f64,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Decide invertibility of a from the equivalence of r_{a^alpha} and r_{a^beta}.
    Decide {
        #[arg(long)]
        algebra_file: PathBuf,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
        beta: f64,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run randomized checkers and emit a JSON report.
    Verify {
        #[arg(long, default_value = "all", value_parser = parse_suite)]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_DIM)]
        max_dim: usize,
        /// Report path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the constants table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Closed,
    Variational,
}

fn parse_suite(s: &str) -> std::result::Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Parses `args` (program name first) and executes the subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_INPUT
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{path}: {source}")]
struct FileError {
    path: String,
    source: Error,
}

fn read_file(path: &Path) -> std::result::Result<String, FileError> {
    fs::read_to_string(path).map_err(|e| FileError {
        path: path.display().to_string(),
        source: e.into(),
    })
}

fn load_element(path: &Path) -> std::result::Result<Element, FileError> {
    Element::from_json_str(&read_file(path)?).map_err(|source| FileError {
        path: path.display().to_string(),
        source,
    })
}

fn load_functional(path: &Path) -> std::result::Result<HermitianFunctional, FileError> {
    HermitianFunctional::from_json_str(&read_file(path)?).map_err(|source| FileError {
        path: path.display().to_string(),
        source,
    })
}

type CliResult = std::result::Result<i32, Box<dyn std::error::Error>>;

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    match command {
        Command::Norm {
            algebra_file,
            functional_file,
            alpha,
            method,
            tol,
        } => {
            let a = load_element(&algebra_file)?;
            let f = load_functional(&functional_file)?;
            f.structure().ensure_same(a.structure())?;
            let value = match method {
                Method::Closed => r_power(&a, alpha, &f)?,
                Method::Variational => {
                    let base = if alpha == 1.0 { a } else { a.power(alpha)? };
                    r_variational(&base, &f, tol)?.value
                }
            };
            writeln!(out, "{value:?}")?;
            Ok(EXIT_OK)
        }
        Command::Constants {
            algebra_file,
            alpha,
            beta,
            trials,
            seed,
        } => {
            let a = load_element(&algebra_file)?;
            let c = equivalence_constants(&a, alpha, beta)?;
            let sample = empirical_ratio_bounds(&a, alpha, beta, trials, seed)?;
            writeln!(out, "alpha {alpha:?} beta {beta:?}")?;
            writeln!(out, "analytic c {:?} C {:?}", c.c_lower, c.c_upper)?;
            writeln!(
                out,
                "empirical min {:?} max {:?} samples {} excluded {}",
                sample.min_ratio, sample.max_ratio, sample.samples, sample.excluded
            )?;
            Ok(EXIT_OK)
        }
        Command::Decide {
            algebra_file,
            alpha,
            beta,
            trials,
            seed,
        } => {
            let a = load_element(&algebra_file)?;
            let d = decide_invertibility(&a, alpha, beta, trials, seed)?;
            writeln!(out, "{}", if d.invertible { "invertible" } else { "not invertible" })?;
            if let Some((lo, hi)) = d.reconstructed_bounds {
                writeln!(out, "reconstructed bounds {lo:?} {hi:?}")?;
            }
            let (lo, hi) = d.spectral_bounds;
            writeln!(out, "spectral bounds {lo:?} {hi:?}")?;
            if !d.faithful {
                writeln!(out, "kernel witness: r_a(w) = 0 with ||w|| = 1")?;
            }
            Ok(EXIT_OK)
        }
        Command::Verify {
            suite,
            seed,
            trials,
            max_dim,
            out: out_path,
            csv,
        } => {
            let report = run_suite(suite, &SuiteConfig { seed, trials, max_dim })?;
            let json = report.to_json()?;
            match &out_path {
                Some(p) => fs::write(p, &json)?,
                None => out.write_all(json.as_bytes())?,
            }
            if let Some(p) = &csv {
                fs::write(p, report.constants_csv())?;
            }
            writeln!(
                err,
                "suite {}: {} checks, {} failures, {:.2} s",
                report.suite,
                report.checks,
                report.failures.len(),
                report.elapsed.as_secs_f64()
            )?;
            Ok(if report.passed() { EXIT_OK } else { EXIT_FAILURES })
        }
    }
}
