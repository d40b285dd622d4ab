//! Randomized verification of the seminorm identities, inequalities and
//! the invertibility criterion, with JSON reports.
//!
//! Each checker returns a [`VerificationReport`]; violated assertions are
//! recorded as [`Failure`]s rather than returned as errors. Errors are
//! reserved for malformed inputs.

mod checks;
mod report;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

pub use checks::{
    blowup_study, check_closed_form, check_closed_form_with, check_invertibility_theorem,
    check_power_inequality, check_range_projection_limit, closed_form_trial, default_corpus,
    default_rp_elements, limit_error, power_trial, trial_inputs, SeminormFn,
    BLOWUP_RELATIVE_TOL, BOUNDS_RELATIVE_TOL, CLOSED_FORM_RELATIVE_TOL, GAMMA_GRID,
    KERNEL_WITNESS_TOL, POWER_SLACK, RP_RATE_TOL, VARIATIONAL_TOL, WITNESS_RELATIVE_TOL,
};
pub use report::{
    format_real, inputs_digest, ConstantsRow, Failure, SeriesRow, VerificationReport,
    SCHEMA_VERSION,
};

use crate::error::{Error, Result};

pub const DEFAULT_EXPONENT_PAIRS: [(f64, f64); 4] = [(1.0, 2.0), (0.5, 1.0), (1.0, 3.0), (2.0, 3.0)];
pub const DEFAULT_TRIALS: usize = 200;
pub const DEFAULT_MAX_DIM: usize = 4;
/// Largest block size accepted by `max_dim`.
pub const MAX_BLOCK_DIM: usize = 16;
pub const DEFAULT_BLOWUP_EPSILONS: [f64; 4] = [1.0, 1e-1, 1e-2, 1e-3];
pub const DEFAULT_RP_EPSILONS: [f64; 3] = [1e-2, 1e-4, 1e-6];
/// Exponents used by the invertibility suite.
pub const DECIDE_EXPONENTS: (f64, f64) = (1.0, 2.0);

/// Block-size grid: `(2), (3), (4), (1,2), (2,3)` restricted to blocks of
/// size at most `max_dim`, plus `(max_dim)` when it exceeds them all.
pub fn default_dims(max_dim: usize) -> Vec<Vec<usize>> {
    let base: [&[usize]; 5] = [&[2], &[3], &[4], &[1, 2], &[2, 3]];
    let mut dims: Vec<Vec<usize>> = base
        .iter()
        .filter(|d| d.iter().all(|&n| n <= max_dim))
        .map(|d| d.to_vec())
        .collect();
    if max_dim > 4 || dims.is_empty() {
        dims.push(vec![max_dim]);
    }
    dims
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    All,
    Closed,
    Power,
    Invert,
    Rp,
    Blowup,
}

impl Suite {
    pub const ALL: [Suite; 6] = [Suite::All, Suite::Closed, Suite::Power, Suite::Invert, Suite::Rp, Suite::Blowup];

    pub fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Closed => "closed",
            Suite::Power => "power",
            Suite::Invert => "invert",
            Suite::Rp => "rp",
            Suite::Blowup => "blowup",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::BadSpec(format!("unknown suite {s:?}; expected all|closed|power|invert|rp|blowup")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub trials: usize,
    pub max_dim: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: DEFAULT_TRIALS,
            max_dim: DEFAULT_MAX_DIM,
        }
    }
}

/// Runs one suite, or all of them in the order closed, power, invert, rp,
/// blowup, and merges the findings.
pub fn run_suite(suite: Suite, config: &SuiteConfig) -> Result<VerificationReport> {
    if config.max_dim == 0 || config.max_dim > MAX_BLOCK_DIM {
        return Err(Error::BadSpec(format!(
            "max_dim must be in 1..={MAX_BLOCK_DIM}, got {}",
            config.max_dim
        )));
    }
    let start = Instant::now();
    let dims = default_dims(config.max_dim);
    let (seed, trials) = (config.seed, config.trials);
    let single = |s: Suite| -> Result<VerificationReport> {
        match s {
            Suite::Closed => check_closed_form(trials, &dims, seed),
            Suite::Power => check_power_inequality(trials, &dims, &DEFAULT_EXPONENT_PAIRS, seed),
            Suite::Invert => {
                let (alpha, beta) = DECIDE_EXPONENTS;
                check_invertibility_theorem(&default_corpus(seed)?, alpha, beta, trials, seed)
            }
            Suite::Rp => check_range_projection_limit(&default_rp_elements(seed)?, &DEFAULT_RP_EPSILONS, trials, seed),
            Suite::Blowup => blowup_study(&DEFAULT_BLOWUP_EPSILONS),
            Suite::All => unreachable!("expanded by the caller"),
        }
    };
    let parts: Vec<Suite> = match suite {
        Suite::All => Suite::ALL[1..].to_vec(),
        s => vec![s],
    };
    let mut report = VerificationReport::new(suite.name(), seed, trials);
    for part in parts {
        report.absorb(single(part)?);
    }
    report.elapsed = start.elapsed();
    Ok(report)
}
