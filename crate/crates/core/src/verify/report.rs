//! Machine-readable verification reports.
//!
//! Reals are written in lowercase scientific notation with 12 significant
//! digits ([`format_real`]), and non-finite values as `null`, so a report is
//! byte-stable across runs and platforms. Wall-clock time is kept on the
//! struct but left out of the JSON for the same reason.

use std::fmt::Write as _;
use std::time::Duration;

use serde::{Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::error::Result;

pub const SCHEMA_VERSION: u32 = 1;

/// 12 significant digits with a lowercase, explicitly signed exponent,
/// e.g. `5.00000000000e+0`.
pub fn format_real(x: f64) -> String {
    let s = format!("{x:.11e}");
    match s.split_once('e') {
        Some((mantissa, exp)) if !exp.starts_with('-') => format!("{mantissa}e+{exp}"),
        _ => s,
    }
}

fn real<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if !x.is_finite() {
        return s.serialize_none();
    }
    let n: serde_json::Number = format_real(*x)
        .parse()
        .map_err(serde::ser::Error::custom)?;
    n.serialize(s)
}

/// Hex SHA-256 of the concatenated input descriptions, used to identify
/// the inputs of a failed check without embedding them.
pub fn inputs_digest(parts: &[&str]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p.as_bytes());
    }
    hex::encode(h.finalize())
}

/// One violated assertion. `lhs <= rhs + slack` (or `|lhs - rhs| <= slack`
/// for equalities) is what failed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub check_id: String,
    pub seed: u64,
    pub trial: u64,
    pub inputs_digest: String,
    #[serde(serialize_with = "real")]
    pub lhs: f64,
    #[serde(serialize_with = "real")]
    pub rhs: f64,
    #[serde(serialize_with = "real")]
    pub slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantsRow {
    #[serde(serialize_with = "real")]
    pub alpha: f64,
    #[serde(serialize_with = "real")]
    pub beta: f64,
    #[serde(serialize_with = "real")]
    pub analytic_c: f64,
    #[serde(rename = "analytic_C", serialize_with = "real")]
    pub analytic_upper: f64,
    #[serde(serialize_with = "real")]
    pub empirical_min: f64,
    #[serde(serialize_with = "real")]
    pub empirical_max: f64,
}

/// A point of a tabulated study: measured `y` at parameter `x`, next to
/// the predicted `reference`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesRow {
    pub series: String,
    #[serde(serialize_with = "real")]
    pub x: f64,
    #[serde(serialize_with = "real")]
    pub y: f64,
    #[serde(serialize_with = "real")]
    pub reference: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub suite: String,
    pub seed: u64,
    pub trials: usize,
    /// Number of individual assertions evaluated.
    pub checks: usize,
    pub failures: Vec<Failure>,
    pub constants_table: Vec<ConstantsRow>,
    pub series: Vec<SeriesRow>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl VerificationReport {
    pub fn new(suite: &str, seed: u64, trials: usize) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            suite: suite.to_string(),
            seed,
            trials,
            checks: 0,
            failures: Vec::new(),
            constants_table: Vec::new(),
            series: Vec::new(),
            elapsed: Duration::ZERO,
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Folds another report's findings into this one.
    pub fn absorb(&mut self, other: VerificationReport) {
        self.checks += other.checks;
        self.failures.extend(other.failures);
        self.constants_table.extend(other.constants_table);
        self.series.extend(other.series);
        self.elapsed += other.elapsed;
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// CSV of the constants table, one row per exponent pair.
    pub fn constants_csv(&self) -> String {
        let mut out = String::from("alpha,beta,analytic_c,analytic_C,empirical_min,empirical_max\n");
        let cell = |x: f64| if x.is_finite() { format_real(x) } else { String::new() };
        for r in &self.constants_table {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                cell(r.alpha),
                cell(r.beta),
                cell(r.analytic_c),
                cell(r.analytic_upper),
                cell(r.empirical_min),
                cell(r.empirical_max)
            );
        }
        out
    }
}
