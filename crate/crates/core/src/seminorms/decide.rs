//! Faithfulness of `r_a` and the invertibility decision.
//!
//! `r_a` is a norm iff `f(a) > 0` for every nonzero positive `f`; in finite
//! dimensions that holds iff `a` is invertible, and a vector state on a
//! kernel eigenvector is the witness when it fails. The decision routine
//! combines this with the second half of the criterion: a uniform positive
//! lower constant between `r_{a^alpha}` and `r_{a^beta}`, from which bounds
//! on the spectrum of `a` are reconstructed.

use crate::algebra::Element;
use crate::error::{Error, Result};
use crate::functionals::HermitianFunctional;
use crate::spectral::RANK_RELATIVE_TOL;

use super::equivalence::{empirical_ratio_bounds_with, RatioBounds};

#[derive(Clone, Debug)]
pub struct Faithfulness {
    pub faithful: bool,
    /// Unit-norm positive functional with `f(a) <= tau_rank`, present iff
    /// not faithful.
    pub witness: Option<HermitianFunctional>,
}

pub fn faithfulness_check(a: &Element) -> Result<Faithfulness> {
    let (lambda_min, _) = a.spectral_bounds()?;
    if lambda_min > a.rank_tolerance()? {
        return Ok(Faithfulness {
            faithful: true,
            witness: None,
        });
    }
    let (block, index, _) = a.locate_eigenvalue(|l, best| l < best)?;
    let v = a.decompositions()?[block].eigenvector(index);
    let witness = HermitianFunctional::rank_one(a.structure(), block, &v)?;
    Ok(Faithfulness {
        faithful: false,
        witness: Some(witness),
    })
}

#[derive(Clone, Debug)]
pub struct InvertibilityDecision {
    pub invertible: bool,
    pub faithful: bool,
    pub witness: Option<HermitianFunctional>,
    /// Exponents ordered so that `high > low`; ratios are
    /// `r_{a^high}(f) / r_{a^low}(f)`.
    pub low: f64,
    pub high: f64,
    pub ratios: RatioBounds,
    /// `1e-8 * ||a||^(high - low)`; a minimum ratio at or below it is read
    /// as a vanishing lower constant.
    pub threshold: f64,
    /// `(m^(1/d), M^(1/d))` with `d = high - low`, present when invertible.
    pub reconstructed_bounds: Option<(f64, f64)>,
    /// Ground truth `(lambda_min, lambda_max)` from the eigendecomposition.
    pub spectral_bounds: (f64, f64),
}

pub fn decide_invertibility(
    a: &Element,
    alpha: f64,
    beta: f64,
    trials: usize,
    seed: u64,
) -> Result<InvertibilityDecision> {
    decide_invertibility_with_witnesses(a, alpha, beta, trials, seed, &[])
}

/// As [`decide_invertibility`], with extra functionals mixed into the
/// ratio sample. Injecting the eigenvector witnesses of
/// [`super::equivalence_constants`] makes the reconstructed bounds exact.
pub fn decide_invertibility_with_witnesses(
    a: &Element,
    alpha: f64,
    beta: f64,
    trials: usize,
    seed: u64,
    extra: &[HermitianFunctional],
) -> Result<InvertibilityDecision> {
    if alpha == beta {
        return Err(Error::BadExponents {
            alpha,
            beta,
            reason: "exponents must differ",
        });
    }
    if !(alpha > 0.0 && beta > 0.0) || !alpha.is_finite() || !beta.is_finite() {
        return Err(Error::BadExponents {
            alpha,
            beta,
            reason: "exponents must be positive reals",
        });
    }
    if trials == 0 && extra.is_empty() {
        return Err(Error::BadSpec("decide_invertibility needs at least one trial".into()));
    }
    let spectral_bounds = a.spectral_bounds()?;
    let faith = faithfulness_check(a)?;
    let (low, high) = if alpha < beta { (alpha, beta) } else { (beta, alpha) };
    let d = high - low;
    let ratios = empirical_ratio_bounds_with(a, low, high, trials, seed, extra)?;
    let threshold = RANK_RELATIVE_TOL * spectral_bounds.1.powf(d);

    let lower_constant_positive = ratios.samples > 0 && ratios.min_ratio > threshold;
    let invertible = faith.faithful && lower_constant_positive;
    let reconstructed_bounds = invertible.then(|| {
        (
            ratios.min_ratio.powf(1.0 / d),
            ratios.max_ratio.powf(1.0 / d),
        )
    });
    Ok(InvertibilityDecision {
        invertible,
        faithful: faith.faithful,
        witness: faith.witness,
        low,
        high,
        ratios,
        threshold,
        reconstructed_bounds,
        spectral_bounds,
    })
}
