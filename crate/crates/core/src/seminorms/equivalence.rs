//! Equivalence constants between `r_{a^alpha}` and `r_{a^beta}`.
//!
//! For invertible `a` and `d = beta - alpha`, every `f` satisfies
//! `min(l_min^d, l_max^d) r_{a^alpha}(f) <= r_{a^beta}(f) <= max(l_min^d, l_max^d) r_{a^alpha}(f)`,
//! and vector states on the extreme eigenvectors attain both ends.

use rayon::prelude::*;

use crate::algebra::Element;
use crate::error::{Error, Result};
use crate::functionals::HermitianFunctional;
use crate::random::{random_functional, trial_rng};

/// Samples with `r_{a^alpha}(f)` at or below this are left out of ratios.
pub const RATIO_EXCLUSION_THRESHOLD: f64 = 1e-12;

const RATIO_STREAM: u64 = 0x5241_5449_4f53;

#[derive(Clone, Debug)]
pub struct EquivalenceConstants {
    pub alpha: f64,
    pub beta: f64,
    pub c_lower: f64,
    pub c_upper: f64,
    pub witness_lower: HermitianFunctional,
    pub witness_upper: HermitianFunctional,
}

fn vector_state(a: &Element, block: usize, index: usize) -> Result<HermitianFunctional> {
    let v = a.decompositions()?[block].eigenvector(index);
    HermitianFunctional::rank_one(a.structure(), block, &v)
}

/// Tight constants `c_lower <= r_{a^beta} / r_{a^alpha} <= c_upper` for
/// invertible `a`, with the eigenvector witnesses attaining them.
pub fn equivalence_constants(a: &Element, alpha: f64, beta: f64) -> Result<EquivalenceConstants> {
    let (lambda_min, lambda_max) = a.spectral_bounds()?;
    let tau = a.rank_tolerance()?;
    if lambda_min <= tau {
        return Err(Error::NotInvertible {
            lambda_min,
            tau_rank: tau,
        });
    }
    if !alpha.is_finite() || !beta.is_finite() {
        return Err(Error::BadExponents {
            alpha,
            beta,
            reason: "exponents must be finite",
        });
    }
    let d = beta - alpha;
    let (kmin, imin, _) = a.locate_eigenvalue(|l, best| l < best)?;
    let (kmax, imax, _) = a.locate_eigenvalue(|l, best| l > best)?;
    let at_min = lambda_min.powf(d);
    let at_max = lambda_max.powf(d);
    let w_min = vector_state(a, kmin, imin)?;
    let w_max = vector_state(a, kmax, imax)?;
    let (c_lower, c_upper, witness_lower, witness_upper) = if d >= 0.0 {
        (at_min, at_max, w_min, w_max)
    } else {
        (at_max, at_min, w_max, w_min)
    };
    Ok(EquivalenceConstants {
        alpha,
        beta,
        c_lower,
        c_upper,
        witness_lower,
        witness_upper,
    })
}

/// Constants relating `r_{a^gamma}` to `r_p` for the range projection `p` of
/// a possibly singular `a`: `lower = l'_min^gamma`, `upper = ||a||^gamma`,
/// where `l'_min` is the smallest eigenvalue above the rank tolerance.
/// The result reports `alpha = 0` (the projection) and `beta = gamma`.
pub fn compressed_equivalence_constants(a: &Element, gamma: f64) -> Result<EquivalenceConstants> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::BadExponents {
            alpha: 0.0,
            beta: gamma,
            reason: "gamma must be a positive real",
        });
    }
    let (_, lambda_max) = a.spectral_bounds()?;
    if lambda_max <= 0.0 {
        return Err(Error::ZeroElement);
    }
    let tau = a.rank_tolerance()?;
    let (kmin, imin, lmin) = a.locate_eigenvalue(|l, best| l > tau && (best <= tau || l < best))?;
    let (kmax, imax, _) = a.locate_eigenvalue(|l, best| l > best)?;
    Ok(EquivalenceConstants {
        alpha: 0.0,
        beta: gamma,
        c_lower: lmin.powf(gamma),
        c_upper: lambda_max.powf(gamma),
        witness_lower: vector_state(a, kmin, imin)?,
        witness_upper: vector_state(a, kmax, imax)?,
    })
}

/// Extremes of `r_{a^beta}(f) / r_{a^alpha}(f)` over a sample.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioBounds {
    /// NaN when no sample was usable.
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub samples: usize,
    /// Samples skipped because `r_{a^alpha}(f) <= RATIO_EXCLUSION_THRESHOLD`.
    pub excluded: usize,
}

struct PowerRoots {
    alpha_root: Element,
    beta_root: Element,
}

impl PowerRoots {
    fn new(a: &Element, alpha: f64, beta: f64) -> Result<Self> {
        Ok(Self {
            alpha_root: a.power(alpha / 2.0)?,
            beta_root: a.power(beta / 2.0)?,
        })
    }

    fn ratio(&self, f: &HermitianFunctional) -> Result<Option<f64>> {
        let den = f.compress(&self.alpha_root)?.norm();
        if den <= RATIO_EXCLUSION_THRESHOLD {
            return Ok(None);
        }
        Ok(Some(f.compress(&self.beta_root)?.norm() / den))
    }
}

fn reduce(ratios: impl IntoIterator<Item = Option<f64>>) -> RatioBounds {
    let mut out = RatioBounds {
        min_ratio: f64::NAN,
        max_ratio: f64::NAN,
        samples: 0,
        excluded: 0,
    };
    for r in ratios {
        match r {
            Some(r) => {
                if out.samples == 0 {
                    out.min_ratio = r;
                    out.max_ratio = r;
                } else {
                    out.min_ratio = out.min_ratio.min(r);
                    out.max_ratio = out.max_ratio.max(r);
                }
                out.samples += 1;
            }
            None => out.excluded += 1,
        }
    }
    out
}

/// Ratio extremes over an explicit list of functionals.
pub fn ratio_bounds_over(
    a: &Element,
    alpha: f64,
    beta: f64,
    functionals: &[HermitianFunctional],
) -> Result<RatioBounds> {
    let roots = PowerRoots::new(a, alpha, beta)?;
    let ratios = functionals
        .iter()
        .map(|f| roots.ratio(f))
        .collect::<Result<Vec<_>>>()?;
    Ok(reduce(ratios))
}

/// Monte Carlo extremes of `r_{a^beta}(f) / r_{a^alpha}(f)` over `trials`
/// seeded Gaussian functionals.
pub fn empirical_ratio_bounds(
    a: &Element,
    alpha: f64,
    beta: f64,
    trials: usize,
    seed: u64,
) -> Result<RatioBounds> {
    empirical_ratio_bounds_with(a, alpha, beta, trials, seed, &[])
}

/// As [`empirical_ratio_bounds`], with extra functionals (e.g. eigenvector
/// witnesses) appended to the random sample.
pub fn empirical_ratio_bounds_with(
    a: &Element,
    alpha: f64,
    beta: f64,
    trials: usize,
    seed: u64,
    extra: &[HermitianFunctional],
) -> Result<RatioBounds> {
    let roots = PowerRoots::new(a, alpha, beta)?;
    let structure = a.structure();
    // trial t always draws from its own stream, so the parallel map is
    // reproducible and the reduction runs in trial order
    let sampled = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, RATIO_STREAM, t as u64);
            roots.ratio(&random_functional(structure, &mut rng))
        })
        .collect::<Result<Vec<_>>>()?;
    let injected = extra
        .iter()
        .map(|f| roots.ratio(f))
        .collect::<Result<Vec<_>>>()?;
    Ok(reduce(sampled.into_iter().chain(injected)))
}
