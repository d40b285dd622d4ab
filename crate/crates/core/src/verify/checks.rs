//! Seeded checkers. Trial `t` of every checker draws its inputs from
//! streams keyed by `(seed, stream, t)`, so a failure can be replayed from
//! its recorded seed and trial index alone.

use rayon::prelude::*;

use crate::algebra::Element;
use crate::error::{Error, Result};
use crate::functionals::{functional_norm, HermitianFunctional};
use crate::random::{
    generate_positive, random_functional, trial_rng, trial_seed, GeneratorSpec, SpectrumSpec,
};
use crate::seminorms::{
    compressed_equivalence_constants, decide_invertibility, decide_invertibility_with_witnesses,
    empirical_ratio_bounds, equivalence_constants, faithfulness_check, r_closed_form, r_power,
    r_variational, ratio_bounds_over,
};
use crate::spectral::{operator_norm, RangeMethod};

use super::report::{inputs_digest, ConstantsRow, Failure, SeriesRow, VerificationReport};

pub const CLOSED_FORM_RELATIVE_TOL: f64 = 1e-5;
pub const VARIATIONAL_TOL: f64 = 1e-7;
pub const POWER_SLACK: f64 = 1e-10;
pub const WITNESS_RELATIVE_TOL: f64 = 1e-8;
pub const BOUNDS_RELATIVE_TOL: f64 = 1e-8;
pub const KERNEL_WITNESS_TOL: f64 = 1e-8;
pub const BLOWUP_RELATIVE_TOL: f64 = 1e-9;
pub const RP_RATE_TOL: f64 = 1e-9;

/// Exponent grid for the two-exponent equivalence statement.
pub const GAMMA_GRID: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 3.0];
const COMPRESSED_GAMMAS: [f64; 3] = [0.5, 1.0, 2.0];

const ELEMENT_STREAM: u64 = 0x454c_454d;
const FUNCTIONAL_STREAM: u64 = 0x4655_4e43;
const SCALE_STREAM: u64 = 0x5343_414c;
const CONSTANTS_STREAM: u64 = 0x434f_4e53;
const CORPUS_STREAM: u64 = 0x434f_5250;
const DECIDE_STREAM: u64 = 0x4445_4349;

/// A seminorm evaluator with the signature of [`r_closed_form`]. Checkers
/// take one so that deliberately broken variants can be injected.
pub type SeminormFn = fn(&Element, &HermitianFunctional) -> Result<f64>;

fn failure(check_id: &str, seed: u64, trial: u64, digest: String, lhs: f64, rhs: f64, slack: f64) -> Failure {
    Failure {
        check_id: check_id.to_string(),
        seed,
        trial,
        inputs_digest: digest,
        lhs,
        rhs,
        slack,
    }
}

fn digest_of(a: &Element, f: Option<&HermitianFunctional>) -> String {
    match f {
        Some(f) => inputs_digest(&[&a.to_json_string(), &f.to_json_string()]),
        None => inputs_digest(&[&a.to_json_string()]),
    }
}

fn check_dims(dims: &[Vec<usize>]) -> Result<()> {
    if dims.is_empty() || dims.iter().any(|d| d.is_empty() || d.contains(&0)) {
        return Err(Error::BadSpec(format!("dimension grid must be nonempty lists of positive sizes, got {dims:?}")));
    }
    Ok(())
}

/// The random pair `(a, f)` used by trial `trial`. Every fourth trial has
/// a one-dimensional kernel; `f` has dual norm between 0.1 and 100.
pub fn trial_inputs(dims: &[Vec<usize>], seed: u64, trial: u64) -> Result<(Element, HermitianFunctional)> {
    check_dims(dims)?;
    let block_dims = dims[trial as usize % dims.len()].clone();
    let total: usize = block_dims.iter().sum();
    let spectrum = if trial % 4 == 3 && total > 1 {
        SpectrumSpec::WithKernel { rank_deficiency: 1 }
    } else {
        SpectrumSpec::Uniform { lo: 0.0, hi: 2.0 }
    };
    let a = generate_positive(&GeneratorSpec::new(
        block_dims,
        spectrum,
        trial_seed(seed, ELEMENT_STREAM, trial),
    ))?;
    let f = random_functional(a.structure(), &mut trial_rng(seed, FUNCTIONAL_STREAM, trial));
    let exponent = rand::Rng::random_range(&mut trial_rng(seed, SCALE_STREAM, trial), -1.0..2.0);
    Ok((a, f.scale(10f64.powf(exponent))))
}

/// Closed form against the variational infimum on one trial:
/// `(closed, variational)`.
pub fn closed_form_trial(dims: &[Vec<usize>], seed: u64, trial: u64, closed: SeminormFn) -> Result<(f64, f64)> {
    let (a, f) = trial_inputs(dims, seed, trial)?;
    Ok((closed(&a, &f)?, r_variational(&a, &f, VARIATIONAL_TOL)?.value))
}

pub fn check_closed_form(trials: usize, dims: &[Vec<usize>], seed: u64) -> Result<VerificationReport> {
    check_closed_form_with(trials, dims, seed, r_closed_form)
}

/// [`check_closed_form`] with the closed-form side replaced by `closed`.
pub fn check_closed_form_with(
    trials: usize,
    dims: &[Vec<usize>],
    seed: u64,
    closed: SeminormFn,
) -> Result<VerificationReport> {
    check_dims(dims)?;
    let mut report = VerificationReport::new("closed", seed, trials);
    let outcomes: Vec<Option<Failure>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let (a, f) = trial_inputs(dims, seed, t)?;
            let digest = || digest_of(&a, Some(&f));
            let lhs = closed(&a, &f)?;
            match r_variational(&a, &f, VARIATIONAL_TOL) {
                Ok(sol) => {
                    let slack = CLOSED_FORM_RELATIVE_TOL * lhs.max(1.0);
                    Ok(((sol.value - lhs).abs() > slack)
                        .then(|| failure("closed.mismatch", seed, t, digest(), lhs, sol.value, slack)))
                }
                Err(Error::NoConvergence { .. }) => Ok(Some(failure(
                    "closed.no_convergence",
                    seed,
                    t,
                    digest(),
                    lhs,
                    f64::NAN,
                    f64::NAN,
                ))),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    report.checks = trials;
    report.failures = outcomes.into_iter().flatten().collect();
    Ok(report)
}

fn check_pairs(grid: &[(f64, f64)]) -> Result<()> {
    for &(alpha, beta) in grid {
        if !(alpha > 0.0 && alpha <= beta && beta.is_finite()) {
            return Err(Error::BadExponents {
                alpha,
                beta,
                reason: "grid pairs need 0 < alpha <= beta",
            });
        }
    }
    Ok(())
}

/// `r_{a^beta}(f) <= ||a^(beta - alpha)|| r_{a^alpha}(f)`: the left and
/// right sides for one trial, in grid order.
pub fn power_trial(dims: &[Vec<usize>], grid: &[(f64, f64)], seed: u64, trial: u64) -> Result<Vec<(f64, f64)>> {
    let (a, f) = trial_inputs(dims, seed, trial)?;
    grid.iter()
        .map(|&(alpha, beta)| {
            let lhs = r_power(&a, beta, &f)?;
            // a^0 is the unit even for singular a
            let gap = if alpha == beta { 1.0 } else { a.power(beta - alpha)?.norm() };
            Ok((lhs, gap * r_power(&a, alpha, &f)?))
        })
        .collect()
}

/// Checks the power inequality on every trial and pair, then tabulates
/// analytic against empirical constants for each pair and its reverse on
/// a seeded invertible element.
pub fn check_power_inequality(
    trials: usize,
    dims: &[Vec<usize>],
    grid: &[(f64, f64)],
    seed: u64,
) -> Result<VerificationReport> {
    check_dims(dims)?;
    check_pairs(grid)?;
    let mut report = VerificationReport::new("power", seed, trials);
    let per_trial = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let sides = power_trial(dims, grid, seed, t)?;
            let mut out = Vec::new();
            for (lhs, rhs) in sides {
                if lhs > rhs + POWER_SLACK {
                    let (a, f) = trial_inputs(dims, seed, t)?;
                    out.push(failure("power.inequality", seed, t, digest_of(&a, Some(&f)), lhs, rhs, POWER_SLACK));
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    report.checks += trials * grid.len();
    report.failures.extend(per_trial.into_iter().flatten());

    for (i, &(alpha, beta)) in grid.iter().enumerate() {
        let a = constants_element(dims, seed, i as u64)?;
        for (al, be) in [(alpha, beta), (beta, alpha)] {
            constants_row(&mut report, &a, al, be, trials, seed, i as u64)?;
        }
    }

    let a = constants_element(dims, seed, grid.len() as u64)?;
    for &gamma in &GAMMA_GRID {
        let c = equivalence_constants(&a, 1.0, gamma)?;
        let attained = ratio_bounds_over(&a, 1.0, gamma, &[c.witness_lower.clone(), c.witness_upper.clone()])?;
        for (got, want) in [(attained.min_ratio, c.c_lower), (attained.max_ratio, c.c_upper)] {
            report.checks += 1;
            let slack = WITNESS_RELATIVE_TOL * want;
            if !((got - want).abs() <= slack) {
                report.failures.push(failure("power.gamma_witness", seed, grid.len() as u64, digest_of(&a, None), got, want, slack));
            }
        }
    }
    Ok(report)
}

fn constants_element(dims: &[Vec<usize>], seed: u64, index: u64) -> Result<Element> {
    generate_positive(&GeneratorSpec::new(
        dims[index as usize % dims.len()].clone(),
        SpectrumSpec::Uniform { lo: 0.25, hi: 2.0 },
        trial_seed(seed, CONSTANTS_STREAM, index),
    ))
}

fn constants_row(
    report: &mut VerificationReport,
    a: &Element,
    alpha: f64,
    beta: f64,
    trials: usize,
    seed: u64,
    index: u64,
) -> Result<()> {
    let c = equivalence_constants(a, alpha, beta)?;
    let sample = empirical_ratio_bounds(a, alpha, beta, trials, trial_seed(seed, CONSTANTS_STREAM, index))?;
    let attained = ratio_bounds_over(a, alpha, beta, &[c.witness_lower.clone(), c.witness_upper.clone()])?;
    let digest = digest_of(a, None);
    let mut check = |id: &str, ok: bool, lhs: f64, rhs: f64, slack: f64| {
        report.checks += 1;
        if !ok {
            report.failures.push(failure(id, seed, index, digest.clone(), lhs, rhs, slack));
        }
    };
    if sample.samples > 0 {
        let lo = c.c_lower * (1.0 - POWER_SLACK);
        let hi = c.c_upper * (1.0 + POWER_SLACK);
        check("power.constants_lower", sample.min_ratio >= lo, sample.min_ratio, c.c_lower, POWER_SLACK);
        check("power.constants_upper", sample.max_ratio <= hi, sample.max_ratio, c.c_upper, POWER_SLACK);
    }
    for (got, want) in [(attained.min_ratio, c.c_lower), (attained.max_ratio, c.c_upper)] {
        let slack = WITNESS_RELATIVE_TOL * want;
        check("power.witness", (got - want).abs() <= slack, got, want, slack);
    }
    report.constants_table.push(ConstantsRow {
        alpha,
        beta,
        analytic_c: c.c_lower,
        analytic_upper: c.c_upper,
        empirical_min: sample.min_ratio,
        empirical_max: sample.max_ratio,
    });
    Ok(())
}

/// Corpus of at least 20 elements, about half singular by construction,
/// including `diag(4,1)`, `diag(2,0)`, the identity, and blocks `([0], 1_2)`.
pub fn default_corpus(seed: u64) -> Result<Vec<Element>> {
    let mut corpus = vec![
        Element::diagonal(&[4.0, 1.0])?,
        Element::diagonal(&[2.0, 0.0])?,
        Element::identity(&crate::algebra::BlockStructure::new(vec![2])?),
        Element::block_diagonal(&[&[0.0], &[1.0, 1.0]])?,
        Element::block_diagonal(&[&[3.0], &[1.0, 2.0]])?,
        generate_positive(&GeneratorSpec::new(
            vec![4],
            SpectrumSpec::WithKernel { rank_deficiency: 1 },
            trial_seed(seed, CORPUS_STREAM, 0),
        ))?,
    ];
    let shapes: [&[usize]; 4] = [&[2], &[3], &[1, 2], &[2, 3]];
    for i in 0..16u64 {
        let dims = shapes[i as usize % shapes.len()].to_vec();
        let spectrum = if i % 2 == 0 {
            SpectrumSpec::Uniform { lo: 0.2, hi: 2.0 }
        } else {
            SpectrumSpec::WithKernel {
                rank_deficiency: 1 + (i as usize / 2) % 2,
            }
        };
        corpus.push(generate_positive(&GeneratorSpec::new(
            dims,
            spectrum,
            trial_seed(seed, CORPUS_STREAM, i + 1),
        ))?);
    }
    Ok(corpus)
}

/// For each corpus element: spectral ground truth, the faithfulness test
/// and the ratio-based decision must agree; singular elements must carry a
/// kernel witness; reconstructed bounds must bracket the spectrum and,
/// with the eigenvector witnesses injected, reproduce it.
pub fn check_invertibility_theorem(
    corpus: &[Element],
    alpha: f64,
    beta: f64,
    trials: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("invert", seed, trials);
    let results = corpus
        .par_iter()
        .enumerate()
        .map(|(i, a)| invertibility_case(a, alpha, beta, trials, seed, i as u64))
        .collect::<Result<Vec<_>>>()?;
    for (checks, failures, rows) in results {
        report.checks += checks;
        report.failures.extend(failures);
        report.series.extend(rows);
    }
    Ok(report)
}

type CaseOutcome = (usize, Vec<Failure>, Vec<SeriesRow>);

fn invertibility_case(a: &Element, alpha: f64, beta: f64, trials: usize, seed: u64, index: u64) -> Result<CaseOutcome> {
    let digest = digest_of(a, None);
    let mut checks = 0;
    let mut failures = Vec::new();
    let mut check = |id: &str, ok: bool, lhs: f64, rhs: f64, slack: f64| {
        checks += 1;
        if !ok {
            failures.push(failure(id, seed, index, digest.clone(), lhs, rhs, slack));
        }
    };
    let flag = |b: bool| if b { 1.0 } else { 0.0 };

    let truth = a.is_invertible();
    let (lambda_min, lambda_max) = a.spectral_bounds()?;
    let faith = faithfulness_check(a)?;
    let decide_seed = trial_seed(seed, DECIDE_STREAM, index);
    let decision = decide_invertibility(a, alpha, beta, trials.max(1), decide_seed)?;
    check("invert.faithful", faith.faithful == truth, flag(faith.faithful), flag(truth), 0.0);
    check("invert.decision", decision.invertible == truth, flag(decision.invertible), flag(truth), 0.0);

    match &faith.witness {
        Some(w) => {
            let r = r_closed_form(a, w)?;
            let norm = functional_norm(w);
            check("invert.witness_vanishes", r <= KERNEL_WITNESS_TOL, r, 0.0, KERNEL_WITNESS_TOL);
            check("invert.witness_unit", (norm - 1.0).abs() <= 1e-12 && w.is_positive(), norm, 1.0, 1e-12);
        }
        None => check("invert.witness_present", truth, 0.0, flag(!truth), 0.0),
    }

    let mut rows = Vec::new();
    let (recon_lo, recon_hi) = decision.reconstructed_bounds.unwrap_or((f64::NAN, f64::NAN));
    if truth {
        if let Some((lo, hi)) = decision.reconstructed_bounds {
            let floor = lambda_min * (1.0 - BOUNDS_RELATIVE_TOL);
            let ceil = lambda_max * (1.0 + BOUNDS_RELATIVE_TOL);
            check("invert.bounds_lower", lo >= floor, lo, lambda_min, BOUNDS_RELATIVE_TOL);
            check("invert.bounds_upper", hi <= ceil, hi, lambda_max, BOUNDS_RELATIVE_TOL);
        }
        let c = equivalence_constants(a, alpha, beta)?;
        let exact = decide_invertibility_with_witnesses(
            a,
            alpha,
            beta,
            trials.max(1),
            decide_seed,
            &[c.witness_lower, c.witness_upper],
        )?;
        if let Some((lo, hi)) = exact.reconstructed_bounds {
            let tol_lo = BOUNDS_RELATIVE_TOL * lambda_min;
            let tol_hi = BOUNDS_RELATIVE_TOL * lambda_max;
            check("invert.attained_lower", (lo - lambda_min).abs() <= tol_lo, lo, lambda_min, tol_lo);
            check("invert.attained_upper", (hi - lambda_max).abs() <= tol_hi, hi, lambda_max, tol_hi);
        }
    }
    rows.push(SeriesRow {
        series: "invert.lower".into(),
        x: index as f64,
        y: recon_lo,
        reference: lambda_min,
    });
    rows.push(SeriesRow {
        series: "invert.upper".into(),
        x: index as f64,
        y: recon_hi,
        reference: lambda_max,
    });
    Ok((checks, failures, rows))
}

fn check_decreasing(epsilons: &[f64]) -> Result<()> {
    if epsilons.is_empty() {
        return Err(Error::BadSpec("epsilon list is empty".into()));
    }
    if epsilons.iter().any(|e| !(e.is_finite() && *e > 0.0)) || epsilons.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::BadSpec(format!("epsilons must be positive and strictly decreasing, got {epsilons:?}")));
    }
    Ok(())
}

/// `a_eps = diag(1, eps)` with the witness `f = rank_one(e_2)`: the ratio
/// `||f|| / r_{a_eps}(f)` is `1/eps`, so no uniform constant survives
/// `eps -> 0`.
pub fn blowup_study(epsilons: &[f64]) -> Result<VerificationReport> {
    check_decreasing(epsilons)?;
    let mut report = VerificationReport::new("blowup", 0, epsilons.len());
    let witness = HermitianFunctional::diagonal(&[0.0, 1.0])?;
    let mut previous = 0.0;
    for (i, &eps) in epsilons.iter().enumerate() {
        let a = Element::diagonal(&[1.0, eps])?;
        let ratio = functional_norm(&witness) / r_closed_form(&a, &witness)?;
        let want = 1.0 / eps;
        let slack = BLOWUP_RELATIVE_TOL * want;
        let digest = digest_of(&a, Some(&witness));
        report.checks += 2;
        if !((ratio - want).abs() <= slack) {
            report.failures.push(failure("blowup.ratio", 0, i as u64, digest.clone(), ratio, want, slack));
        }
        if !(ratio > previous) {
            report.failures.push(failure("blowup.monotone", 0, i as u64, digest, ratio, previous, 0.0));
        }
        previous = ratio;
        report.series.push(SeriesRow {
            series: "blowup.ratio".into(),
            x: eps,
            y: ratio,
            reference: want,
        });
    }
    Ok(report)
}

/// Elements for the range-projection study: `diag(2,0)`, a seeded
/// invertible element, the zero element, and a seeded element with a
/// two-dimensional kernel.
pub fn default_rp_elements(seed: u64) -> Result<Vec<Element>> {
    Ok(vec![
        Element::diagonal(&[2.0, 0.0])?,
        generate_positive(&GeneratorSpec::new(
            vec![3],
            SpectrumSpec::Uniform { lo: 0.5, hi: 2.0 },
            trial_seed(seed, CORPUS_STREAM, 100),
        ))?,
        Element::diagonal(&[0.0, 0.0])?,
        generate_positive(&GeneratorSpec::new(
            vec![2, 3],
            SpectrumSpec::WithKernel { rank_deficiency: 2 },
            trial_seed(seed, CORPUS_STREAM, 101),
        ))?,
    ])
}

/// Operator-norm distance from `a (eps + a)^{-1}` to `rp(a)`.
pub fn limit_error(a: &Element, epsilon: f64) -> Result<f64> {
    let p = a.range_projection(RangeMethod::Spectral)?;
    let q = a.range_projection(RangeMethod::Limit { epsilon })?;
    Ok(p.blocks()
        .iter()
        .zip(q.blocks())
        .map(|(pk, qk)| operator_norm(&(pk - qk)))
        .fold(0.0, f64::max))
}

/// Smallest eigenvalue above the rank tolerance, or `None` for `a = 0`.
fn smallest_nonzero(a: &Element) -> Result<Option<f64>> {
    let tau = a.rank_tolerance()?;
    let mut best: Option<f64> = None;
    for d in a.positive_decompositions()? {
        for &l in &d.eigenvalues {
            if l > tau {
                best = Some(best.map_or(l, |b: f64| b.min(l)));
            }
        }
    }
    Ok(best)
}

/// The limit-method error against the predicted `eps / (eps + l'_min)`,
/// its monotone decay, and the constants relating `r_{a^gamma}` to
/// `r_{rp(a)}` on `trials` random functionals per element.
pub fn check_range_projection_limit(
    elements: &[Element],
    epsilons: &[f64],
    trials: usize,
    seed: u64,
) -> Result<VerificationReport> {
    check_decreasing(epsilons)?;
    let mut report = VerificationReport::new("rp", seed, trials);
    for (i, a) in elements.iter().enumerate() {
        let index = i as u64;
        let digest = digest_of(a, None);
        let lambda = smallest_nonzero(a)?;
        let mut previous = f64::INFINITY;
        for &eps in epsilons {
            let err = limit_error(a, eps)?;
            let predicted = lambda.map_or(0.0, |l| eps / (eps + l));
            report.checks += 2;
            if !((err - predicted).abs() <= RP_RATE_TOL) {
                report.failures.push(failure("rp.rate", seed, index, digest.clone(), err, predicted, RP_RATE_TOL));
            }
            if !(err <= previous) {
                report.failures.push(failure("rp.monotone", seed, index, digest.clone(), err, previous, 0.0));
            }
            previous = err;
            report.series.push(SeriesRow {
                series: format!("rp.{i}"),
                x: eps,
                y: err,
                reference: predicted,
            });
        }

        if lambda.is_none() {
            report.checks += 1;
            if !matches!(compressed_equivalence_constants(a, 1.0), Err(Error::ZeroElement)) {
                report.failures.push(failure("rp.zero_element", seed, index, digest.clone(), 0.0, 0.0, 0.0));
            }
            continue;
        }
        let p = a.range_projection(RangeMethod::Spectral)?;
        for &gamma in &COMPRESSED_GAMMAS {
            let c = compressed_equivalence_constants(a, gamma)?;
            let rows = (0..trials as u64)
                .into_par_iter()
                .map(|t| {
                    let f = random_functional(a.structure(), &mut trial_rng(seed, FUNCTIONAL_STREAM ^ index, t));
                    Ok((t, r_closed_form(&p, &f)?, r_power(a, gamma, &f)?))
                })
                .collect::<Result<Vec<_>>>()?;
            let mut lo = f64::INFINITY;
            let mut hi = 0.0f64;
            for (t, rp, ra) in rows {
                let slack = POWER_SLACK * ra.max(1.0);
                report.checks += 2;
                if c.c_lower * rp > ra + slack {
                    report.failures.push(failure("rp.compressed_lower", seed, t, digest.clone(), c.c_lower * rp, ra, slack));
                }
                if ra > c.c_upper * rp + slack {
                    report.failures.push(failure("rp.compressed_upper", seed, t, digest.clone(), ra, c.c_upper * rp, slack));
                }
                if rp > 0.0 {
                    lo = lo.min(ra / rp);
                    hi = hi.max(ra / rp);
                }
            }
            report.constants_table.push(ConstantsRow {
                alpha: 0.0,
                beta: gamma,
                analytic_c: c.c_lower,
                analytic_upper: c.c_upper,
                empirical_min: if lo.is_finite() { lo } else { f64::NAN },
                empirical_max: if lo.is_finite() { hi } else { f64::NAN },
            });
        }
    }
    Ok(report)
}
