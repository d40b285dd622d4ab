//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::time::{Duration, Instant};

use cstar_seminorms::algebra::BlockStructure;
use cstar_seminorms::random::{random_functional, rng_from_seed};
use cstar_seminorms::seminorms::{
    empirical_ratio_bounds, equivalence_constants, faithfulness_check, r_closed_form, r_power,
    r_variational,
};
use cstar_seminorms::spectral::trace_norm;
use cstar_seminorms::verify::{
    blowup_study, check_closed_form, check_invertibility_theorem, check_power_inequality,
    default_corpus, default_dims, limit_error, DEFAULT_EXPONENT_PAIRS,
};
use cstar_seminorms::{cli, functional_norm, Element, HermitianFunctional};

type Outcome = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn oracle_equivalence() -> Outcome {
    let a = Element::diagonal(&[4.0, 1.0]).unwrap();
    let f = HermitianFunctional::diagonal(&[1.0, -1.0]).unwrap();
    let closed = r_closed_form(&a, &f).unwrap();
    let variational = r_variational(&a, &f, 1e-7).unwrap().value;
    if closed != 5.0 || (variational - 5.0).abs() > 1e-5 * 5.0 {
        return Err(format!("anchor: closed {closed}, variational {variational}"));
    }
    let dims = vec![
        vec![2],
        vec![3],
        vec![4],
        vec![1, 2],
        vec![2, 3],
        vec![8],
        vec![2, 6],
        vec![1, 4, 8],
    ];
    let start = Instant::now();
    let report = check_closed_form(200, &dims, 42).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(
        report.passed() && report.checks == 200 && elapsed < Duration::from_secs(60),
        format!(
            "anchor 5 both paths; {} pairs (blocks up to 8), {} mismatches beyond 1e-5, {:.1} s",
            report.checks,
            report.failures.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn unit_seminorm_dual_norm() -> Outcome {
    let shapes = [vec![1], vec![2], vec![3], vec![1, 2], vec![2, 3], vec![4, 1]];
    let mut rng = rng_from_seed(2);
    let mut worst_closed = 0.0f64;
    let mut worst_jordan = 0.0f64;
    for i in 0..100 {
        let s = BlockStructure::new(shapes[i % shapes.len()].clone()).unwrap();
        let f = random_functional(&s, &mut rng).scale(1.0 + i as f64 / 10.0);
        let one = Element::identity(&s);
        let trace: f64 = f.rep().iter().map(trace_norm).sum();
        worst_closed = worst_closed.max((r_closed_form(&one, &f).unwrap() - trace).abs());
        let (plus, minus) = f.jordan_decompose();
        let jordan = plus.pair(&one).unwrap() + minus.pair(&one).unwrap();
        let inf = r_variational(&one, &f, 1e-9).unwrap().value;
        worst_jordan = worst_jordan.max((inf - jordan).abs());
    }
    ensure(
        worst_closed <= 1e-10 && worst_jordan <= 1e-6,
        format!("100 functionals: |r_1(f) - ||f||| <= {worst_closed:.1e}, |inf - Jordan| <= {worst_jordan:.1e}"),
    )
}

fn power_inequality() -> Outcome {
    let report = check_power_inequality(500, &default_dims(4), &DEFAULT_EXPONENT_PAIRS, 3).map_err(|e| e.to_string())?;
    let violations = report.failures.iter().filter(|f| f.check_id == "power.inequality").count();
    ensure(
        report.passed(),
        format!(
            "500 trials x {} pairs: {violations} violations; {} failures overall",
            DEFAULT_EXPONENT_PAIRS.len(),
            report.failures.len()
        ),
    )
}

fn tight_constants() -> Outcome {
    let a = Element::diagonal(&[4.0, 1.0]).unwrap();
    let c = equivalence_constants(&a, 1.0, 2.0).unwrap();
    let ratio = |w: &HermitianFunctional| r_power(&a, 2.0, w).unwrap() / r_power(&a, 1.0, w).unwrap();
    let (lo, hi) = (ratio(&c.witness_lower), ratio(&c.witness_upper));
    let sample = empirical_ratio_bounds(&a, 1.0, 2.0, 500, 0).unwrap();
    ensure(
        (c.c_lower, c.c_upper) == (1.0, 4.0)
            && (lo - 1.0).abs() <= 1e-8
            && (hi - 4.0).abs() <= 4e-8
            && sample.samples == 500
            && sample.min_ratio >= 1.0
            && sample.max_ratio <= 4.0,
        format!(
            "constants ({}, {}); witnesses ({lo}, {hi}); 500 ratios in [{:.6}, {:.6}]",
            c.c_lower, c.c_upper, sample.min_ratio, sample.max_ratio
        ),
    )
}

fn invertibility_loop() -> Outcome {
    let corpus = default_corpus(5).unwrap();
    let singular = corpus.iter().filter(|a| !a.is_invertible()).count();
    let report = check_invertibility_theorem(&corpus, 1.0, 2.0, 500, 5).map_err(|e| e.to_string())?;
    ensure(
        corpus.len() >= 20 && 2 * singular >= corpus.len() && report.passed(),
        format!(
            "{} elements ({singular} singular): {} checks, {} failures",
            corpus.len(),
            report.checks,
            report.failures.len()
        ),
    )
}

fn faithfulness_witnesses() -> Outcome {
    let corpus = default_corpus(6).unwrap();
    let mut bad = Vec::new();
    let mut worst = 0.0f64;
    for (i, a) in corpus.iter().enumerate() {
        let check = faithfulness_check(a).unwrap();
        match (a.is_invertible(), check.witness) {
            (true, None) => {}
            (false, Some(w)) => {
                let r = r_closed_form(a, &w).unwrap();
                worst = worst.max(r);
                if !(w.is_positive() && (functional_norm(&w) - 1.0).abs() <= 1e-12 && r <= 1e-8) {
                    bad.push(i);
                }
            }
            _ => bad.push(i),
        }
    }
    ensure(
        bad.is_empty(),
        format!("{} elements, worst r_a(witness) {worst:.1e}, mismatched {bad:?}", corpus.len()),
    )
}

fn range_projection_limit() -> Outcome {
    let a = Element::diagonal(&[2.0, 0.0]).unwrap();
    let mut previous = f64::INFINITY;
    let mut worst = 0.0f64;
    let mut monotone = true;
    for eps in [1e-2, 1e-4, 1e-6] {
        let err = limit_error(&a, eps).unwrap();
        worst = worst.max((err - eps / (eps + 2.0)).abs());
        monotone &= err < previous;
        previous = err;
    }
    ensure(
        worst <= 1e-9 && monotone,
        format!("diag(2,0): max |err - eps/(eps+2)| = {worst:.1e}, monotone {monotone}"),
    )
}

fn blowup_family() -> Outcome {
    let report = blowup_study(&[1e-1, 1e-2, 1e-3]).map_err(|e| e.to_string())?;
    let worst = report
        .series
        .iter()
        .map(|r| (r.y - r.reference).abs() / r.reference)
        .fold(0.0, f64::max);
    ensure(
        report.passed() && worst <= 1e-9,
        format!("ratios {:?}, worst relative error {worst:.1e}", report.series.iter().map(|r| r.y).collect::<Vec<_>>()),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut runs = Vec::new();
    for i in 0..2 {
        let path = dir.path().join(format!("report{i}.json"));
        let args = ["cstar-seminorms", "verify", "--suite", "all", "--seed", "7", "--out", path.to_str().unwrap()];
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = cli::run(args, &mut out, &mut err);
        if code != 0 {
            return Err(format!("verify exited {code}: {}", String::from_utf8_lossy(&err)));
        }
        runs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    ensure(
        runs[0] == runs[1] && !runs[0].is_empty(),
        format!("two runs, {} bytes each, identical {}", runs[0].len(), runs[0] == runs[1]),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("oracle equivalence", oracle_equivalence),
        ("unit seminorm is the dual norm", unit_seminorm_dual_norm),
        ("power inequality", power_inequality),
        ("tight constants", tight_constants),
        ("invertibility loop", invertibility_loop),
        ("faithfulness witnesses", faithfulness_witnesses),
        ("range-projection limit", range_projection_limit),
        ("blow-up family", blowup_family),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (status, detail) = match run() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "criterion {}: {status} {name} ({:.1} s): {detail}",
            i + 1,
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
