// Equivalence constants between r_{a^alpha} and r_{a^beta}: the analytic
// pair, the eigenvector witnesses attaining it, and a Monte Carlo sample.

use cstar_seminorms::seminorms::{empirical_ratio_bounds, equivalence_constants, r_power};
use cstar_seminorms::Element;

fn main() -> cstar_seminorms::Result<()> {
    let a = Element::diagonal(&[4.0, 1.0])?;
    for (alpha, beta) in [(1.0, 2.0), (2.0, 1.0), (0.5, 3.0)] {
        let c = equivalence_constants(&a, alpha, beta)?;
        let ratio = |w| -> cstar_seminorms::Result<f64> { Ok(r_power(&a, beta, w)? / r_power(&a, alpha, w)?) };
        let sample = empirical_ratio_bounds(&a, alpha, beta, 500, 0)?;
        println!("alpha {alpha} beta {beta}");
        println!("  analytic  [{}, {}]", c.c_lower, c.c_upper);
        println!(
            "  witnesses [{}, {}]",
            ratio(&c.witness_lower)?,
            ratio(&c.witness_upper)?
        );
        println!("  sampled   [{:.6}, {:.6}]", sample.min_ratio, sample.max_ratio);
    }
    Ok(())
}
