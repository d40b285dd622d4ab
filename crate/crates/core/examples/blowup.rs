// a_eps = diag(1, eps): the ratio ||f|| / r_{a_eps}(f) on the witness
// rank_one(e_2) is 1/eps, so no single constant works as eps -> 0.

use cstar_seminorms::verify::blowup_study;

fn main() -> cstar_seminorms::Result<()> {
    let report = blowup_study(&[1.0, 1e-1, 1e-2, 1e-3, 1e-6])?;
    println!("{:>8} {:>14} {:>14}", "eps", "ratio", "1/eps");
    for row in &report.series {
        println!("{:>8.0e} {:>14.6} {:>14.6}", row.x, row.y, row.reference);
    }
    assert!(report.passed());
    Ok(())
}
