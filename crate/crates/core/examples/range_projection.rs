// The range projection as the limit of a (eps + a)^{-1}, and the
// constants tying r_{a^gamma} to r_{rp(a)} for singular a.

use cstar_seminorms::seminorms::compressed_equivalence_constants;
use cstar_seminorms::verify::limit_error;
use cstar_seminorms::{Element, RangeMethod};

fn main() -> cstar_seminorms::Result<()> {
    let a = Element::diagonal(&[2.0, 0.0])?;
    let p = a.range_projection(RangeMethod::Spectral)?;
    println!("rp(diag(2,0)) = diag({}, {})", p.block(0)[(0, 0)].re, p.block(0)[(1, 1)].re);
    println!("{:>8} {:>14} {:>14}", "eps", "error", "eps/(eps+2)");
    for eps in [1e-2, 1e-4, 1e-6] {
        println!("{eps:>8.0e} {:>14.6e} {:>14.6e}", limit_error(&a, eps)?, eps / (eps + 2.0));
    }

    let a = Element::diagonal(&[4.0, 1.0, 0.0])?;
    let c = compressed_equivalence_constants(&a, 0.5)?;
    println!("diag(4,1,0), gamma 0.5: {} r_p <= r_(a^0.5) <= {} r_p", c.c_lower, c.c_upper);
    Ok(())
}
