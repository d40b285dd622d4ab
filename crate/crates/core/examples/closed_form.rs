// r_a(f) through the closed form || a^{1/2} f a^{1/2} ||_1, on the
// anchor pair and on a two-block element read from disk.

use cstar_seminorms::seminorms::{r_closed_form, r_power};
use cstar_seminorms::{functional_norm, Element, HermitianFunctional};

fn main() -> cstar_seminorms::Result<()> {
    let a = Element::diagonal(&[4.0, 1.0])?;
    let f = HermitianFunctional::diagonal(&[1.0, -1.0])?;
    let r = r_closed_form(&a, &f)?;
    println!("r_a(f) for a = diag(4,1), f = diag(1,-1): {r}");
    assert_eq!(r, 5.0);

    // at the unit, r_1 is the dual norm
    let one = Element::identity(a.structure());
    assert_eq!(r_closed_form(&one, &f)?, functional_norm(&f));

    let a = Element::from_json_str(include_str!("data/two_blocks.json"))?;
    let f = HermitianFunctional::from_json_str(include_str!("data/two_blocks_functional.json"))?;
    for gamma in [0.5, 1.0, 2.0] {
        println!("r_(a^{gamma})(f) = {:.12}", r_power(&a, gamma, &f)?);
    }
    Ok(())
}
