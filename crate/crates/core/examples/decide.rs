// Invertibility decided from the seminorms alone, checked against the
// spectrum.

use cstar_seminorms::seminorms::{decide_invertibility, faithfulness_check, r_closed_form};
use cstar_seminorms::Element;

fn main() -> cstar_seminorms::Result<()> {
    let cases = [
        ("diag(4,1)", Element::diagonal(&[4.0, 1.0])?),
        ("diag(2,0)", Element::diagonal(&[2.0, 0.0])?),
        ("[0] + 1_2", Element::block_diagonal(&[&[0.0], &[1.0, 1.0]])?),
        ("diag(3,0.25,1)", Element::diagonal(&[3.0, 0.25, 1.0])?),
    ];
    for (name, a) in cases {
        let d = decide_invertibility(&a, 1.0, 2.0, 500, 0)?;
        let verdict = if d.invertible { "invertible" } else { "not invertible" };
        println!("{name}: {verdict} (spectrum in [{}, {}])", d.spectral_bounds.0, d.spectral_bounds.1);
        if let Some((lo, hi)) = d.reconstructed_bounds {
            println!("  reconstructed from ratios: [{lo:.6}, {hi:.6}]");
        }
        if let Some(w) = faithfulness_check(&a)?.witness {
            println!("  kernel witness: r_a(w) = {}", r_closed_form(&a, &w)?);
        }
        assert_eq!(d.invertible, a.is_invertible());
    }
    Ok(())
}
