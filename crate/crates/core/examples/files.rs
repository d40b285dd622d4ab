// Reading elements and functionals from the JSON file format, and the
// errors reported for malformed input.

use cstar_seminorms::seminorms::r_closed_form;
use cstar_seminorms::{Element, HermitianFunctional};

fn main() -> cstar_seminorms::Result<()> {
    let a = Element::from_json_str(include_str!("data/diag41.json"))?;
    let f = HermitianFunctional::from_json_str(include_str!("data/anchor_functional.json"))?;
    println!("structure {}, r_a(f) = {}", a.structure(), r_closed_form(&a, &f)?);

    let round_trip = Element::from_json_str(&a.to_json_string())?;
    assert_eq!(round_trip, a);

    let ragged = "{\"blocks\": [ {\"dim\": 2, \"re\": [[1, 0], [0]] } ]}";
    let broken = "{\"blocks\": [\n  {\"dim\": 1, \"re\": [[1]] },\n  oops\n]}";
    for bad in [ragged, broken] {
        println!("rejected element: {}", Element::from_json_str(bad).unwrap_err());
    }
    // elements may be arbitrary, functionals must be Hermitian
    let skew = "{\"blocks\": [ {\"dim\": 2, \"re\": [[1, 2], [0, 1]] } ]}";
    assert!(Element::from_json_str(skew).is_ok());
    println!("rejected functional: {}", HermitianFunctional::from_json_str(skew).unwrap_err());
    Ok(())
}
