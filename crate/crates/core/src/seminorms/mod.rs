//! The seminorms `r_a(f) = inf { f1(a) + f2(a) : f = f1 - f2, f1, f2 >= 0 }`
//! attached to a positive element `a`.
//!
//! Two independent routes are provided: the closed form
//! `r_a(f) = || a^{1/2} f a^{1/2} ||` ([`r_closed_form`]) and a direct
//! minimization over decompositions ([`r_variational`]). On top of them sit
//! the norm-equivalence constants between `r_{a^alpha}` and `r_{a^beta}`,
//! the faithfulness test, and the invertibility decision.

mod decide;
mod equivalence;
mod variational;

pub use decide::{
    decide_invertibility, decide_invertibility_with_witnesses, faithfulness_check, Faithfulness,
    InvertibilityDecision,
};
pub use equivalence::{
    compressed_equivalence_constants, empirical_ratio_bounds, empirical_ratio_bounds_with,
    equivalence_constants, ratio_bounds_over, EquivalenceConstants, RatioBounds,
    RATIO_EXCLUSION_THRESHOLD,
};
pub use variational::{
    r_variational, r_variational_with, DecompositionSolution, Solver, VariationalOptions,
};

use crate::algebra::Element;
use crate::error::Result;
use crate::functionals::HermitianFunctional;

/// `r_a(f) = || a^{1/2} F a^{1/2} ||_1`.
pub fn r_closed_form(a: &Element, f: &HermitianFunctional) -> Result<f64> {
    r_power(a, 1.0, f)
}

/// `r_{a^gamma}(f)`, computed through `a^{gamma/2}` without forming
/// `a^gamma` first.
pub fn r_power(a: &Element, gamma: f64, f: &HermitianFunctional) -> Result<f64> {
    f.structure().ensure_same(a.structure())?;
    let root = a.power(gamma / 2.0)?;
    Ok(f.compress(&root)?.norm())
}
