//! L1-type seminorms `r_a` of positive elements in finite-dimensional
//! C*-algebras `M_{n_1} (+) ... (+) M_{n_k}`.
//!
//! For a positive element `a` and a Hermitian functional `f`,
//!
//! ```text
//! r_a(f) = inf { f1(a) + f2(a) : f = f1 - f2, f1, f2 positive } = || a^{1/2} f a^{1/2} ||
//! ```
//!
//! The crate computes `r_a` both ways, derives the equivalence constants
//! between `r_{a^alpha}` and `r_{a^beta}`, and decides whether `a` is
//! invertible from those constants. The [`verify`] module turns each of
//! these facts into a seeded randomized checker with JSON reports.
//!
//! ```
//! use cstar_seminorms::{Element, HermitianFunctional, seminorms};
//!
//! let a = Element::diagonal(&[4.0, 1.0]).unwrap();
//! let f = HermitianFunctional::diagonal(&[1.0, -1.0]).unwrap();
//! assert_eq!(seminorms::r_closed_form(&a, &f).unwrap(), 5.0);
//! ```

pub mod algebra;
pub mod cli;
pub mod error;
pub mod functionals;
pub mod random;
pub mod seminorms;
pub mod spectral;
pub mod verify;

pub use algebra::{BlockStructure, Element};
pub use error::{Error, Result};
pub use functionals::{functional_norm, HermitianFunctional};
pub use spectral::{ComplexMatrix, RangeMethod, SpectralDecomposition};
