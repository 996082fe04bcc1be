//! Weight-graded truncations of the Čech complex computing `H^j_I(R)` for the
//! ideal `I` of 2x2 minors of a generic 2x3 matrix, over ℤ, ℚ and 𝔽_p, plus a
//! numerical verifier for periods over a compact cycle in the complement of
//! `f1·f2·f3 = 0`.

pub mod cech;
pub mod cli;
pub mod cohomology;
pub mod error;
pub mod linalg;
pub mod polyring;
pub mod residue;
pub mod weights;

pub use error::{Error, Result};

/// Storage type for exact entries in every coefficient domain.
pub type Integer = num_bigint::BigInt;
/// Solutions of linear systems over ℚ.
pub type Rational = num_rational::BigRational;
pub type Complex64 = num_complex::Complex<f64>;
pub type CycleParams64 = residue::CycleParams<f64>;
pub type Integral64 = residue::Integral<f64>;
pub type HomotopyReport64 = residue::HomotopyReport<f64>;
