//! Annular Rasmussen invariants `d_t` of braid closures, computed from the
//! annular Khovanov-Lee complex with exact rational arithmetic.

pub mod braid;
pub mod cli;
pub mod filtgrade;
pub mod invariants;
pub mod leecomplex;
pub mod linalg;
pub mod scalar;
pub mod statecube;

/// Exact rationals used for chain coefficients and for `t`.
pub type Rational = num_rational::BigRational;
