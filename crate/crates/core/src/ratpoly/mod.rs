//! Exact rational arithmetic and sparse bivariate polynomials.
//!
//! Every polynomial that appears in a construction (the circles, the
//! auxiliary products, the field components and the inverse integrating
//! factor) lives here with exact `BigRational` coefficients. Floats only
//! appear at the evaluation boundary in [`eval`].

pub mod eval;
pub mod poly;
pub mod rational;

pub use eval::{CompiledPoly, DoubleDouble};
pub use poly::{BivariatePolynomial, Monomial, Poly};
pub use rational::{format_fraction, format_short, int, parse_rational, rat, rationalize, to_f64, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("vanishing order of the zero polynomial is undefined")]
    ZeroPolynomialOrder,
    #[error("vanishing order requires a nonconstant factor")]
    ConstantFactor,
    #[error("cannot parse rational {0:?}")]
    Parse(String),
}
