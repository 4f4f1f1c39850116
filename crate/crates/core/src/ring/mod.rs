//! Exact arithmetic: rationals, sparse polynomials and rational functions
//! over indexed variables, plus the text grammar used by structure files.

mod parse;
mod poly;
mod rat;
mod rf;
mod scalar;
mod var;

pub use parse::{format_poly, format_rf, parse_expr, IndexExpr, ParseContext, Template};
pub use poly::{Monomial, Poly};
pub use rat::{format_rat, int, parse_rat, rat, rat_to_f64, sqrt_exact, Rat};
pub use rf::{rf_arith, rf_normalize, ArithOp, RationalFunction};
pub use scalar::Scalar;
pub use var::{Family, VarRef};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("denominator vanishes at the evaluation point")]
    Pole,
    #[error("no value assigned to {0}")]
    UnassignedVariable(VarRef),
    #[error("invalid family name `{0}`")]
    InvalidFamily(String),
    #[error("invalid rational `{0}`")]
    InvalidRational(String),
    #[error("exponent {0} out of range")]
    ExponentTooLarge(i64),
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown family `{name}` at position {pos}")]
    UnknownFamily { name: String, pos: usize },
    #[error("exponent at position {pos} is not an integer")]
    NonIntegerExponent { pos: usize },
}

/// Partial derivative `∂f/∂x`.
pub fn rf_partial(f: &RationalFunction, x: &VarRef) -> RationalFunction {
    f.partial(x)
}
