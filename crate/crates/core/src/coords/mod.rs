//! Twisted polygons, cross-ratio coordinates and the Hill correspondence.
//!
//! Everything is generic over [`Field`], so the same code runs in exact
//! rational arithmetic (identities asserted with zero tolerance) and in `f64`.

mod hill;
mod linalg;
mod polygon;
mod theta;

pub use hill::{hill_from_b, hill_solve, polygon_from_hill, HillOperator};
pub use linalg::{cross3, det, mat_inverse, mat_mul, mat_vec, Mat, Vector};
pub use polygon::{b_from_polygon, random_polygon, xy_from_polygon, CoordKind, CoordVector, TwistedPolygon};
pub use theta::{
    numeric_bracket_check, representative_offset, theta_eval, theta_pair, theta_symbolic_line, window_bracket,
    window_element, window_labels, BracketCheck, Coordinate, WindowBracket,
};

use std::fmt::Debug;

use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::ring::{rat_to_f64, sqrt_exact, Rat, RingError, Scalar};
use crate::swapping::SwapError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoordError {
    #[error("cross ratio is undefined: a forbidden pair of points coincides")]
    DegenerateCrossRatio,
    #[error("polygon is not in general position: {0}")]
    DegeneratePolygon(String),
    #[error("the Hill operator is not unique for even period {0}")]
    NonUniqueHill(usize),
    #[error("alternating product of the coordinates is negative; no real branch")]
    NoRealBranch,
    #[error("alternating product is not the square of a rational")]
    NoRationalBranch,
    #[error("a pair determinant vanishes inside the evaluated element")]
    Pole,
    #[error("period {period} too small for dimension {n}")]
    InvalidPeriod { n: usize, period: usize },
    #[error("monodromy is singular")]
    SingularMonodromy,
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Swap(#[from] SwapError),
}

/// Scalars the geometry layer works over.
pub trait Field: Scalar + PartialEq + Debug + Send + Sync {
    fn from_i64(n: i64) -> Self;
    fn to_f64(&self) -> f64;
    /// Whether a determinant counts as zero against `scale`, the product of
    /// the norms of its rows.
    fn negligible(det: &Self, scale: f64) -> bool;
    fn sqrt(&self) -> Result<Self, CoordError>;
}

/// Relative tolerance for general-position tests in floating point.
pub const GENERAL_POSITION_TOL: f64 = 1e-9;

impl Field for Rat {
    fn from_i64(n: i64) -> Self {
        Rat::from_integer(n.into())
    }
    fn to_f64(&self) -> f64 {
        rat_to_f64(self)
    }
    fn negligible(det: &Self, _scale: f64) -> bool {
        Zero::is_zero(det)
    }
    fn sqrt(&self) -> Result<Self, CoordError> {
        if self.is_negative() {
            return Err(CoordError::NoRealBranch);
        }
        sqrt_exact(self).ok_or(CoordError::NoRationalBranch)
    }
}

impl Field for f64 {
    fn from_i64(n: i64) -> Self {
        n.to_f64().unwrap_or(f64::NAN)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn negligible(det: &Self, scale: f64) -> bool {
        det.abs() <= GENERAL_POSITION_TOL * scale
    }
    fn sqrt(&self) -> Result<Self, CoordError> {
        if *self < 0.0 {
            Err(CoordError::NoRealBranch)
        } else {
            Ok(f64::sqrt(*self))
        }
    }
}

fn norm<S: Field>(v: &[S]) -> f64 {
    v.iter().map(|x| x.to_f64().powi(2)).sum::<f64>().sqrt()
}

/// Whether the square matrix with rows `rows` is degenerate.
pub fn is_degenerate<S: Field>(rows: &[&[S]]) -> bool {
    let d = linalg::det_rows(rows);
    let scale: f64 = rows.iter().map(|r| norm(r)).product();
    S::negligible(&d, scale)
}

/// Cross ratio `[a, b, c, d] = det(a,c)·det(b,d) / (det(a,d)·det(b,c))` of
/// four homogeneous points on a projective line.
pub fn cross_ratio_proj<S: Field>(a: &[S], b: &[S], c: &[S], d: &[S]) -> Result<S, CoordError> {
    if is_degenerate(&[a, d]) || is_degenerate(&[b, c]) {
        return Err(CoordError::DegenerateCrossRatio);
    }
    let num = linalg::det2(a, c).mul(&linalg::det2(b, d));
    let den = linalg::det2(a, d).mul(&linalg::det2(b, c));
    Ok(num.mul(&den.inv().ok_or(CoordError::DegenerateCrossRatio)?))
}
