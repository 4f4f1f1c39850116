//! Arbitrary-precision rationals.
//!
//! `num_rational::BigRational` already keeps `gcd(|num|, den) = 1` with a
//! positive denominator, so it is used directly; this module only adds the
//! `"num/den"` text form used by the JSON files.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::RingError;

pub type Rat = BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parses `"7"`, `"-3/4"`, `" 10 / -6 "`.
pub fn parse_rat(text: &str) -> Result<Rat, RingError> {
    let bad = || RingError::InvalidRational(text.to_string());
    let (n, d) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text.trim(), "1"),
    };
    let num: BigInt = n.parse().map_err(|_| bad())?;
    let den: BigInt = d.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(RingError::DivisionByZero);
    }
    Ok(Rat::new(num, den))
}

pub fn format_rat(q: &Rat) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn rat_to_f64(q: &Rat) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Huge numerator and denominator: scale both down before dividing.
        let shift = q.numer().bits().max(q.denom().bits()).saturating_sub(1000);
        let n = (q.numer() >> shift).to_f64().unwrap_or(f64::NAN);
        let d = (q.denom() >> shift).to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Exact square root of a nonnegative rational, if it is a perfect square.
pub fn sqrt_exact(q: &Rat) -> Option<Rat> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(Rat::new(n, d))
    } else {
        None
    }
}

/// Integer content helper: gcd of numerators over lcm of denominators.
pub fn rat_gcd(a: &Rat, b: &Rat) -> Rat {
    use num_integer::Integer;
    if a.is_zero() {
        return b.abs();
    }
    if b.is_zero() {
        return a.abs();
    }
    Rat::new(a.numer().gcd(b.numer()), a.denom().lcm(b.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rat("10/-6").unwrap(), rat(-5, 3));
        assert_eq!(format_rat(&rat(-5, 3)), "-5/3");
        assert_eq!(format_rat(&int(4)), "4");
        assert!(matches!(parse_rat("1/0"), Err(RingError::DivisionByZero)));
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn exact_square_roots() {
        assert_eq!(sqrt_exact(&rat(49, 4)), Some(rat(7, 2)));
        assert_eq!(sqrt_exact(&rat(2, 1)), None);
        assert_eq!(sqrt_exact(&rat(-4, 1)), None);
        assert_eq!(sqrt_exact(&Rat::zero()), Some(Rat::zero()));
    }

    #[test]
    fn content_gcd() {
        assert_eq!(rat_gcd(&rat(2, 3), &rat(4, 5)), rat(2, 15));
        assert_eq!(rat_gcd(&Rat::zero(), &rat(-3, 2)), rat(3, 2));
    }
}
