//! Exact rational helpers shared by every module.
//!
//! All states, speeds, positions, times and potentials are [`Rational`]s. The
//! canonical text form is `p/q` in lowest terms (integers print without the
//! denominator), which is what reports and configs use.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary precision rational, always normalised (lowest terms, positive denominator).
pub type Rational = num_rational::BigRational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid rational literal `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("non-finite float {0}")]
    NonFinite(f64),
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p"`, `"p/q"` or a finite decimal such as `"-0.125"`.
pub fn parse(text: &str) -> Result<Rational, ParseRationalError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    let bad = || ParseRationalError::Invalid(text.to_string());
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(ParseRationalError::ZeroDenominator(text.to_string()));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let r = Rational::new(n, d);
        return Ok(if negative { -r } else { r });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// Exact conversion of a binary float (every finite `f64` is a dyadic rational).
pub fn from_f64(x: f64) -> Result<Rational, ParseRationalError> {
    Rational::from_f64(x).ok_or(ParseRationalError::NonFinite(x))
}

pub fn format(r: &Rational) -> String {
    r.to_string()
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `[x]⁺`
pub fn positive_part(x: Rational) -> Rational {
    if x.is_positive() {
        x
    } else {
        Rational::zero()
    }
}

/// Integer `k` with `k·epsilon == value`, if `value` lies on the grid.
pub fn grid_index(value: &Rational, epsilon: &Rational) -> Option<i64> {
    let q = value / epsilon;
    if q.is_integer() {
        q.to_integer().to_i64()
    } else {
        None
    }
}

/// Nearest grid index to `value`, ties broken towards the even index.
pub fn round_half_even_index(value: &Rational, epsilon: &Rational) -> Option<i64> {
    let q = value / epsilon;
    let floor = q.floor();
    let frac = &q - &floor;
    let half = ratio(1, 2);
    let base = floor.to_integer();
    let k = match frac.cmp(&half) {
        std::cmp::Ordering::Less => base,
        std::cmp::Ordering::Greater => base + 1,
        std::cmp::Ordering::Equal => {
            if base.is_even() {
                base
            } else {
                base + 1
            }
        }
    };
    k.to_i64()
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn zero() -> Rational {
    Rational::zero()
}
