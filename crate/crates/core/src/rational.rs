//! Exact rational arithmetic helpers.
//!
//! All classical probabilities in this crate are [`Rat`] values. The
//! on-disk form is a `"p/q"` string (or `"p"` for integers); floats are
//! never accepted in classical inputs.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::CcError;

pub type Rat = BigRational;

/// Shorthand for a rational from two machine integers.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Rat {
    Rat::zero()
}

pub fn one() -> Rat {
    Rat::one()
}

pub fn is_probability(r: &Rat) -> bool {
    !r.is_negative() && *r <= Rat::one()
}

/// Parses `"p/q"` or `"p"`, with an optional leading sign on `p`.
pub fn parse_rat(s: &str) -> Result<Rat, CcError> {
    let s = s.trim();
    let mk_err = || CcError::BadRational { text: s.to_string() };
    let (num_str, den_str) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let num: BigInt = num_str.parse().map_err(|_| mk_err())?;
    let den: BigInt = match den_str {
        Some(d) => d.parse().map_err(|_| mk_err())?,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(mk_err());
    }
    Ok(Rat::new(num, den))
}

/// Renders in the same `"p/q"` / `"p"` form that [`parse_rat`] accepts.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64().expect("finite rational converts to f64")
}

/// Exact rational value of a finite double (every finite IEEE double is
/// a dyadic rational).
pub fn from_f64(x: f64) -> Result<Rat, CcError> {
    Rat::from_float(x).ok_or(CcError::NonFiniteNumber { value: x })
}
