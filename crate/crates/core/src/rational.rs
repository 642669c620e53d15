//! Arbitrary-precision rationals and their string form.
//!
//! Every rational that leaves the crate is written as `num/den`, or as a bare
//! integer when the denominator is one. Floating point never appears.

use alloc::string::{String, ToString};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Rational = BigRational;

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// `num/den` in lowest terms, or just `num` for integers.
pub fn to_exact_string(value: &Rational) -> String {
    value.to_string()
}

/// Inverse of [`to_exact_string`]. Accepts `num`, `num/den` and an optional
/// leading sign; rejects anything with a decimal point or exponent.
pub fn parse_exact(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (numer, denom) = match text.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (text, None),
    };
    let numer: BigInt = parse_integer(numer)?;
    let denom: BigInt = match denom {
        Some(d) => parse_integer(d)?,
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return None;
    }
    Some(Rational::new(numer, denom))
}

fn parse_integer(text: &str) -> Option<BigInt> {
    let digits = text.strip_prefix(['-', '+']).unwrap_or(text);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    text.parse().ok()
}

pub fn is_integral(value: &Rational) -> bool {
    value.is_integer()
}
