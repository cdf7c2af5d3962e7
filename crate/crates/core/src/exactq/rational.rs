//! Arbitrary-precision rationals and their text form.
//!
//! The text grammar is `[+-]?digits("/"digits)?` with a strictly positive
//! denominator. It is shared by every file format the crate reads or writes.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar, always kept in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `num / den`, reduced. Panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

fn is_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

/// Parses the exact text form, e.g. `"-3/7"`, `"2"`, `"+1/2"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = |reason: &str| Error::ParseRational {
        text: text.to_string(),
        reason: reason.to_string(),
    };
    let s = text.trim();
    let (negative, body) = match s.as_bytes().first() {
        Some(b'-') => (true, &s[1..]),
        Some(b'+') => (false, &s[1..]),
        _ => (false, s),
    };
    let (num_s, den_s) = match body.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (body, None),
    };
    if !is_digits(num_s) {
        return Err(bad("numerator must be a non-empty run of digits"));
    }
    let mut num: BigInt = num_s.parse().map_err(|_| bad("numerator"))?;
    if negative {
        num = -num;
    }
    let den: BigInt = match den_s {
        None => BigInt::one(),
        Some(d) => {
            if !is_digits(d) {
                return Err(bad("denominator must be a non-empty run of digits"));
            }
            d.parse().map_err(|_| bad("denominator"))?
        }
    };
    if den.is_zero() {
        return Err(bad("denominator must be positive"));
    }
    Ok(Rational::new(num, den))
}

/// Canonical text form; integers are written without a denominator.
pub fn format_rational(q: &Rational) -> String {
    q.to_string()
}

/// True when `q` is stored in lowest terms with a positive denominator.
pub fn is_canonical(q: &Rational) -> bool {
    q.denom().is_positive() && q.numer().gcd(q.denom()).is_one()
}
