//! Exact rational numbers and their fraction-string encoding.
//!
//! Every quantity in the crate is a [`Rational`]: an arbitrary-precision
//! fraction kept in lowest terms with a positive denominator. On the wire a
//! rational is a base-10 string `"p"` or `"p/q"`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serializer};
use thiserror::Error;

pub use num_rational::BigRational as Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed rational {0:?}: expected \"p\" or \"p/q\" in base 10")]
pub struct ParseRationalError(pub String);

/// Parses `"p"` or `"p/q"`: optional leading `-`, decimal digits, and a
/// strictly positive denominator. No whitespace or `+` sign is accepted.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(text.to_string());
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (text, None),
    };
    let digits = num.strip_prefix('-').unwrap_or(num);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    let numer: BigInt = num.parse().map_err(|_| err())?;
    let denom: BigInt = match den {
        None => BigInt::one(),
        Some(d) => {
            if d.is_empty() || !d.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err());
            }
            let d: BigInt = d.parse().map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            d
        }
    };
    Ok(Rational::new(numer, denom))
}

/// Canonical fraction string: lowest terms, `"p"` when the denominator is 1.
pub fn format_rational(value: &Rational) -> String {
    value.to_string()
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Builds a vector of rationals from `(numerator, denominator)` pairs.
pub fn vec_frac(pairs: &[(i64, i64)]) -> Vec<Rational> {
    pairs.iter().map(|&(n, d)| frac(n, d)).collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn sum(values: &[Rational]) -> Rational {
    values.iter().fold(Rational::zero(), |acc, v| acc + v)
}

pub fn is_nonnegative(values: &[Rational]) -> bool {
    values.iter().all(|v| !v.is_negative())
}

/// Serde adapter for a single rational as a fraction string.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for a vector of rationals as fraction strings.
pub mod serde_rational_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(values: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(values.len()))?;
        for v in values {
            seq.serialize_element(&format_rational(v))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let texts = Vec::<String>::deserialize(d)?;
        texts
            .iter()
            .map(|t| parse_rational(t).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Serde adapter for an optional rational (`null` for an infinite bound).
pub mod serde_rational_opt_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(values: &[Option<Rational>], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(values.len()))?;
        for v in values {
            seq.serialize_element(&v.as_ref().map(format_rational))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Option<Rational>>, D::Error> {
        let texts = Vec::<Option<String>>::deserialize(d)?;
        texts
            .iter()
            .map(|t| match t {
                None => Ok(None),
                Some(t) => parse_rational(t)
                    .map(Some)
                    .map_err(serde::de::Error::custom),
            })
            .collect()
    }
}
