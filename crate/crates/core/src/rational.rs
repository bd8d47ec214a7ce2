//! Exact rational probabilities.
//!
//! Every probability in the workbench is a [`Prob`]. Floating point only
//! appears in emitted reports and in the Monte Carlo sampler's fast path.
//! On the wire a rational is always a `"p/q"` string (or a bare integer).

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serializer};

pub type Prob = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational {text:?}: expected \"p/q\" with integer p and nonzero integer q")]
pub struct ParseRationalError {
    pub text: String,
}

pub fn ratio(numer: i64, denom: i64) -> Prob {
    Prob::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Prob {
    Prob::from_integer(BigInt::from(value))
}

pub fn zero() -> Prob {
    Prob::zero()
}

pub fn one() -> Prob {
    Prob::one()
}

/// Parses `"p/q"` or a bare integer. Decimal notation is rejected so that
/// instance files can never silently lose precision.
pub fn parse(text: &str) -> Result<Prob, ParseRationalError> {
    let err = || ParseRationalError {
        text: text.to_string(),
    };
    let trimmed = text.trim();
    let (num, den) = match trimmed.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (trimmed, "1"),
    };
    let valid = |s: &str| {
        let digits = s.strip_prefix('-').unwrap_or(s);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid(num) || !valid(den) {
        return Err(err());
    }
    let num: BigInt = num.parse().map_err(|_| err())?;
    let den: BigInt = den.parse().map_err(|_| err())?;
    if den.is_zero() {
        return Err(err());
    }
    Ok(Prob::new(num, den))
}

/// Canonical `"p/q"` rendering; integers keep the `/1` suffix.
pub fn format(value: &Prob) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

pub fn to_f64(value: &Prob) -> f64 {
    value.to_f64().unwrap_or_else(|| {
        if value.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

pub fn min(a: &Prob, b: &Prob) -> Prob {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn max(a: &Prob, b: &Prob) -> Prob {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

/// Smallest integer not below `value`.
pub fn ceil_u32(value: &Prob) -> u32 {
    value.ceil().to_integer().to_u32().unwrap_or(u32::MAX)
}

pub fn floor_u32(value: &Prob) -> u32 {
    value.floor().to_integer().to_u32().unwrap_or(0)
}

/// Displays a rational as `p/q` inside `format!` without allocating a `String` first.
pub struct Display<'a>(pub &'a Prob);

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

/// Serde adapter for a single rational field (`#[serde(with = "rational::serde_prob")]`).
pub mod serde_prob {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Prob, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Prob, D::Error> {
        let text = RationalText::deserialize(d)?;
        text.into_prob().map_err(de::Error::custom)
    }
}

/// Serde adapter for a sequence of rationals.
pub mod serde_prob_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(values: &[Prob], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(values.len()))?;
        for v in values {
            seq.serialize_element(&format(v))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Prob>, D::Error> {
        let raw = Vec::<RationalText>::deserialize(d)?;
        raw.into_iter()
            .map(|t| t.into_prob().map_err(de::Error::custom))
            .collect()
    }
}

/// Accepts `"p/q"` strings and JSON integers; rejects JSON floats.
#[derive(Deserialize)]
#[serde(untagged)]
enum RationalText {
    Text(String),
    Int(i64),
}

impl RationalText {
    fn into_prob(self) -> Result<Prob, ParseRationalError> {
        match self {
            RationalText::Text(t) => parse(&t),
            RationalText::Int(i) => Ok(int(i)),
        }
    }
}
