//! Exact rationals used for Lipschitz constants and thresholds.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Exact ratio of two machine integers. Always kept in lowest terms.
pub type Rational = Ratio<i64>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseRationalError {
    #[error("empty rational")]
    Empty,
    #[error("invalid integer in rational {0:?}")]
    BadInteger(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
}

/// Parses `"p/q"` or a bare integer `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p = i64::from_str(num).map_err(|_| ParseRationalError::BadInteger(s.to_string()))?;
    let q = i64::from_str(den).map_err(|_| ParseRationalError::BadInteger(s.to_string()))?;
    if q == 0 {
        return Err(ParseRationalError::ZeroDenominator(s.to_string()));
    }
    Ok(Rational::new(p, q))
}

/// `p/q` rendering, `p` when the denominator is one.
pub struct Display<'a>(pub &'a Rational);

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self.0.denom() == 1 {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Serde adapter writing a rational as the JSON pair `[num, den]`.
pub mod pair {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        [*r.numer(), *r.denom()].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let [p, q] = <[i64; 2]>::deserialize(d)?;
        if q == 0 {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(Rational::new(p, q))
    }
}
