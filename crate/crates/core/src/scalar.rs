//! Scalar arithmetic in two modes.
//!
//! Piecewise-linear norms are evaluated over exact rationals so that integer
//! and rational values come out with equality; norms involving roots or
//! bisection run in `f64`, where every tie or threshold decision goes through
//! [`Scalar::approx_cmp`] and the single tolerance [`DEFAULT_TOL_EQ`].

use std::cmp::Ordering;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{parse_err, Result};
use crate::norms::NormEngine;
use crate::vector::SparseVector;

pub type Rational = BigRational;

/// Relative tolerance for float-mode equality: `|a-b| <= tol * max(1, |a|, |b|)`.
pub const DEFAULT_TOL_EQ: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArithmeticMode {
    Exact,
    Float,
}

impl ArithmeticMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ArithmeticMode::Exact => "exact",
            ArithmeticMode::Float => "float",
        }
    }
}

impl std::str::FromStr for ArithmeticMode {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(ArithmeticMode::Exact),
            "float" => Ok(ArithmeticMode::Float),
            _ => Err(parse_err("arithmetic mode", s, "expected `exact` or `float`")),
        }
    }
}

pub trait Scalar: Clone + Debug + PartialEq + PartialOrd + Signed + Send + Sync + 'static {
    const MODE: ArithmeticMode;

    fn from_i64(v: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn to_f64(&self) -> f64;
    /// `None` in exact mode: a float is never promoted to an "exact" value.
    fn try_from_f64(v: f64) -> Option<Self>;
    fn approx_cmp(&self, other: &Self) -> Ordering;
    fn encode(&self) -> String;
    fn decode(s: &str) -> Result<Self>;
    fn norm_in(engine: &dyn NormEngine, x: &SparseVector<Self>) -> Result<Self>;

    fn ratio(num: i64, den: i64) -> Self {
        Self::from_rational(&Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    fn approx_eq(&self, other: &Self) -> bool {
        self.approx_cmp(other) == Ordering::Equal
    }

    fn le_tol(&self, other: &Self) -> bool {
        self.approx_cmp(other) != Ordering::Greater
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }
}

impl Scalar for Rational {
    const MODE: ArithmeticMode = ArithmeticMode::Exact;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn try_from_f64(_v: f64) -> Option<Self> {
        None
    }

    fn approx_cmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }

    fn encode(&self) -> String {
        self.to_string()
    }

    fn decode(s: &str) -> Result<Self> {
        parse_rational(s)
    }

    fn norm_in(engine: &dyn NormEngine, x: &SparseVector<Self>) -> Result<Self> {
        engine.norm_exact(x)
    }
}

impl Scalar for f64 {
    const MODE: ArithmeticMode = ArithmeticMode::Float;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn try_from_f64(v: f64) -> Option<Self> {
        Some(v)
    }

    fn approx_cmp(&self, other: &Self) -> Ordering {
        let scale = 1.0_f64.max(self.abs()).max(other.abs());
        if (self - other).abs() <= DEFAULT_TOL_EQ * scale {
            Ordering::Equal
        } else if self < other {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }

    fn encode(&self) -> String {
        format!("{}", self)
    }

    fn decode(s: &str) -> Result<Self> {
        let t = s.trim();
        let v = if let Some((n, d)) = t.split_once('/') {
            let n: f64 = n.trim().parse().map_err(|_| parse_err("scalar", s, "bad numerator"))?;
            let d: f64 = d.trim().parse().map_err(|_| parse_err("scalar", s, "bad denominator"))?;
            if d == 0.0 {
                return Err(parse_err("scalar", s, "zero denominator"));
            }
            n / d
        } else {
            t.parse::<f64>().map_err(|_| parse_err("scalar", s, "not a number"))?
        };
        if !v.is_finite() {
            return Err(parse_err("scalar", s, "not finite"));
        }
        Ok(v)
    }

    fn norm_in(engine: &dyn NormEngine, x: &SparseVector<Self>) -> Result<Self> {
        engine.norm_float(x)
    }
}

/// Parses `p/q`, an integer, or a plain decimal such as `-1.25` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if t.is_empty() {
        return Err(parse_err("rational", s, "empty"));
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| parse_err("rational", s, "bad numerator"))?;
        let d: BigInt = d.trim().parse().map_err(|_| parse_err("rational", s, "bad denominator"))?;
        if d.is_zero() {
            return Err(parse_err("rational", s, "zero denominator"));
        }
        return Ok(Rational::new(n, d));
    }
    let (negative, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(parse_err("rational", s, "no digits"));
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(parse_err("rational", s, "expected digits"));
    }
    let digits = format!("{}{}", int_part, frac_part);
    let numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| parse_err("rational", s, "bad digits"))?
    };
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    let r = Rational::new(numer, denom);
    Ok(if negative { -r } else { r })
}

pub fn rational_from_i64(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn rational_one() -> Rational {
    Rational::one()
}

/// Serde helper: rationals travel as canonical strings (`"3/2"`), and integers are accepted on input.
pub mod rational_string {
    use super::{parse_rational, Rational};
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(v) => Ok(super::rational_from_i64(v)),
            Raw::Str(s) => parse_rational(&s).map_err(de::Error::custom),
        }
    }

    pub mod vec {
        use super::super::{parse_rational, Rational};
        use serde::{de, Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
            s.collect_seq(v.iter().map(|r| r.to_string()))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
            #[derive(Deserialize)]
            #[serde(untagged)]
            enum Raw {
                Int(i64),
                Str(String),
            }
            Vec::<Raw>::deserialize(d)?
                .into_iter()
                .map(|r| match r {
                    Raw::Int(v) => Ok(super::super::rational_from_i64(v)),
                    Raw::Str(s) => parse_rational(&s).map_err(de::Error::custom),
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_strings_parse_exactly() {
        assert_eq!(parse_rational("-1.25").unwrap(), Rational::new((-5).into(), 4.into()));
        assert_eq!(parse_rational("3/6").unwrap(), Rational::new(1.into(), 2.into()));
        assert_eq!(parse_rational(".5").unwrap(), Rational::new(1.into(), 2.into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("-").is_err());
    }

    #[test]
    fn exact_encoding_drops_unit_denominator() {
        assert_eq!(Rational::from_i64(-5).encode(), "-5");
        assert_eq!(Rational::ratio(6, 4).encode(), "3/2");
    }

    #[test]
    fn float_ties_use_relative_tolerance() {
        assert!(1.0_f64.approx_eq(&(1.0 + 1e-14)));
        assert!(!1.0_f64.approx_eq(&(1.0 + 1e-9)));
        assert!(1e6_f64.approx_eq(&(1e6 + 1e-8)));
        assert_eq!(f64::decode("3/4").unwrap(), 0.75);
        assert!(f64::decode("inf").is_err());
    }
}
