//! Numeric modes shared by the interpreter, the forward pass and the oracles.
//!
//! Two evaluation modes exist: exact arbitrary-precision rationals
//! ([`Rational`]) and `f64`. Programs and networks store their constants as
//! rationals; evaluators convert them once into the requested [`Scalar`].

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub type Rational = num_rational::BigRational;

/// Arithmetic required to evaluate max-affine programs and ReLU networks.
pub trait Scalar: Clone + PartialOrd + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn to_f64(&self) -> f64;
    fn add_assign_ref(&mut self, rhs: &Self);
    fn sub_assign_ref(&mut self, rhs: &Self);
    /// `self += coeff * x`
    fn mul_add_assign(&mut self, coeff: &Self, x: &Self);
    fn mul_ref(&self, rhs: &Self) -> Self;

    fn relu(&self) -> Self {
        let zero = Self::zero();
        if *self > zero {
            self.clone()
        } else {
            zero
        }
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        Zero::zero()
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ratio_to_f64(self)
    }

    fn add_assign_ref(&mut self, rhs: &Self) {
        if !rhs.is_zero() {
            *self += rhs;
        }
    }

    fn sub_assign_ref(&mut self, rhs: &Self) {
        if !rhs.is_zero() {
            *self -= rhs;
        }
    }

    fn mul_add_assign(&mut self, coeff: &Self, x: &Self) {
        if x.is_zero() || coeff.is_zero() {
            return;
        }
        if coeff.is_integer() {
            let n = coeff.numer();
            if n.is_one() {
                *self += x;
                return;
            }
            if (-n).is_one() {
                *self -= x;
                return;
            }
        }
        *self += coeff * x;
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }

    fn from_rational(r: &Rational) -> Self {
        ratio_to_f64(r)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn add_assign_ref(&mut self, rhs: &Self) {
        *self += rhs;
    }

    fn sub_assign_ref(&mut self, rhs: &Self) {
        *self -= rhs;
    }

    fn mul_add_assign(&mut self, coeff: &Self, x: &Self) {
        *self += coeff * x;
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
}

fn ratio_to_f64(r: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
        if n.unsigned_abs() < (1 << 53) && d < (1 << 53) {
            return n as f64 / d as f64;
        }
    }
    ToPrimitive::to_f64(r).unwrap_or(if r.is_negative() {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    })
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact conversion of a finite float (every finite `f64` is a dyadic rational).
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid number `{0}`")]
pub struct ParseNumberError(pub String);

/// Parses `p`, `p/q`, or a decimal literal such as `-1.25` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational, ParseNumberError> {
    let s = s.trim();
    let err = || ParseNumberError(s.to_string());
    if s.is_empty() {
        return Err(err());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| err())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| err())?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(p, q));
    }
    if let Ok(n) = BigInt::from_str(s) {
        return Ok(Rational::from_integer(n));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().map_err(|_| err())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(BigInt::from_str(&all).map_err(|_| err())?);
    let scale = exponent - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Ok(if neg { -value } else { value })
}

/// Serde adapter writing a rational as `{"num": "...", "den": "..."}`.
pub mod num_den {
    use super::*;

    #[derive(Serialize, Deserialize)]
    struct NumDen {
        num: String,
        den: String,
    }

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        NumDen {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let nd = NumDen::deserialize(d)?;
        let num = BigInt::from_str(&nd.num).map_err(serde::de::Error::custom)?;
        let den = BigInt::from_str(&nd.den).map_err(serde::de::Error::custom)?;
        if den.is_zero() {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(Rational::new(num, den))
    }
}

/// Serde adapter writing a rational as the string `"p/q"` (or `"p"` for integers).
pub mod ratio_string {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Relative comparison used for float-mode checks: `|a - b| <= tol * max(1, |b|)`.
pub fn approx_eq_rel(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}
