//! Exact coefficient fields.
//!
//! Everything in the crate is generic over [`Field`]; the required instance is
//! [`Q`] (arbitrary-precision rationals). Elements of a simple algebraic
//! extension live in [`crate::numberfield`].

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub trait Field: Clone + PartialEq + Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// `None` for zero.
    fn inv(&self) -> Option<Self>;
    fn from_rational(q: &Q) -> Self;

    fn from_i64(n: i64) -> Self {
        Self::from_rational(&Q::from_integer(BigInt::from(n)))
    }

    /// Absolute value as a rational, when the field comes with a real embedding.
    fn abs_rational(&self) -> Option<Q> {
        None
    }

    /// Lower is preferred when choosing an elimination pivot.
    fn pivot_weight(&self) -> u64 {
        0
    }
}

impl Field for Q {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn from_rational(q: &Q) -> Self {
        q.clone()
    }
    fn abs_rational(&self) -> Option<Q> {
        Some(self.abs())
    }
    fn pivot_weight(&self) -> u64 {
        self.denom().bits() * 2 + self.numer().bits()
    }
}

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"`, `"p"` or a JSON-style integer string.
pub fn parse_rational(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Input(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Canonical `"p/q"` rendering; integers print without a denominator.
pub fn format_rational(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Fixed-point decimal rendering with `digits` places after the point.
pub fn decimal(x: &Q, digits: usize) -> String {
    let scale = BigInt::from(10).pow(digits as u32);
    let scaled = x * Q::from_integer(scale.clone());
    let r = scaled.round().to_integer();
    let neg = r.is_negative();
    let a = r.abs();
    let int = &a / &scale;
    let frac = &a % &scale;
    let mut out = String::new();
    if neg && !(int.is_zero() && frac.is_zero()) {
        out.push('-');
    }
    out.push_str(&int.to_string());
    if digits > 0 {
        out.push('.');
        let f = frac.to_string();
        out.push_str(&"0".repeat(digits - f.len()));
        out.push_str(&f);
    }
    out
}

pub fn to_f64(x: &Q) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

pub mod serde_q {
    //! `serde` helpers for rationals written as `"p/q"` strings.
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        let s = match v {
            serde_json::Value::String(s) => s,
            serde_json::Value::Number(n) => n.to_string(),
            other => return Err(serde::de::Error::custom(format!("expected rational, got {other}"))),
        };
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}
