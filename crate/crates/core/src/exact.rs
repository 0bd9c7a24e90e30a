//! Real numbers that may carry an exact rational value.
//!
//! Couplings, Kerr strengths and coupling exponents enter the revival and
//! recurrence logic through commensurability tests, which only make sense on
//! exact rationals. A [`Real`] always has a floating-point value used for
//! evaluation; the exact part is present only when the caller supplied one
//! (`"1/10"`, `"0.1"`, an integer, or [`Real::ratio`]).

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type Rational = Ratio<i64>;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Real {
    value: f64,
    exact: Option<Rational>,
}

impl Real {
    pub const ONE: Real = Real {
        value: 1.0,
        exact: Some(Ratio::new_raw(1, 1)),
    };

    /// A floating-point value with no exact annotation.
    ///
    /// Integral values are promoted to exact integers since no information
    /// is lost.
    pub fn float(value: f64) -> Self {
        let exact = if value.is_finite() && value.fract() == 0.0 && value.abs() < 9.0e15 {
            Some(Rational::from_integer(value as i64))
        } else {
            None
        };
        Self { value, exact }
    }

    pub fn exact(r: Rational) -> Self {
        Self {
            value: r.to_f64().unwrap_or(f64::NAN),
            exact: Some(r),
        }
    }

    /// `num / den`. Panics if `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        Self::exact(Rational::new(num, den))
    }

    pub fn integer(n: i64) -> Self {
        Self::exact(Rational::from_integer(n))
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn as_exact(&self) -> Option<Rational> {
        self.exact
    }

    pub fn is_integer(&self) -> bool {
        match self.exact {
            Some(r) => r.is_integer(),
            None => false,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0.0
    }
}

impl From<f64> for Real {
    fn from(value: f64) -> Self {
        Real::float(value)
    }
}

impl From<Rational> for Real {
    fn from(r: Rational) -> Self {
        Real::exact(r)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exact {
            Some(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Some(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            None => write!(f, "{}", self.value),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRealError(String);

impl fmt::Display for ParseRealError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cannot parse {:?} as an exact rational", self.0)
    }
}

impl std::error::Error for ParseRealError {}

impl FromStr for Real {
    type Err = ParseRealError;

    /// Parses `"p/q"`, `"p"` or a plain decimal such as `"-0.125"` exactly.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRealError(s.to_string());
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n: i64 = n.trim().parse().map_err(|_| err())?;
            let d: i64 = d.trim().parse().map_err(|_| err())?;
            if d == 0 {
                return Err(err());
            }
            return Ok(Real::ratio(n, d));
        }
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err());
        }
        let digits_ok = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
        if !digits_ok(int_part) || !digits_ok(frac_part) || frac_part.len() > 18 {
            return Err(err());
        }
        let den = 10i64.checked_pow(frac_part.len() as u32).ok_or_else(err)?;
        let int: i64 = if int_part.is_empty() { 0 } else { int_part.parse().map_err(|_| err())? };
        let frac: i64 = if frac_part.is_empty() { 0 } else { frac_part.parse().map_err(|_| err())? };
        let num = int
            .checked_mul(den)
            .and_then(|v| v.checked_add(frac))
            .ok_or_else(err)?;
        Ok(Real::ratio(if neg { -num } else { num }, den))
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self.exact {
            Some(r) if r.is_integer() => serializer.serialize_i64(*r.numer()),
            Some(r) => serializer.serialize_str(&format!("{}/{}", r.numer(), r.denom())),
            None => serializer.serialize_f64(self.value),
        }
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct RealVisitor;

        impl Visitor<'_> for RealVisitor {
            type Value = Real;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number, or a string holding an exact rational like \"1/10\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Real, E> {
                Ok(Real::float(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Real, E> {
                Ok(Real::integer(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Real, E> {
                i64::try_from(v)
                    .map(Real::integer)
                    .map_err(|_| E::custom("integer out of range"))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Real, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(RealVisitor)
    }
}

/// Largest positive rational `g` such that every nonzero `|r| / g` is an
/// integer. Zero entries are skipped. Returns `None` for an empty or all-zero
/// input, or when the common denominator overflows.
pub fn rational_gcd<I: IntoIterator<Item = Rational>>(values: I) -> Option<Rational> {
    let mut acc: Option<Rational> = None;
    for v in values {
        if v.is_zero() {
            continue;
        }
        let v = v.abs();
        acc = Some(match acc {
            None => v,
            Some(a) => {
                let num = a.numer().gcd(v.numer());
                let den = lcm_checked(*a.denom(), *v.denom())?;
                Rational::new(num, den)
            }
        });
    }
    acc
}

fn lcm_checked(a: i64, b: i64) -> Option<i64> {
    (a / a.gcd(&b)).checked_mul(b)
}
