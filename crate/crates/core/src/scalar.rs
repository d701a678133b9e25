//! Scalar abstraction shared by the discrete machinery.
//!
//! Discrete models, kernels and trace recursions are written once against
//! [`Scalar`] and instantiated with exact rationals ([`Rational`]) or with
//! binary floating point (`f64`, `f32`).

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{NumAssign, One, ToPrimitive, Zero};

use crate::trace::TraceValue;

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

/// Number type usable as a transition weight.
pub trait Scalar:
    Clone + Debug + Display + PartialOrd + NumAssign + Send + Sync + 'static
{
    /// `true` when arithmetic on this type introduces no rounding.
    const EXACT: bool;

    fn to_f64(&self) -> f64;

    /// Lossy for floats, exact (binary expansion) for rationals.
    fn from_f64(x: f64) -> Option<Self>;

    fn from_rational(r: &Rational) -> Self;

    /// Accepts decimal literals (`0.25`, `1e-3`) and fractions (`1/3`).
    fn parse_weight(text: &str) -> Result<Self, WeightParseError>;

    /// Worst-case relative rounding error of one multiply-add.
    fn unit_roundoff() -> f64;

    fn into_trace_value(self, err_bound: f64) -> TraceValue;
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("`{text}` is not a decimal or p/q rational")]
pub struct WeightParseError {
    pub text: String,
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x)
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn parse_weight(text: &str) -> Result<Self, WeightParseError> {
        parse_rational(text)
    }

    fn unit_roundoff() -> f64 {
        0.0
    }

    fn into_trace_value(self, _err_bound: f64) -> TraceValue {
        TraceValue::Exact(self)
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn from_f64(x: f64) -> Option<Self> {
                Some(x as $t)
            }

            fn from_rational(r: &Rational) -> Self {
                ToPrimitive::to_f64(r).unwrap_or(f64::NAN) as $t
            }

            fn parse_weight(text: &str) -> Result<Self, WeightParseError> {
                parse_rational(text).map(|r| <$t as Scalar>::from_rational(&r))
            }

            fn unit_roundoff() -> f64 {
                <$t>::EPSILON as f64
            }

            fn into_trace_value(self, err_bound: f64) -> TraceValue {
                TraceValue::Approx {
                    value: self as f64,
                    err_bound,
                }
            }
        }
    };
}

float_scalar!(f64);
float_scalar!(f32);

/// Parses `p/q`, integers and finite decimal/scientific literals exactly.
pub fn parse_rational(text: &str) -> Result<Rational, WeightParseError> {
    let err = || WeightParseError {
        text: text.to_string(),
    };
    let t = text.trim();
    if t.is_empty() {
        return Err(err());
    }
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| err())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| err())?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| err())?),
        None => (t, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
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
    let mut numer = BigInt::from_str(&all).map_err(|_| err())?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u8);
    let value = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

/// Canonical text form: `p/q` in lowest terms, or a bare integer.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub(crate) fn is_unit_interval<S: Scalar>(x: &S) -> bool {
    *x >= S::zero() && *x <= S::one()
}

pub(crate) fn abs_f64_gap<S: Scalar>(a: &S, b: &S) -> f64 {
    if S::EXACT {
        let d = a.clone() - b.clone();
        d.to_f64().abs()
    } else {
        (a.to_f64() - b.to_f64()).abs()
    }
}
