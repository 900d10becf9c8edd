//! Scalars carrying their arithmetic mode.
//!
//! Every machine is built over exactly one [`ScalarMode`]: arbitrary-precision
//! rationals for the exact constructions, or `f64` for machines whose entries
//! are irrational (rotations by `π/2^k`, `1/√2` channel weights). Mixing the
//! two is a hard error at every public kernel; the operator impls on
//! [`Scalar`] panic on mixed operands, so callers validate modes up front.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default tolerance for float-mode comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Arithmetic mode carried by every scalar.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarMode {
    Rational,
    Float,
}

impl fmt::Display for ScalarMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarMode::Rational => f.write_str("rational"),
            ScalarMode::Float => f.write_str("float"),
        }
    }
}

/// An exact rational (always in lowest terms, positive denominator) or a float.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Rational(BigRational),
    Float(f64),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseScalarError {
    #[error("`{0}` is not a rational of the form num/den")]
    BadRational(String),
    #[error("rational `{0}` has a zero denominator")]
    ZeroDenominator(String),
    #[error("`{0}` is not a finite float")]
    BadFloat(String),
}

impl Scalar {
    pub fn zero(mode: ScalarMode) -> Self {
        match mode {
            ScalarMode::Rational => Scalar::Rational(BigRational::zero()),
            ScalarMode::Float => Scalar::Float(0.0),
        }
    }

    pub fn one(mode: ScalarMode) -> Self {
        match mode {
            ScalarMode::Rational => Scalar::Rational(BigRational::one()),
            ScalarMode::Float => Scalar::Float(1.0),
        }
    }

    pub fn from_int(mode: ScalarMode, n: i64) -> Self {
        match mode {
            ScalarMode::Rational => Scalar::Rational(BigRational::from_integer(BigInt::from(n))),
            ScalarMode::Float => Scalar::Float(n as f64),
        }
    }

    /// Exact rational `num/den`.
    ///
    /// Panics if `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar::Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Scalar::Rational(BigRational::from_integer(n))
    }

    pub fn mode(&self) -> ScalarMode {
        match self {
            Scalar::Rational(_) => ScalarMode::Rational,
            Scalar::Float(_) => ScalarMode::Float,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }

    pub fn into_rational(self) -> Option<BigRational> {
        match self {
            Scalar::Rational(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            Scalar::Float(x) => *x,
        }
    }

    /// Re-expresses the value in `mode`. Rational to float rounds; float to
    /// rational is exact (every finite float is a dyadic rational).
    pub fn convert(&self, mode: ScalarMode) -> Self {
        match (self, mode) {
            (Scalar::Rational(r), ScalarMode::Float) => Scalar::Float(r.to_f64().unwrap_or(f64::NAN)),
            (Scalar::Float(x), ScalarMode::Rational) => Scalar::Rational(
                BigRational::from_float(*x).unwrap_or_else(BigRational::zero),
            ),
            _ => self.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Float(x) => *x == 0.0,
        }
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_integer(),
            Scalar::Float(x) => x.fract() == 0.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_negative(),
            Scalar::Float(x) => *x < 0.0,
        }
    }

    pub fn abs(&self) -> Self {
        match self {
            Scalar::Rational(r) => Scalar::Rational(r.abs()),
            Scalar::Float(x) => Scalar::Float(x.abs()),
        }
    }

    pub fn powi(&self, exp: u32) -> Self {
        match self {
            Scalar::Rational(r) => Scalar::Rational(num_traits::pow(r.clone(), exp as usize)),
            Scalar::Float(x) => Scalar::Float(x.powi(exp as i32)),
        }
    }

    /// Ordering with a float tolerance: in float mode values within `tol`
    /// compare equal. Rational comparisons are exact and ignore `tol`.
    ///
    /// Panics on mixed modes.
    pub fn cmp_tol(&self, other: &Scalar, tol: f64) -> Ordering {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => a.cmp(b),
            (Scalar::Float(a), Scalar::Float(b)) => {
                if (a - b).abs() <= tol {
                    Ordering::Equal
                } else if a < b {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
            _ => panic!("mixed scalar modes"),
        }
    }

    pub fn approx_eq(&self, other: &Scalar, tol: f64) -> bool {
        self.cmp_tol(other, tol) == Ordering::Equal
    }

    /// Parses `num/den` (or a bare integer) in rational mode, or a decimal in
    /// float mode.
    pub fn parse(mode: ScalarMode, text: &str) -> Result<Self, ParseScalarError> {
        let text = text.trim();
        match mode {
            ScalarMode::Rational => parse_rational(text).map(Scalar::Rational),
            ScalarMode::Float => {
                if let Ok(r) = parse_rational(text) {
                    return Ok(Scalar::Float(r.to_f64().unwrap_or(f64::NAN)));
                }
                let x: f64 = text
                    .parse()
                    .map_err(|_| ParseScalarError::BadFloat(text.to_string()))?;
                if !x.is_finite() {
                    return Err(ParseScalarError::BadFloat(text.to_string()));
                }
                Ok(Scalar::Float(x))
            }
        }
    }
}

pub fn parse_rational(text: &str) -> Result<BigRational, ParseScalarError> {
    let bad = || ParseScalarError::BadRational(text.to_string());
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(ParseScalarError::ZeroDenominator(text.to_string()));
    }
    Ok(BigRational::new(num, den))
}

/// `num/den` with the denominator always present.
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// C-style `%.{sig}g` formatting.
pub fn format_float(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", sig.saturating_sub(1), x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= sig as i32 {
        let mantissa = trim_fraction(mantissa);
        format!("{mantissa}e{exp}")
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim_fraction(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => f.write_str(&format_rational(r)),
            Scalar::Float(x) => f.write_str(&format_float(*x, 12)),
        }
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::Rational(r)
    }
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::Float(x)
    }
}

macro_rules! binary_op {
    ($trait:ident, $method:ident) => {
        impl<'a> $trait<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a.$method(b)),
                    (Scalar::Float(a), Scalar::Float(b)) => Scalar::Float(a.$method(b)),
                    _ => panic!("mixed scalar modes"),
                }
            }
        }

        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }

        impl<'a> $trait<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
    };
}

binary_op!(Add, add);
binary_op!(Sub, sub);
binary_op!(Mul, mul);
binary_op!(Div, div);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(-r),
            Scalar::Float(x) => Scalar::Float(-x),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}
