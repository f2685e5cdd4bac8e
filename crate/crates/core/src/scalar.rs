//! Number types the classifier can run on, and sign decisions with a deadband.
//!
//! Floating-point inputs are classified with a documented zero deadband: a
//! quantity that is homogeneous of degree `d` in the point coordinates is
//! treated as zero when `|q| <= 1e-9 * (1 + scale)^d`, where `scale` is the
//! largest absolute coordinate. Rational inputs are classified exactly.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Relative width of the zero deadband for floating-point inputs.
pub const ZERO_BAND: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "-")]
    Neg,
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "+")]
    Pos,
}

impl Sign {
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Neg => -1,
            Sign::Zero => 0,
            Sign::Pos => 1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Neg => Sign::Pos,
            Sign::Zero => Sign::Zero,
            Sign::Pos => Sign::Neg,
        }
    }

    pub fn of_f64(x: f64) -> Sign {
        if x > 0.0 {
            Sign::Pos
        } else if x < 0.0 {
            Sign::Neg
        } else {
            Sign::Zero
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        match self.as_i8() * rhs.as_i8() {
            1 => Sign::Pos,
            -1 => Sign::Neg,
            _ => Sign::Zero,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Neg => "-",
            Sign::Zero => "0",
            Sign::Pos => "+",
        })
    }
}

/// Field operations the classification and geometry code is generic over.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    /// Whether signs are decided exactly (no deadband).
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;
    fn to_f64(&self) -> f64;
    fn is_finite(&self) -> bool;

    /// Sign with `band` treated as zero. Exact types ignore `band`.
    fn sign_within(&self, band: f64) -> Sign;

    /// Numerator and denominator, for types that carry an exact ratio.
    fn as_ratio(&self) -> Option<(BigInt, BigInt)> {
        None
    }

    fn zero() -> Self {
        Self::from_i64(0)
    }

    fn abs_f64(&self) -> f64 {
        self.to_f64().abs()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn sign_within(&self, band: f64) -> Sign {
        if self.abs() <= band {
            Sign::Zero
        } else {
            Sign::of_f64(*self)
        }
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_finite(&self) -> bool {
        true
    }
    fn sign_within(&self, _band: f64) -> Sign {
        if self.is_zero() {
            Sign::Zero
        } else if self.is_positive() {
            Sign::Pos
        } else {
            Sign::Neg
        }
    }
    fn as_ratio(&self) -> Option<(BigInt, BigInt)> {
        Some((self.numer().clone(), self.denom().clone()))
    }
}

/// Exact rational for an `f64` (every finite double is a dyadic rational).
pub fn rational_from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_f64(x)
}

/// Rational `num/den` from small integers.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Sign decisions for quantities built from one parameter tuple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deadband {
    scale: f64,
}

impl Deadband {
    pub fn new(scale: f64) -> Self {
        Deadband { scale: scale.abs() }
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Width of the zero band for a quantity of the given polynomial degree.
    pub fn band(&self, degree: i32) -> f64 {
        ZERO_BAND * (1.0 + self.scale).powi(degree)
    }

    pub fn sign<S: Scalar>(&self, q: &S, degree: i32) -> Sign {
        q.sign_within(self.band(degree))
    }

    pub fn is_zero<S: Scalar>(&self, q: &S, degree: i32) -> bool {
        self.sign(q, degree) == Sign::Zero
    }

    /// `x < y` on coordinates (degree one).
    pub fn lt<S: Scalar>(&self, x: &S, y: &S) -> bool {
        self.sign(&(y.clone() - x.clone()), 1) == Sign::Pos
    }

    /// `x <= y` on coordinates (degree one).
    pub fn le<S: Scalar>(&self, x: &S, y: &S) -> bool {
        self.sign(&(y.clone() - x.clone()), 1) != Sign::Neg
    }

    pub fn eq<S: Scalar>(&self, x: &S, y: &S) -> bool {
        self.sign(&(y.clone() - x.clone()), 1) == Sign::Zero
    }
}
