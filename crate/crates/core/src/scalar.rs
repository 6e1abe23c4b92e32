//! Probability scalars.
//!
//! Every table in the crate is generic over [`Scalar`], which is implemented
//! by exact arbitrary-precision rationals ([`Rational`]) and by `f64`. A table
//! therefore carries its mode in its type, and mixing modes is a type error.
//! The LP path and the small-game soundness checks run in rational mode;
//! anything involving quantum states runs in float mode.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num::bigint::BigInt;
use num::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub type Rational = num::BigRational;

/// Which arithmetic a table uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarMode {
    Rational,
    Float,
}

impl Display for ScalarMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScalarMode::Rational => f.write_str("rational"),
            ScalarMode::Float => f.write_str("float"),
        }
    }
}

pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Sum
{
    const MODE: ScalarMode;

    fn from_ratio(num: i64, den: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn from_usize(n: usize) -> Self {
        Self::from_ratio(n as i64, 1)
    }
    fn to_f64(&self) -> f64;
    /// Exact rational value; `None` for non-finite floats.
    fn to_rational(&self) -> Option<Rational>;
    fn abs(&self) -> Self;

    /// Slack allowed when comparing values of this mode: zero for rationals.
    fn tolerance() -> Self;

    /// `self <= other` up to [`Scalar::tolerance`].
    fn le_tol(&self, other: &Self) -> bool {
        self.clone() <= other.clone() + Self::tolerance()
    }

    fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).abs() <= Self::tolerance()
    }

    /// Canonical text form: `p/q` (or `p`) for rationals, shortest round-trip
    /// decimal for floats.
    fn to_text(&self) -> String;
}

impl Scalar for Rational {
    const MODE: ScalarMode = ScalarMode::Rational;

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn tolerance() -> Self {
        Rational::zero()
    }

    fn le_tol(&self, other: &Self) -> bool {
        self <= other
    }

    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }

    fn to_text(&self) -> String {
        rational_to_text(self)
    }
}

impl Scalar for f64 {
    const MODE: ScalarMode = ScalarMode::Float;

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_rational(&self) -> Option<Rational> {
        Rational::from_float(*self)
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn tolerance() -> Self {
        1e-12
    }

    fn to_text(&self) -> String {
        format!("{self}")
    }
}

pub fn rational_to_text(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p/q`, an integer, or a finite decimal (`0.125`, `-3.5e-2`) into an
/// exact rational. Decimals are read exactly, not through `f64`.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    if let Some((p, q)) = text.split_once('/') {
        let p = BigInt::from_str(p.trim()).ok()?;
        let q = BigInt::from_str(q.trim()).ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Rational::new(p, q));
    }
    parse_decimal(text)
}

fn parse_decimal(text: &str) -> Option<Rational> {
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(BigInt::from_str(&digits).ok()?);
    let scale = exponent - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    let factor = num::pow::pow(ten, scale.unsigned_abs() as usize);
    if scale >= 0 {
        value *= factor;
    } else {
        value /= factor;
    }
    Some(if negative { -value } else { value })
}

/// Parses a scalar in the given mode. Rational text (`p/q`) is accepted in
/// float mode and converted.
pub fn parse_scalar<S: Scalar>(text: &str) -> Option<S> {
    match S::MODE {
        ScalarMode::Rational => parse_rational(text).map(|r| S::from_rational(&r)),
        ScalarMode::Float => {
            if text.contains('/') {
                parse_rational(text).map(|r| S::from_rational(&r))
            } else {
                // f64 -> Rational is exact, so the round trip back is lossless.
                let v = text.trim().parse::<f64>().ok().filter(|v| v.is_finite())?;
                Rational::from_float(v).map(|r| S::from_rational(&r))
            }
        }
    }
}

/// Half the l1 distance between two distributions given as aligned slices.
pub fn statistical_difference<S: Scalar>(p: &[S], q: &[S]) -> S {
    let total: S = p.iter().zip(q).map(|(a, b)| (a.clone() - b.clone()).abs()).sum();
    total / S::from_ratio(2, 1)
}

pub fn sum<S: Scalar>(values: &[S]) -> S {
    values.iter().cloned().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn parses_fraction_and_decimal_exactly() {
        assert_eq!(parse_rational("1/3"), Some(r(1, 3)));
        assert_eq!(parse_rational("2/6"), Some(r(1, 3)));
        assert_eq!(parse_rational("0.125"), Some(r(1, 8)));
        assert_eq!(parse_rational("-1.5e-1"), Some(r(-3, 20)));
        assert_eq!(parse_rational("3"), Some(r(3, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational("."), None);
    }

    #[test]
    fn text_form_is_canonical() {
        assert_eq!(r(2, 4).to_text(), "1/2");
        assert_eq!(r(4, 2).to_text(), "2");
        assert_eq!(r(-3, 9).to_text(), "-1/3");
    }

    #[test]
    fn float_mode_accepts_fraction_text() {
        assert_eq!(parse_scalar::<f64>("1/4"), Some(0.25));
        assert_eq!(parse_scalar::<f64>("0.5"), Some(0.5));
        assert_eq!(parse_scalar::<f64>("nan"), None);
    }

    #[test]
    fn statistical_difference_of_point_masses() {
        let p = [r(1, 1), r(0, 1)];
        let q = [r(0, 1), r(1, 1)];
        assert_eq!(statistical_difference(&p, &q), r(1, 1));
        assert_eq!(statistical_difference(&p, &p), r(0, 1));
    }
}
