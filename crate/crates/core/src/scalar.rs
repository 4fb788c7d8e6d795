//! Number modes.
//!
//! Every engine is generic over [`Scalar`]. Three implementations ship:
//!
//! - `f64`: the default float mode;
//! - [`DoubleDouble`]: used internally by the float mode of the
//!   alternating-sum engines whose terms cancel by many orders of magnitude;
//! - [`Rational`]: exact arbitrary-precision rationals, selected when `p` is
//!   given as an integer fraction.
//!
//! [`Field`] is the smaller contract needed by the hypergeometric evaluator,
//! which also runs over complex numbers.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use rug::{Float, Integer, Rational};
use twofloat::TwoFloat;

pub trait Field:
    Clone
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn is_zero(&self) -> bool;

    fn powu(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

pub trait Scalar: Field + PartialOrd + Send + Sync + 'static {
    /// True when arithmetic is exact.
    const EXACT: bool;

    fn from_integer(v: &Integer) -> Self;
    fn from_rational(v: &Rational) -> Self;
    /// Exact value; panics on non-finite floats.
    fn to_rational(&self) -> Rational;
    fn to_f64(&self) -> f64;

    /// Sum of `terms`. The `f64` implementation is compensated.
    fn sum_terms<I: IntoIterator<Item = Self>>(terms: I) -> Self {
        terms.into_iter().fold(Self::zero(), |acc, t| acc + t)
    }

    fn cast<T: Scalar>(&self) -> T {
        T::from_rational(&self.to_rational())
    }

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl Field for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn powu(&self, e: u32) -> Self {
        match i32::try_from(e) {
            Ok(e) => self.powi(e),
            Err(_) => self.powf(e as f64),
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_integer(v: &Integer) -> Self {
        Float::with_val(53, v).to_f64()
    }
    fn from_rational(v: &Rational) -> Self {
        Float::with_val(53, v).to_f64()
    }
    fn to_rational(&self) -> Rational {
        Rational::from_f64(*self).expect("finite f64")
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn sum_terms<I: IntoIterator<Item = Self>>(terms: I) -> Self {
        let mut acc = CompensatedSum::new();
        for t in terms {
            acc.add(t);
        }
        acc.value()
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
}

/// Double-double arithmetic.
///
/// Addition and multiplication are those of [`TwoFloat`]; division is done
/// here by long division, since `TwoFloat`'s own quotient is only accurate
/// to double precision.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct DoubleDouble(pub TwoFloat);

impl DoubleDouble {
    pub fn hi(self) -> f64 {
        self.0.hi()
    }

    pub fn lo(self) -> f64 {
        self.0.lo()
    }
}

impl From<f64> for DoubleDouble {
    fn from(v: f64) -> Self {
        Self(TwoFloat::from(v))
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(self.0 - rhs.0)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self(self.0 * rhs.0)
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let y = rhs.0;
        let q1 = self.0.hi() / y.hi();
        let r = self.0 - y * q1;
        let q2 = r.hi() / y.hi();
        let r = r - y * q2;
        let q3 = r.hi() / y.hi();
        Self(TwoFloat::new_add(q1, q2) + q3)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        Self(-self.0)
    }
}

impl Field for DoubleDouble {
    fn zero() -> Self {
        Self::from(0.0)
    }
    fn one() -> Self {
        Self::from(1.0)
    }
    fn from_i64(v: i64) -> Self {
        Self(TwoFloat::from(v))
    }
    fn is_zero(&self) -> bool {
        self.hi() == 0.0 && self.lo() == 0.0
    }
}

impl Scalar for DoubleDouble {
    const EXACT: bool = false;

    fn from_integer(v: &Integer) -> Self {
        Self::from_rational(&Rational::from(v))
    }
    fn from_rational(v: &Rational) -> Self {
        let hi = Float::with_val(53, v).to_f64();
        if !hi.is_finite() {
            return Self::from(hi);
        }
        let rest = v - Rational::from_f64(hi).expect("finite");
        let lo = Float::with_val(53, &rest).to_f64();
        Self(TwoFloat::new_add(hi, lo))
    }
    fn to_rational(&self) -> Rational {
        Rational::from_f64(self.hi()).expect("finite") + Rational::from_f64(self.lo()).expect("finite")
    }
    fn to_f64(&self) -> f64 {
        self.hi() + self.lo()
    }
}

impl Field for Rational {
    fn zero() -> Self {
        Rational::new()
    }
    fn one() -> Self {
        Rational::from(1)
    }
    fn from_i64(v: i64) -> Self {
        Rational::from(v)
    }
    fn is_zero(&self) -> bool {
        self.cmp0() == std::cmp::Ordering::Equal
    }
    fn powu(&self, e: u32) -> Self {
        use rug::ops::Pow;
        Rational::from(self.pow(e))
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_integer(v: &Integer) -> Self {
        Rational::from(v)
    }
    fn from_rational(v: &Rational) -> Self {
        v.clone()
    }
    fn to_rational(&self) -> Rational {
        self.clone()
    }
    fn to_f64(&self) -> f64 {
        Float::with_val(53, self).to_f64()
    }
}

impl Field for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn powu(&self, e: u32) -> Self {
        match i32::try_from(e) {
            Ok(e) => self.powi(e),
            Err(_) => self.powf(e as f64),
        }
    }
}

/// Parses `"a/b"`, an integer, or a finite decimal literal into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    if let Some((num, den)) = text.split_once('/') {
        let num: Integer = num.trim().parse().ok()?;
        let den: Integer = den.trim().parse().ok()?;
        if den.cmp0() == std::cmp::Ordering::Equal {
            return None;
        }
        return Some(Rational::from((num, den)));
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: Integer = format!("{int_part}{frac_part}").parse().ok()?;
    let mut value = Rational::from(all);
    let scale = exponent - frac_part.len() as i32;
    let ten = Rational::from(10);
    let factor = ten.clone().powu(scale.unsigned_abs());
    if scale >= 0 {
        value *= factor;
    } else {
        value /= factor;
    }
    if negative {
        value = -value;
    }
    Some(value)
}
