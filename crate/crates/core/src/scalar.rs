//! Scalar tower: exact rationals by default, doubles in numeric mode.

use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Equality tolerance in numeric mode.
pub const NUMERIC_TOL: f64 = 1e-9;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(x: &BigInt) -> Self;
    fn from_ratio(x: &BigRational) -> Self;
    fn to_f64(&self) -> f64;
    /// Sign, with a tolerance band around zero for floats.
    fn sign(&self) -> Ordering;

    fn from_i64(x: i64) -> Self {
        Self::from_int(&BigInt::from(x))
    }
    fn is_zero_tol(&self) -> bool {
        self.sign() == Ordering::Equal
    }
    fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).is_zero_tol()
    }
    fn is_exact() -> bool;
}

impl Scalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_int(x: &BigInt) -> Self {
        BigRational::from_integer(x.clone())
    }
    fn from_ratio(x: &BigRational) -> Self {
        x.clone()
    }
    fn to_f64(&self) -> f64 {
        ratio_to_f64(self)
    }
    fn sign(&self) -> Ordering {
        if self.is_zero() {
            Ordering::Equal
        } else if self.is_positive() {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
    fn is_exact() -> bool {
        true
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_int(x: &BigInt) -> Self {
        int_to_f64(x)
    }
    fn from_ratio(x: &BigRational) -> Self {
        ratio_to_f64(x)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn sign(&self) -> Ordering {
        if self.abs() <= NUMERIC_TOL {
            Ordering::Equal
        } else if *self > 0.0 {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
    fn is_exact() -> bool {
        false
    }
}

pub fn int_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(if x.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

/// Rational to double without overflowing on huge numerators/denominators.
pub fn ratio_to_f64(x: &BigRational) -> f64 {
    let (m1, e1) = split_big(x.numer());
    let (m2, e2) = split_big(x.denom());
    if m2 == 0.0 {
        return f64::NAN;
    }
    (m1 / m2) * 2f64.powi((e1 - e2) as i32)
}

/// Writes x = m * 2^e with |m| < 2^64, exactly enough for double conversion.
pub fn split_big(x: &BigInt) -> (f64, i64) {
    let bits = x.bits() as i64;
    if bits <= 64 {
        return (int_to_f64(x), 0);
    }
    let shift = bits - 64;
    let top: BigInt = x >> (shift as usize);
    (int_to_f64(&top), shift)
}

/// Natural log of |x| for a huge integer.
pub fn ln_abs_big(x: &BigInt) -> f64 {
    let (m, e) = split_big(x);
    m.abs().ln() + e as f64 * std::f64::consts::LN_2
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn ratio_to_string(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_ratio(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(BigRational::new(n, d))
    } else if let Some((ip, fp)) = s.split_once('.') {
        let neg = ip.trim_start().starts_with('-');
        let ip_abs = ip.trim().trim_start_matches(['-', '+']);
        let digits = format!("{}{}", if ip_abs.is_empty() { "0" } else { ip_abs }, fp);
        let n: BigInt = digits.parse().ok()?;
        let d = num_traits::pow(BigInt::from(10), fp.len());
        let r = BigRational::new(n, d);
        Some(if neg { -r } else { r })
    } else {
        Some(BigRational::from_integer(s.parse().ok()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn huge_ratio_to_f64() {
        let big = num_traits::pow(BigInt::from(10), 400);
        let x = BigRational::new(big.clone() * 3, big);
        assert!((ratio_to_f64(&x) - 3.0).abs() < 1e-15);
        let y = num_traits::pow(BigInt::from(5), 1000);
        assert!((ln_abs_big(&y) - 1000.0 * 5f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_ratio("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_ratio("-2").unwrap(), rat(-2, 1));
        assert_eq!(parse_ratio("-0.25").unwrap(), rat(-1, 4));
        assert!(parse_ratio("1/0").is_none());
    }

    #[test]
    fn float_sign_has_band() {
        assert_eq!(1e-12f64.sign(), Ordering::Equal);
        assert_eq!((-1e-3f64).sign(), Ordering::Less);
    }
}
