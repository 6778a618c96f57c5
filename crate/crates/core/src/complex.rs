//! Exact Gaussian rationals, used for translation parameters and pole
//! coordinates.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{parse_ratio, ratio_to_f64, ratio_to_string};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl CRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        CRational { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        CRational { re, im: BigRational::zero() }
    }

    pub fn from_i64(re: i64, im: i64) -> Self {
        CRational {
            re: BigRational::from_integer(re.into()),
            im: BigRational::from_integer(im.into()),
        }
    }

    pub fn one() -> Self {
        Self::from_i64(1, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        CRational { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Invalid("inverse of zero".into()));
        }
        let n = self.norm_sqr();
        Ok(CRational { re: &self.re / &n, im: -(&self.im / &n) })
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, e: &BigInt) -> Result<Self> {
        if let Some(k) = self.unit_index() {
            let r = (BigInt::from(k) * e).mod_floor(&BigInt::from(4));
            return Ok(Self::unit(r.to_u8().unwrap_or(0)));
        }
        let base = if e.is_negative() { self.inv()? } else { self.clone() };
        let mut k = e.abs();
        let mut acc = CRational::one();
        let mut b = base;
        let two = BigInt::from(2);
        while !k.is_zero() {
            if (&k % &two).is_one() {
                acc = &acc * &b;
            }
            b = &b * &b;
            k /= &two;
        }
        Ok(acc)
    }

    /// k with self = i^k, for the four Gaussian units.
    fn unit_index(&self) -> Option<u8> {
        let one = BigRational::one();
        let z = BigRational::zero();
        match (&self.re, &self.im) {
            (r, i) if *r == one && *i == z => Some(0),
            (r, i) if *r == z && *i == one => Some(1),
            (r, i) if *r == -one.clone() && *i == z => Some(2),
            (r, i) if *r == z && *i == -one.clone() => Some(3),
            _ => None,
        }
    }

    fn unit(k: u8) -> Self {
        match k % 4 {
            0 => CRational::from_i64(1, 0),
            1 => CRational::from_i64(0, 1),
            2 => CRational::from_i64(-1, 0),
            _ => CRational::from_i64(0, -1),
        }
    }

    pub fn to_c64(&self) -> (f64, f64) {
        (ratio_to_f64(&self.re), ratio_to_f64(&self.im))
    }

    /// Parses `a`, `a+bi`, `a-b i`, `bi` with rational a, b.
    pub fn parse(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let err = || Error::Parse { pos: 0, msg: format!("bad complex number '{s}'") };
        if t.is_empty() {
            return Err(err());
        }
        if !t.ends_with('i') {
            return Ok(CRational::real(parse_ratio(&t).ok_or_else(err)?));
        }
        let body = &t[..t.len() - 1];
        // split at the last sign that is not at position 0 and not after '/'
        let mut split = None;
        for (i, c) in body.char_indices().rev() {
            if (c == '+' || c == '-') && i > 0 {
                split = Some(i);
                break;
            }
        }
        let (re_s, im_s) = match split {
            Some(i) => (&body[..i], &body[i..]),
            None => ("0", body),
        };
        let im_s = match im_s {
            "" | "+" => "1",
            "-" => "-1",
            x => x.trim_start_matches('+'),
        };
        Ok(CRational {
            re: parse_ratio(re_s).ok_or_else(err)?,
            im: parse_ratio(im_s).ok_or_else(err)?,
        })
    }
}

impl fmt::Display for CRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", ratio_to_string(&self.re))
        } else if self.im.is_negative() {
            write!(f, "{}-{}i", ratio_to_string(&self.re), ratio_to_string(&-self.im.clone()))
        } else {
            write!(f, "{}+{}i", ratio_to_string(&self.re), ratio_to_string(&self.im))
        }
    }
}

impl Serialize for CRational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for CRational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        CRational::parse(&s).map_err(serde::de::Error::custom)
    }
}

impl<'a> Add<&'a CRational> for &'a CRational {
    type Output = CRational;
    fn add(self, o: &CRational) -> CRational {
        CRational { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl<'a> Sub<&'a CRational> for &'a CRational {
    type Output = CRational;
    fn sub(self, o: &CRational) -> CRational {
        CRational { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl<'a> Mul<&'a CRational> for &'a CRational {
    type Output = CRational;
    fn mul(self, o: &CRational) -> CRational {
        CRational {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Neg for CRational {
    type Output = CRational;
    fn neg(self) -> CRational {
        CRational { re: -self.re, im: -self.im }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let z = CRational::parse("1/2-3i").unwrap();
        assert_eq!(z, CRational::new(BigRational::new(1.into(), 2.into()), BigRational::from_integer((-3).into())));
        assert_eq!(z.to_string(), "1/2-3i");
        assert_eq!(CRational::parse("-2").unwrap(), CRational::from_i64(-2, 0));
        assert_eq!(CRational::parse("i").unwrap(), CRational::from_i64(0, 1));
        assert_eq!(CRational::parse("2 + 1 i").unwrap(), CRational::from_i64(2, 1));
    }

    #[test]
    fn powers() {
        let z = CRational::from_i64(1, 2);
        let z5 = z.pow(&BigInt::from(5)).unwrap();
        assert_eq!(z5, CRational::from_i64(41, -38));
        let zi = z.pow(&BigInt::from(-1)).unwrap();
        assert_eq!(&zi * &z, CRational::one());
    }
}
