use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::complex::CRational;
use crate::error::{Error, Result};
use crate::lattice::{IntegerMatrix, LatticeVector};
use crate::scalar::{parse_ratio, ratio_to_string};
use num_traits::ToPrimitive;

/// Laurent polynomial in x₁, x₂ with Gaussian-rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<(i64, i64), CRational>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: CRational) -> Self {
        let mut p = Self::zero();
        p.add_term((0, 0), c);
        p
    }

    pub fn monomial(a: i64, b: i64) -> Self {
        let mut p = Self::zero();
        p.add_term((a, b), CRational::one());
        p
    }

    /// From (coefficient, a, b) triples with integer coefficients.
    pub fn from_terms(ts: &[(i64, i64, i64)]) -> Self {
        let mut p = Self::zero();
        for &(c, a, b) in ts {
            p.add_term((a, b), CRational::from_i64(c, 0));
        }
        p
    }

    pub fn add_term(&mut self, e: (i64, i64), c: CRational) {
        let entry = self.terms.entry(e).or_insert_with(|| CRational::from_i64(0, 0));
        *entry = &*entry + &c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i64, i64), &CRational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn exponents(&self) -> Vec<(i64, i64)> {
        self.terms.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &LaurentPoly) -> LaurentPoly {
        let mut p = self.clone();
        for (e, c) in &o.terms {
            p.add_term(*e, c.clone());
        }
        p
    }

    pub fn neg(&self) -> LaurentPoly {
        LaurentPoly { terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect() }
    }

    pub fn mul(&self, o: &LaurentPoly) -> LaurentPoly {
        let mut p = LaurentPoly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                p.add_term((e1.0 + e2.0, e1.1 + e2.1), c1 * c2);
            }
        }
        p
    }

    /// P∘h_B where h_B(x) = (x^{row 1 of B}, x^{row 2 of B}).
    pub fn compose_monomial(&self, b: &IntegerMatrix) -> Result<LaurentPoly> {
        let m = b.to_i64().ok_or_else(|| Error::Budget("matrix entries exceed 64 bits".into()))?;
        let mut p = LaurentPoly::zero();
        for (&(e1, e2), c) in &self.terms {
            let a = e1.checked_mul(m[0][0]).and_then(|x| x.checked_add(e2.checked_mul(m[1][0])?));
            let bb = e1.checked_mul(m[0][1]).and_then(|x| x.checked_add(e2.checked_mul(m[1][1])?));
            match (a, bb) {
                (Some(a), Some(bb)) => p.add_term((a, bb), c.clone()),
                _ => return Err(Error::Budget("exponent overflow".into())),
            }
        }
        Ok(p)
    }

    /// P(y₁x₁, y₂x₂).
    pub fn compose_translation(&self, y1: &CRational, y2: &CRational) -> Result<LaurentPoly> {
        let mut p = LaurentPoly::zero();
        for (&(a, b), c) in &self.terms {
            let f = &y1.pow(&a.into())? * &y2.pow(&b.into())?;
            p.add_term((a, b), c * &f);
        }
        Ok(p)
    }

    /// Divides by the monomial with the componentwise minimal exponents.
    pub fn strip_monomial(&self) -> LaurentPoly {
        if self.is_zero() {
            return self.clone();
        }
        let ma = self.terms.keys().map(|e| e.0).min().unwrap();
        let mb = self.terms.keys().map(|e| e.1).min().unwrap();
        LaurentPoly { terms: self.terms.iter().map(|(e, c)| ((e.0 - ma, e.1 - mb), c.clone())).collect() }
    }

    /// Scales so that the lexicographically first coefficient is 1.
    pub fn monic(&self) -> LaurentPoly {
        match self.terms.values().next() {
            None => self.clone(),
            Some(c) => {
                let inv = c.inv().expect("nonzero");
                LaurentPoly { terms: self.terms.iter().map(|(e, x)| (*e, x * &inv)).collect() }
            }
        }
    }

    /// ord_v(P) = min over the support of ⟨m, v⟩.
    pub fn ord(&self, v: &LatticeVector) -> Option<num_bigint::BigInt> {
        self.terms
            .keys()
            .map(|&(a, b)| &v.a * a + &v.b * b)
            .min()
    }

    /// Initial form along v: the terms achieving ord_v.
    pub fn initial_form(&self, v: &LatticeVector) -> LaurentPoly {
        let Some(o) = self.ord(v) else { return self.clone() };
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .filter(|(&(a, b), _)| &v.a * a + &v.b * b == o)
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
        }
    }

    pub fn eval_c64(&self, x1: Complex64, x2: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|(&(a, b), c)| {
                let (re, im) = c.to_c64();
                Complex64::new(re, im) * x1.powi(a as i32) * x2.powi(b as i32)
            })
            .sum()
    }

    pub fn eval_exact(&self, x1: &CRational, x2: &CRational) -> Result<CRational> {
        let mut acc = CRational::from_i64(0, 0);
        for (&(a, b), c) in &self.terms {
            let t = &(c * &x1.pow(&a.into())?) * &x2.pow(&b.into())?;
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// log|P(x)| for x = (e^{−u₁+iθ₁}, e^{−u₂+iθ₂}), stable for huge |u|.
    pub fn log_abs_on_fiber(&self, u: [f64; 2], theta: [f64; 2]) -> f64 {
        let mut logs = Vec::with_capacity(self.terms.len());
        for (&(a, b), c) in &self.terms {
            let (re, im) = c.to_c64();
            let cz = Complex64::new(re, im);
            let lm = cz.norm().ln() - a as f64 * u[0] - b as f64 * u[1];
            let ph = cz.arg() + a as f64 * theta[0] + b as f64 * theta[1];
            logs.push((lm, ph));
        }
        let mx = logs.iter().map(|x| x.0).fold(f64::NEG_INFINITY, f64::max);
        let s: Complex64 = logs.iter().map(|&(lm, ph)| Complex64::from_polar((lm - mx).exp(), ph)).sum();
        // cancellation down to rounding level means the point is a zero of P
        if s.norm() < 1e-12 * logs.len() as f64 {
            return f64::NEG_INFINITY;
        }
        s.norm().ln() + mx
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(|c| c.is_real())
    }

    /// Parses terms `c*x1^a*x2^b` separated by `+`/`-`.
    pub fn parse(s: &str) -> Result<LaurentPoly> {
        Parser { s: s.as_bytes(), pos: 0 }.poly()
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.to_string() })
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn poly(&mut self) -> Result<LaurentPoly> {
        let mut p = LaurentPoly::zero();
        let mut first = true;
        loop {
            let sign = match self.peek() {
                None if !first => break,
                None => return self.err("empty polynomial"),
                Some(b'+') => {
                    self.pos += 1;
                    1
                }
                Some(b'-') => {
                    self.pos += 1;
                    -1
                }
                Some(_) if first => 1,
                Some(_) => return self.err("expected '+' or '-'"),
            };
            first = false;
            let (e, c) = self.term()?;
            let c = if sign < 0 { -c } else { c };
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn term(&mut self) -> Result<((i64, i64), CRational)> {
        let mut coef = CRational::one();
        let mut e = (0i64, 0i64);
        let mut need_factor = true;
        match self.peek() {
            Some(b'(') => {
                let start = self.pos + 1;
                let end = match self.s[start..].iter().position(|&c| c == b')') {
                    Some(k) => start + k,
                    None => return self.err("unclosed '('"),
                };
                let txt = std::str::from_utf8(&self.s[start..end]).unwrap_or("");
                coef = CRational::parse(txt).map_err(|_| Error::Parse { pos: start, msg: "bad coefficient".into() })?;
                self.pos = end + 1;
                need_factor = false;
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                while self.pos < self.s.len() && (self.s[self.pos].is_ascii_digit() || b"./".contains(&self.s[self.pos])) {
                    self.pos += 1;
                }
                let txt = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("");
                let r: BigRational = match parse_ratio(txt) {
                    Some(r) => r,
                    None => return self.err("bad coefficient"),
                };
                coef = CRational::real(r);
                need_factor = false;
            }
            _ => {}
        }
        loop {
            if !need_factor {
                if self.peek() == Some(b'*') {
                    self.pos += 1;
                } else {
                    break;
                }
            }
            need_factor = false;
            self.ws();
            if self.s[self.pos..].starts_with(b"x1") || self.s[self.pos..].starts_with(b"x2") {
                let which = self.s[self.pos + 1];
                self.pos += 2;
                let mut k = 1i64;
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    k = self.exponent()?;
                }
                if which == b'1' {
                    e.0 += k;
                } else {
                    e.1 += k;
                }
            } else {
                return self.err("expected x1 or x2");
            }
        }
        Ok((e, coef))
    }

    fn exponent(&mut self) -> Result<i64> {
        self.ws();
        let paren = self.s.get(self.pos) == Some(&b'(');
        if paren {
            self.pos += 1;
        }
        self.ws();
        let start = self.pos;
        if matches!(self.s.get(self.pos), Some(b'-') | Some(b'+')) {
            self.pos += 1;
        }
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let txt = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("");
        let k: i64 = match txt.parse() {
            Ok(k) => k,
            Err(_) => return self.err("bad exponent"),
        };
        if paren {
            if self.peek() != Some(b')') {
                return self.err("expected ')'");
            }
            self.pos += 1;
        }
        Ok(k)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (&(a, b), c)) in self.terms.iter().enumerate() {
            let (neg, mag) = if c.is_real() && c.re.is_negative() {
                (true, CRational::real(-c.re.clone()))
            } else {
                (false, c.clone())
            };
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let mut factors = Vec::new();
            let unit = mag.is_real() && mag.re.is_one();
            if !unit || (a == 0 && b == 0) {
                if mag.is_real() {
                    factors.push(ratio_to_string(&mag.re));
                } else {
                    factors.push(format!("({mag})"));
                }
            }
            for (k, name) in [(a, "x1"), (b, "x2")] {
                match k {
                    0 => {}
                    1 => factors.push(name.to_string()),
                    k => factors.push(format!("{name}^{k}")),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

/// Integer-coefficient view, when all coefficients are integers.
impl LaurentPoly {
    pub fn integer_terms(&self) -> Option<Vec<((i64, i64), i64)>> {
        self.terms
            .iter()
            .map(|(e, c)| {
                if c.is_real() && c.re.is_integer() {
                    c.re.to_integer().to_i64().map(|v| (*e, v))
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn has_zero_constant_part(&self) -> bool {
        !self.terms.contains_key(&(0, 0)) || self.terms[&(0, 0)].is_zero()
    }

    pub fn coefficient(&self, e: (i64, i64)) -> CRational {
        self.terms.get(&e).cloned().unwrap_or_else(|| CRational::from_i64(0, 0))
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn all_coeffs_zero(&self) -> bool {
        self.terms.values().all(|c| c.re.is_zero() && c.im.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_roundtrip() {
        for s in ["1 + x1 + x2", "-3/2*x1^2*x2^-1 + 5", "x1*x2 - 2*x2^3", "(1+2i)*x1 + 1"] {
            let p = LaurentPoly::parse(s).unwrap();
            let back = LaurentPoly::parse(&p.to_string()).unwrap();
            assert_eq!(p, back, "{s}");
        }
        let p = LaurentPoly::parse("1+x1+x2+x1*x2").unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(p.to_string(), "1 + x2 + x1 + x1*x2");
        assert!(LaurentPoly::parse("1 + y").is_err());
        assert!(LaurentPoly::parse("").is_err());
    }

    #[test]
    fn substitutions() {
        let e = LaurentPoly::parse("1 - x1 + x2").unwrap();
        let b = IntegerMatrix::from_i64(1, -2, 2, 1);
        let q = e.compose_monomial(&b).unwrap();
        assert_eq!(q, LaurentPoly::parse("1 - x1*x2^-2 + x1^2*x2").unwrap());
        let t = e
            .compose_translation(&CRational::from_i64(2, 0), &CRational::from_i64(-1, 0))
            .unwrap();
        assert_eq!(t, LaurentPoly::parse("1 - 2*x1 - x2").unwrap());
    }

    #[test]
    fn fiber_log_is_stable() {
        let p = LaurentPoly::parse("1 + x1 + x2").unwrap();
        let v = p.log_abs_on_fiber([-800.0, 3.0], [0.3, 0.1]);
        assert!((v - 800.0).abs() < 1e-9);
    }
}
