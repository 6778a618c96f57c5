//! Sparse polynomials in X0, X1, X2 with integer coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::int_to_f64;

pub type Mono = [u32; 3];

/// Keys are ordered lexicographically (X0 first); the last key is the
/// lex-leading monomial.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    terms: BTreeMap<Mono, BigInt>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial([0, 0, 0], c)
    }

    pub fn var(i: usize) -> Self {
        let mut e = [0; 3];
        e[i] = 1;
        Self::monomial(e, 1)
    }

    pub fn monomial(e: Mono, c: impl Into<BigInt>) -> Self {
        let mut p = Poly::zero();
        p.add_term(e, c.into());
        p
    }

    pub fn from_terms(ts: &[(i64, Mono)]) -> Self {
        let mut p = Poly::zero();
        for (c, e) in ts {
            p.add_term(*e, BigInt::from(*c));
        }
        p
    }

    pub fn add_term(&mut self, e: Mono, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, e: &Mono) -> BigInt {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e[0] + e[1] + e[2]).max().unwrap_or(0)
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let d = self.degree();
        self.terms.keys().all(|e| e[0] + e[1] + e[2] == d)
    }

    pub fn leading(&self) -> Option<(&Mono, &BigInt)> {
        self.terms.iter().next_back()
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(*e, c.clone());
        }
        r
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(*e, -c);
        }
        r
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }

    pub fn scale(&self, k: &BigInt) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(e, c)| (*e, c * k)).collect() }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut r = Poly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                r.add_term([e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2]], c1 * c2);
            }
        }
        r
    }

    pub fn mul_monomial(&self, e: Mono) -> Poly {
        Poly { terms: self.terms.iter().map(|(f, c)| ([f[0] + e[0], f[1] + e[1], f[2] + e[2]], c.clone())).collect() }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::constant(1);
        let mut b = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&b);
            }
            k >>= 1;
            if k > 0 {
                b = b.mul(&b);
            }
        }
        acc
    }

    pub fn derivative(&self, i: usize) -> Poly {
        let mut r = Poly::zero();
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut f = *e;
                f[i] -= 1;
                r.add_term(f, c * BigInt::from(e[i]));
            }
        }
        r
    }

    /// P(Q0, Q1, Q2).
    pub fn substitute(&self, q: &[Poly; 3]) -> Poly {
        let mut cache: [Vec<Poly>; 3] = [vec![Poly::constant(1)], vec![Poly::constant(1)], vec![Poly::constant(1)]];
        let mut r = Poly::zero();
        for (e, c) in &self.terms {
            let mut t = Poly::constant(c.clone());
            for i in 0..3 {
                while cache[i].len() <= e[i] as usize {
                    let next = cache[i].last().unwrap().mul(&q[i]);
                    cache[i].push(next);
                }
                t = t.mul(&cache[i][e[i] as usize]);
            }
            r = r.add(&t);
        }
        r
    }

    pub fn eval(&self, x: &[BigInt; 3]) -> BigInt {
        self.terms
            .iter()
            .map(|(e, c)| c * num_traits::pow(x[0].clone(), e[0] as usize) * num_traits::pow(x[1].clone(), e[1] as usize) * num_traits::pow(x[2].clone(), e[2] as usize))
            .sum()
    }

    pub fn eval_rational(&self, x: &[BigRational; 3]) -> BigRational {
        let mut s = BigRational::zero();
        for (e, c) in &self.terms {
            let mut t = BigRational::from_integer(c.clone());
            for i in 0..3 {
                t *= num_traits::pow(x[i].clone(), e[i] as usize);
            }
            s += t;
        }
        s
    }

    pub fn eval_mod(&self, x: &[u64; 3], p: u64) -> u64 {
        let mut s = 0u64;
        for (e, c) in &self.terms {
            let mut t = reduce_mod(c, p);
            for i in 0..3 {
                t = t * super::modp::pow_mod(x[i], e[i] as u64, p) % p;
            }
            s = (s + t) % p;
        }
        s
    }

    pub fn eval_c64(&self, x: &[Complex64; 3]) -> Complex64 {
        self.terms.iter().map(|(e, c)| x[0].powu(e[0]) * x[1].powu(e[1]) * x[2].powu(e[2]) * int_to_f64(c)).sum()
    }

    pub fn content(&self) -> BigInt {
        self.terms.values().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divides by the integer content and makes the leading coefficient positive.
    pub fn primitive_part(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.leading().unwrap().1.is_negative() {
            g = -g;
        }
        Poly { terms: self.terms.iter().map(|(e, c)| (*e, c / &g)).collect() }
    }

    /// Exact quotient, or None when `d` does not divide `self` over Z.
    pub fn divide_exact(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        let (ld, lc) = d.leading().map(|(e, c)| (*e, c.clone()))?;
        let mut rem = self.clone();
        let mut q = Poly::zero();
        while let Some((lr, cr)) = rem.leading().map(|(e, c)| (*e, c.clone())) {
            if (0..3).any(|i| lr[i] < ld[i]) {
                return None;
            }
            let (qc, r) = cr.div_rem(&lc);
            if !r.is_zero() {
                return None;
            }
            let e = [lr[0] - ld[0], lr[1] - ld[1], lr[2] - ld[2]];
            let t = Poly::monomial(e, qc);
            rem = rem.sub(&d.mul(&t));
            q = q.add(&t);
        }
        Some(q)
    }

    pub fn valuation(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).min().unwrap_or(0)
    }

    /// Divides by the largest monomial factor.
    pub fn strip_monomial(&self) -> (Mono, Poly) {
        let v = [self.valuation(0), self.valuation(1), self.valuation(2)];
        let p = Poly { terms: self.terms.iter().map(|(e, c)| ([e[0] - v[0], e[1] - v[1], e[2] - v[2]], c.clone())).collect() };
        (v, p)
    }

    /// Sets X0 = 1.
    pub fn dehomogenize(&self) -> Poly {
        let mut r = Poly::zero();
        for (e, c) in &self.terms {
            r.add_term([0, e[1], e[2]], c.clone());
        }
        r
    }

    /// Multiplies each term by the power of X0 bringing it to degree `d`.
    pub fn homogenize(&self, d: u32) -> Poly {
        Poly { terms: self.terms.iter().map(|(e, c)| ([d - e[1] - e[2] + e[0], e[1], e[2]], c.clone())).collect() }
    }

    /// Coefficients in X1 (index = power) as dense univariate polynomials in X2, for dehomogenized input.
    pub fn as_x_of_y(&self) -> Vec<Vec<BigInt>> {
        let dx = self.degree_in(1) as usize;
        let dy = self.degree_in(2) as usize;
        let mut out = vec![vec![BigInt::zero(); dy + 1]; dx + 1];
        for (e, c) in &self.terms {
            out[e[1] as usize][e[2] as usize] += c;
        }
        for row in &mut out {
            trim(row);
        }
        out
    }

    pub fn from_x_of_y(rows: &[Vec<BigInt>]) -> Poly {
        let mut p = Poly::zero();
        for (i, row) in rows.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                p.add_term([0, i as u32, j as u32], c.clone());
            }
        }
        p
    }

    pub fn parse(s: &str) -> Result<Poly> {
        let err = |pos: usize, msg: &str| Error::Parse { pos, msg: msg.to_string() };
        let bytes: Vec<char> = s.chars().collect();
        let mut i = 0;
        let mut p = Poly::zero();
        let skip = |i: &mut usize| {
            while *i < bytes.len() && (bytes[*i].is_whitespace() || bytes[*i] == '*') {
                *i += 1;
            }
        };
        let mut first = true;
        loop {
            skip(&mut i);
            if i >= bytes.len() {
                break;
            }
            let mut sign = BigInt::one();
            if bytes[i] == '+' || bytes[i] == '-' {
                if bytes[i] == '-' {
                    sign = -sign;
                }
                i += 1;
                skip(&mut i);
            } else if !first {
                return Err(err(i, "expected '+' or '-'"));
            }
            first = false;
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let mut coeff = if i > start {
                bytes[start..i].iter().collect::<String>().parse::<BigInt>().map_err(|_| err(start, "bad coefficient"))?
            } else {
                BigInt::one()
            };
            let mut e = [0u32; 3];
            let mut any = i > start;
            loop {
                skip(&mut i);
                if i < bytes.len() && bytes[i] == 'X' {
                    let at = i;
                    i += 1;
                    let v = match bytes.get(i) {
                        Some('0') => 0,
                        Some('1') => 1,
                        Some('2') => 2,
                        _ => return Err(err(at, "expected X0, X1 or X2")),
                    };
                    i += 1;
                    let mut k = 1u32;
                    if bytes.get(i) == Some(&'^') {
                        i += 1;
                        let s0 = i;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                        k = bytes[s0..i].iter().collect::<String>().parse().map_err(|_| err(s0, "bad exponent"))?;
                    }
                    e[v] += k;
                    any = true;
                } else {
                    break;
                }
            }
            if !any {
                return Err(err(i, "expected a term"));
            }
            coeff *= sign;
            p.add_term(e, coeff);
        }
        if first {
            return Err(err(0, "empty polynomial"));
        }
        Ok(p)
    }
}

pub(crate) fn trim(v: &mut Vec<BigInt>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

pub(crate) fn reduce_mod(c: &BigInt, p: u64) -> u64 {
    c.mod_floor(&BigInt::from(p)).to_u64().expect("reduced")
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let a = c.abs();
            let mut parts: Vec<String> = Vec::new();
            if !a.is_one() || e.iter().all(|&x| x == 0) {
                parts.push(a.to_string());
            }
            for (i, &x) in e.iter().enumerate() {
                match x {
                    0 => {}
                    1 => parts.push(format!("X{i}")),
                    _ => parts.push(format!("X{i}^{x}")),
                }
            }
            write!(f, "{}", parts.join(" "))?;
        }
        Ok(())
    }
}
