//! Generators and composition words.

use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::complex::CRational;
use crate::error::{Error, Result};
use crate::lattice::{Fan, IntegerMatrix, LatticeVector};
use crate::oracle::PolyMap;
use crate::support::{ronkin_edges, ronkin_hull, LaurentPoly};
use crate::trop::TropMap;

/// A birational map supplied as three homogeneous polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UserMap {
    pub name: String,
    pub map: PolyMap,
    pub rho: BigInt,
}

#[derive(Deserialize)]
struct UserFile {
    components: [String; 3],
    rho: i64,
}

impl UserMap {
    /// Reads `{"components": [F0, F1, F2], "rho": n}` and validates ρ.
    pub fn load(path: &Path) -> Result<UserMap> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
        let f: UserFile = serde_json::from_str(&text).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
        let comps = [
            crate::oracle::Poly::parse(&f.components[0])?,
            crate::oracle::Poly::parse(&f.components[1])?,
            crate::oracle::Poly::parse(&f.components[2])?,
        ];
        Self::new(path.display().to_string(), PolyMap::new(comps)?, BigInt::from(f.rho))
    }

    pub fn new(name: String, map: PolyMap, rho: BigInt) -> Result<UserMap> {
        let got = sample_rho(&map)?;
        if got != rho {
            return Err(Error::Invalid(format!("declared rho {rho} but f*eta/eta = {got}")));
        }
        Ok(UserMap { name, map, rho })
    }

    /// Tropicalization read off the Newton polygons of the components.
    pub fn trop(&self) -> Result<TropMap> {
        let c = self.map.components();
        let pts: Vec<Vec<(i64, i64)>> = c
            .iter()
            .map(|p| p.dehomogenize().terms().map(|(e, _)| (e[1] as i64, e[2] as i64)).collect())
            .collect();
        let ord = |k: usize, v: &LatticeVector| -> BigInt {
            pts[k].iter().map(|&(a, b)| &v.a * a + &v.b * b).min().expect("nonzero component")
        };
        let mut rays: Vec<LatticeVector> = Fan::p2().rays().iter().map(|r| r.v().clone()).collect();
        for ps in &pts {
            for (n, _) in ronkin_edges(&ronkin_hull(ps)) {
                rays.push(n);
            }
        }
        let fan = Fan::from_rays(&rays)?;
        let image = |v: &LatticeVector| LatticeVector::new(ord(1, v) - ord(0, v), ord(2, v) - ord(0, v));
        let mut mats = Vec::with_capacity(fan.len());
        for i in 0..fan.len() {
            let a = fan.ray(i);
            let b = fan.ray(i + 1);
            let (ia, ib) = (image(a), image(b));
            let d = a.det(b);
            // [ia ib]·adj([a b]) / d
            let e = |x: BigInt| -> Result<BigInt> {
                let (q, r) = x.div_rem(&d);
                if r.is_zero() {
                    Ok(q)
                } else {
                    Err(Error::Invalid("tropicalization not integral".into()))
                }
            };
            let m = IntegerMatrix::new(
                e(&ia.a * &b.b - &ib.a * &a.b)?,
                e(&ib.a * &a.a - &ia.a * &b.a)?,
                e(&ia.b * &b.b - &ib.b * &a.b)?,
                e(&ib.b * &a.a - &ia.b * &b.a)?,
            );
            mats.push(m);
        }
        TropMap::new(fan, mats)
    }
}

fn is_trivial(g: &Generator) -> bool {
    match g {
        Generator::Monomial(a) => a.is_identity(),
        Generator::Translation(a, b) => *a == CRational::one() && *b == CRational::one(),
        _ => false,
    }
}

/// f*η/η at three seeded rational points, required to agree.
fn sample_rho(map: &PolyMap) -> Result<BigInt> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7265_6c6f);
    let c = map.components();
    let d: Vec<[crate::oracle::Poly; 3]> = c.iter().map(|p| [p.derivative(0), p.derivative(1), p.derivative(2)]).collect();
    let mut seen: Option<BigRational> = None;
    let mut tries = 0;
    while tries < 3 {
        let x1 = BigRational::new(BigInt::from(rng.gen_range(-50i64..50)), BigInt::from(rng.gen_range(1i64..20)));
        let x2 = BigRational::new(BigInt::from(rng.gen_range(-50i64..50)), BigInt::from(rng.gen_range(1i64..20)));
        if x1.is_zero() || x2.is_zero() {
            continue;
        }
        let pt = [BigRational::one(), x1.clone(), x2.clone()];
        let f: Vec<BigRational> = c.iter().map(|p| p.eval_rational(&pt)).collect();
        if f.iter().any(|v| v.is_zero()) {
            continue;
        }
        let g = |i: usize, k: usize| d[i][k].eval_rational(&pt);
        // ∂(F_i/F_0)/∂x_k
        let q = |i: usize, k: usize| (g(i, k) * &f[0] - &f[i] * g(0, k)) / (&f[0] * &f[0]);
        let jac = q(1, 1) * q(2, 2) - q(1, 2) * q(2, 1);
        let r = jac * &x1 * &x2 * &f[0] * &f[0] / (&f[1] * &f[2]);
        if let Some(s) = &seen {
            if *s != r {
                return Err(Error::Invalid("f*eta/eta is not constant".into()));
            }
        }
        seen = Some(r);
        tries += 1;
    }
    let r = seen.unwrap();
    if !r.is_integer() {
        return Err(Error::Invalid(format!("f*eta/eta = {r} is not an integer")));
    }
    Ok(r.to_integer())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generator {
    Monomial(IntegerMatrix),
    Translation(CRational, CRational),
    StdInvolution,
    UserBirational(Box<UserMap>),
}

impl Generator {
    pub fn monomial(a: i64, b: i64, c: i64, d: i64) -> Result<Generator> {
        let m = IntegerMatrix::from_i64(a, b, c, d);
        if m.det().is_zero() {
            return Err(Error::Singular);
        }
        Ok(Generator::Monomial(m))
    }

    pub fn translation(y1: CRational, y2: CRational) -> Result<Generator> {
        if y1.is_zero() || y2.is_zero() {
            return Err(Error::Invalid("translation factors must be nonzero".into()));
        }
        Ok(Generator::Translation(y1, y2))
    }

    pub fn rho(&self) -> BigInt {
        match self {
            Generator::Monomial(a) => a.det().clone(),
            Generator::Translation(..) | Generator::StdInvolution => BigInt::one(),
            Generator::UserBirational(u) => u.rho.clone(),
        }
    }

    pub fn trop(&self) -> Result<TropMap> {
        match self {
            Generator::Monomial(a) => TropMap::linear(a.clone()),
            Generator::Translation(..) | Generator::StdInvolution => Ok(TropMap::identity()),
            Generator::UserBirational(u) => u.trop(),
        }
    }

    pub fn eval_c64(&self, x: (Complex64, Complex64)) -> (Complex64, Complex64) {
        match self {
            Generator::Monomial(a) => {
                let m = a.to_i64().expect("64-bit exponents");
                (x.0.powi(m[0][0] as i32) * x.1.powi(m[0][1] as i32), x.0.powi(m[1][0] as i32) * x.1.powi(m[1][1] as i32))
            }
            Generator::Translation(y1, y2) => {
                let (a, b) = y1.to_c64();
                let (c, d) = y2.to_c64();
                (x.0 * Complex64::new(a, b), x.1 * Complex64::new(c, d))
            }
            Generator::StdInvolution => {
                let one = Complex64::new(1.0, 0.0);
                let den = x.0 + x.1 - one;
                (x.0 * (one - x.0 + x.1) / den, x.1 * (one + x.0 - x.1) / den)
            }
            Generator::UserBirational(u) => {
                let one = Complex64::new(1.0, 0.0);
                let v = u.map.eval_c64(&[one, x.0, x.1]);
                (v[1] / v[0], v[2] / v[0])
            }
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Monomial(a) => write!(f, "m[{},{};{},{}]", a.entry(0, 0), a.entry(0, 1), a.entry(1, 0), a.entry(1, 1)),
            Generator::Translation(y1, y2) => write!(f, "t[{y1},{y2}]"),
            Generator::StdInvolution => write!(f, "g"),
            Generator::UserBirational(u) => write!(f, "user:{}", u.name),
        }
    }
}

/// Letters in written order: the rightmost letter is applied first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToricWord {
    letters: Vec<Generator>,
}

impl ToricWord {
    pub fn new(letters: Vec<Generator>) -> Result<ToricWord> {
        if letters.is_empty() {
            return Err(Error::Invalid("empty word".into()));
        }
        Ok(ToricWord { letters })
    }

    pub fn single(g: Generator) -> ToricWord {
        ToricWord { letters: vec![g] }
    }

    pub fn identity() -> ToricWord {
        Self::single(Generator::Monomial(IntegerMatrix::identity()))
    }

    pub fn letters(&self) -> &[Generator] {
        &self.letters
    }

    /// Letters in application order (rightmost first).
    pub fn applied(&self) -> impl Iterator<Item = &Generator> {
        self.letters.iter().rev()
    }

    /// self ∘ other.
    pub fn then_after(&self, other: &ToricWord) -> ToricWord {
        let mut l = self.letters.clone();
        l.extend(other.letters.iter().cloned());
        ToricWord { letters: l }
    }

    pub fn power(&self, n: usize) -> ToricWord {
        if n == 0 {
            return Self::identity();
        }
        let mut l = Vec::with_capacity(self.letters.len() * n);
        for _ in 0..n {
            l.extend(self.letters.iter().cloned());
        }
        ToricWord { letters: l }
    }

    pub fn is_monomial_only(&self) -> bool {
        self.letters.iter().all(|g| matches!(g, Generator::Monomial(_) | Generator::Translation(..)))
    }

    /// Cancels g∘g and merges adjacent monomial and translation letters.
    pub fn reduced(&self) -> ToricWord {
        let mut out: Vec<Generator> = Vec::with_capacity(self.letters.len());
        for g in &self.letters {
            let mut cur = g.clone();
            loop {
                if is_trivial(&cur) {
                    break;
                }
                let merged = match (out.last(), &cur) {
                    (Some(Generator::StdInvolution), Generator::StdInvolution) => {
                        out.pop();
                        None
                    }
                    (Some(Generator::Monomial(a)), Generator::Monomial(b)) => {
                        let m = a.mul(b);
                        out.pop();
                        Some(Generator::Monomial(m))
                    }
                    (Some(Generator::Translation(a1, a2)), Generator::Translation(b1, b2)) => {
                        let t = Generator::Translation(a1 * b1, a2 * b2);
                        out.pop();
                        Some(t)
                    }
                    _ => {
                        out.push(cur.clone());
                        None
                    }
                };
                match merged {
                    Some(m) => cur = m,
                    None => break,
                }
            }
        }
        if out.is_empty() {
            return Self::identity();
        }
        ToricWord { letters: out }
    }

    pub fn rho(&self) -> BigInt {
        self.letters.iter().map(|g| g.rho()).product()
    }

    pub fn trop(&self) -> Result<TropMap> {
        let mut t = TropMap::identity();
        for g in self.applied() {
            t = g.trop()?.compose(&t)?;
        }
        Ok(t)
    }

    pub fn eval_c64(&self, x: (Complex64, Complex64)) -> (Complex64, Complex64) {
        self.applied().fold(x, |p, g| g.eval_c64(p))
    }

    /// Parses `g`, `m[a,b;c,d]`, `t[y1,y2]`, `user:<file>` joined by `.` or `∘`.
    pub fn parse(s: &str) -> Result<ToricWord> {
        Self::parse_with(s, |p| UserMap::load(Path::new(p)))
    }

    pub fn parse_with(s: &str, load: impl Fn(&str) -> Result<UserMap>) -> Result<ToricWord> {
        let chars: Vec<(usize, char)> = s.char_indices().collect();
        let mut letters = Vec::new();
        let mut i = 0;
        let err = |pos: usize, msg: String| Error::Parse { pos, msg };
        let at = |i: usize| chars.get(i).map(|c| c.0).unwrap_or(s.len());
        let skip_ws = |i: &mut usize| {
            while *i < chars.len() && chars[*i].1.is_whitespace() {
                *i += 1;
            }
        };
        loop {
            skip_ws(&mut i);
            if i >= chars.len() {
                return Err(err(at(i), "expected a letter".into()));
            }
            let start = i;
            let rest = &s[at(i)..];
            if rest.starts_with("user:") {
                i += 5;
                let p0 = i;
                while i < chars.len() && chars[i].1 != '∘' && !user_path_ends(&s[at(i)..]) {
                    i += 1;
                }
                let path = s[at(p0)..at(i)].trim();
                if path.is_empty() {
                    return Err(err(at(p0), "missing file after 'user:'".into()));
                }
                letters.push(Generator::UserBirational(Box::new(load(path).map_err(|e| err(at(start), e.to_string()))?)));
            } else if rest.starts_with('g') {
                letters.push(Generator::StdInvolution);
                i += 1;
            } else if rest.starts_with("m[") || rest.starts_with("t[") {
                let kind = chars[i].1;
                i += 2;
                let b0 = i;
                while i < chars.len() && chars[i].1 != ']' {
                    i += 1;
                }
                if i >= chars.len() {
                    return Err(err(at(start), "unclosed '['".into()));
                }
                let body = &s[at(b0)..at(i)];
                i += 1;
                if kind == 'm' {
                    let nums: Vec<&str> = body.split([',', ';']).collect();
                    if nums.len() != 4 {
                        return Err(err(at(b0), "matrix needs four entries a,b;c,d".into()));
                    }
                    let mut v = [0i64; 4];
                    for (k, t) in nums.iter().enumerate() {
                        v[k] = t.trim().parse().map_err(|_| err(at(b0), format!("bad integer '{}'", t.trim())))?;
                    }
                    letters.push(Generator::monomial(v[0], v[1], v[2], v[3]).map_err(|e| err(at(start), e.to_string()))?);
                } else {
                    let parts: Vec<&str> = body.split(',').collect();
                    if parts.len() != 2 {
                        return Err(err(at(b0), "translation needs two factors".into()));
                    }
                    let y1 = CRational::parse(parts[0]).map_err(|_| err(at(b0), format!("bad complex '{}'", parts[0])))?;
                    let y2 = CRational::parse(parts[1]).map_err(|_| err(at(b0), format!("bad complex '{}'", parts[1])))?;
                    letters.push(Generator::translation(y1, y2).map_err(|e| err(at(start), e.to_string()))?);
                }
            } else {
                return Err(err(at(i), format!("unexpected '{}'", chars[i].1)));
            }
            skip_ws(&mut i);
            if i >= chars.len() {
                break;
            }
            match chars[i].1 {
                '.' | '∘' => i += 1,
                c => return Err(err(at(i), format!("expected '.' or '∘', found '{c}'"))),
            }
        }
        ToricWord::new(letters)
    }
}

fn user_path_ends(rest: &str) -> bool {
    let r = match rest.strip_prefix('.') {
        Some(r) => r.trim_start(),
        None => return false,
    };
    r.starts_with("m[") || r.starts_with("t[") || r.starts_with("user:") || r == "g" || r.starts_with("g.") || r.starts_with("g∘") || r.starts_with("g ")
}

impl fmt::Display for ToricWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.letters.iter().map(|g| g.to_string()).collect();
        write!(f, "{}", parts.join("."))
    }
}

/// P∘g for the standard involution, with the line factors cleared.
pub fn laurent_after_involution(p: &LaurentPoly) -> LaurentPoly {
    let l1 = LaurentPoly::from_terms(&[(1, 0, 0), (-1, 1, 0), (1, 0, 1)]);
    let l2 = LaurentPoly::from_terms(&[(1, 0, 0), (1, 1, 0), (-1, 0, 1)]);
    let l3 = LaurentPoly::from_terms(&[(1, 1, 0), (1, 0, 1), (-1, 0, 0)]);
    let exps = p.exponents();
    let a = exps.iter().map(|e| (-e.0).max(0)).max().unwrap_or(0);
    let b = exps.iter().map(|e| (-e.1).max(0)).max().unwrap_or(0);
    let c = exps.iter().map(|e| (e.0 + e.1).max(0)).max().unwrap_or(0);
    let pw = |q: &LaurentPoly, k: i64| (0..k).fold(LaurentPoly::constant(CRational::one()), |acc, _| acc.mul(q));
    let mut out = LaurentPoly::zero();
    for (e, coef) in p.terms() {
        let t = LaurentPoly::monomial(e.0, e.1)
            .mul(&pw(&l1, e.0 + a))
            .mul(&pw(&l2, e.1 + b))
            .mul(&pw(&l3, c - e.0 - e.1))
            .mul(&LaurentPoly::constant(coef.clone()));
        out = out.add(&t);
    }
    out.strip_monomial()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_words() {
        let w = ToricWord::parse("g.m[1,-2;2,1]").unwrap();
        assert_eq!(w.letters().len(), 2);
        assert_eq!(w.letters()[0], Generator::StdInvolution);
        assert_eq!(w.rho(), BigInt::from(5));
        assert_eq!(ToricWord::parse("g ∘ m[1,-2;2,1]").unwrap(), w);
        assert_eq!(ToricWord::parse(&w.to_string()).unwrap(), w);
        let t = ToricWord::parse("t[1+2i, -1/2].m[2,0;0,2]").unwrap();
        assert_eq!(t.letters()[0], Generator::Translation(CRational::from_i64(1, 2), CRational::real(crate::scalar::rat(-1, 2))));
        match ToricWord::parse("g.m[1,2;2,4]").unwrap_err() {
            Error::Parse { pos, .. } => assert_eq!(pos, 2),
            e => panic!("{e:?}"),
        }
        assert!(matches!(ToricWord::parse("g.x").unwrap_err(), Error::Parse { pos: 2, .. }));
        assert!(matches!(ToricWord::parse("m[1,0;0,1").unwrap_err(), Error::Parse { .. }));
        assert!(ToricWord::parse("").is_err());
    }

    #[test]
    fn reduction() {
        let w = ToricWord::parse("g.g.m[1,-2;2,1].m[0,1;1,0]").unwrap().reduced();
        assert_eq!(w.letters(), &[Generator::monomial(-2, 1, 1, 2).unwrap()]);
        let w = ToricWord::parse("g.m[1,0;0,1].g").unwrap().reduced();
        assert_eq!(w, ToricWord::identity());
        let f = ToricWord::parse("g.m[1,-2;2,1]").unwrap();
        assert_eq!(f.power(3).reduced().letters().len(), 6);
        assert_eq!(ToricWord::single(Generator::StdInvolution).power(4).reduced(), ToricWord::identity());
    }

    #[test]
    fn numeric_evaluation_and_trop() {
        let w = ToricWord::parse("g.m[1,-2;2,1]").unwrap();
        assert_eq!(w.trop().unwrap().as_linear().unwrap(), &IntegerMatrix::from_i64(1, -2, 2, 1));
        let x = (Complex64::new(0.3, 0.4), Complex64::new(-1.2, 0.7));
        let g = Generator::StdInvolution;
        let back = g.eval_c64(g.eval_c64(x));
        assert!((back.0 - x.0).norm() < 1e-12 && (back.1 - x.1).norm() < 1e-12);
    }

    #[test]
    fn involution_substitution() {
        // x1∘g = x1 (1 - x1 + x2) / (x1 + x2 - 1)
        let p = LaurentPoly::monomial(1, 0);
        let q = laurent_after_involution(&p);
        assert_eq!(q, LaurentPoly::from_terms(&[(1, 0, 0), (-1, 1, 0), (1, 0, 1)]));
    }
}
