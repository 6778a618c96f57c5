//! Exact rational maps of the projective plane: composition with cancellation,
//! degrees, topological degrees, contracted curves and indeterminacy points.

mod catalog;
mod gcd;
mod line;
mod modp;
mod poly;
mod series;

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::IntegerMatrix;
use crate::tmap::{Generator, ToricWord};

pub use catalog::{contracted_curves, indeterminacy_points, topological_degree, AlgPoint, Contracted, IndLocation, OracleInd};
pub use gcd::{gcd_homogeneous, gcd_many};
pub use line::{line_degree, line_degree_from, oracle_degrees, LineDegreeConfig};
pub use modp::LINE_PRIMES;
pub use poly::{Mono, Poly};

/// Default cap on the degree of symbolic compositions.
pub const DEGREE_BUDGET: u32 = 200;

/// Three homogeneous components of equal degree with no common factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMap {
    comps: [Poly; 3],
}

impl PolyMap {
    pub fn new(comps: [Poly; 3]) -> Result<Self> {
        if comps.iter().any(|c| c.is_zero()) {
            return Err(Error::Invalid("zero component".into()));
        }
        let d = comps[0].degree();
        if comps.iter().any(|c| !c.is_homogeneous() || c.degree() != d) {
            return Err(Error::Invalid("components must be homogeneous of equal degree".into()));
        }
        let g = gcd_many(&comps)?;
        let comps = if g.degree() == 0 && g.content().abs().is_one() {
            comps
        } else {
            let q = |p: &Poly| p.divide_exact(&g).ok_or_else(|| Error::Internal("gcd does not divide".into()));
            [q(&comps[0])?, q(&comps[1])?, q(&comps[2])?]
        };
        Ok(PolyMap { comps })
    }

    pub fn identity() -> Self {
        PolyMap { comps: [Poly::var(0), Poly::var(1), Poly::var(2)] }
    }

    pub fn components(&self) -> &[Poly; 3] {
        &self.comps
    }

    pub fn degree(&self) -> u32 {
        self.comps[0].degree()
    }

    /// The standard homogeneous triple of a generator.
    pub fn from_generator(g: &Generator) -> Result<Self> {
        match g {
            Generator::StdInvolution => Ok(PolyMap {
                comps: [
                    Poly::parse("X0 X1 + X0 X2 - X0^2").expect("literal"),
                    Poly::parse("X0 X1 - X1^2 + X1 X2").expect("literal"),
                    Poly::parse("X0 X2 + X1 X2 - X2^2").expect("literal"),
                ],
            }),
            Generator::Monomial(a) => monomial_map(a),
            Generator::Translation(y1, y2) => {
                if !y1.is_real() || !y2.is_real() {
                    return Err(Error::Unsupported("the oracle needs rational real translations".into()));
                }
                let (n1, d1) = (y1.re.numer().clone(), y1.re.denom().clone());
                let (n2, d2) = (y2.re.numer().clone(), y2.re.denom().clone());
                PolyMap::new([
                    Poly::monomial([1, 0, 0], &d1 * &d2),
                    Poly::monomial([0, 1, 0], &n1 * &d2),
                    Poly::monomial([0, 0, 1], &d1 * &n2),
                ])
            }
            Generator::UserBirational(u) => Ok(u.map.clone()),
        }
    }

    /// The composite map of a word, composed symbolically within `budget`.
    pub fn from_word(w: &ToricWord, budget: u32) -> Result<Self> {
        let mut acc = PolyMap::identity();
        for g in w.applied() {
            acc = PolyMap::from_generator(g)?.compose(&acc, budget)?;
        }
        Ok(acc)
    }

    /// self ∘ other, with common factors removed.
    pub fn compose(&self, other: &PolyMap, budget: u32) -> Result<PolyMap> {
        let raw = self.degree() as u64 * other.degree() as u64;
        if raw > budget as u64 {
            return Err(Error::Budget(format!("composite degree up to {raw} exceeds {budget}")));
        }
        let c = &self.comps;
        PolyMap::new([c[0].substitute(&other.comps), c[1].substitute(&other.comps), c[2].substitute(&other.comps)])
    }

    pub fn eval(&self, x: &[BigInt; 3]) -> [BigInt; 3] {
        [self.comps[0].eval(x), self.comps[1].eval(x), self.comps[2].eval(x)]
    }

    pub fn eval_mod(&self, x: &[u64; 3], p: u64) -> [u64; 3] {
        [self.comps[0].eval_mod(x, p), self.comps[1].eval_mod(x, p), self.comps[2].eval_mod(x, p)]
    }

    pub fn eval_c64(&self, x: &[Complex64; 3]) -> [Complex64; 3] {
        [self.comps[0].eval_c64(x), self.comps[1].eval_c64(x), self.comps[2].eval_c64(x)]
    }

    pub fn eval_rational(&self, x: &[BigRational; 3]) -> [BigRational; 3] {
        [self.comps[0].eval_rational(x), self.comps[1].eval_rational(x), self.comps[2].eval_rational(x)]
    }

    /// det(∂F_i/∂X_j), homogeneous of degree 3(d − 1).
    pub fn jacobian(&self) -> Poly {
        let d: Vec<[Poly; 3]> =
            self.comps.iter().map(|p| [p.derivative(0), p.derivative(1), p.derivative(2)]).collect();
        det3(&d)
    }

    /// Three components in the sparse text format, one per line.
    pub fn parse(s: &str) -> Result<Self> {
        let lines: Vec<&str> = s.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
        if lines.len() != 3 {
            return Err(Error::Parse { pos: 0, msg: format!("expected 3 components, got {}", lines.len()) });
        }
        PolyMap::new([Poly::parse(lines[0])?, Poly::parse(lines[1])?, Poly::parse(lines[2])?])
    }
}

impl fmt::Display for PolyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\n{}\n{}", self.comps[0], self.comps[1], self.comps[2])
    }
}

impl Serialize for PolyMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.comps.iter().map(|p| p.to_string()).collect();
        v.serialize(s)
    }
}

pub(crate) fn det3(m: &[[Poly; 3]]) -> Poly {
    let t = |a: usize, b: usize, c: usize| m[0][a].mul(&m[1][b]).mul(&m[2][c]);
    t(0, 1, 2).add(&t(1, 2, 0)).add(&t(2, 0, 1)).sub(&t(0, 2, 1)).sub(&t(1, 0, 2)).sub(&t(2, 1, 0))
}

/// x ↦ (x^{r₁}, x^{r₂}) for the rows r₁, r₂ of A, homogenized with the
/// smallest common denominator.
fn monomial_map(a: &IntegerMatrix) -> Result<PolyMap> {
    if a.det().is_zero() {
        return Err(Error::Singular);
    }
    let to_i = |x: &BigInt| -> Result<i64> {
        i64::try_from(x).map_err(|_| Error::Budget("matrix entry too large for the oracle".into()))
    };
    let r = [[0i64, 0], [to_i(a.entry(0, 0))?, to_i(a.entry(0, 1))?], [to_i(a.entry(1, 0))?, to_i(a.entry(1, 1))?]];
    let m = [-(r.iter().map(|e| e[0]).min().unwrap()), -(r.iter().map(|e| e[1]).min().unwrap())];
    let e: Vec<[i64; 2]> = r.iter().map(|v| [v[0] + m[0], v[1] + m[1]]).collect();
    let d = e.iter().map(|v| v[0] + v[1]).max().unwrap();
    let mut comps: Vec<Poly> =
        e.iter().map(|v| Poly::monomial([(d - v[0] - v[1]) as u32, v[0] as u32, v[1] as u32], 1)).collect();
    let v0 = comps.iter().map(|p| p.valuation(0)).min().unwrap();
    if v0 > 0 {
        comps = comps
            .iter()
            .map(|p| p.divide_exact(&Poly::monomial([v0, 0, 0], 1)).expect("monomial factor"))
            .collect();
    }
    let [c0, c1, c2]: [Poly; 3] = comps.try_into().expect("three");
    Ok(PolyMap { comps: [c0, c1, c2] })
}

/// Common integer scale so a rational point becomes primitive integral.
pub(crate) fn primitive_point(x: &[BigRational; 3]) -> [BigInt; 3] {
    let l = x.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let v: Vec<BigInt> = x.iter().map(|c| (c * BigRational::from_integer(l.clone())).to_integer()).collect();
    let g = v.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let mut v: Vec<BigInt> = if g.is_zero() { v } else { v.iter().map(|c| c / &g).collect() };
    if let Some(first) = v.iter().find(|c| !c.is_zero()) {
        if first.is_negative() {
            v = v.iter().map(|c| -c).collect();
        }
    }
    [v[0].clone(), v[1].clone(), v[2].clone()]
}
