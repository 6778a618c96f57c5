//! Map profiles: determinant, topological degree, tropicalization and the
//! exceptional / indeterminacy catalog of a word.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::word::{laurent_after_involution, Generator, ToricWord};
use crate::complex::CRational;
use crate::error::{Error, Result};
use crate::lattice::{primitive, LatticeVector, PrimitiveRay};
use crate::support::LaurentPoly;
use crate::trop::TropMap;

/// The points z of the pole C_τ with z^k = w, where z = x^{m_τ} and
/// m_τ = (−τ₂, τ₁).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PoleSet {
    pub ray: PrimitiveRay,
    pub k: u64,
    pub w: CRational,
}

impl PoleSet {
    pub fn point(ray: PrimitiveRay, z: CRational) -> PoleSet {
        PoleSet { ray, k: 1, w: z }
    }

    pub fn len(&self) -> u64 {
        self.k
    }

    pub fn is_empty(&self) -> bool {
        self.k == 0
    }

    pub fn meets(&self, o: &PoleSet) -> bool {
        self.ray == o.ray && roots_meet(self.k, &self.w, o.k, &o.w)
    }

    /// Image under z ↦ c·z^j onto `ray`.
    fn push(&self, ray: PrimitiveRay, c: &CRational, j: &BigInt) -> Result<PoleSet> {
        let k = BigInt::from(self.k);
        let g = j.abs().gcd(&k);
        let k2 = &k / &g;
        let j2 = j / &g;
        let w = &c.pow(&k2)? * &self.w.pow(&j2)?;
        Ok(PoleSet { ray, k: k2.to_u64().expect("shrinks"), w })
    }

    /// Preimage under z ↦ c·z^j from `ray`.
    fn pull(&self, ray: PrimitiveRay, c: &CRational, j: &BigInt) -> Result<PoleSet> {
        let k = BigInt::from(self.k);
        let base = &self.w * &c.pow(&(-&k))?;
        let kk = (j.abs() * &k).to_u64().ok_or_else(|| Error::Budget("pole set too large".into()))?;
        let w = if j.is_negative() { base.inv()? } else { base };
        Ok(PoleSet { ray, k: kk, w })
    }
}

impl fmt::Display for PoleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k == 1 {
            write!(f, "C{}: z = {}", self.ray, self.w)
        } else {
            write!(f, "C{}: z^{} = {}", self.ray, self.k, self.w)
        }
    }
}

/// {z^a = w1} ∩ {z^b = w2} ≠ ∅.
fn roots_meet(a: u64, w1: &CRational, b: u64, w2: &CRational) -> bool {
    let (a, b) = (BigInt::from(a), BigInt::from(b));
    let e = a.extended_gcd(&b);
    let d = e.gcd;
    let u = match (w1.pow(&e.x), w2.pow(&e.y)) {
        (Ok(x), Ok(y)) => &x * &y,
        _ => return false,
    };
    matches!(u.pow(&(&a / &d)), Ok(v) if v == *w1) && matches!(u.pow(&(&b / &d)), Ok(v) if v == *w2)
}

pub fn pole_character(r: &PrimitiveRay) -> LatticeVector {
    LatticeVector::new(-&r.v().b, r.v().a.clone())
}

fn character_value(y1: &CRational, y2: &CRational, m: &LatticeVector) -> Result<CRational> {
    Ok(&y1.pow(&m.a)? * &y2.pow(&m.b)?)
}

/// Translation factor of the involution on poles in each P² cone.
fn involution_shift(r: &PrimitiveRay) -> (i64, i64) {
    let v = r.v();
    let zero = BigInt::zero();
    if v.a >= zero && v.b >= zero {
        (-1, -1)
    } else if v.a <= zero && v.a <= v.b {
        // cone((0,1),(-1,-1)): left of the y-axis, above the diagonal
        (-1, 1)
    } else {
        (1, -1)
    }
}

/// (target ray, c, j) of the letter's pole map z ↦ c·z^j on C_τ.
fn pole_map(g: &Generator, r: &PrimitiveRay) -> Result<(PrimitiveRay, CRational, BigInt)> {
    match g {
        Generator::Monomial(a) => {
            let t = primitive(&a.apply(r.v()))?;
            let mt = pole_character(&t);
            let pulled = a.transpose().apply(&mt);
            let ms = pole_character(r);
            let j = if !ms.a.is_zero() { &pulled.a / &ms.a } else { &pulled.b / &ms.b };
            Ok((t, CRational::one(), j))
        }
        Generator::Translation(y1, y2) => Ok((r.clone(), character_value(y1, y2, &pole_character(r))?, BigInt::one())),
        Generator::StdInvolution => {
            let (c1, c2) = involution_shift(r);
            let m = pole_character(r);
            let c = character_value(&CRational::from_i64(c1, 0), &CRational::from_i64(c2, 0), &m)?;
            Ok((r.clone(), c, BigInt::one()))
        }
        Generator::UserBirational(_) => Err(Error::Unsupported("pole maps of user maps".into())),
    }
}

pub fn push_letter(g: &Generator, s: &PoleSet) -> Result<PoleSet> {
    let (t, c, j) = pole_map(g, &s.ray)?;
    s.push(t, &c, &j)
}

pub fn pull_letter(g: &Generator, s: &PoleSet) -> Result<PoleSet> {
    let src = match g {
        Generator::Monomial(a) => a.preimage_ray(s.ray.v())?,
        _ => s.ray.clone(),
    };
    let (t, c, j) = pole_map(g, &src)?;
    debug_assert_eq!(t, s.ray);
    s.pull(src, &c, &j)
}

fn ray(a: i64, b: i64) -> PrimitiveRay {
    PrimitiveRay::new(a, b).expect("primitive")
}

/// Contracted curves of the involution with their image points.
pub fn involution_exc() -> Vec<(LaurentPoly, PoleSet)> {
    vec![
        (LaurentPoly::from_terms(&[(1, 0, 0), (-1, 1, 0), (1, 0, 1)]), PoleSet::point(ray(1, 0), CRational::one())),
        (LaurentPoly::from_terms(&[(1, 0, 0), (1, 1, 0), (-1, 0, 1)]), PoleSet::point(ray(0, 1), CRational::one())),
        (LaurentPoly::from_terms(&[(-1, 0, 0), (1, 1, 0), (1, 0, 1)]), PoleSet::point(ray(-1, -1), CRational::one())),
    ]
}

/// Indeterminacy points of the involution: [1,0,1], [1,1,0], [0,1,1].
pub fn involution_ind() -> Vec<PoleSet> {
    vec![
        PoleSet::point(ray(1, 0), CRational::one()),
        PoleSet::point(ray(0, 1), CRational::one()),
        PoleSet::point(ray(-1, -1), CRational::one()),
    ]
}

fn letter_exc(g: &Generator) -> Vec<(LaurentPoly, PoleSet)> {
    match g {
        Generator::StdInvolution => involution_exc(),
        _ => Vec::new(),
    }
}

fn letter_ind(g: &Generator) -> Vec<PoleSet> {
    match g {
        Generator::StdInvolution => involution_ind(),
        _ => Vec::new(),
    }
}

fn pull_curve(g: &Generator, p: &LaurentPoly) -> Result<LaurentPoly> {
    let q = match g {
        Generator::Monomial(a) => p.compose_monomial(a)?,
        Generator::Translation(y1, y2) => p.compose_translation(y1, y2)?,
        Generator::StdInvolution => laurent_after_involution(p),
        Generator::UserBirational(_) => return Err(Error::Unsupported("curve transport through user maps".into())),
    };
    Ok(q.strip_monomial().monic())
}

#[derive(Clone, Debug, Serialize)]
pub struct ExcCurve {
    /// Position of the contracting letter, in application order.
    pub letter: usize,
    #[serde(serialize_with = "ser_laurent")]
    pub poly: LaurentPoly,
    pub image: PoleSet,
}

#[derive(Clone, Debug, Serialize)]
pub struct IndPoint {
    pub letter: usize,
    pub point: PoleSet,
}

#[derive(Clone, Debug, Serialize)]
pub struct MapProfile {
    #[serde(serialize_with = "ser_word")]
    pub word: ToricWord,
    #[serde(serialize_with = "ser_big")]
    pub rho: BigInt,
    #[serde(serialize_with = "ser_big")]
    pub dtop: BigInt,
    pub covering_degree: u64,
    pub trop: TropMap,
    pub exc: Vec<ExcCurve>,
    pub ind: Vec<IndPoint>,
    pub verified: bool,
    pub notes: Vec<String>,
}

fn ser_laurent<S: serde::Serializer>(p: &LaurentPoly, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

fn ser_word<S: serde::Serializer>(w: &ToricWord, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&w.to_string())
}

fn ser_big<S: serde::Serializer>(b: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    match b.to_i64() {
        Some(x) => s.serialize_i64(x),
        None => s.serialize_str(&b.to_string()),
    }
}

impl MapProfile {
    pub fn is_shifted_monomial(&self) -> bool {
        self.exc.is_empty()
    }

    /// Image of a pole set under the whole word.
    pub fn push(&self, s: &PoleSet) -> Result<PoleSet> {
        let mut cur = s.clone();
        for g in self.word.applied() {
            cur = push_letter(g, &cur)?;
        }
        Ok(cur)
    }
}

/// Builds the profile of a word (reduced first).
pub fn profile(w: &ToricWord) -> Result<MapProfile> {
    let word = w.reduced();
    let letters: Vec<&Generator> = word.applied().collect();
    let trop = word.trop()?;
    let rho = word.rho();
    let covering_degree = trop.covering_degree();
    let dtop = rho.abs() * BigInt::from(covering_degree);
    let mut notes = Vec::new();
    let mut verified = true;
    if letters.iter().any(|g| matches!(g, Generator::UserBirational(_))) {
        verified = false;
        notes.push("user letter: exc/ind not catalogued".to_string());
    }
    let mut exc = Vec::new();
    let mut ind = Vec::new();
    if verified {
        for (i, g) in letters.iter().enumerate() {
            for (poly, img) in letter_exc(g) {
                let mut p = poly;
                for h in letters[..i].iter().rev() {
                    p = pull_curve(h, &p)?;
                }
                let mut s = img;
                for (j, h) in letters.iter().enumerate().skip(i + 1) {
                    if letter_ind(h).iter().any(|q| q.meets(&s)) {
                        verified = false;
                        notes.push(format!("non-generic word: image of a curve contracted by letter {i} hits the indeterminacy of letter {j}"));
                    }
                    s = push_letter(h, &s)?;
                }
                exc.push(ExcCurve { letter: i, poly: p, image: s });
            }
            for pt in letter_ind(g) {
                let mut s = pt;
                for (j, h) in letters[..i].iter().enumerate().rev() {
                    if letter_exc(h).iter().any(|(_, q)| q.meets(&s)) {
                        verified = false;
                        notes.push(format!("non-generic word: indeterminacy of letter {i} pulls back onto a curve contracted by letter {j}"));
                    }
                    s = pull_letter(h, &s)?;
                }
                ind.push(IndPoint { letter: i, point: s });
            }
        }
        if !verified {
            notes.push("non-generic word - exc/ind unverified".to_string());
        }
    }
    Ok(MapProfile { word, rho, dtop, covering_degree, trop, exc, ind, verified, notes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::IntegerMatrix;

    fn w(s: &str) -> ToricWord {
        ToricWord::parse(s).unwrap()
    }

    #[test]
    fn flagship_profile() {
        let p = profile(&w("g.m[1,-2;2,1]")).unwrap();
        assert_eq!(p.rho, BigInt::from(5));
        assert_eq!(p.dtop, BigInt::from(5));
        assert_eq!(p.trop.as_linear().unwrap(), &IntegerMatrix::from_i64(1, -2, 2, 1));
        assert_eq!(p.exc.len(), 3);
        assert!(p.verified);
        let mut rays: Vec<_> = p.ind.iter().map(|i| (i.point.ray.clone(), i.point.k, i.point.w.clone())).collect();
        rays.sort_by(|a, b| a.0.v().cmp_angle(b.0.v()));
        let want = vec![ray(2, 1), ray(-3, 1), ray(1, -2)];
        assert_eq!(rays.iter().map(|r| r.0.clone()).collect::<Vec<_>>(), want);
        assert!(rays.iter().all(|r| r.1 == 1 && r.2 == CRational::one()));
        for e in &p.exc {
            assert!(e.image.k == 1 && e.image.w == CRational::one());
        }
    }

    #[test]
    fn catalogs() {
        let m = profile(&w("m[2,1;1,1]")).unwrap();
        assert!(m.exc.is_empty() && m.ind.is_empty() && m.is_shifted_monomial());
        let g = profile(&w("g")).unwrap();
        assert_eq!(g.exc.len(), 3);
        assert_eq!(g.ind.len(), 3);
        assert_eq!(g.dtop, BigInt::one());
        let s = profile(&w("t[2,3].m[2,0;0,2]")).unwrap();
        assert!(s.is_shifted_monomial());
        assert_eq!(s.dtop, BigInt::from(4));
    }

    #[test]
    fn pole_maps() {
        // the involution negates x2 on C_(1,0)
        let s = PoleSet::point(ray(1, 0), CRational::from_i64(3, 0));
        assert_eq!(push_letter(&Generator::StdInvolution, &s).unwrap().w, CRational::from_i64(-3, 0));
        // squaring map: z ↦ z^2 on every P² pole
        let sq = Generator::monomial(2, 0, 0, 2).unwrap();
        let one = PoleSet::point(ray(0, 1), CRational::one());
        let pre = pull_letter(&sq, &one).unwrap();
        assert_eq!((pre.k, pre.ray.clone()), (2, ray(0, 1)));
        assert!(pre.meets(&PoleSet::point(ray(0, 1), CRational::from_i64(-1, 0))));
        assert!(!pre.meets(&PoleSet::point(ray(0, 1), CRational::from_i64(0, 1))));
        assert_eq!(push_letter(&sq, &pre).unwrap(), one);
        // preimage then image is the identity for the flagship matrix
        let a = Generator::monomial(1, -2, 2, 1).unwrap();
        for r in [ray(1, 0), ray(0, 1), ray(-1, -1), ray(3, 5)] {
            let s = PoleSet::point(r, CRational::from_i64(2, 1));
            assert_eq!(push_letter(&a, &pull_letter(&a, &s).unwrap()).unwrap(), s);
        }
    }

    #[test]
    fn collision_flagged() {
        // t[2,1] fixes the point x2 = 1 of C_(1,0)
        let q = profile(&w("g.t[2,1].g")).unwrap();
        assert!(!q.verified);
        let p = profile(&w("g.t[-1,2].g")).unwrap();
        assert!(p.verified);
        assert_eq!(p.exc.len(), 6);
    }
}
