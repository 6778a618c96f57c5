//! Exact lattice arithmetic, primitive rays and complete fans in the plane.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::int_to_f64;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVector {
    pub a: BigInt,
    pub b: BigInt,
}

impl LatticeVector {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Self {
        LatticeVector { a: a.into(), b: b.into() }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn det(&self, o: &LatticeVector) -> BigInt {
        &self.a * &o.b - &self.b * &o.a
    }

    pub fn dot(&self, o: &LatticeVector) -> BigInt {
        &self.a * &o.a + &self.b * &o.b
    }

    pub fn add(&self, o: &LatticeVector) -> LatticeVector {
        LatticeVector { a: &self.a + &o.a, b: &self.b + &o.b }
    }

    pub fn sub(&self, o: &LatticeVector) -> LatticeVector {
        LatticeVector { a: &self.a - &o.a, b: &self.b - &o.b }
    }

    pub fn scale(&self, k: &BigInt) -> LatticeVector {
        LatticeVector { a: &self.a * k, b: &self.b * k }
    }

    pub fn neg(&self) -> LatticeVector {
        LatticeVector { a: -&self.a, b: -&self.b }
    }

    pub fn gcd(&self) -> BigInt {
        self.a.gcd(&self.b)
    }

    pub fn to_f64(&self) -> [f64; 2] {
        [int_to_f64(&self.a), int_to_f64(&self.b)]
    }

    pub fn to_i64(&self) -> Option<(i64, i64)> {
        Some((self.a.to_i64()?, self.b.to_i64()?))
    }

    /// 0 for angles in [0, pi), 1 for [pi, 2pi).
    fn half(&self) -> u8 {
        if self.b.is_positive() || (self.b.is_zero() && self.a.is_positive()) {
            0
        } else {
            1
        }
    }

    /// Exact comparison of polar angles in [0, 2pi). Parallel vectors compare equal.
    pub fn cmp_angle(&self, o: &LatticeVector) -> Ordering {
        match self.half().cmp(&o.half()) {
            Ordering::Equal => {
                let d = self.det(o);
                if d.is_positive() {
                    Ordering::Less
                } else if d.is_negative() {
                    Ordering::Greater
                } else {
                    Ordering::Equal
                }
            }
            c => c,
        }
    }

    /// Same direction (positive multiple).
    pub fn same_direction(&self, o: &LatticeVector) -> bool {
        self.det(o).is_zero() && self.dot(o).is_positive()
    }

    pub fn angle(&self) -> f64 {
        let [x, y] = self.to_f64_scaled();
        let t = y.atan2(x);
        if t < 0.0 {
            t + std::f64::consts::TAU
        } else {
            t
        }
    }

    /// Direction as doubles, scaled so huge entries do not overflow.
    pub fn to_f64_scaled(&self) -> [f64; 2] {
        let bits = self.a.bits().max(self.b.bits());
        if bits < 1000 {
            return self.to_f64();
        }
        let s = (bits - 64) as usize;
        let a: BigInt = &self.a >> s;
        let b: BigInt = &self.b >> s;
        [int_to_f64(&a), int_to_f64(&b)]
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

fn ser_int<S: Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x.to_i64() {
        Some(v) => s.serialize_i64(v),
        None => s.serialize_str(&x.to_string()),
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum IntRepr {
    Num(i64),
    Str(String),
}

impl IntRepr {
    fn into_big<E: serde::de::Error>(self) -> std::result::Result<BigInt, E> {
        match self {
            IntRepr::Num(v) => Ok(v.into()),
            IntRepr::Str(s) => s.parse().map_err(|_| E::custom("bad integer")),
        }
    }
}

/// Serializes an integer as a JSON number when it fits in 64 bits, else as a decimal string.
pub(crate) struct BigJson<'a>(pub &'a BigInt);

impl Serialize for BigJson<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ser_int(self.0, s)
    }
}

impl Serialize for LatticeVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeTuple;
        let mut t = s.serialize_tuple(2)?;
        t.serialize_element(&BigJson(&self.a))?;
        t.serialize_element(&BigJson(&self.b))?;
        t.end()
    }
}

impl<'de> Deserialize<'de> for LatticeVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [a, b]: [IntRepr; 2] = Deserialize::deserialize(d)?;
        Ok(LatticeVector { a: a.into_big()?, b: b.into_big()? })
    }
}

/// A nonzero lattice vector with coprime entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimitiveRay(LatticeVector);

impl PrimitiveRay {
    pub fn v(&self) -> &LatticeVector {
        &self.0
    }

    pub fn new(a: i64, b: i64) -> Result<Self> {
        primitive(&LatticeVector::new(a, b))
    }

    pub fn into_vector(self) -> LatticeVector {
        self.0
    }
}

impl fmt::Display for PrimitiveRay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Serialize for PrimitiveRay {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PrimitiveRay {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = LatticeVector::deserialize(d)?;
        let r = primitive(&v).map_err(D::Error::custom)?;
        if r.v() != &v {
            return Err(D::Error::custom("ray is not primitive"));
        }
        Ok(r)
    }
}

pub fn primitive(v: &LatticeVector) -> Result<PrimitiveRay> {
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    let g = v.gcd();
    Ok(PrimitiveRay(LatticeVector { a: &v.a / &g, b: &v.b / &g }))
}

/// 2x2 integer matrix acting on column vectors, with cached determinant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntegerMatrix {
    m: [[BigInt; 2]; 2],
    det: BigInt,
}

impl IntegerMatrix {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Self {
        let det = &a * &d - &b * &c;
        IntegerMatrix { m: [[a, b], [c, d]], det }
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        Self::from_i64(1, 0, 0, 1)
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.m[i][j]
    }

    pub fn det(&self) -> &BigInt {
        &self.det
    }

    pub fn trace(&self) -> BigInt {
        &self.m[0][0] + &self.m[1][1]
    }

    pub fn apply(&self, v: &LatticeVector) -> LatticeVector {
        LatticeVector {
            a: &self.m[0][0] * &v.a + &self.m[0][1] * &v.b,
            b: &self.m[1][0] * &v.a + &self.m[1][1] * &v.b,
        }
    }

    pub fn apply_f64(&self, v: [f64; 2]) -> [f64; 2] {
        let e = self.to_f64();
        [e[0][0] * v[0] + e[0][1] * v[1], e[1][0] * v[0] + e[1][1] * v[1]]
    }

    pub fn mul(&self, o: &IntegerMatrix) -> IntegerMatrix {
        let m = &self.m;
        let n = &o.m;
        IntegerMatrix::new(
            &m[0][0] * &n[0][0] + &m[0][1] * &n[1][0],
            &m[0][0] * &n[0][1] + &m[0][1] * &n[1][1],
            &m[1][0] * &n[0][0] + &m[1][1] * &n[1][0],
            &m[1][0] * &n[0][1] + &m[1][1] * &n[1][1],
        )
    }

    pub fn pow(&self, k: u32) -> IntegerMatrix {
        let mut acc = IntegerMatrix::identity();
        let mut b = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            k >>= 1;
        }
        acc
    }

    /// Adjugate: adj(A)·A = det(A)·I.
    pub fn adj(&self) -> IntegerMatrix {
        let m = &self.m;
        IntegerMatrix::new(m[1][1].clone(), -&m[0][1], -&m[1][0], m[0][0].clone())
    }

    pub fn transpose(&self) -> IntegerMatrix {
        let m = &self.m;
        IntegerMatrix::new(m[0][0].clone(), m[1][0].clone(), m[0][1].clone(), m[1][1].clone())
    }

    pub fn is_identity(&self) -> bool {
        *self == IntegerMatrix::identity()
    }

    /// Some(c) when the matrix is c·I.
    pub fn scalar_value(&self) -> Option<BigInt> {
        let m = &self.m;
        if m[0][1].is_zero() && m[1][0].is_zero() && m[0][0] == m[1][1] {
            Some(m[0][0].clone())
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> [[f64; 2]; 2] {
        let m = &self.m;
        [
            [int_to_f64(&m[0][0]), int_to_f64(&m[0][1])],
            [int_to_f64(&m[1][0]), int_to_f64(&m[1][1])],
        ]
    }

    pub fn to_i64(&self) -> Option<[[i64; 2]; 2]> {
        let m = &self.m;
        Some([
            [m[0][0].to_i64()?, m[0][1].to_i64()?],
            [m[1][0].to_i64()?, m[1][1].to_i64()?],
        ])
    }

    /// Primitive generator of the preimage direction of a ray: prim(A⁻¹ r).
    pub fn preimage_ray(&self, r: &LatticeVector) -> Result<PrimitiveRay> {
        if self.det.is_zero() {
            return Err(Error::Singular);
        }
        let w = self.adj().apply(r);
        let w = if self.det.is_negative() { w.neg() } else { w };
        primitive(&w)
    }

    /// Multiplication by a Gaussian integer a+bi, i.e. [[a,-b],[b,a]].
    pub fn is_gaussian(&self) -> bool {
        let m = &self.m;
        m[0][0] == m[1][1] && m[0][1] == -&m[1][0]
    }
}

impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.m;
        write!(f, "[{},{};{},{}]", m[0][0], m[0][1], m[1][0], m[1][1])
    }
}

impl Serialize for IntegerMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let m = &self.m;
        let rows = [[BigJson(&m[0][0]), BigJson(&m[0][1])], [BigJson(&m[1][0]), BigJson(&m[1][1])]];
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntegerMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [[a, b], [c, e]]: [[IntRepr; 2]; 2] = Deserialize::deserialize(d)?;
        Ok(IntegerMatrix::new(a.into_big()?, b.into_big()?, c.into_big()?, e.into_big()?))
    }
}

/// Complete fan: primitive rays in strict ccw order starting from angle 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Fan {
    rays: Vec<PrimitiveRay>,
}

impl Fan {
    pub fn from_rays(vs: &[LatticeVector]) -> Result<Fan> {
        let mut rays = vs.iter().map(primitive).collect::<Result<Vec<_>>>()?;
        rays.sort_by(|x, y| x.v().cmp_angle(y.v()));
        rays.dedup_by(|x, y| x.v().cmp_angle(y.v()) == Ordering::Equal);
        Self::from_sorted(rays)
    }

    pub fn from_rays_i64(vs: &[(i64, i64)]) -> Result<Fan> {
        let v: Vec<LatticeVector> = vs.iter().map(|&(a, b)| LatticeVector::new(a, b)).collect();
        Fan::from_rays(&v)
    }

    fn from_sorted(rays: Vec<PrimitiveRay>) -> Result<Fan> {
        if rays.len() < 3 {
            return Err(Error::IncompleteFan(format!("only {} distinct rays", rays.len())));
        }
        let n = rays.len();
        for i in 0..n {
            let d = rays[i].v().det(rays[(i + 1) % n].v());
            if !d.is_positive() {
                return Err(Error::IncompleteFan(format!(
                    "sector {} -> {} has angle >= pi",
                    rays[i],
                    rays[(i + 1) % n]
                )));
            }
        }
        Ok(Fan { rays })
    }

    pub fn p2() -> Fan {
        Fan::from_rays_i64(&[(1, 0), (0, 1), (-1, -1)]).expect("P2 fan")
    }

    pub fn p1xp1() -> Fan {
        Fan::from_rays_i64(&[(1, 0), (0, 1), (-1, 0), (0, -1)]).expect("P1xP1 fan")
    }

    pub fn p2_rays() -> [PrimitiveRay; 3] {
        [
            PrimitiveRay::new(1, 0).unwrap(),
            PrimitiveRay::new(0, 1).unwrap(),
            PrimitiveRay::new(-1, -1).unwrap(),
        ]
    }

    pub fn rays(&self) -> &[PrimitiveRay] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &LatticeVector {
        self.rays[i % self.rays.len()].v()
    }

    pub fn len(&self) -> usize {
        self.rays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rays.is_empty()
    }

    /// det(v_i, v_{i+1}) of sector i.
    pub fn sector_det(&self, i: usize) -> BigInt {
        let n = self.len();
        self.rays[i % n].v().det(self.rays[(i + 1) % n].v())
    }

    pub fn is_smooth(&self) -> bool {
        (0..self.len()).all(|i| self.sector_det(i).is_one())
    }

    pub fn index_of(&self, r: &LatticeVector) -> Option<usize> {
        let i = self.rays.partition_point(|x| x.v().cmp_angle(r) == Ordering::Less);
        (i < self.len() && self.rays[i].v().same_direction(r)).then_some(i)
    }

    pub fn contains(&self, r: &LatticeVector) -> bool {
        self.index_of(r).is_some()
    }

    /// Index i of the sector cone(v_i, v_{i+1}) containing v (v ≠ 0).
    pub fn sector_of(&self, v: &LatticeVector) -> usize {
        let k = self.rays.partition_point(|x| x.v().cmp_angle(v) != Ordering::Greater);
        (k + self.len() - 1) % self.len()
    }

    /// Sector lookup for a float direction.
    pub fn sector_of_f64(&self, v: [f64; 2]) -> usize {
        let n = self.len();
        for i in 0..n {
            let a = self.ray(i).to_f64_scaled();
            let b = self.ray(i + 1).to_f64_scaled();
            let ca = a[0] * v[1] - a[1] * v[0];
            let cb = v[0] * b[1] - v[1] * b[0];
            if ca >= 0.0 && cb > 0.0 {
                return i;
            }
        }
        // v lies (numerically) on a ray
        let mut best = 0;
        let mut bd = f64::INFINITY;
        for i in 0..n {
            let a = self.ray(i).to_f64_scaled();
            let na = (a[0] * a[0] + a[1] * a[1]).sqrt();
            let nv = (v[0] * v[0] + v[1] * v[1]).sqrt();
            let d = ((a[0] / na - v[0] / nv).powi(2) + (a[1] / na - v[1] / nv).powi(2)).sqrt();
            if d < bd {
                bd = d;
                best = i;
            }
        }
        best
    }

    /// Minimal smooth refinement via Hirzebruch–Jung continued fractions.
    pub fn smooth_resolution(&self) -> Fan {
        let n = self.len();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let u = self.ray(i).clone();
            let w = self.ray(i + 1).clone();
            out.push(self.rays[i].clone());
            for r in hj_rays(&u, &w) {
                out.push(PrimitiveRay(r));
            }
        }
        out.sort_by(|x, y| x.v().cmp_angle(y.v()));
        Fan::from_sorted(out).expect("refinement of a complete fan is complete")
    }

    /// Fan on the union of both ray sets.
    pub fn refine(&self, o: &Fan) -> Fan {
        let mut all: Vec<LatticeVector> = self.rays.iter().map(|r| r.v().clone()).collect();
        all.extend(o.rays.iter().map(|r| r.v().clone()));
        Fan::from_rays(&all).expect("union of complete fans is complete")
    }

    pub fn with_rays(&self, extra: &[LatticeVector]) -> Result<Fan> {
        let mut all: Vec<LatticeVector> = self.rays.iter().map(|r| r.v().clone()).collect();
        all.extend(extra.iter().cloned());
        Fan::from_rays(&all)
    }

    /// Ray-set inclusion: every ray of `o` is a ray of `self`.
    pub fn dominates(&self, o: &Fan) -> bool {
        o.rays.iter().all(|r| self.contains(r.v()))
    }

    /// Largest sector angle, in radians.
    pub fn max_sector_angle(&self) -> f64 {
        (0..self.len())
            .map(|i| {
                let a = self.ray(i).angle();
                let b = self.ray(i + 1).angle();
                let mut d = b - a;
                if d <= 0.0 {
                    d += std::f64::consts::TAU;
                }
                d
            })
            .fold(0.0, f64::max)
    }
}

/// Rays inserted by HJ resolution of the cone (u, w), ordered from u to w.
fn hj_rays(u: &LatticeVector, w: &LatticeVector) -> Vec<LatticeVector> {
    let mut out = Vec::new();
    let mut u = u.clone();
    loop {
        let d = u.det(w);
        if d <= BigInt::one() {
            break;
        }
        // u' with det(u, u') = 1
        let e = u.a.extended_gcd(&u.b);
        // e.x*a + e.y*b = 1; u' = (-y, x): det(u,u') = a*x + b*y = 1
        let up = LatticeVector { a: -e.y, b: e.x };
        let alpha = w.det(&up);
        let k = alpha.div_ceil(&d);
        let next = u.scale(&k).add(&up);
        out.push(next.clone());
        u = next;
    }
    out
}

impl Serialize for Fan {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct F<'a> {
            rays: &'a [PrimitiveRay],
        }
        F { rays: &self.rays }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Fan {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct F {
            rays: Vec<LatticeVector>,
        }
        let f = F::deserialize(d)?;
        Fan::from_rays(&f.rays).map_err(D::Error::custom)
    }
}

impl fmt::Display for Fan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.rays.iter().map(|r| r.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(a: i64, b: i64) -> LatticeVector {
        LatticeVector::new(a, b)
    }

    #[test]
    fn primitive_examples() {
        assert_eq!(primitive(&lv(4, -6)).unwrap().v(), &lv(2, -3));
        assert_eq!(primitive(&lv(1, 0)).unwrap().v(), &lv(1, 0));
        assert_eq!(primitive(&lv(-3, -3)).unwrap().v(), &lv(-1, -1));
        assert_eq!(primitive(&lv(0, 0)), Err(Error::ZeroVector));
    }

    #[test]
    fn standard_fans() {
        let p2 = Fan::p2();
        assert_eq!(p2.rays().iter().map(|r| r.v().clone()).collect::<Vec<_>>(), vec![lv(1, 0), lv(0, 1), lv(-1, -1)]);
        assert!(p2.is_smooth());
        assert!(Fan::p1xp1().is_smooth());
        assert!(matches!(Fan::from_rays_i64(&[(1, 0), (-1, 0)]), Err(Error::IncompleteFan(_))));
        let dup = Fan::from_rays_i64(&[(1, 0), (2, 0), (0, 1), (-1, -1)]).unwrap();
        assert_eq!(dup, p2);
    }

    #[test]
    fn non_smooth_detected() {
        let f = Fan::from_rays_i64(&[(1, 0), (1, 2), (-1, 0), (0, -1)]).unwrap();
        assert!(!f.is_smooth());
        assert_eq!(f.sector_det(0), BigInt::from(2));
    }

    #[test]
    fn resolution_examples() {
        let f = Fan::from_rays_i64(&[(1, 0), (1, 2), (-1, 0), (0, -1)]).unwrap();
        let r = f.smooth_resolution();
        assert!(r.is_smooth());
        assert!(r.contains(&lv(1, 1)));
        assert_eq!(r.len(), 6);
        let g = Fan::from_rays_i64(&[(1, 0), (-1, 3), (0, -1)]).unwrap();
        let rg = g.smooth_resolution();
        assert!(rg.is_smooth() && rg.dominates(&g));
        assert_eq!(Fan::p2().smooth_resolution(), Fan::p2());
    }

    #[test]
    fn resolution_is_minimal() {
        let g = Fan::from_rays_i64(&[(1, 0), (-2, 7), (0, -1)]).unwrap();
        let r = g.smooth_resolution();
        let added: Vec<_> = r.rays().iter().filter(|x| !g.contains(x.v())).cloned().collect();
        for skip in &added {
            let keep: Vec<LatticeVector> = r
                .rays()
                .iter()
                .filter(|x| x.v() != skip.v())
                .map(|x| x.v().clone())
                .collect();
            assert!(!Fan::from_rays(&keep).unwrap().is_smooth());
        }
    }

    #[test]
    fn refine_and_dominate() {
        let r = Fan::p2().refine(&Fan::p1xp1());
        assert_eq!(r.len(), 5);
        assert!(r.is_smooth());
        assert!(r.dominates(&Fan::p2()));
        assert!(!Fan::p2().dominates(&Fan::p1xp1()));
    }

    #[test]
    fn sector_lookup() {
        let p2 = Fan::p2();
        assert_eq!(p2.sector_of(&lv(1, 1)), 0);
        assert_eq!(p2.sector_of(&lv(-1, 0)), 1);
        assert_eq!(p2.sector_of(&lv(1, -1)), 2);
        assert_eq!(p2.sector_of(&lv(1, 0)), 0);
        assert_eq!(p2.sector_of(&lv(0, 1)), 1);
        assert_eq!(p2.sector_of_f64([-1.0, 0.2]), 1);
        assert_eq!(p2.index_of(&lv(-2, -2)), Some(2));
    }

    #[test]
    fn json_roundtrip() {
        let f = Fan::p2();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"rays":[[1,0],[0,1],[-1,-1]]}"#);
        let g: Fan = serde_json::from_str(&s).unwrap();
        assert_eq!(f, g);
        let big = LatticeVector::new(num_traits::pow(BigInt::from(10), 30), BigInt::from(1));
        let s = serde_json::to_string(&big).unwrap();
        assert!(s.contains('"'));
        let back: LatticeVector = serde_json::from_str(&s).unwrap();
        assert_eq!(back, big);
    }

    #[test]
    fn matrix_basics() {
        let a = IntegerMatrix::from_i64(1, -2, 2, 1);
        assert_eq!(a.apply(&lv(1, 0)), lv(1, 2));
        assert_eq!(a.apply(&lv(1, 1)), lv(-1, 3));
        assert_eq!(a.det(), &BigInt::from(5));
        assert_eq!(a.preimage_ray(&lv(1, 0)).unwrap().v(), &lv(1, -2));
        assert!(a.is_gaussian());
        assert_eq!(IntegerMatrix::from_i64(1, -1, 1, 0).pow(6), IntegerMatrix::identity());
    }
}
