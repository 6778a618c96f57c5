//! Intersection theory and divisor calculus on smooth complete toric surfaces.

use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lattice::{Fan, LatticeVector, PrimitiveRay};
use crate::scalar::{ratio_to_string, Scalar};
use crate::support::{newton_support, LaurentPoly, PLFunction};

static SURFACES_BUILT: AtomicUsize = AtomicUsize::new(0);
static IDENTITY_FAILURES: AtomicUsize = AtomicUsize::new(0);

/// (surfaces constructed, surfaces whose self-intersection data failed Σaᵢ = 3d − 12).
pub fn surface_stats() -> (usize, usize) {
    (SURFACES_BUILT.load(AtomicOrdering::Relaxed), IDENTITY_FAILURES.load(AtomicOrdering::Relaxed))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToricSurface {
    fan: Fan,
    a: Vec<BigInt>,
}

impl ToricSurface {
    pub fn new(fan: Fan) -> Result<Self> {
        if !fan.is_smooth() {
            return Err(Error::NotSmooth);
        }
        let n = fan.len();
        let mut a = Vec::with_capacity(n);
        for i in 0..n {
            let prev = fan.ray(i + n - 1);
            let next = fan.ray(i + 1);
            let ai = prev.det(next);
            if prev.add(next) != fan.ray(i).scale(&ai) {
                return Err(Error::Internal(format!("lattice relation fails at ray {}", fan.ray(i))));
            }
            a.push(ai);
        }
        SURFACES_BUILT.fetch_add(1, AtomicOrdering::Relaxed);
        let sum: BigInt = a.iter().sum();
        if sum != BigInt::from(3 * n as i64 - 12) {
            IDENTITY_FAILURES.fetch_add(1, AtomicOrdering::Relaxed);
            return Err(Error::Internal(format!("sum of a_i is {sum}, expected {}", 3 * n as i64 - 12)));
        }
        Ok(ToricSurface { fan, a })
    }

    pub fn p2() -> Self {
        Self::new(Fan::p2()).expect("P2 is smooth")
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    /// aᵢ with Cᵢ² = −aᵢ.
    pub fn self_int(&self) -> &[BigInt] {
        &self.a
    }

    /// (Cᵢ·Cⱼ).
    pub fn pole_intersection(&self, i: usize, j: usize) -> BigInt {
        let n = self.fan.len();
        if i == j {
            -self.a[i].clone()
        } else if (i + 1) % n == j || (j + 1) % n == i {
            BigInt::from(1)
        } else {
            BigInt::zero()
        }
    }

    pub fn dominates(&self, o: &ToricSurface) -> bool {
        self.fan.dominates(&o.fan)
    }
}

/// Divisor supported on the poles, one coefficient per ray.
#[derive(Clone, Debug, PartialEq)]
pub struct ExternalDivisor<S: Scalar> {
    surface: ToricSurface,
    coeffs: Vec<S>,
}

impl<S: Scalar> ExternalDivisor<S> {
    pub fn new(surface: ToricSurface, coeffs: Vec<S>) -> Result<Self> {
        if coeffs.len() != surface.fan.len() {
            return Err(Error::Invalid("one coefficient per ray required".into()));
        }
        Ok(ExternalDivisor { surface, coeffs })
    }

    pub fn pole(surface: ToricSurface, ray: &LatticeVector) -> Result<Self> {
        let i = surface.fan.index_of(ray).ok_or_else(|| Error::MissingRay(ray.to_string()))?;
        let mut coeffs = vec![S::zero(); surface.fan.len()];
        coeffs[i] = S::one();
        Ok(ExternalDivisor { surface, coeffs })
    }

    pub fn surface(&self) -> &ToricSurface {
        &self.surface
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn is_effective(&self) -> bool {
        self.coeffs.iter().all(|c| c.sign() != std::cmp::Ordering::Less)
    }

    pub fn intersect(&self, o: &ExternalDivisor<S>) -> Result<S> {
        if self.surface != o.surface {
            return Err(Error::SurfaceMismatch);
        }
        let n = self.coeffs.len();
        let mut acc = S::zero();
        for i in 0..n {
            let di = o.coeffs[(i + n - 1) % n].clone() + o.coeffs[(i + 1) % n].clone()
                - S::from_int(&self.surface.a[i]) * o.coeffs[i].clone();
            acc = acc + self.coeffs[i].clone() * di;
        }
        Ok(acc)
    }

    pub fn support_function(&self) -> PLFunction<S> {
        PLFunction::new(self.surface.fan.clone(), self.coeffs.clone()).expect("aligned")
    }

    pub fn from_support(psi: &PLFunction<S>, surface: &ToricSurface) -> Result<Self> {
        if !surface.fan.dominates(&psi.kink_fan()) {
            return Err(Error::NotPiecewiseLinear);
        }
        let coeffs = surface.fan.rays().iter().map(|r| psi.eval(r.v())).collect();
        Ok(ExternalDivisor { surface: surface.clone(), coeffs })
    }

    pub fn is_principal(&self) -> bool {
        self.support_function().is_linear()
    }

    pub fn is_nef(&self) -> bool {
        self.support_function().is_convex()
    }

    pub fn normalize(&self) -> Result<SurfaceClass<S>> {
        let psi = self.support_function().normalize()?;
        Ok(SurfaceClass(ExternalDivisor { surface: self.surface.clone(), coeffs: psi.values().to_vec() }))
    }

    /// Degree: pairing with the pullback of a line of P².
    pub fn degree(&self) -> Result<S> {
        self.normalize().map(|c| c.degree())
    }

    pub fn add(&self, o: &ExternalDivisor<S>) -> Result<Self> {
        if self.surface != o.surface {
            return Err(Error::SurfaceMismatch);
        }
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.clone() + b.clone()).collect();
        Ok(ExternalDivisor { surface: self.surface.clone(), coeffs })
    }

    pub fn sub(&self, o: &ExternalDivisor<S>) -> Result<Self> {
        if self.surface != o.surface {
            return Err(Error::SurfaceMismatch);
        }
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.clone() - b.clone()).collect();
        Ok(ExternalDivisor { surface: self.surface.clone(), coeffs })
    }

    /// π_* for X ≻ Y: keeps the coefficients of the rays of Y.
    pub fn pushforward_pi(&self, y: &ToricSurface) -> Result<Self> {
        if !self.surface.dominates(y) {
            return Err(Error::NotDominating);
        }
        let coeffs = y
            .fan
            .rays()
            .iter()
            .map(|r| self.coeffs[self.surface.fan.index_of(r.v()).expect("dominated")].clone())
            .collect();
        Ok(ExternalDivisor { surface: y.clone(), coeffs })
    }

    /// π^* for X ≻ Y: total transform, ψ evaluated at the rays of X.
    pub fn pullback_pi(&self, x: &ToricSurface) -> Result<Self> {
        if !x.dominates(&self.surface) {
            return Err(Error::NotDominating);
        }
        let psi = self.support_function();
        let coeffs = x.fan.rays().iter().map(|r| psi.eval(r.v())).collect();
        Ok(ExternalDivisor { surface: x.clone(), coeffs })
    }
}

/// Normalized external representative: equal coefficients on the P² rays.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceClass<S: Scalar>(ExternalDivisor<S>);

impl<S: Scalar> SurfaceClass<S> {
    pub fn divisor(&self) -> &ExternalDivisor<S> {
        &self.0
    }

    /// 3 × the common P² coefficient.
    pub fn degree(&self) -> S {
        self.0.support_function().degree()
    }
}

impl Serialize for ExternalDivisor<BigRational> {
    fn serialize<Se: Serializer>(&self, s: Se) -> std::result::Result<Se::Ok, Se::Error> {
        let mut st = s.serialize_struct("ExternalDivisor", 2)?;
        st.serialize_field("fan", &self.surface.fan)?;
        st.serialize_field("coeffs", &self.coeffs.iter().map(ratio_to_string).collect::<Vec<_>>())?;
        st.end()
    }
}

impl Serialize for ExternalDivisor<f64> {
    fn serialize<Se: Serializer>(&self, s: Se) -> std::result::Result<Se::Ok, Se::Error> {
        let mut st = s.serialize_struct("ExternalDivisor", 2)?;
        st.serialize_field("fan", &self.surface.fan)?;
        st.serialize_field("coeffs", &self.coeffs)?;
        st.end()
    }
}

/// Intersection number of two Cartier classes given by PL functions on
/// possibly singular simplicial fans, computed on the common refinement:
/// (D·Cᵢ) = Δᵢ / (det(vᵢ₋₁,vᵢ)·det(vᵢ,vᵢ₊₁)).
pub fn pl_pairing<S: Scalar>(p1: &PLFunction<S>, p2: &PLFunction<S>) -> S {
    let fan = p1.fan().refine(p2.fan());
    let a = p1.sample_on(&fan);
    let b = p2.sample_on(&fan);
    let n = fan.len();
    let mut acc = S::zero();
    for i in 0..n {
        let d1 = fan.sector_det(i + n - 1);
        let d2 = fan.sector_det(i);
        let dc = a.delta(i) / S::from_int(&(d1 * d2));
        acc = acc + b.value(i).clone() * dc;
    }
    acc
}

/// Curve {P = 0} through its Newton polygon.
#[derive(Clone, Debug)]
pub struct NewtonCurveClass {
    /// Normalized class on the smoothed normal fan.
    pub class: PLFunction<BigRational>,
    /// (C·C_τ) for the poles met by the curve: the lattice length of the
    /// polygon edge whose inner normal is v_τ.
    pub intersections: Vec<(PrimitiveRay, BigInt)>,
}

impl NewtonCurveClass {
    /// Σ (C·C_τ)·v_τ, which vanishes for every curve.
    pub fn balance(&self) -> LatticeVector {
        self.intersections
            .iter()
            .fold(LatticeVector::new(0, 0), |acc, (r, k)| acc.add(&r.v().scale(k)))
    }
}

pub fn curve_class_from_newton(points: &[(i64, i64)]) -> Result<NewtonCurveClass> {
    let hull = crate::support::ronkin_hull(points);
    if hull.len() < 3 {
        return Err(Error::DegeneratePolygon);
    }
    let mut p = LaurentPoly::zero();
    for &(a, b) in &hull {
        p.add_term((a, b), crate::complex::CRational::one());
    }
    let psi = newton_support(&p)?;
    let intersections = crate::support::ronkin_edges(&hull)
        .into_iter()
        .map(|(v, len)| (crate::lattice::primitive(&v).expect("edge normal"), BigInt::from(len)))
        .collect();
    Ok(NewtonCurveClass { class: psi.normalize()?, intersections })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn lv(a: i64, b: i64) -> LatticeVector {
        LatticeVector::new(a, b)
    }

    #[test]
    fn p2_intersections() {
        let x = ToricSurface::p2();
        let c1 = ExternalDivisor::<BigRational>::pole(x.clone(), &lv(1, 0)).unwrap();
        let c2 = ExternalDivisor::<BigRational>::pole(x.clone(), &lv(0, 1)).unwrap();
        assert_eq!(c1.intersect(&c2).unwrap(), rat(1, 1));
        assert_eq!(c1.intersect(&c1).unwrap(), rat(1, 1));
        assert_eq!(x.self_int(), &[BigInt::from(-1), BigInt::from(-1), BigInt::from(-1)]);
        let q = ToricSurface::new(Fan::p1xp1()).unwrap();
        let e = ExternalDivisor::<BigRational>::pole(q, &lv(1, 0)).unwrap();
        assert_eq!(e.intersect(&e).unwrap(), rat(0, 1));
    }

    #[test]
    fn support_roundtrip_and_normalization() {
        let x = ToricSurface::p2();
        let c = ExternalDivisor::<BigRational>::pole(x.clone(), &lv(1, 0)).unwrap();
        let psi = c.support_function();
        assert_eq!(psi.values(), &[rat(1, 1), rat(0, 1), rat(0, 1)]);
        assert_eq!(ExternalDivisor::from_support(&psi, &x).unwrap(), c);
        let n = c.normalize().unwrap();
        assert_eq!(n.divisor().coeffs(), &[rat(1, 3), rat(1, 3), rat(1, 3)]);
        assert!(c.sub(n.divisor()).unwrap().is_principal());
        let anti = ExternalDivisor::new(x.clone(), vec![rat(1, 1); 3]).unwrap();
        assert!(anti.is_nef());
        assert_eq!(anti.degree().unwrap(), rat(3, 1));
        let x1 = ExternalDivisor::new(x, vec![rat(1, 1), rat(0, 1), rat(-1, 1)]).unwrap();
        assert!(x1.is_principal());
    }

    #[test]
    fn numeric_degree_of_d2() {
        let x = ToricSurface::p2();
        let d2 = ExternalDivisor::new(x, vec![1.0, 1.0, 2f64.sqrt()]).unwrap();
        assert!((d2.degree().unwrap() - (2.0 + 2f64.sqrt())).abs() < 1e-9);
    }

    #[test]
    fn pullback_to_refinement() {
        let y = ToricSurface::p2();
        let x = ToricSurface::new(Fan::p2().refine(&Fan::p1xp1())).unwrap();
        let c = ExternalDivisor::<BigRational>::pole(y.clone(), &lv(1, 0)).unwrap();
        let up = c.pullback_pi(&x).unwrap();
        let rays: Vec<_> = x.fan().rays().iter().map(|r| r.v().clone()).collect();
        for (r, co) in rays.iter().zip(up.coeffs()) {
            let want = if *r == lv(1, 0) || *r == lv(0, -1) { rat(1, 1) } else { rat(0, 1) };
            assert_eq!(co, &want);
        }
        assert_eq!(up.pushforward_pi(&y).unwrap(), c);
        assert!(matches!(c.pushforward_pi(&x), Err(Error::NotDominating)));
    }

    #[test]
    fn newton_curves() {
        let line = curve_class_from_newton(&[(0, 0), (1, 0), (0, 1)]).unwrap();
        assert_eq!(line.balance(), lv(0, 0));
        let mut got: Vec<_> = line.intersections.iter().map(|(r, k)| (r.v().clone(), k.clone())).collect();
        got.sort();
        assert_eq!(got, vec![(lv(-1, -1), 1.into()), (lv(0, 1), 1.into()), (lv(1, 0), 1.into())]);
        assert_eq!(line.class.p2_values(), [rat(1, 3), rat(1, 3), rat(1, 3)]);
        let sq = curve_class_from_newton(&[(0, 0), (1, 0), (0, 1), (1, 1)]).unwrap();
        assert_eq!(sq.intersections.len(), 4);
        assert!(sq.intersections.iter().all(|(_, k)| k == &BigInt::from(1)));
        assert_eq!(sq.balance(), lv(0, 0));
        assert!(matches!(curve_class_from_newton(&[(0, 0), (2, 2)]), Err(Error::DegeneratePolygon)));
    }

    #[test]
    fn newton_intersections_match_pairing() {
        let nc = curve_class_from_newton(&[(0, 0), (3, 1), (1, 2), (0, 1)]).unwrap();
        for (r, k) in &nc.intersections {
            let pole_fan = nc.class.fan();
            let i = pole_fan.index_of(r.v()).unwrap();
            let d = nc.class.delta(i) / BigRational::from_integer(pole_fan.sector_det(i + pole_fan.len() - 1) * pole_fan.sector_det(i));
            assert_eq!(d, BigRational::from_integer(k.clone()));
        }
    }

    #[test]
    fn simplicial_pairing_matches_smooth() {
        let fan = Fan::from_rays_i64(&[(1, 0), (1, 3), (-2, 1), (-1, -1), (2, -5)]).unwrap();
        let p1 = PLFunction::from_i64(fan.clone(), &[1, 2, 0, 3, 1]).unwrap();
        let p2 = PLFunction::from_i64(fan.clone(), &[0, 1, 4, 1, 2]).unwrap();
        let s = ToricSurface::new(fan.smooth_resolution()).unwrap();
        let d1 = ExternalDivisor::from_support(&p1, &s).unwrap();
        let d2 = ExternalDivisor::from_support(&p2, &s).unwrap();
        assert_eq!(pl_pairing(&p1, &p2), d1.intersect(&d2).unwrap());
        assert_eq!(pl_pairing(&p1, &p2), pl_pairing(&p2, &p1));
    }
}
