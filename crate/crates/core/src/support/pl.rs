use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lattice::{Fan, LatticeVector};
use crate::scalar::{ratio_to_string, Scalar};

/// Piecewise-linear, positively homogeneous function given by its values on
/// the primitive generators of a complete fan.
#[derive(Clone, Debug, PartialEq)]
pub struct PLFunction<S: Scalar> {
    fan: Fan,
    values: Vec<S>,
}

impl<S: Scalar> PLFunction<S> {
    pub fn new(fan: Fan, values: Vec<S>) -> Result<Self> {
        if values.len() != fan.len() {
            return Err(Error::Invalid(format!("{} values for {} rays", values.len(), fan.len())));
        }
        Ok(PLFunction { fan, values })
    }

    pub fn zero(fan: Fan) -> Self {
        let values = vec![S::zero(); fan.len()];
        PLFunction { fan, values }
    }

    /// The linear function v ↦ p·v₁ + q·v₂ on the given fan.
    pub fn linear(fan: Fan, p: S, q: S) -> Self {
        let values = fan
            .rays()
            .iter()
            .map(|r| p.clone() * S::from_int(&r.v().a) + q.clone() * S::from_int(&r.v().b))
            .collect();
        PLFunction { fan, values }
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn value(&self, i: usize) -> &S {
        &self.values[i % self.values.len()]
    }

    pub fn eval(&self, v: &LatticeVector) -> S {
        if v.is_zero() {
            return S::zero();
        }
        let i = self.fan.sector_of(v);
        let a = self.fan.ray(i);
        let b = self.fan.ray(i + 1);
        let d = S::from_int(&a.det(b));
        (S::from_int(&v.det(b)) * self.value(i).clone() + S::from_int(&a.det(v)) * self.value(i + 1).clone()) / d
    }

    /// Linear piece (ℓ₁, ℓ₂) on sector i.
    pub fn linear_piece(&self, i: usize) -> [S; 2] {
        let a = self.fan.ray(i);
        let b = self.fan.ray(i + 1);
        let d = S::from_int(&a.det(b));
        let pa = self.value(i).clone();
        let pb = self.value(i + 1).clone();
        let l1 = (pa.clone() * S::from_int(&b.b) - pb.clone() * S::from_int(&a.b)) / d.clone();
        let l2 = (S::from_int(&a.a) * pb - S::from_int(&b.a) * pa) / d;
        [l1, l2]
    }

    pub fn eval_f64(&self, v: [f64; 2]) -> f64 {
        if v[0] == 0.0 && v[1] == 0.0 {
            return 0.0;
        }
        let i = self.fan.sector_of_f64(v);
        let [l1, l2] = self.linear_piece(i);
        l1.to_f64() * v[0] + l2.to_f64() * v[1]
    }

    /// Kink at ray i:
    /// det(vᵢ,vᵢ₊₁)ψ(vᵢ₋₁) + det(vᵢ₋₁,vᵢ)ψ(vᵢ₊₁) − det(vᵢ₋₁,vᵢ₊₁)ψ(vᵢ).
    /// Non-negative at every ray iff ψ is convex.
    pub fn delta(&self, i: usize) -> S {
        let n = self.fan.len();
        let im = (i + n - 1) % n;
        let ip = (i + 1) % n;
        let (vm, v, vp) = (self.fan.ray(im), self.fan.ray(i), self.fan.ray(ip));
        S::from_int(&v.det(vp)) * self.values[im].clone() + S::from_int(&vm.det(v)) * self.values[ip].clone()
            - S::from_int(&vm.det(vp)) * self.values[i].clone()
    }

    pub fn is_convex(&self) -> bool {
        (0..self.fan.len()).all(|i| self.delta(i).sign() != Ordering::Less)
    }

    pub fn is_linear(&self) -> bool {
        (0..self.fan.len()).all(|i| self.delta(i).is_zero_tol())
    }

    /// Values at the generators of another fan. The result equals `self`
    /// as a function only when `fan` refines the kinks of `self`.
    pub fn sample_on(&self, fan: &Fan) -> PLFunction<S> {
        let values = fan.rays().iter().map(|r| self.eval(r.v())).collect();
        PLFunction { fan: fan.clone(), values }
    }

    /// Re-expresses the function on a refining fan.
    pub fn refine_to(&self, fan: &Fan) -> Result<PLFunction<S>> {
        if !fan.dominates(&self.kink_fan()) {
            return Err(Error::NotPiecewiseLinear);
        }
        Ok(self.sample_on(fan))
    }

    /// Fan spanned by the kink rays (padded to stay complete).
    pub fn kink_fan(&self) -> Fan {
        self.prune(&[]).fan
    }

    /// Drops rays where the function is linear, except those listed in `keep`;
    /// a ray is kept whenever removing it would break completeness.
    pub fn prune(&self, keep: &[LatticeVector]) -> PLFunction<S> {
        let mut cur = self.clone();
        loop {
            let n = cur.fan.len();
            if n <= 3 {
                return cur;
            }
            let mut removed = false;
            for i in 0..n {
                let v = cur.fan.ray(i);
                if keep.iter().any(|k| k.same_direction(v)) || !cur.delta(i).is_zero_tol() {
                    continue;
                }
                let prev = cur.fan.ray(i + n - 1);
                let next = cur.fan.ray(i + 1);
                if prev.det(next) <= BigInt::from(0) {
                    continue;
                }
                let rays: Vec<LatticeVector> =
                    (0..n).filter(|&j| j != i).map(|j| cur.fan.ray(j).clone()).collect();
                let vals: Vec<S> = (0..n).filter(|&j| j != i).map(|j| cur.values[j].clone()).collect();
                match Fan::from_rays(&rays) {
                    Ok(f) if f.len() == n - 1 => {
                        cur = PLFunction { fan: f, values: vals };
                        removed = true;
                        break;
                    }
                    _ => continue,
                }
            }
            if !removed {
                return cur;
            }
        }
    }

    pub fn add(&self, o: &PLFunction<S>) -> PLFunction<S> {
        if self.fan == o.fan {
            let values = self.values.iter().zip(&o.values).map(|(a, b)| a.clone() + b.clone()).collect();
            return PLFunction { fan: self.fan.clone(), values };
        }
        let f = self.fan.refine(&o.fan);
        let a = self.sample_on(&f);
        let b = o.sample_on(&f);
        a.add(&b)
    }

    pub fn scale(&self, s: &S) -> PLFunction<S> {
        let values = self.values.iter().map(|a| a.clone() * s.clone()).collect();
        PLFunction { fan: self.fan.clone(), values }
    }

    pub fn sub(&self, o: &PLFunction<S>) -> PLFunction<S> {
        self.add(&o.scale(&-S::one()))
    }

    pub fn add_linear(&self, p: &S, q: &S) -> PLFunction<S> {
        self.add(&PLFunction::linear(self.fan.clone(), p.clone(), q.clone()))
    }

    /// Values at (1,0), (0,1), (−1,−1).
    pub fn p2_values(&self) -> [S; 3] {
        let [a, b, c] = Fan::p2_rays();
        [self.eval(a.v()), self.eval(b.v()), self.eval(c.v())]
    }

    /// Adds the unique linear function making the three P² values equal.
    pub fn normalize(&self) -> Result<PLFunction<S>> {
        for r in Fan::p2_rays() {
            if !self.fan.contains(r.v()) {
                return Err(Error::MissingRay(r.to_string()));
            }
        }
        let [a, b, c] = self.p2_values();
        let three = S::from_i64(3);
        let two = S::from_i64(2);
        let p = (b.clone() + c.clone() - two.clone() * a.clone()) / three.clone();
        let q = (a + c - two * b) / three;
        Ok(self.add_linear(&p, &q))
    }

    /// Sum of the values at the three P² primitives: the degree of the class,
    /// invariant under adding linear functions.
    pub fn degree(&self) -> S {
        let [a, b, c] = self.p2_values();
        a + b + c
    }

    /// max over the unit circle; linear pieces may peak inside a sector.
    pub fn growth(&self) -> f64 {
        let n = self.fan.len();
        let mut best = f64::NEG_INFINITY;
        for i in 0..n {
            let a = self.fan.ray(i).to_f64_scaled();
            let b = self.fan.ray(i + 1).to_f64_scaled();
            let [l1, l2] = self.linear_piece(i);
            let l = [l1.to_f64(), l2.to_f64()];
            let on = |u: [f64; 2]| {
                let nu = (u[0] * u[0] + u[1] * u[1]).sqrt();
                (l[0] * u[0] + l[1] * u[1]) / nu
            };
            best = best.max(on(a)).max(on(b));
            let inside = a[0] * l[1] - a[1] * l[0] > 0.0 && l[0] * b[1] - l[1] * b[0] > 0.0;
            if inside {
                best = best.max((l[0] * l[0] + l[1] * l[1]).sqrt());
            }
        }
        best
    }

    pub fn to_f64(&self) -> PLFunction<f64> {
        PLFunction { fan: self.fan.clone(), values: self.values.iter().map(|x| x.to_f64()).collect() }
    }

    /// ψ∘A, piecewise linear on the fan of A-preimages of the kink rays
    /// together with `extra`.
    pub fn compose_linear(&self, a: &crate::lattice::IntegerMatrix, extra: &[LatticeVector]) -> Result<PLFunction<S>> {
        let mut rays = Vec::with_capacity(self.fan.len() + extra.len());
        for r in self.fan.rays() {
            rays.push(a.preimage_ray(r.v())?.into_vector());
        }
        rays.extend(extra.iter().cloned());
        let fan = Fan::from_rays(&rays)?;
        let values = fan.rays().iter().map(|r| self.eval(&a.apply(r.v()))).collect();
        Ok(PLFunction { fan, values })
    }
}

impl PLFunction<BigRational> {
    pub fn from_i64(fan: Fan, values: &[i64]) -> Result<Self> {
        Self::new(fan, values.iter().map(|&x| BigRational::from_integer(x.into())).collect())
    }
}

impl Serialize for PLFunction<BigRational> {
    fn serialize<Se: Serializer>(&self, s: Se) -> std::result::Result<Se::Ok, Se::Error> {
        let mut st = s.serialize_struct("PLFunction", 2)?;
        st.serialize_field("fan", &self.fan)?;
        let vals: Vec<String> = self.values.iter().map(ratio_to_string).collect();
        st.serialize_field("values", &vals)?;
        st.end()
    }
}

impl Serialize for PLFunction<f64> {
    fn serialize<Se: Serializer>(&self, s: Se) -> std::result::Result<Se::Ok, Se::Error> {
        let mut st = s.serialize_struct("PLFunction", 2)?;
        st.serialize_field("fan", &self.fan)?;
        st.serialize_field("values", &self.values)?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn line_on_p2() -> PLFunction<BigRational> {
        PLFunction::from_i64(Fan::p2(), &[0, 0, 1]).unwrap()
    }

    #[test]
    fn eval_and_pieces() {
        let psi = line_on_p2();
        assert_eq!(psi.eval(&LatticeVector::new(-1, 0)), rat(1, 1));
        assert_eq!(psi.eval(&LatticeVector::new(3, 5)), rat(0, 1));
        assert_eq!(psi.eval(&LatticeVector::new(1, -2)), rat(2, 1));
        assert!((psi.eval_f64([-0.5, 0.1]) - 0.5).abs() < 1e-12);
        assert!(psi.is_convex());
        assert!(!psi.is_linear());
    }

    #[test]
    fn normalize_pole_class() {
        let psi = PLFunction::from_i64(Fan::p2(), &[1, 0, 0]).unwrap();
        let n = psi.normalize().unwrap();
        assert_eq!(n.values(), &[rat(1, 3), rat(1, 3), rat(1, 3)]);
        assert_eq!(n.degree(), rat(1, 1));
        assert!(n.sub(&psi).is_linear());
        assert_eq!(n.normalize().unwrap(), n);
    }

    #[test]
    fn normalize_requires_p2_rays() {
        let psi = PLFunction::<BigRational>::zero(Fan::from_rays_i64(&[(1, 0), (0, 1), (-1, 0), (0, -1)]).unwrap());
        assert!(matches!(psi.normalize(), Err(Error::MissingRay(_))));
    }

    #[test]
    fn growth_takes_interior_maxima() {
        let anti = PLFunction::from_i64(Fan::p2(), &[1, 1, 1]).unwrap();
        assert!((anti.growth() - 5f64.sqrt()).abs() < 1e-12);
        let l = line_on_p2();
        assert!((l.growth() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn prune_keeps_kinks() {
        let f = Fan::p2().refine(&Fan::p1xp1());
        let psi = line_on_p2().sample_on(&f);
        let pruned = psi.prune(&[]);
        assert_eq!(pruned.fan(), &Fan::p2());
        let lin = PLFunction::<BigRational>::linear(f.clone(), rat(2, 1), rat(-1, 1));
        assert!(lin.prune(&[]).is_linear());
    }

    #[test]
    fn compose_with_matrix() {
        let a = crate::lattice::IntegerMatrix::from_i64(2, 0, 0, 1);
        let psi = line_on_p2();
        let c = psi.compose_linear(&a, &[]).unwrap();
        for (x, y) in [(1, 3), (-2, 5), (-7, -1), (4, -9)] {
            let v = LatticeVector::new(x, y);
            assert_eq!(c.eval(&v), psi.eval(&a.apply(&v)));
        }
    }
}
