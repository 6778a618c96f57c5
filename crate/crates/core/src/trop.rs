//! Tropicalizations: integral, positively homogeneous PL self-maps of the plane.

use std::f64::consts::TAU;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{fmax, fmin, Exec};
use crate::lattice::{primitive, Fan, IntegerMatrix, LatticeVector, PrimitiveRay};
use crate::scalar::ln_abs_big;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropMap {
    lin_fan: Fan,
    matrices: Vec<IntegerMatrix>,
    abs_det: BigInt,
}

impl TropMap {
    /// Validates continuity across shared rays and |det| constancy.
    pub fn new(lin_fan: Fan, matrices: Vec<IntegerMatrix>) -> Result<Self> {
        let n = lin_fan.len();
        if matrices.len() != n {
            return Err(Error::Invalid("one matrix per sector required".into()));
        }
        let abs_det = matrices[0].det().abs();
        if abs_det.is_zero() {
            return Err(Error::Singular);
        }
        for i in 0..n {
            if matrices[i].det().abs() != abs_det {
                return Err(Error::Invalid(format!("|det| differs on sector {i}")));
            }
            let shared = lin_fan.ray(i + 1);
            if matrices[i].apply(shared) != matrices[(i + 1) % n].apply(shared) {
                return Err(Error::Invalid(format!("discontinuous across ray {shared}")));
            }
        }
        Ok(TropMap { lin_fan, matrices, abs_det })
    }

    pub fn linear(a: IntegerMatrix) -> Result<Self> {
        Self::new(Fan::p2(), vec![a.clone(), a.clone(), a])
    }

    pub fn identity() -> Self {
        Self::linear(IntegerMatrix::identity()).expect("identity")
    }

    pub fn lin_fan(&self) -> &Fan {
        &self.lin_fan
    }

    pub fn matrices(&self) -> &[IntegerMatrix] {
        &self.matrices
    }

    /// |ρ|: the common |det| of the sector matrices.
    pub fn abs_det(&self) -> &BigInt {
        &self.abs_det
    }

    /// The single matrix when all sectors agree.
    pub fn as_linear(&self) -> Option<&IntegerMatrix> {
        let m = &self.matrices[0];
        self.matrices.iter().all(|x| x == m).then_some(m)
    }

    pub fn matrix_at(&self, v: &LatticeVector) -> &IntegerMatrix {
        &self.matrices[self.lin_fan.sector_of(v)]
    }

    pub fn apply(&self, v: &LatticeVector) -> LatticeVector {
        if v.is_zero() {
            return v.clone();
        }
        self.matrix_at(v).apply(v)
    }

    pub fn apply_f64(&self, v: [f64; 2]) -> [f64; 2] {
        self.matrices[self.lin_fan.sector_of_f64(v)].apply_f64(v)
    }

    pub fn apply_ray(&self, r: &PrimitiveRay) -> PrimitiveRay {
        primitive(&self.apply(r.v())).expect("non-degenerate map")
    }

    /// Rays whose image is `r`, one per sector containing a preimage.
    pub fn preimage_rays(&self, r: &LatticeVector) -> Vec<PrimitiveRay> {
        let mut out: Vec<PrimitiveRay> = Vec::new();
        for (i, m) in self.matrices.iter().enumerate() {
            let w = m.preimage_ray(r).expect("nonsingular");
            let a = self.lin_fan.ray(i);
            let b = self.lin_fan.ray(i + 1);
            let inside = !a.det(w.v()).is_negative() && !w.v().det(b).is_negative();
            if inside && !out.contains(&w) {
                out.push(w);
            }
        }
        out
    }

    /// self ∘ other.
    pub fn compose(&self, other: &TropMap) -> Result<TropMap> {
        let mut rays: Vec<LatticeVector> = other.lin_fan.rays().iter().map(|r| r.v().clone()).collect();
        for r in self.lin_fan.rays() {
            rays.extend(other.preimage_rays(r.v()).into_iter().map(|p| p.into_vector()));
        }
        let fan = Fan::from_rays(&rays)?;
        let mut mats = Vec::with_capacity(fan.len());
        for i in 0..fan.len() {
            let mid = fan.ray(i).add(fan.ray(i + 1));
            let m2 = other.matrix_at(&mid);
            let m1 = self.matrix_at(&m2.apply(&mid));
            mats.push(m1.mul(m2));
        }
        TropMap::new(fan, mats).map_err(|e| Error::Internal(format!("composition: {e}")))
    }

    /// Signed winding number of the induced circle map.
    pub fn winding(&self) -> i64 {
        let n = self.lin_fan.len();
        let images: Vec<(LatticeVector, LatticeVector, bool)> = (0..n)
            .map(|i| {
                let m = &self.matrices[i];
                (m.apply(self.lin_fan.ray(i)), m.apply(self.lin_fan.ray(i + 1)), m.det().is_positive())
            })
            .collect();
        // reference ray avoiding every image ray
        let mut k = 0i64;
        let reference = loop {
            let cand = LatticeVector::new(1 + k, 1 + 2 * k * k);
            let hit = images.iter().any(|(p, q, _)| p.same_direction(&cand) || q.same_direction(&cand));
            if !hit {
                break cand;
            }
            k += 1;
        };
        let mut w = 0i64;
        for (p, q, pos) in &images {
            if *pos {
                if p.det(&reference).is_positive() && reference.det(q).is_positive() {
                    w += 1;
                }
            } else if q.det(&reference).is_positive() && reference.det(p).is_positive() {
                w -= 1;
            }
        }
        w
    }

    pub fn covering_degree(&self) -> u64 {
        self.winding().unsigned_abs()
    }

    pub fn is_orientation_preserving(&self) -> bool {
        self.matrices.iter().all(|m| m.det().is_positive())
    }

    pub fn is_homeomorphism(&self) -> bool {
        let same_sign = self.matrices.iter().all(|m| m.det().is_positive())
            || self.matrices.iter().all(|m| m.det().is_negative());
        same_sign && self.covering_degree() == 1
    }

    /// dtop of the map alone: |ρ|·covering degree.
    pub fn dtop(&self) -> BigInt {
        &self.abs_det * BigInt::from(self.covering_degree())
    }

    /// k with A(v_τ) = k·prim(A v_τ).
    pub fn ramification(&self, r: &PrimitiveRay) -> BigInt {
        self.apply(r.v()).gcd()
    }

    /// Continuous lift of the circle map, angles in radians.
    fn lift(&self, x: f64) -> f64 {
        let turns = (x / TAU).floor();
        let x0 = x - turns * TAU;
        let dir = |t: f64| [t.cos(), t.sin()];
        let ang = |v: [f64; 2]| v[1].atan2(v[0]);
        let start = {
            let a = ang(self.apply_f64([1.0, 0.0]));
            if a < 0.0 {
                a + TAU
            } else {
                a
            }
        };
        let mut acc = start;
        let mut prev = self.apply_f64([1.0, 0.0]);
        let n = self.lin_fan.len();
        let mut breaks: Vec<f64> = (0..n).map(|i| self.lin_fan.ray(i).angle()).filter(|&t| t > 0.0 && t < x0).collect();
        breaks.push(x0);
        for t in breaks {
            let cur = self.apply_f64(dir(t));
            let mut d = ang(cur) - ang(prev);
            while d > std::f64::consts::PI {
                d -= TAU;
            }
            while d <= -std::f64::consts::PI {
                d += TAU;
            }
            acc += d;
            prev = cur;
        }
        acc + turns * TAU * self.winding() as f64
    }

    /// Rotation number estimate from n iterations, with the a-priori 1/n bound.
    pub fn rotation_number(&self, n: usize) -> Result<(f64, f64)> {
        if !self.is_homeomorphism() || !self.is_orientation_preserving() {
            return Err(Error::NotHomeomorphism);
        }
        let mut x = 0.0f64;
        for _ in 0..n {
            x = self.lift(x);
        }
        let est = x / (TAU * n as f64);
        Ok((est - est.floor(), 1.0 / n as f64))
    }

    /// ‖Tⁿv‖^{1/n} over 360 unit directions; ram_decay = Ram(Tᵏ, τ)/μᵏ for k ≤ n.
    pub fn growth_exponent(&self, n: u32, tau: &PrimitiveRay, mu: f64, exec: Exec) -> Result<GrowthReport> {
        if !self.is_homeomorphism() {
            return Err(Error::NotHomeomorphism);
        }
        let per_direction = exec.map_range(360, |k| {
            let t = TAU * k as f64 / 360.0;
            let mut u = [t.cos(), t.sin()];
            let mut log_norm = 0.0;
            for _ in 0..n {
                let w = self.apply_f64(u);
                let r = w[0].hypot(w[1]);
                log_norm += r.ln();
                u = [w[0] / r, w[1] / r];
            }
            (log_norm / n as f64).exp()
        });
        let target = (crate::scalar::int_to_f64(&self.dtop())).sqrt();
        let mut ram_decay = Vec::with_capacity(n as usize);
        let mut v = tau.v().clone();
        for k in 1..=n {
            v = self.apply(&v);
            ram_decay.push((ln_abs_big(&v.gcd()) - k as f64 * mu.ln()).exp());
        }
        let max_deviation = per_direction.iter().map(|x| (x - target).abs()).fold(0.0, f64::max);
        Ok(GrowthReport {
            n,
            sqrt_dtop: target,
            min: fmin(&per_direction),
            max: fmax(&per_direction),
            max_deviation,
            per_direction,
            mu,
            ram_decay,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub n: u32,
    pub sqrt_dtop: f64,
    pub min: f64,
    pub max: f64,
    pub max_deviation: f64,
    pub per_direction: Vec<f64>,
    pub mu: f64,
    pub ram_decay: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RotationClass {
    Rational { p: u64, q: u64 },
    IrrationalCertified,
    /// Real eigenvalues: rotation 0 or 1/2 when orientation-preserving, none otherwise.
    RealEigenvalues { rotation: Option<(u64, u64)> },
}

/// Exact rationality test of the rotation number of a linear map.
pub fn rotation_is_rational_linear(a: &IntegerMatrix) -> Result<RotationClass> {
    let d = a.det().clone();
    if d.is_zero() {
        return Err(Error::Singular);
    }
    let t = a.trace();
    let disc = &t * &t - BigInt::from(4) * &d;
    if !disc.is_negative() {
        let rotation = if d.is_negative() {
            None
        } else if t.is_positive() {
            Some((0, 1))
        } else {
            Some((1, 2))
        };
        return Ok(RotationClass::RealEigenvalues { rotation });
    }
    let theta = rotation_angle_linear(a);
    for n in [1u32, 2, 3, 4, 6] {
        if let Some(c) = a.pow(n).scalar_value() {
            let q = if c.is_positive() { n as u64 } else { 2 * n as u64 };
            let p = (theta * q as f64).round() as u64 % q;
            let g = p.gcd(&q).max(1);
            return Ok(RotationClass::Rational { p: p / g, q: q / g });
        }
    }
    Ok(RotationClass::IrrationalCertified)
}

/// Rotation number of a linear map with complex eigenvalues, in [0,1).
pub fn rotation_angle_linear(a: &IntegerMatrix) -> f64 {
    let t = crate::scalar::int_to_f64(&a.trace());
    let d = crate::scalar::int_to_f64(a.det());
    let th = (t / (2.0 * d.sqrt())).clamp(-1.0, 1.0).acos() / TAU;
    if a.entry(1, 0).is_positive() {
        th
    } else {
        1.0 - th
    }
}

impl Serialize for TropMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct T<'a> {
            lin_fan: &'a Fan,
            matrices: &'a [IntegerMatrix],
        }
        T { lin_fan: &self.lin_fan, matrices: &self.matrices }.serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(a: i64, b: i64) -> LatticeVector {
        LatticeVector::new(a, b)
    }

    fn flagship() -> TropMap {
        TropMap::linear(IntegerMatrix::from_i64(1, -2, 2, 1)).unwrap()
    }

    /// Wraps the hexagon fan twice around P2, sector by sector.
    fn double_cover() -> TropMap {
        let src = [(1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1)];
        let dst = [(1, 0), (0, 1), (-1, -1), (1, 0), (0, 1), (-1, -1)];
        let fan = Fan::from_rays_i64(&src).unwrap();
        let m = (0..6)
            .map(|i| {
                let (a, b) = (src[i], src[(i + 1) % 6]);
                let (p, q) = (dst[i], dst[(i + 1) % 6]);
                // [p q]·[a b]^{-1}, det [a b] = 1
                let inv = [[b.1, -b.0], [-a.1, a.0]];
                IntegerMatrix::from_i64(
                    p.0 * inv[0][0] + q.0 * inv[1][0],
                    p.0 * inv[0][1] + q.0 * inv[1][1],
                    p.1 * inv[0][0] + q.1 * inv[1][0],
                    p.1 * inv[0][1] + q.1 * inv[1][1],
                )
            })
            .collect();
        TropMap::new(fan, m).unwrap()
    }

    #[test]
    fn apply_examples() {
        let t = flagship();
        assert_eq!(t.apply_ray(&PrimitiveRay::new(1, 0).unwrap()).v(), &lv(1, 2));
        assert_eq!(t.apply(&lv(1, 1)), lv(-1, 3));
        let id = TropMap::identity();
        assert_eq!(id.apply_ray(&PrimitiveRay::new(3, -7).unwrap()).v(), &lv(3, -7));
    }

    #[test]
    fn composition() {
        let t = flagship();
        let t2 = t.compose(&t).unwrap();
        assert_eq!(t2.as_linear().unwrap(), &IntegerMatrix::from_i64(1, -2, 2, 1).pow(2));
        assert_eq!(TropMap::identity().compose(&t).unwrap().as_linear(), t.as_linear());
        let c = double_cover();
        let cc = c.compose(&c).unwrap();
        assert_eq!(cc.abs_det(), &BigInt::from(1));
        assert_eq!(cc.covering_degree(), 4);
        for k in 0..360 {
            let th = TAU * (k as f64 + 0.37) / 360.0;
            let v = lv((1000.0 * th.cos()).round() as i64, (1000.0 * th.sin()).round() as i64);
            assert_eq!(cc.apply(&v), c.apply(&c.apply(&v)));
        }
    }

    #[test]
    fn covering() {
        assert!(flagship().is_homeomorphism());
        let refl = TropMap::linear(IntegerMatrix::from_i64(0, 1, 1, 0)).unwrap();
        assert!(refl.is_homeomorphism());
        assert_eq!(refl.covering_degree(), 1);
        let c = double_cover();
        assert_eq!(c.covering_degree(), 2);
        assert!(!c.is_homeomorphism());
        assert_eq!(c.dtop(), BigInt::from(2));
    }

    #[test]
    fn rotation_classes() {
        use RotationClass::*;
        assert_eq!(rotation_is_rational_linear(&IntegerMatrix::from_i64(0, -1, 1, 0)).unwrap(), Rational { p: 1, q: 4 });
        assert_eq!(rotation_is_rational_linear(&IntegerMatrix::from_i64(1, -1, 1, 0)).unwrap(), Rational { p: 1, q: 6 });
        assert_eq!(rotation_is_rational_linear(&IntegerMatrix::from_i64(1, -2, 2, 1)).unwrap(), IrrationalCertified);
        assert_eq!(
            rotation_is_rational_linear(&IntegerMatrix::from_i64(2, 1, 1, 1)).unwrap(),
            RealEigenvalues { rotation: Some((0, 1)) }
        );
        assert_eq!(
            rotation_is_rational_linear(&IntegerMatrix::from_i64(-2, 0, 0, -2)).unwrap(),
            RealEigenvalues { rotation: Some((1, 2)) }
        );
        let (est, err) = flagship().rotation_number(10_000).unwrap();
        assert!((est - 2f64.atan2(1.0) / TAU).abs() <= err);
        assert!((est - 0.176208).abs() < 1e-4);
        let (q, e) = TropMap::linear(IntegerMatrix::from_i64(0, -1, 1, 0)).unwrap().rotation_number(1000).unwrap();
        assert!((q - 0.25).abs() <= e);
    }

    #[test]
    fn ramification_examples() {
        let tau = PrimitiveRay::new(1, 0).unwrap();
        assert_eq!(TropMap::identity().ramification(&tau), BigInt::from(1));
        let d = TropMap::linear(IntegerMatrix::from_i64(2, 0, 0, 1)).unwrap();
        assert_eq!(d.ramification(&tau), BigInt::from(2));
        assert_eq!(flagship().ramification(&tau), BigInt::from(1));
    }

    #[test]
    fn growth_exponent_flagship() {
        let t = flagship();
        let g = t.growth_exponent(50, &PrimitiveRay::new(1, 0).unwrap(), 2.3, Exec::Sequential).unwrap();
        assert!(g.max_deviation < 0.02);
        assert!(g.ram_decay[39] < 1e-3);
    }
}
