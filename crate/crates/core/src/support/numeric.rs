use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exec::{fmax, Exec};
use crate::lattice::Fan;
use crate::support::PLFunction;

type Eval = dyn Fn([f64; 2]) -> f64 + Send + Sync;

/// Caller-supplied convex function on the plane. Stateless, so safe to share.
#[derive(Clone)]
pub struct NumericConvexFunction {
    name: String,
    f: Arc<Eval>,
}

impl fmt::Debug for NumericConvexFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NumericConvexFunction({})", self.name)
    }
}

impl NumericConvexFunction {
    pub fn new(name: impl Into<String>, f: impl Fn([f64; 2]) -> f64 + Send + Sync + 'static) -> Self {
        NumericConvexFunction { name: name.into(), f: Arc::new(f) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, v: [f64; 2]) -> f64 {
        (self.f)(v)
    }

    pub fn euclidean_norm() -> Self {
        Self::new("norm", |v| v[0].hypot(v[1]))
    }

    /// √(1+‖v‖²).
    pub fn sqrt_one_plus_norm2() -> Self {
        Self::new("sqrt(1+|v|^2)", |v| (1.0 + v[0] * v[0] + v[1] * v[1]).sqrt())
    }

    /// log(1 + e^{−v₁} + e^{−v₂}), evaluated without overflow.
    pub fn log_one_plus_exp() -> Self {
        Self::new("log(1+e^-v1+e^-v2)", |v| {
            let xs = [0.0, -v[0], -v[1]];
            let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
        })
    }

    pub fn from_pl(psi: PLFunction<f64>) -> Self {
        Self::new("pl", move |v| psi.eval_f64(v))
    }

    /// Spot-check of the midpoint inequality on deterministic triples.
    pub fn spot_check_convexity(&self, samples: usize, tol: f64) -> bool {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
        (0..samples).all(|_| {
            let a = [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
            let b = [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
            let m = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
            self.eval(m) <= (self.eval(a) + self.eval(b)) / 2.0 + tol
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct Growth {
    pub value: f64,
    pub infinite: bool,
}

fn unit(k: usize, n: usize) -> [f64; 2] {
    let t = std::f64::consts::TAU * k as f64 / n as f64;
    [t.cos(), t.sin()]
}

/// sup over a sampled circle of (ψ(Rv) − ψ(0))/R, flagged infinite when it
/// keeps growing between the last two radii.
pub fn growth_numeric(psi: &NumericConvexFunction, exec: Exec) -> Growth {
    let dirs = 360;
    let at = |r: f64| {
        let z = psi.eval([0.0, 0.0]);
        fmax(&exec.map_range(dirs, |k| {
            let u = unit(k, dirs);
            (psi.eval([r * u[0], r * u[1]]) - z) / r
        }))
    };
    let g1 = at(2f64.powi(19));
    let g2 = at(2f64.powi(20));
    let infinite = !g2.is_finite() || (g2 - g1) > 0.1 * g1.abs().max(1.0);
    Growth { value: if infinite { f64::INFINITY } else { g2 }, infinite }
}

fn limit_along(psi: &NumericConvexFunction, u: [f64; 2], tol: f64, budget: u32) -> std::result::Result<f64, (f64, f64)> {
    let z = psi.eval([0.0, 0.0]);
    let mut t = 1.0;
    let mut prev = psi.eval(u) - z;
    let mut before = prev;
    for _ in 0..budget {
        t *= 2.0;
        let cur = (psi.eval([t * u[0], t * u[1]]) - z) / t;
        if (cur - prev).abs() < tol {
            return Ok(cur);
        }
        before = prev;
        prev = cur;
    }
    Err((prev, before))
}

/// ψ̄(v) = lim ψ(tv)/t, estimated by doubling t. The result is exactly
/// homogeneous: it is evaluated on the unit circle and scaled.
pub fn homogenize(psi: &NumericConvexFunction, tol: f64, budget: u32) -> Result<NumericConvexFunction> {
    for k in 0..64 {
        if let Err((last, prev)) = limit_along(psi, unit(k, 64), tol, budget) {
            return Err(Error::NonConvergence { last, prev });
        }
    }
    let inner = psi.clone();
    Ok(NumericConvexFunction::new(format!("hom({})", psi.name()), move |v| {
        let r = v[0].hypot(v[1]);
        if r == 0.0 {
            return 0.0;
        }
        let u = [v[0] / r, v[1] / r];
        r * limit_along(&inner, u, tol, budget).unwrap_or_else(|(l, _)| l)
    }))
}

/// PL function agreeing with ψ̄ on the rays of the fan.
pub fn restrict_to_fan(psi_bar: &NumericConvexFunction, fan: &Fan) -> PLFunction<f64> {
    let values = fan.rays().iter().map(|r| psi_bar.eval(r.v().to_f64())).collect();
    PLFunction::new(fan.clone(), values).expect("one value per ray")
}

/// 1/cos(θ_max/2), θ_max the widest sector angle.
pub fn sandwich_constant(fan: &Fan) -> f64 {
    1.0 / (fan.max_sector_angle() / 2.0).cos()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn growth_examples() {
        let g = growth_numeric(&NumericConvexFunction::euclidean_norm(), Exec::Sequential);
        assert!(!g.infinite && (g.value - 1.0).abs() < 1e-9);
        let sq = NumericConvexFunction::new("v1^2", |v| v[0] * v[0]);
        assert!(growth_numeric(&sq, Exec::Sequential).infinite);
    }

    #[test]
    fn homogenize_examples() {
        let h = homogenize(&NumericConvexFunction::sqrt_one_plus_norm2(), 1e-9, 64).unwrap();
        for k in 0..16 {
            let u = unit(k, 16);
            assert!((h.eval([3.0 * u[0], 3.0 * u[1]]) - 3.0).abs() < 1e-8);
        }
        let l = homogenize(&NumericConvexFunction::log_one_plus_exp(), 1e-9, 64).unwrap();
        for k in 0..16 {
            let u = unit(k, 16);
            let want = 0f64.max(-u[0]).max(-u[1]);
            assert!((l.eval(u) - want).abs() < 1e-8);
        }
        let hh = homogenize(&h, 1e-9, 64).unwrap();
        for k in 0..16 {
            let u = unit(k, 16);
            assert!((hh.eval(u) - h.eval(u)).abs() < 1e-12);
        }
    }

    #[test]
    fn non_convergence_reports_estimates() {
        let sq = NumericConvexFunction::new("v1^2", |v| v[0] * v[0]);
        assert!(matches!(homogenize(&sq, 1e-9, 8), Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn restriction_examples() {
        let n = NumericConvexFunction::euclidean_norm();
        let r = restrict_to_fan(&n, &Fan::p2());
        assert!((r.values()[2] - 2f64.sqrt()).abs() < 1e-12);
        let q = restrict_to_fan(&n, &Fan::p1xp1());
        assert!(q.values().iter().all(|x| (x - 1.0).abs() < 1e-12));
        assert!((sandwich_constant(&Fan::p1xp1()) - 2f64.sqrt()).abs() < 1e-12);
    }
}
