use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::lattice::{Fan, LatticeVector};
use crate::support::{LaurentPoly, NumericConvexFunction, PLFunction};

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct RonkinValue {
    pub value: f64,
    /// Grid points moved by half a step because they hit a zero of P.
    pub perturbed: usize,
}

/// Torus-fiber average of log|P| over Trop(x) = v, midpoint rule on an n×n grid.
pub fn ronkin(p: &LaurentPoly, v: [f64; 2], n: usize, exec: Exec) -> Result<RonkinValue> {
    if p.is_zero() {
        return Err(Error::Invalid("ronkin of the zero polynomial".into()));
    }
    if n < 16 {
        return Err(Error::Invalid("quadrature size must be at least 16".into()));
    }
    let h = std::f64::consts::TAU / n as f64;
    let rows = exec.map_range(n, |i| {
        let t1 = (i as f64 + 0.5) * h;
        let mut sum = 0.0;
        let mut bad = 0usize;
        for j in 0..n {
            let t2 = (j as f64 + 0.5) * h;
            let mut val = p.log_abs_on_fiber(v, [t1, t2]);
            if !val.is_finite() {
                bad += 1;
                val = p.log_abs_on_fiber(v, [t1 + h / 2.0, t2 + h / 2.0]);
            }
            sum += val;
        }
        (sum, bad)
    });
    let total: f64 = rows.iter().map(|r| r.0).sum();
    let perturbed = rows.iter().map(|r| r.1).sum();
    Ok(RonkinValue { value: total / (n * n) as f64, perturbed })
}

/// The Ronkin function of P as a numeric convex function.
pub fn ronkin_function(p: &LaurentPoly, n: usize) -> NumericConvexFunction {
    let q = p.clone();
    NumericConvexFunction::new(format!("ronkin({p})"), move |v| {
        ronkin(&q, v, n, Exec::Sequential).map(|r| r.value).unwrap_or(f64::NAN)
    })
}

/// Vertices of the Newton polygon in ccw order (a segment or point when degenerate).
pub fn newton_polygon(p: &LaurentPoly) -> Vec<(i64, i64)> {
    convex_hull(&p.exponents())
}

pub(crate) fn convex_hull(pts: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut pts: Vec<(i64, i64)> = pts.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let cross = |o: (i64, i64), a: (i64, i64), b: (i64, i64)| {
        (a.0 - o.0) as i128 * (b.1 - o.1) as i128 - (a.1 - o.1) as i128 * (b.0 - o.0) as i128
    };
    let mut lower: Vec<(i64, i64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(i64, i64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Edges of a ccw polygon as (inner normal primitive, lattice length).
pub(crate) fn polygon_edges(hull: &[(i64, i64)]) -> Vec<(LatticeVector, i64)> {
    let n = hull.len();
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let count = if n == 2 { 2 } else { n };
    for i in 0..count {
        let p = hull[i % n];
        let q = hull[(i + 1) % n];
        let e = (q.0 - p.0, q.1 - p.1);
        let g = num_integer::gcd(e.0, e.1);
        out.push((LatticeVector::new(-e.1 / g, e.0 / g), g));
    }
    out
}

/// ψ̄(v) = max over the support of ⟨m, −v⟩, as exact PL data on the smooth
/// resolution of the normal fan (P² rays always included).
pub fn newton_support(p: &LaurentPoly) -> Result<PLFunction<BigRational>> {
    if p.is_zero() {
        return Err(Error::Invalid("newton_support of the zero polynomial".into()));
    }
    let hull = newton_polygon(p);
    let mut rays: Vec<LatticeVector> = polygon_edges(&hull).into_iter().map(|(v, _)| v).collect();
    rays.extend(Fan::p2_rays().iter().map(|r| r.v().clone()));
    let fan = Fan::from_rays(&rays)?.smooth_resolution();
    let values = fan
        .rays()
        .iter()
        .map(|r| {
            let v = r.v();
            let best = hull
                .iter()
                .map(|&(a, b)| -(&v.a * a) - &v.b * b)
                .max()
                .expect("nonempty support");
            BigRational::from_integer(best)
        })
        .collect();
    PLFunction::new(fan, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use crate::support::homogenize;

    #[test]
    fn ronkin_of_monomial_is_linear() {
        let p = LaurentPoly::parse("x1").unwrap();
        for v in [[0.3, -1.2], [5.0, 2.0]] {
            let r = ronkin(&p, v, 16, Exec::Sequential).unwrap();
            assert!((r.value + v[0]).abs() < 1e-12);
            assert_eq!(r.perturbed, 0);
        }
    }

    #[test]
    fn ronkin_of_line_is_convex_at_origin() {
        let p = LaurentPoly::parse("1 + x1 + x2").unwrap();
        let at = |v| ronkin(&p, v, 64, Exec::Sequential).unwrap().value;
        let c = at([0.0, 0.0]);
        assert!(c > 0.0);
        assert!(c <= (at([1.0, 0.0]) + at([-1.0, 0.0])) / 2.0);
    }

    #[test]
    fn zero_on_grid_is_perturbed() {
        // 1 + x1 vanishes at theta1 = pi, which is a grid node for odd n
        let p = LaurentPoly::parse("1 + x1").unwrap();
        let r = ronkin(&p, [0.0, 0.0], 17, Exec::Sequential).unwrap();
        assert!(r.perturbed > 0 && r.value.is_finite());
    }

    #[test]
    fn newton_examples() {
        let line = newton_support(&LaurentPoly::parse("1 + x1 + x2").unwrap()).unwrap();
        assert_eq!(line.p2_values(), [rat(0, 1), rat(0, 1), rat(1, 1)]);
        assert_eq!(line.eval(&LatticeVector::new(-3, 1)), rat(3, 1));
        let mono = newton_support(&LaurentPoly::parse("x1^2*x2^-1").unwrap()).unwrap();
        assert!(mono.is_linear());
        let sq = newton_support(&LaurentPoly::parse("1 + x1 + x2 + x1*x2").unwrap()).unwrap();
        let kinks = sq.kink_fan();
        assert_eq!(kinks, Fan::p1xp1());
    }

    #[test]
    fn ronkin_homogenizes_to_newton() {
        let p = LaurentPoly::parse("1 + x1 + x2").unwrap();
        let h = homogenize(&ronkin_function(&p, 64), 1e-9, 64).unwrap();
        let ns = newton_support(&p).unwrap();
        for k in 0..16 {
            let t = std::f64::consts::TAU * k as f64 / 16.0;
            let u = [t.cos(), t.sin()];
            assert!((h.eval(u) - ns.eval_f64(u)).abs() < 1e-3);
        }
    }
}
