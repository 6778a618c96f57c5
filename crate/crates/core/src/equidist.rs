//! Cesàro averages of support functions under monomial maps with complex
//! eigenvalues, the limit constant c*, and the decay of inhomogeneous
//! corrections.

use std::f64::consts::TAU;

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{fmax, Exec};
use crate::lattice::{IntegerMatrix, LatticeVector};
use crate::scalar::{int_to_f64, split_big};
use crate::support::{homogenize, NumericConvexFunction, PLFunction};
use crate::trop::{rotation_is_rational_linear, RotationClass};

/// Norm in which A acts as |ξ| times a rotation.
#[derive(Clone, Debug, Serialize)]
pub struct ANorm {
    #[serde(skip)]
    a: IntegerMatrix,
    /// Columns: real part and minus the imaginary part of an eigenvector for ξ.
    pub p: [[f64; 2]; 2],
    pinv: [[f64; 2]; 2],
    pub modulus: f64,
    /// arg ξ / 2π, in (0, 1/2).
    pub rotation: f64,
}

pub fn a_norm(a: &IntegerMatrix) -> Result<ANorm> {
    let t = int_to_f64(&a.trace());
    let d = int_to_f64(a.det());
    let disc = t * t - 4.0 * d;
    if disc >= 0.0 {
        return Err(Error::NoRotationNorm);
    }
    let (re, im) = (t / 2.0, (-disc).sqrt() / 2.0);
    let m = a.to_f64();
    // (A − ξ)v = 0 with v = (a₁₂, ξ − a₁₁); a₁₂ ≠ 0 when the eigenvalues are not real
    let u = [m[0][1], re - m[0][0]];
    let w = [0.0, im];
    let p = [[u[0], -w[0]], [u[1], -w[1]]];
    let det = p[0][0] * p[1][1] - p[0][1] * p[1][0];
    let pinv = [[p[1][1] / det, -p[0][1] / det], [-p[1][0] / det, p[0][0] / det]];
    let modulus = d.sqrt();
    let rotation = im.atan2(re) / TAU;
    Ok(ANorm { a: a.clone(), p, pinv, modulus, rotation })
}

impl ANorm {
    pub fn matrix(&self) -> &IntegerMatrix {
        &self.a
    }

    pub fn eval(&self, v: [f64; 2]) -> f64 {
        let x = self.pinv[0][0] * v[0] + self.pinv[0][1] * v[1];
        let y = self.pinv[1][0] * v[0] + self.pinv[1][1] * v[1];
        x.hypot(y)
    }

    /// P·(cos θ, sin θ): the unit circle of the norm.
    pub fn unit_point(&self, theta: f64) -> [f64; 2] {
        let (s, c) = theta.sin_cos();
        [self.p[0][0] * c + self.p[0][1] * s, self.p[1][0] * c + self.p[1][1] * s]
    }

    /// max over `n` directions of |‖Av‖_A − |ξ|·‖v‖_A| / ‖v‖_A.
    pub fn invariance_defect(&self, n: usize) -> f64 {
        let m = self.a.to_f64();
        (0..n)
            .map(|k| {
                let t = TAU * k as f64 / n as f64;
                let v = [t.cos(), t.sin()];
                let av = [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]];
                (self.eval(av) - self.modulus * self.eval(v)).abs() / self.eval(v)
            })
            .fold(0.0, f64::max)
    }

    pub fn as_function(&self) -> NumericConvexFunction {
        let me = self.clone();
        NumericConvexFunction::new("a_norm", move |v| me.eval(v))
    }
}

/// w / |ξ|ʲ in floating point, for an exact integer vector w.
fn scaled(w: &LatticeVector, j: usize, log2_mod: f64) -> [f64; 2] {
    let conv = |x: &BigInt| {
        let (m, e) = split_big(x);
        m * 2f64.powf(e as f64 - j as f64 * log2_mod)
    };
    [conv(&w.a), conv(&w.b)]
}

/// Integer direction approximating `u` to 2⁻⁴⁰ relative precision.
const DIRECTION_SCALE: f64 = 1_099_511_627_776.0;

fn integer_direction(u: [f64; 2]) -> LatticeVector {
    LatticeVector::new(
        BigInt::from((u[0] * DIRECTION_SCALE).round() as i64),
        BigInt::from((u[1] * DIRECTION_SCALE).round() as i64),
    )
}

/// Running averages S_n(v) at the requested n (sorted ascending), for an
/// integer vector v.
fn running_averages(psi: &dyn Fn([f64; 2]) -> f64, norm: &ANorm, v: &LatticeVector, grid: &[usize]) -> Vec<f64> {
    let log2_mod = norm.modulus.log2();
    let mut w = v.clone();
    let mut sum = 0.0;
    let mut out = Vec::with_capacity(grid.len());
    let mut gi = 0;
    let last = grid.last().copied().unwrap_or(0);
    for j in 0..last {
        sum += psi(scaled(&w, j, log2_mod));
        while gi < grid.len() && grid[gi] == j + 1 {
            out.push(sum / (j + 1) as f64);
            gi += 1;
        }
        w = norm.a.apply(&w);
    }
    out
}

/// S_n(v) = (1/n) Σ_{j<n} ψ(Aʲv)/|ξ|ʲ with Aʲv computed exactly.
pub fn cesaro_average(psi: &PLFunction<f64>, a: &IntegerMatrix, v: &LatticeVector, n: usize) -> Result<f64> {
    let norm = a_norm(a)?;
    let f = |x: [f64; 2]| psi.eval_f64(x);
    Ok(running_averages(&f, &norm, v, &[n])[0])
}

/// (1/2π)∫ψ(P(cos θ, sin θ))dθ by the midpoint rule.
pub fn cstar(psi: &PLFunction<f64>, a: &IntegerMatrix, quad_n: usize, exec: Exec) -> Result<f64> {
    let norm = a_norm(a)?;
    Ok(cstar_with(&|x| psi.eval_f64(x), &norm, quad_n, exec))
}

fn cstar_with(psi: &(dyn Fn([f64; 2]) -> f64 + Sync), norm: &ANorm, quad_n: usize, exec: Exec) -> f64 {
    let vals = exec.map_range(quad_n, |k| psi(norm.unit_point(TAU * (k as f64 + 0.5) / quad_n as f64)));
    vals.iter().sum::<f64>() / quad_n as f64
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub cstar: f64,
    pub directions: usize,
    pub rows: Vec<(usize, f64)>,
    /// Trailing mean of `window` consecutive e_n.
    pub smoothed: Vec<f64>,
    pub window: usize,
    pub decreasing: bool,
    /// Least-squares slope of log e_n against log n.
    pub log_log_slope: f64,
    pub final_error: f64,
}

/// e_n = max over directions of |S_n(v) − c*·‖v‖_A| on the unit circle.
pub fn convergence_report(psi: &PLFunction<f64>, a: &IntegerMatrix, directions: usize, n_grid: &[usize], exec: Exec) -> Result<ConvergenceReport> {
    let norm = a_norm(a)?;
    let f = |x: [f64; 2]| psi.eval_f64(x);
    let c = cstar_with(&f, &norm, 1 << 15, exec);
    let mut grid = n_grid.to_vec();
    grid.sort_unstable();
    grid.dedup();
    let per_dir: Vec<Vec<f64>> = exec.map_range(directions, |k| {
        let t = TAU * k as f64 / directions as f64;
        let u = [t.cos(), t.sin()];
        let v = integer_direction(u);
        let target = c * norm.eval(u);
        running_averages(&f, &norm, &v, &grid).into_iter().map(|s| (s / DIRECTION_SCALE - target).abs()).collect()
    });
    let errors: Vec<f64> = (0..grid.len()).map(|i| fmax(&per_dir.iter().map(|r| r[i]).collect::<Vec<_>>())).collect();
    Ok(summarize(c, directions, &grid, errors))
}

fn summarize(c: f64, directions: usize, grid: &[usize], errors: Vec<f64>) -> ConvergenceReport {
    let window = 10;
    let smoothed: Vec<f64> = if errors.len() >= window {
        errors.windows(window).map(|w| w.iter().sum::<f64>() / window as f64).collect()
    } else {
        Vec::new()
    };
    let decreasing = !smoothed.is_empty() && smoothed.windows(2).all(|w| w[1] <= w[0]);
    let pts: Vec<(f64, f64)> =
        grid.iter().zip(&errors).filter(|(_, &e)| e > 0.0).map(|(&n, &e)| ((n as f64).ln(), e.ln())).collect();
    let log_log_slope = if pts.len() >= 2 {
        let m = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
        let (mx, my) = (sx / m, sy / m);
        let num: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let den: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        num / den
    } else {
        0.0
    };
    let final_error = errors.last().copied().unwrap_or(0.0);
    ConvergenceReport {
        cstar: c,
        directions,
        rows: grid.iter().copied().zip(errors).collect(),
        smoothed,
        window,
        decreasing,
        log_log_slope,
        final_error,
    }
}

/// Log-spaced grid of `count` distinct integers from 1 to n.
pub fn log_grid(n: usize, count: usize) -> Vec<usize> {
    let mut g: Vec<usize> = (0..count)
        .map(|k| ((n as f64).ln() * k as f64 / (count - 1).max(1) as f64).exp().round() as usize)
        .map(|x| x.clamp(1, n))
        .collect();
    g.dedup();
    g
}

#[derive(Clone, Debug, Serialize)]
pub struct NegativeControl {
    pub period: u64,
    /// max over directions of |orbit average − c*·‖v‖_A|: the n → ∞ limit of e_n along multiples of the period.
    pub limit_gap: f64,
    pub fails_convergence: bool,
}

/// For A with rational rotation p/q, S_{kq}(v) equals the exact average over
/// one orbit of q points; compares it with the circle average.
pub fn rational_rotation_control(psi: &PLFunction<f64>, a: &IntegerMatrix, directions: usize, tol: f64) -> Result<NegativeControl> {
    let norm = a_norm(a)?;
    let q = match rotation_is_rational_linear(a)? {
        RotationClass::Rational { q, .. } => q,
        _ => return Err(Error::Invalid("rotation is not rational".into())),
    };
    let f = |x: [f64; 2]| psi.eval_f64(x);
    let c = cstar_with(&f, &norm, 1 << 15, Exec::Sequential);
    let gap = (0..directions)
        .map(|k| {
            let t = TAU * k as f64 / directions as f64;
            let u = [t.cos(), t.sin()];
            let s = running_averages(&f, &norm, &integer_direction(u), &[q as usize])[0] / DIRECTION_SCALE;
            (s - c * norm.eval(u)).abs()
        })
        .fold(0.0, f64::max);
    Ok(NegativeControl { period: q, limit_gap: gap, fails_convergence: gap > tol })
}

/// Terms (ψ − ψ̄)(Aⁿv)/|ξ|ⁿ for n = 0..=n_max, with ψ̄ the homogenization of ψ.
pub fn symcase_check(psi: &NumericConvexFunction, a: &IntegerMatrix, v: &LatticeVector, n_max: usize) -> Result<Vec<f64>> {
    let bar = homogenize(psi, 1e-12, 80)?;
    symcase_with(psi, &bar, a, v, n_max)
}

/// As `symcase_check` with an explicit ψ̄.
pub fn symcase_with(psi: &NumericConvexFunction, bar: &NumericConvexFunction, a: &IntegerMatrix, v: &LatticeVector, n_max: usize) -> Result<Vec<f64>> {
    let norm = a_norm(a)?;
    let mut w = v.clone();
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let x = [int_to_f64(&w.a), int_to_f64(&w.b)];
        out.push((psi.eval(x) - bar.eval(x)) / norm.modulus.powi(n as i32));
        w = norm.a.apply(&w);
    }
    Ok(out)
}
