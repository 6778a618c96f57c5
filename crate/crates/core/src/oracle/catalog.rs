//! Topological degree, contracted curves and indeterminacy points of a PolyMap.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::gcd::{gcd_many, udiv_exact, ugcd, upp, UPoly};
use super::poly::{trim, Poly};
use super::{det3, modp, primitive_point, PolyMap};
use crate::error::{Error, Result};
use crate::scalar::int_to_f64;

/// Number of preimages of a generic point, by resultants modulo a prime.
pub fn topological_degree(f: &PolyMap) -> Result<u64> {
    let mut best = None;
    for &p in &modp::LINE_PRIMES {
        let d = fiber_count(f, p, 0x6474_6f70 ^ p)?;
        best = Some(best.map_or(d, |b: u64| b.max(d)));
    }
    Ok(best.unwrap())
}

fn fiber_count(f: &PolyMap, p: u64, seed: u64) -> Result<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = f.degree() as usize;
    let comps = f.components();
    for _attempt in 0..8 {
        let m: [[u64; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(1..p)));
        let q: [[u64; 3]; 2] = std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(1..p)));
        let src = |x: u64, y: u64| -> [u64; 3] {
            std::array::from_fn(|i| (m[i][0] + m[i][1] * x % p + m[i][2] * y % p) % p)
        };
        let xs: Vec<u64> = (0..=d as u64).collect();
        let ys: Vec<u64> = (0..=(d * d) as u64).collect();
        let mut res = [Vec::new(), Vec::new()];
        let mut degenerate = false;
        for (k, qk) in q.iter().enumerate() {
            let mut vals = Vec::with_capacity(ys.len());
            for &y in &ys {
                let mut e1 = Vec::with_capacity(xs.len());
                let mut e2 = Vec::with_capacity(xs.len());
                for &x in &xs {
                    let pt = src(x, y);
                    let v: Vec<u64> = comps.iter().map(|c| c.eval_mod(&pt, p)).collect();
                    e1.push((qk[1] * v[0] % p + p - qk[0] * v[1] % p) % p);
                    e2.push((qk[2] * v[0] % p + p - qk[0] * v[2] % p) % p);
                }
                let a = modp::interpolate(&xs, &e1, p);
                let b = modp::interpolate(&xs, &e2, p);
                if a.len() != d + 1 || b.len() != d + 1 {
                    degenerate = true;
                    break;
                }
                vals.push(modp::resultant(&a, &b, p));
            }
            if degenerate {
                break;
            }
            res[k] = modp::interpolate(&ys, &vals, p);
        }
        if degenerate {
            continue;
        }
        if res[0].is_empty() || res[1].is_empty() {
            return Err(Error::Invalid("map is not dominant".into()));
        }
        let g = modp::gcd(&res[0], &res[1], p);
        return Ok((res[0].len() - g.len()) as u64);
    }
    Err(Error::Internal("no generic coordinates found".into()))
}

/// A point of P², exact when rational.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlgPoint {
    Rational {
        #[serde(serialize_with = "ser_point")]
        coords: [BigInt; 3],
    },
    /// One root of `min_poly` in the coordinate named by `variable`, with a
    /// floating approximation of the whole point.
    Algebraic { variable: String, min_poly: Vec<String>, approx: [(f64, f64); 3] },
}

fn ser_point<S: serde::Serializer>(p: &[BigInt; 3], s: S) -> std::result::Result<S::Ok, S::Error> {
    let v: Vec<String> = p.iter().map(|c| c.to_string()).collect();
    v.serialize(s)
}

impl AlgPoint {
    pub fn rational(&self) -> Option<&[BigInt; 3]> {
        match self {
            AlgPoint::Rational { coords } => Some(coords),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IndLocation {
    TorusFixed,
    /// On {X_i = 0}, away from the torus-fixed points.
    CoordinateLine(usize),
    Torus,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleInd {
    pub point: AlgPoint,
    pub location: IndLocation,
}

/// Curves contracted to one point; components with the same image are grouped.
#[derive(Clone, Debug, Serialize)]
pub struct Contracted {
    #[serde(serialize_with = "ser_poly")]
    pub factor: Poly,
    #[serde(serialize_with = "ser_opt_point")]
    pub image: Option<[BigInt; 3]>,
}

fn ser_poly<S: serde::Serializer>(p: &Poly, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

fn ser_opt_point<S: serde::Serializer>(p: &Option<[BigInt; 3]>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let v: Option<Vec<String>> = p.as_ref().map(|p| p.iter().map(|c| c.to_string()).collect());
    v.serialize(s)
}

fn grad(p: &Poly) -> [Poly; 3] {
    [p.derivative(0), p.derivative(1), p.derivative(2)]
}

fn squarefree(p: &Poly) -> Result<Poly> {
    let [a, b, c] = grad(p);
    let g = gcd_many(&[p.clone(), a, b, c])?;
    p.divide_exact(&g).map(|q| q.primitive_part()).ok_or_else(|| Error::Internal("squarefree division".into()))
}

/// Complex roots of a polynomial given by coefficients (constant first).
pub(crate) fn complex_roots(c: &[Complex64]) -> Vec<Complex64> {
    let mut c = c.to_vec();
    while c.last().is_some_and(|z| z.norm() == 0.0) {
        c.pop();
    }
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = c[n];
    let m = DMatrix::<Complex64>::from_fn(n, n, |i, j| {
        if j == n - 1 {
            -c[i] / lead
        } else if i == j + 1 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let mut roots: Vec<Complex64> = match m.clone().try_schur(1e-14, 10_000) {
        Some(s) => s.eigenvalues().map(|v| v.iter().copied().collect()).unwrap_or_default(),
        None => Vec::new(),
    };
    // Newton polish
    let eval = |z: Complex64| {
        let mut v = Complex64::new(0.0, 0.0);
        let mut dv = Complex64::new(0.0, 0.0);
        for &a in c.iter().rev() {
            dv = dv * z + v;
            v = v * z + a;
        }
        (v, dv)
    };
    for r in roots.iter_mut() {
        for _ in 0..4 {
            let (v, dv) = eval(*r);
            if dv.norm() == 0.0 {
                break;
            }
            *r -= v / dv;
        }
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    roots
}

fn big_c(c: &[BigInt]) -> Vec<Complex64> {
    c.iter().map(|x| Complex64::new(int_to_f64(x), 0.0)).collect()
}

fn eval_q(c: &[BigInt], x: &BigRational) -> BigRational {
    c.iter().rev().fold(BigRational::zero(), |acc, a| acc * x + BigRational::from_integer(a.clone()))
}

/// Continued-fraction approximation with denominator at most 10⁶, accepted
/// when within 1e-9 (relative) of x.
fn approx_rational(x: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    if x.abs() < 1e-9 {
        return Some(BigRational::zero());
    }
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut r = x;
    for _ in 0..40 {
        let a = r.floor();
        let ai = BigInt::from(a as i64);
        let h2 = &ai * &h1 + &h0;
        let k2 = &ai * &k1 + &k0;
        if k2 > BigInt::from(1_000_000) {
            return None;
        }
        let q = BigRational::new(h2.clone(), k2.clone());
        if (q.to_f64()? - x).abs() <= 1e-9 * x.abs().max(1.0) {
            return Some(q);
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a;
        if frac.abs() < 1e-15 {
            return None;
        }
        r = 1.0 / frac;
    }
    None
}

/// Nearby rational value with small denominator that is an exact root.
fn rational_root(z: Complex64, c: &[BigInt]) -> Option<BigRational> {
    if z.im.abs() > 1e-6 * z.norm().max(1.0) {
        return None;
    }
    let q = approx_rational(z.re)?;
    eval_q(c, &q).is_zero().then_some(q)
}

fn rational_value(x: f64) -> Option<BigRational> {
    approx_rational(x)
}

fn normalize_c(v: [Complex64; 3]) -> Option<[Complex64; 3]> {
    let k = (0..3).max_by(|&a, &b| v[a].norm().total_cmp(&v[b].norm()))?;
    if v[k].norm() < 1e-300 {
        return None;
    }
    let s = v[k];
    Some([v[0] / s, v[1] / s, v[2] / s])
}

/// Components of the Jacobian curve that the map contracts, grouped by image.
pub fn contracted_curves(f: &PolyMap) -> Result<Vec<Contracted>> {
    let jac = f.jacobian();
    if jac.is_zero() {
        return Err(Error::Invalid("map is not dominant".into()));
    }
    let c = squarefree(&jac)?;
    if c.degree() == 0 {
        return Ok(Vec::new());
    }
    let fc = f.components();
    let gc = grad(&c);
    let x = [Poly::var(0), Poly::var(1), Poly::var(2)];
    let tangent: Vec<Poly> = fc.iter().map(|fi| det3(&[grad(fi), x.clone(), gc.clone()])).collect();
    let w = |i: usize, j: usize| fc[j].mul(&tangent[i]).sub(&fc[i].mul(&tangent[j]));
    let k = gcd_many(&[c.clone(), w(0, 1), w(0, 2), w(1, 2)])?.primitive_part();
    if k.degree() == 0 {
        return Ok(Vec::new());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x65_7863);
    for _ in 0..16 {
        let pa: [i64; 3] = std::array::from_fn(|_| rng.gen_range(-9..=9));
        let pb: [i64; 3] = std::array::from_fn(|_| rng.gen_range(-9..=9));
        let line: [Poly; 3] =
            std::array::from_fn(|i| Poly::from_terms(&[(pa[i], [1, 0, 0]), (pb[i], [0, 1, 0])]));
        let kt = k.substitute(&line).dehomogenize().as_x_of_y();
        let coeffs: Vec<BigInt> = kt.iter().map(|row| row.first().cloned().unwrap_or_default()).collect();
        if coeffs.len() != k.degree() as usize + 1 || coeffs.last().is_some_and(|c| c.is_zero()) {
            continue;
        }
        let roots = complex_roots(&big_c(&coeffs));
        let clustered = roots.iter().enumerate().any(|(i, a)| {
            roots[i + 1..].iter().any(|b| (a - b).norm() < 1e-5 * a.norm().max(1.0))
        });
        if clustered {
            continue;
        }
        let mut groups: Vec<([Complex64; 3], usize)> = Vec::new();
        let mut bad = false;
        for t in roots {
            let pt: [Complex64; 3] = std::array::from_fn(|i| Complex64::new(pa[i] as f64, 0.0) + t * pb[i] as f64);
            let Some(img) = normalize_c(f.eval_c64(&pt)) else {
                bad = true;
                break;
            };
            match groups.iter_mut().find(|(g, _)| (0..3).all(|i| (g[i] - img[i]).norm() < 1e-6)) {
                Some(g) => g.1 += 1,
                None => groups.push((img, 1)),
            }
        }
        if bad {
            continue;
        }
        let mut out = Vec::new();
        let mut rest = k.clone();
        for (img, count) in groups {
            if img.iter().any(|z| z.im.abs() > 1e-7) {
                continue;
            }
            let Some(q) = img.iter().map(|z| rational_value(z.re)).collect::<Option<Vec<_>>>() else {
                continue;
            };
            let q = primitive_point(&[q[0].clone(), q[1].clone(), q[2].clone()]);
            let qp = |i: usize| Poly::constant(q[i].clone());
            let m = |i: usize, j: usize| qp(j).mul(&fc[i]).sub(&qp(i).mul(&fc[j]));
            let h = gcd_many(&[k.clone(), m(0, 1), m(0, 2), m(1, 2)])?.primitive_part();
            if h.degree() as usize != count {
                continue;
            }
            rest = rest.divide_exact(&h).ok_or_else(|| Error::Internal("contracted factor".into()))?;
            out.push(Contracted { factor: h, image: Some(q) });
        }
        if rest.degree() > 0 {
            out.push(Contracted { factor: rest.primitive_part(), image: None });
        }
        out.sort_by_key(|c| c.factor.to_string());
        return Ok(out);
    }
    Err(Error::Internal("no generic line for the contracted locus".into()))
}

/// Univariate coefficients of a binary form in variables (a, b): index = power of b.
fn binary_coeffs(p: &Poly, b: usize) -> UPoly {
    let mut out = vec![BigInt::zero(); p.degree() as usize + 1];
    for (e, c) in p.terms() {
        out[e[b] as usize] += c;
    }
    trim(&mut out);
    out
}

fn roots_as_points(
    c: &UPoly,
    variable: &str,
    make: impl Fn(Complex64) -> [Complex64; 3],
    exact: impl Fn(&BigRational) -> [BigRational; 3],
    location: IndLocation,
) -> Vec<OracleInd> {
    let mut out = Vec::new();
    let mut rest = upp(c);
    for z in complex_roots(&big_c(c)) {
        if let Some(r) = rational_root(z, &rest) {
            let lin = vec![-r.numer() * BigInt::one(), r.denom().clone()];
            if let Some(q) = udiv_exact(&rest, &upp(&lin)) {
                rest = q;
                out.push(OracleInd { point: AlgPoint::Rational { coords: primitive_point(&exact(&r)) }, location });
                continue;
            }
        }
    }
    if rest.len() > 1 {
        for z in complex_roots(&big_c(&rest)) {
            let v = make(z);
            out.push(OracleInd {
                point: AlgPoint::Algebraic {
                    variable: variable.to_string(),
                    min_poly: rest.iter().map(|c| c.to_string()).collect(),
                    approx: std::array::from_fn(|i| (v[i].re, v[i].im)),
                },
                location,
            });
        }
    }
    out
}

/// Common zeros of the three components: torus-fixed points, points on the
/// coordinate lines, and points of the torus.
pub fn indeterminacy_points(f: &PolyMap) -> Result<Vec<OracleInd>> {
    let fc = f.components();
    let mut out = Vec::new();
    for i in 0..3 {
        let mut e = [BigInt::zero(), BigInt::zero(), BigInt::zero()];
        e[i] = BigInt::one();
        if f.eval(&e).iter().all(|v| v.is_zero()) {
            out.push(OracleInd { point: AlgPoint::Rational { coords: e }, location: IndLocation::TorusFixed });
        }
    }
    for i in 0..3 {
        let (a, b) = ((i + 1) % 3, (i + 2) % 3);
        let restricted: Vec<Poly> = fc
            .iter()
            .map(|p| {
                let mut s = [Poly::var(0), Poly::var(1), Poly::var(2)];
                s[i] = Poly::zero();
                p.substitute(&s)
            })
            .collect();
        let g = gcd_many(&restricted)?;
        if g.is_zero() || g.degree() == 0 {
            continue;
        }
        let (_, g) = g.strip_monomial();
        if g.degree() == 0 {
            continue;
        }
        let coeffs = binary_coeffs(&g, b);
        let var = format!("X{b}/X{a}");
        let make = |z: Complex64| {
            let mut v = [Complex64::new(0.0, 0.0); 3];
            v[a] = Complex64::new(1.0, 0.0);
            v[b] = z;
            v
        };
        let exact = |r: &BigRational| {
            let mut v = [BigRational::zero(), BigRational::zero(), BigRational::zero()];
            v[a] = BigRational::one();
            v[b] = r.clone();
            v
        };
        out.extend(roots_as_points(&coeffs, &var, make, exact, IndLocation::CoordinateLine(i)));
    }
    out.extend(torus_ind(f)?);
    Ok(out)
}

/// Bareiss fraction-free determinant.
fn det_bareiss(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

fn sylvester(a: &[BigInt], b: &[BigInt]) -> Vec<Vec<BigInt>> {
    let (da, db) = (a.len() - 1, b.len() - 1);
    let n = da + db;
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for r in 0..db {
        for (k, c) in a.iter().rev().enumerate() {
            m[r][r + k] = c.clone();
        }
    }
    for r in 0..da {
        for (k, c) in b.iter().rev().enumerate() {
            m[db + r][r + k] = c.clone();
        }
    }
    m
}

/// Res_x(A, B) ∈ Z[y] for dehomogenized A, B, with formal x-degrees.
fn resultant_x(a: &Poly, b: &Poly, ybound: usize) -> UPoly {
    let ra = a.as_x_of_y();
    let rb = b.as_x_of_y();
    let at = |rows: &[Vec<BigInt>], y: &BigInt| -> Vec<BigInt> {
        rows.iter().map(|r| r.iter().rev().fold(BigInt::zero(), |acc, c| acc * y + c)).collect()
    };
    let ys: Vec<BigInt> = (1..=ybound as i64 + 1).map(BigInt::from).collect();
    let vals: Vec<BigInt> = ys.iter().map(|y| det_bareiss(sylvester(&at(&ra, y), &at(&rb, y)))).collect();
    lagrange_z(&ys, &vals)
}

fn lagrange_z(xs: &[BigInt], ys: &[BigInt]) -> UPoly {
    let n = xs.len();
    let mut acc = vec![BigRational::zero(); n];
    for i in 0..n {
        if ys[i].is_zero() {
            continue;
        }
        let mut basis = vec![BigRational::one()];
        let mut den = BigRational::one();
        for j in 0..n {
            if j == i {
                continue;
            }
            let mut next = vec![BigRational::zero(); basis.len() + 1];
            for (k, c) in basis.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * BigRational::from_integer(xs[j].clone());
            }
            basis = next;
            den *= BigRational::from_integer(&xs[i] - &xs[j]);
        }
        let s = BigRational::from_integer(ys[i].clone()) / den;
        for (k, c) in basis.iter().enumerate() {
            acc[k] += c * &s;
        }
    }
    let mut out: Vec<BigInt> = acc.into_iter().map(|c| c.to_integer()).collect();
    trim(&mut out);
    out
}

fn torus_ind(f: &PolyMap) -> Result<Vec<OracleInd>> {
    let a: Vec<Poly> = f.components().iter().map(|p| p.dehomogenize()).collect();
    let d = f.degree() as usize;
    if a.iter().any(|p| p.degree_in(1) == 0) {
        return Ok(Vec::new());
    }
    let r01 = resultant_x(&a[0], &a[1], d * d);
    let r02 = resultant_x(&a[0], &a[2], d * d);
    let mut r = ugcd(&r01, &r02);
    while r.len() > 1 && r[0].is_zero() {
        r.remove(0);
    }
    if r.len() <= 1 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let eval_c = |p: &Poly, x: Complex64, y: Complex64| p.eval_c64(&[Complex64::new(1.0, 0.0), x, y]);
    for y0 in complex_roots(&big_c(&r)) {
        if let Some(yq) = rational_root(y0, &r) {
            // exact x from the gcd of the specializations
            let spec: Vec<UPoly> = a
                .iter()
                .map(|p| {
                    let rows = p.as_x_of_y();
                    let coeffs: Vec<BigRational> = rows.iter().map(|row| eval_q(row, &yq)).collect();
                    let l = coeffs.iter().fold(BigInt::one(), |acc, c| num_integer::Integer::lcm(&acc, c.denom()));
                    let mut v: Vec<BigInt> = coeffs.iter().map(|c| (c * BigRational::from_integer(l.clone())).to_integer()).collect();
                    trim(&mut v);
                    v
                })
                .collect();
            let g = ugcd(&ugcd(&spec[0], &spec[1]), &spec[2]);
            if g.len() <= 1 {
                continue;
            }
            for x0 in complex_roots(&big_c(&g)) {
                if let Some(xq) = rational_root(x0, &g) {
                    if xq.is_zero() {
                        continue;
                    }
                    let pt = [BigRational::one(), xq, yq.clone()];
                    if f.eval_rational(&pt).iter().all(|v| v.is_zero()) {
                        let coords = primitive_point(&pt);
                        if !out.iter().any(|o: &OracleInd| o.point.rational() == Some(&coords)) {
                            out.push(OracleInd { point: AlgPoint::Rational { coords }, location: IndLocation::Torus });
                        }
                    }
                }
            }
            continue;
        }
        // numeric x: the root of the first component best matching the others
        let rows = a[0].as_x_of_y();
        let cx: Vec<Complex64> = rows
            .iter()
            .map(|row| row.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * y0 + int_to_f64(c)))
            .collect();
        let best = complex_roots(&cx).into_iter().min_by(|p, q| {
            let s = |x: Complex64| eval_c(&a[1], x, y0).norm() + eval_c(&a[2], x, y0).norm();
            s(*p).total_cmp(&s(*q))
        });
        if let Some(x0) = best {
            let scale = 1.0 + x0.norm().powi(d as i32) + y0.norm().powi(d as i32);
            let resid = eval_c(&a[1], x0, y0).norm() + eval_c(&a[2], x0, y0).norm();
            if resid < 1e-6 * scale && x0.norm() > 1e-9 && y0.norm() > 1e-9 {
                out.push(OracleInd {
                    point: AlgPoint::Algebraic {
                        variable: "X2/X0".into(),
                        min_poly: r.iter().map(|c| c.to_string()).collect(),
                        approx: [(1.0, 0.0), (x0.re, x0.im), (y0.re, y0.im)],
                    },
                    location: IndLocation::Torus,
                });
            }
        }
    }
    Ok(out)
}
