//! Exact gcds: univariate over Z by primitive PRS, bivariate over Z by
//! modular images with exact trial division, homogeneous by dehomogenizing.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::modp;
use super::poly::{reduce_mod, trim, Poly};
use crate::error::{Error, Result};

pub type UPoly = Vec<BigInt>;

fn content(a: &[BigInt]) -> BigInt {
    a.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

/// Primitive part with positive leading coefficient.
pub fn upp(a: &[BigInt]) -> UPoly {
    let mut g = content(a);
    if g.is_zero() {
        return Vec::new();
    }
    if a.last().unwrap().is_negative() {
        g = -g;
    }
    a.iter().map(|c| c / &g).collect()
}

fn prem(a: &[BigInt], b: &[BigInt]) -> UPoly {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lb = b[db].clone();
    while r.len() > db {
        let k = r.len() - 1 - db;
        let lr = r.last().unwrap().clone();
        for c in r.iter_mut() {
            *c *= &lb;
        }
        for (j, y) in b.iter().enumerate() {
            r[k + j] -= &lr * y;
        }
        trim(&mut r);
        let g = content(&r);
        if !g.is_zero() && !g.is_one() {
            for c in r.iter_mut() {
                *c /= &g;
            }
        }
    }
    r
}

/// gcd over Z[y], positive leading coefficient.
pub fn ugcd(a: &[BigInt], b: &[BigInt]) -> UPoly {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    if a.is_empty() {
        return upp_keep_content(&b);
    }
    if b.is_empty() {
        return upp_keep_content(&a);
    }
    let c = content(&a).gcd(&content(&b));
    let mut x = upp(&a);
    let mut y = upp(&b);
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_empty() {
        let r = prem(&x, &y);
        x = y;
        y = upp(&r);
    }
    upp(&x).into_iter().map(|t| t * &c).collect()
}

fn upp_keep_content(a: &[BigInt]) -> UPoly {
    if a.last().is_some_and(|c| c.is_negative()) {
        a.iter().map(|c| -c).collect()
    } else {
        a.to_vec()
    }
}

/// Exact quotient over Z[y].
pub fn udiv_exact(a: &[BigInt], b: &[BigInt]) -> Option<UPoly> {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len().checked_sub(1)?;
    if r.len() <= db {
        return if r.is_empty() { Some(Vec::new()) } else { None };
    }
    let mut q = vec![BigInt::zero(); r.len() - db];
    for k in (0..q.len()).rev() {
        let (c, rem) = r[k + db].div_rem(&b[db]);
        if !rem.is_zero() {
            return None;
        }
        for (j, y) in b.iter().enumerate() {
            r[k + j] -= &c * y;
        }
        q[k] = c;
    }
    trim(&mut r);
    if !r.is_empty() {
        return None;
    }
    trim(&mut q);
    Some(q)
}

fn ueval_mod(a: &[BigInt], y: u64, p: u64) -> u64 {
    a.iter().rev().fold(0u64, |acc, c| (acc * y + reduce_mod(c, p)) % p)
}

fn normalize_sign(p: Poly) -> Poly {
    match p.leading() {
        Some((_, c)) if c.is_negative() => p.neg(),
        _ => p,
    }
}

fn x_content(rows: &[UPoly]) -> UPoly {
    rows.iter().fold(Vec::new(), |g, r| ugcd(&g, r))
}

/// gcd in Z[x, y] for dehomogenized polynomials (x = X1, y = X2).
pub fn gcd_bivariate(a: &Poly, b: &Poly) -> Result<Poly> {
    if a.is_zero() {
        return Ok(normalize_sign(b.clone()));
    }
    if b.is_zero() {
        return Ok(normalize_sign(a.clone()));
    }
    let ra = a.as_x_of_y();
    let rb = b.as_x_of_y();
    let ca = x_content(&ra);
    let cb = x_content(&rb);
    let cont = ugcd(&ca, &cb);
    let cont_poly = Poly::from_x_of_y(std::slice::from_ref(&cont));
    let pa: Vec<UPoly> = ra.iter().map(|r| udiv_exact(r, &ca).unwrap_or_default()).collect();
    let pb: Vec<UPoly> = rb.iter().map(|r| udiv_exact(r, &cb).unwrap_or_default()).collect();
    let dxa = pa.len() - 1;
    let dxb = pb.len() - 1;
    if dxa == 0 || dxb == 0 {
        return Ok(normalize_sign(cont_poly));
    }
    let pa_poly = Poly::from_x_of_y(&pa);
    let pb_poly = Poly::from_x_of_y(&pb);
    let gamma = ugcd(&pa[dxa], &pb[dxb]);
    let dya = pa.iter().map(|r| r.len()).max().unwrap_or(1) - 1;
    let dyb = pb.iter().map(|r| r.len()).max().unwrap_or(1) - 1;
    let need = gamma.len() - 1 + dya.min(dyb) + 1;

    let mut acc: Option<(Vec<UPoly>, BigInt)> = None;
    let mut last_lift: Option<Vec<UPoly>> = None;
    for (used, p) in modp::primes().enumerate() {
        if used > 400 {
            break;
        }
        let lga = reduce_mod(pa[dxa].last().unwrap(), p);
        let lgb = reduce_mod(pb[dxb].last().unwrap(), p);
        if lga == 0 || lgb == 0 || reduce_mod(gamma.last().unwrap(), p) == 0 {
            continue;
        }
        let mut pts: Vec<(u64, Vec<u64>)> = Vec::new();
        let mut min_deg = usize::MAX;
        let mut y = 1u64;
        while pts.len() < need && y < p {
            let ax: Vec<u64> = pa.iter().map(|r| ueval_mod(r, y, p)).collect();
            let bx: Vec<u64> = pb.iter().map(|r| ueval_mod(r, y, p)).collect();
            let gy = ueval_mod(&gamma, y, p);
            y += 1;
            if ax[dxa] == 0 || bx[dxb] == 0 || gy == 0 {
                continue;
            }
            let g = modp::gcd(&ax, &bx, p);
            let d = g.len() - 1;
            if d < min_deg {
                min_deg = d;
                pts.clear();
            }
            if d == min_deg {
                pts.push((y - 1, modp::scale(&g, gy, p)));
            }
        }
        if min_deg == 0 {
            return Ok(normalize_sign(cont_poly));
        }
        let ys: Vec<u64> = pts.iter().map(|t| t.0).collect();
        let rows: Vec<UPoly> = (0..=min_deg)
            .map(|k| {
                let vals: Vec<u64> = pts.iter().map(|t| t.1.get(k).copied().unwrap_or(0)).collect();
                modp::interpolate(&ys, &vals, p).into_iter().map(BigInt::from).collect()
            })
            .collect();
        let pb_big = BigInt::from(p);
        acc = match acc.take() {
            None => Some((rows, pb_big)),
            Some((prev, m)) => {
                if prev.len() - 1 > min_deg {
                    last_lift = None;
                    Some((rows, pb_big))
                } else if prev.len() - 1 < min_deg {
                    Some((prev, m))
                } else {
                    Some((crt_rows(&prev, &m, &rows, &pb_big), &m * &pb_big))
                }
            }
        };
        let (cur, m) = acc.as_ref().unwrap();
        let lift: Vec<UPoly> = cur.iter().map(|r| symmetric(r, m)).collect();
        if last_lift.as_ref() == Some(&lift) {
            let cpp = x_content(&lift);
            let h: Vec<UPoly> = lift.iter().map(|r| udiv_exact(r, &cpp).unwrap_or_default()).collect();
            let hp = normalize_sign(Poly::from_x_of_y(&h));
            if pa_poly.divide_exact(&hp).is_some() && pb_poly.divide_exact(&hp).is_some() {
                return Ok(normalize_sign(hp.mul(&cont_poly)));
            }
        }
        last_lift = Some(lift);
    }
    Err(Error::Budget("modular gcd did not stabilize".into()))
}

fn crt_rows(prev: &[UPoly], m: &BigInt, rows: &[UPoly], p: &BigInt) -> Vec<UPoly> {
    // x ≡ a mod m, x ≡ b mod p  ->  a + m·((b - a)·m⁻¹ mod p)
    let minv = m.mod_floor(p).modpow(&(p - 2u32), p);
    prev.iter()
        .zip(rows)
        .map(|(ra, rb)| {
            let n = ra.len().max(rb.len());
            (0..n)
                .map(|i| {
                    let a = ra.get(i).cloned().unwrap_or_default();
                    let b = rb.get(i).cloned().unwrap_or_default();
                    let t = ((b - &a).mod_floor(p) * &minv).mod_floor(p);
                    a + m * t
                })
                .collect()
        })
        .collect()
}

fn symmetric(r: &[BigInt], m: &BigInt) -> UPoly {
    let half: BigInt = m / 2;
    let mut out: UPoly = r.iter().map(|c| {
        let c = c.mod_floor(m);
        if c > half { c - m } else { c }
    }).collect();
    trim(&mut out);
    out
}

/// gcd of homogeneous polynomials in X0, X1, X2.
pub fn gcd_homogeneous(a: &Poly, b: &Poly) -> Result<Poly> {
    if a.is_zero() {
        return Ok(normalize_sign(b.clone()));
    }
    if b.is_zero() {
        return Ok(normalize_sign(a.clone()));
    }
    let v0 = a.valuation(0).min(b.valuation(0));
    let h = gcd_bivariate(&a.dehomogenize(), &b.dehomogenize())?;
    Ok(normalize_sign(h.homogenize(h.degree()).mul_monomial([v0, 0, 0])))
}

pub fn gcd_many(ps: &[Poly]) -> Result<Poly> {
    let mut g = Poly::zero();
    for p in ps {
        g = gcd_homogeneous(&g, p)?;
        if g.degree() == 0 && g.content().is_one() {
            break;
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Poly {
        Poly::parse(s).unwrap()
    }

    #[test]
    fn univariate() {
        let a: UPoly = [-2, 1, 1].iter().map(|&x| BigInt::from(x)).collect(); // (x+2)(x-1)
        let b: UPoly = [-3, 2, 1].iter().map(|&x| BigInt::from(x)).collect(); // (x+3)(x-1)
        assert_eq!(ugcd(&a, &b), vec![BigInt::from(-1), BigInt::from(1)]);
        let six: UPoly = vec![BigInt::from(6), BigInt::from(12)];
        let four: UPoly = vec![BigInt::from(4), BigInt::from(8)];
        assert_eq!(ugcd(&six, &four), vec![BigInt::from(2), BigInt::from(4)]);
    }

    #[test]
    fn bivariate_and_homogeneous() {
        let f = p("X1 + X2 - X0");
        let g1 = p("X1^2 - 3 X0 X2");
        let g2 = p("X0^2 + X1 X2 + 5 X2^2");
        let a = f.mul(&g1).mul(&Poly::var(0));
        let b = f.mul(&g2).mul(&Poly::var(0)).mul(&Poly::var(0));
        assert_eq!(gcd_homogeneous(&a, &b).unwrap(), f.mul(&Poly::var(0)).primitive_part());
        assert_eq!(gcd_homogeneous(&g1, &g2).unwrap(), Poly::constant(1));
        let big = p("2 X1^3 + 7 X1 X2^2 - X0^3").pow(2);
        let c = big.mul(&p("X1 - 11 X2")).scale(&BigInt::from(6));
        let d = big.mul(&p("X0 + X2")).scale(&BigInt::from(4));
        assert_eq!(gcd_homogeneous(&c, &d).unwrap(), big.scale(&BigInt::from(2)).primitive_part().scale(&BigInt::from(2)));
    }
}
