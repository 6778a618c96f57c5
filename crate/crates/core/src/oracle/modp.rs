//! Univariate polynomial arithmetic over F_p for primes below 2^32.
//!
//! Polynomials are dense coefficient vectors, lowest degree first, trimmed.

/// Primes used by the modular routes, largest first.
pub fn primes() -> impl Iterator<Item = u64> {
    (1u64 << 31..(1u64 << 32) - 5).rev().filter(|&n| is_prime(n))
}

pub const LINE_PRIMES: [u64; 2] = [998_244_353, 469_762_049];

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    // deterministic Miller-Rabin for n < 3.3e24
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_wide(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pow_mod_wide(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u128;
    let mut bb = (b % m) as u128;
    while e > 0 {
        if e & 1 == 1 {
            r = r * bb % m as u128;
        }
        bb = bb * bb % m as u128;
        e >>= 1;
    }
    b = r as u64;
    b
}

pub fn pow_mod(b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    let mut b = b % p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

/// Barrett reduction for a fixed prime below 2^32.
#[derive(Clone, Copy, Debug)]
pub struct Fp {
    pub p: u64,
    m: u64,
}

impl Fp {
    pub fn new(p: u64) -> Self {
        assert!(p > 2 && p < 1 << 32);
        Fp { p, m: u64::MAX / p }
    }

    #[inline]
    pub fn reduce(&self, x: u64) -> u64 {
        let q = ((x as u128 * self.m as u128) >> 64) as u64;
        let mut r = x - q * self.p;
        while r >= self.p {
            r -= self.p;
        }
        r
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce(a * b)
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p { s - self.p } else { s }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b { a - b } else { a + self.p - b }
    }
}

pub fn trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

pub fn scale(a: &[u64], k: u64, p: u64) -> Vec<u64> {
    let mut r: Vec<u64> = a.iter().map(|x| x * (k % p) % p).collect();
    trim(&mut r);
    r
}

#[cfg(test)]
pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let f = Fp::new(p);
    let mut r = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            r[i + j] = f.add(r[i + j], f.mul(x, y));
        }
    }
    trim(&mut r);
    r
}

pub fn divrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut r = a.to_vec();
    trim(&mut r);
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let f = Fp::new(p);
    let db = b.len() - 1;
    let inv = inv_mod(b[db], p);
    let mut q = vec![0u64; r.len() - db];
    for k in (0..q.len()).rev() {
        let c = f.mul(r[k + db], inv);
        q[k] = c;
        if c != 0 {
            for (j, &y) in b.iter().enumerate() {
                r[k + j] = f.sub(r[k + j], f.mul(c, y));
            }
        }
    }
    trim(&mut r);
    trim(&mut q);
    (q, r)
}

pub fn monic(a: &[u64], p: u64) -> Vec<u64> {
    match a.last() {
        None => Vec::new(),
        Some(&l) => scale(a, inv_mod(l, p), p),
    }
}

pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let (_, r) = divrem(&x, &y, p);
        x = y;
        y = r;
    }
    monic(&x, p)
}

pub fn eval(a: &[u64], x: u64, p: u64) -> u64 {
    let f = Fp::new(p);
    let x = x % p;
    a.iter().rev().fold(0u64, |acc, &c| f.add(f.mul(acc, x), c))
}

/// Interpolating polynomial through (xs[i], ys[i]); xs distinct.
pub fn interpolate(xs: &[u64], ys: &[u64], p: u64) -> Vec<u64> {
    interpolate_many(xs, &[ys], p).pop().unwrap()
}

/// Several interpolations on the same nodes, sharing the Lagrange basis.
pub fn interpolate_many(xs: &[u64], ys: &[&[u64]], p: u64) -> Vec<Vec<u64>> {
    let n = xs.len();
    let f = Fp::new(p);
    let mut out = vec![vec![0u64; n]; ys.len()];
    if n == 0 {
        return vec![Vec::new(); ys.len()];
    }
    let v = vanishing(xs, p);
    let mut q = vec![0u64; n];
    for i in 0..n {
        if ys.iter().all(|y| y[i] == 0) {
            continue;
        }
        // q = v / (x - xs[i]) by synthetic division; w = q(xs[i])
        let x = xs[i] % p;
        let mut carry = 0u64;
        for k in (0..n).rev() {
            carry = f.add(v[k + 1], f.mul(carry, x));
            q[k] = carry;
        }
        let w = inv_mod(eval(&q, x, p), p);
        for (r, y) in out.iter_mut().zip(ys) {
            let c = f.mul(y[i], w);
            if c == 0 {
                continue;
            }
            for (rk, &qk) in r.iter_mut().zip(&q) {
                *rk = f.add(*rk, f.mul(c, qk));
            }
        }
    }
    for r in out.iter_mut() {
        trim(r);
    }
    out
}

/// Π (x - xs[i]).
pub fn vanishing(xs: &[u64], p: u64) -> Vec<u64> {
    let f = Fp::new(p);
    let mut r = vec![0u64; xs.len() + 1];
    r[0] = 1;
    for (len, &x) in xs.iter().enumerate() {
        let nx = (p - x % p) % p;
        for k in (0..=len + 1).rev() {
            let lower = if k > 0 { r[k - 1] } else { 0 };
            r[k] = f.add(lower, f.mul(r[k], nx));
        }
    }
    r
}

/// Resultant of a and b over F_p (Euclidean algorithm).
pub fn resultant(a: &[u64], b: &[u64], p: u64) -> u64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut res = 1u64;
    loop {
        let da = a.len() - 1;
        let db = b.len() - 1;
        if db == 0 {
            return res * pow_mod(b[0], da as u64, p) % p;
        }
        let (_, r) = divrem(&a, &b, p);
        if r.is_empty() {
            return 0;
        }
        let dr = r.len() - 1;
        // res(a,b) = (-1)^{da db} lc(b)^{da-dr} res(b, r)
        let mut f = pow_mod(b[db], (da - dr) as u64, p);
        if da % 2 == 1 && db % 2 == 1 {
            f = (p - f) % p;
        }
        res = res * f % p;
        a = b;
        b = r;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u64 = 998_244_353;

    #[test]
    fn interpolation_recovers_polynomial() {
        let f = vec![5u64, 0, 3, 7];
        let xs: Vec<u64> = (1..=4).collect();
        let ys: Vec<u64> = xs.iter().map(|&x| eval(&f, x, P)).collect();
        assert_eq!(interpolate(&xs, &ys, P), f);
    }

    #[test]
    fn resultant_and_gcd() {
        // (x-1)(x-2) and (x-2)(x+5)
        let a = mul(&[P - 1, 1], &[P - 2, 1], P);
        let b = mul(&[P - 2, 1], &[5, 1], P);
        assert_eq!(resultant(&a, &b, P), 0);
        assert_eq!(gcd(&a, &b, P), vec![P - 2, 1]);
        // res(x - 3, x - 7) = -4... = (3 - 7)
        assert_eq!(resultant(&[P - 3, 1], &[P - 7, 1], P), P - 4);
        assert!(is_prime(LINE_PRIMES[0]) && is_prime(LINE_PRIMES[1]));
        assert!(primes().next().unwrap() > 1 << 31);
    }
}
