//! Truncated power series over the NTT primes in [`super::modp::LINE_PRIMES`].

use super::modp::{pow_mod, Fp};
use super::poly::{reduce_mod, Poly};
use super::PolyMap;

const GENERATOR: u64 = 3;

pub struct SeriesRing {
    f: Fp,
    len: usize,
}

impl SeriesRing {
    /// Series modulo t^len over F_p; p − 1 must be divisible by a power of two ≥ 2·len.
    pub fn new(p: u64, len: usize) -> Self {
        let need = (2 * len).next_power_of_two() as u64;
        assert!((p - 1).is_multiple_of(need), "prime {p} does not support transforms of length {need}");
        SeriesRing { f: Fp::new(p), len }
    }

    fn ntt(&self, a: &mut [u64], invert: bool) {
        let f = &self.f;
        let n = a.len();
        let mut j = 0;
        for i in 1..n {
            let mut bit = n >> 1;
            while j & bit != 0 {
                j ^= bit;
                bit >>= 1;
            }
            j |= bit;
            if i < j {
                a.swap(i, j);
            }
        }
        let mut size = 2;
        while size <= n {
            let mut w = pow_mod(GENERATOR, (f.p - 1) / size as u64, f.p);
            if invert {
                w = pow_mod(w, f.p - 2, f.p);
            }
            let half = size / 2;
            let mut ws = Vec::with_capacity(half);
            let mut x = 1;
            for _ in 0..half {
                ws.push(x);
                x = f.mul(x, w);
            }
            for chunk in a.chunks_mut(size) {
                let (lo, hi) = chunk.split_at_mut(half);
                for k in 0..half {
                    let u = lo[k];
                    let v = f.mul(hi[k], ws[k]);
                    lo[k] = f.add(u, v);
                    hi[k] = f.sub(u, v);
                }
            }
            size <<= 1;
        }
        if invert {
            let ninv = pow_mod(n as u64, f.p - 2, f.p);
            for x in a.iter_mut() {
                *x = f.mul(*x, ninv);
            }
        }
    }

    fn mul_to(&self, a: &[u64], b: &[u64], len: usize) -> Vec<u64> {
        let (a, b) = (&a[..a.len().min(len)], &b[..b.len().min(len)]);
        if a.is_empty() || b.is_empty() {
            return vec![0; len];
        }
        if a.len().min(b.len()) <= 32 {
            let mut out = vec![0; len];
            for (i, &x) in a.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                for (o, &y) in out[i..].iter_mut().zip(b) {
                    *o = self.f.add(*o, self.f.mul(x, y));
                }
            }
            return out;
        }
        let n = (a.len() + b.len() - 1).next_power_of_two();
        let mut fa = a.to_vec();
        fa.resize(n, 0);
        let mut fb = b.to_vec();
        fb.resize(n, 0);
        self.ntt(&mut fa, false);
        self.ntt(&mut fb, false);
        for (x, y) in fa.iter_mut().zip(&fb) {
            *x = self.f.mul(*x, *y);
        }
        self.ntt(&mut fa, true);
        fa.resize(len, 0);
        fa
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        self.mul_to(a, b, self.len)
    }

    /// 1/a mod t^len by Newton iteration; None if a(0) = 0.
    pub fn inverse(&self, a: &[u64]) -> Option<Vec<u64>> {
        let f = &self.f;
        let a0 = *a.first()?;
        if a0 == 0 {
            return None;
        }
        let mut b = vec![pow_mod(a0, f.p - 2, f.p)];
        while b.len() < self.len {
            let k = (2 * b.len()).min(self.len);
            let ab = self.mul_to(a, &b, k);
            let corr: Vec<u64> = ab.iter().enumerate().map(|(i, &x)| if i == 0 { f.sub(2, x) } else { f.sub(0, x) }).collect();
            b = self.mul_to(&b, &corr, k);
        }
        Some(b)
    }

    pub fn linear(&self, a: u64, b: u64) -> Vec<u64> {
        let mut s = vec![0; self.len];
        s[0] = a % self.f.p;
        if self.len > 1 {
            s[1] = b % self.f.p;
        }
        s
    }

    pub fn combine(&self, c: [u64; 3], xs: &[Vec<u64>; 3]) -> Vec<u64> {
        (0..self.len).map(|i| (0..3).fold(0, |s, j| self.f.add(s, self.f.mul(c[j], xs[j][i])))).collect()
    }

    fn eval_poly(&self, poly: &Poly, powers: &mut [Vec<Vec<u64>>; 3], xs: &[Vec<u64>; 3]) -> Vec<u64> {
        let mut out = vec![0; self.len];
        for (e, c) in poly.terms() {
            let mut term: Option<Vec<u64>> = None;
            for i in 0..3 {
                let k = e[i] as usize;
                if k == 0 {
                    continue;
                }
                while powers[i].len() < k {
                    let next = match powers[i].last() {
                        Some(last) => self.mul(last, &xs[i]),
                        None => xs[i].clone(),
                    };
                    powers[i].push(next);
                }
                term = Some(match term {
                    Some(t) => self.mul(&t, &powers[i][k - 1]),
                    None => powers[i][k - 1].clone(),
                });
            }
            let c = reduce_mod(c, self.f.p);
            match term {
                Some(t) => {
                    for (o, x) in out.iter_mut().zip(t) {
                        *o = self.f.add(*o, self.f.mul(c, x));
                    }
                }
                None => out[0] = self.f.add(out[0], c),
            }
        }
        out
    }

    /// Applies a polynomial map to a triple of series.
    pub fn eval_map(&self, m: &PolyMap, xs: &[Vec<u64>; 3]) -> [Vec<u64>; 3] {
        let mut powers: [Vec<Vec<u64>>; 3] = Default::default();
        let c = m.components();
        std::array::from_fn(|i| self.eval_poly(&c[i], &mut powers, xs))
    }

    /// Length of the shortest linear recurrence generating `s` (Berlekamp–Massey).
    pub fn linear_complexity(&self, s: &[u64]) -> usize {
        let f = &self.f;
        let mut c: Vec<u64> = vec![1];
        let mut b: Vec<u64> = vec![1];
        let (mut l, mut m, mut bd) = (0usize, 1usize, 1u64);
        for n in 0..s.len() {
            let mut acc: u128 = s[n] as u128;
            for i in 1..=l.min(c.len() - 1) {
                acc += c[i] as u128 * s[n - i] as u128;
            }
            let d = (acc % f.p as u128) as u64;
            if d == 0 {
                m += 1;
                continue;
            }
            let coef = f.mul(d, pow_mod(bd, f.p - 2, f.p));
            let old = (2 * l <= n).then(|| c.clone());
            if c.len() < b.len() + m {
                c.resize(b.len() + m, 0);
            }
            for (i, &x) in b.iter().enumerate() {
                c[i + m] = f.sub(c[i + m], f.mul(coef, x));
            }
            match old {
                Some(t) => {
                    l = n + 1 - l;
                    b = t;
                    bd = d;
                    m = 1;
                }
                None => m += 1,
            }
        }
        l
    }
}
