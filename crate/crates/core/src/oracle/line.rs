//! Degrees of large composites by restriction to a random line modulo a
//! prime: push the line through the letters as truncated power series, take
//! the ratio of two generic linear combinations of the components and read the
//! degree off its linear complexity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::modp;
use super::series::SeriesRing;
use super::PolyMap;
use crate::error::{Error, Result};
use crate::tmap::ToricWord;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LineDegreeConfig {
    pub seed: u64,
    /// Initial series length; grown until the recurrence is confirmed.
    pub start: usize,
    pub max_points: usize,
    /// Coefficients beyond 2L that must agree with the recurrence.
    pub extra: usize,
}

impl Default for LineDegreeConfig {
    fn default() -> Self {
        LineDegreeConfig { seed: 0x6c69_6e65, start: 64, max_points: 1 << 21, extra: 16 }
    }
}

/// Degree of the composite `maps[k-1] ∘ … ∘ maps[0]` over F_p along one random line.
pub fn line_degree(maps: &[PolyMap], p: u64, cfg: &LineDegreeConfig) -> Result<u64> {
    line_degree_from(maps, p, cfg, cfg.start)
}

/// As [`line_degree`], starting from series length `start`. The start only
/// affects the running time: too short a series is detected and grown.
///
/// With the reduced composite [F0 : F1 : F2] of degree d along the line, two
/// generic combinations of the Fi are coprime of degree d, so their ratio has
/// linear complexity d + 1.
pub fn line_degree_from(maps: &[PolyMap], p: u64, cfg: &LineDegreeConfig, start: usize) -> Result<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ p);
    let a: [u64; 3] = std::array::from_fn(|_| rng.gen_range(1..p));
    let b: [u64; 3] = std::array::from_fn(|_| rng.gen_range(1..p));
    let c1: [u64; 3] = std::array::from_fn(|_| rng.gen_range(1..p));
    let mut len = start.max(2 * cfg.extra + 2);
    loop {
        if len > cfg.max_points {
            return Err(Error::Budget(format!("line degree needs a series longer than {}", cfg.max_points)));
        }
        let ring = SeriesRing::new(p, len);
        let mut xs: [Vec<u64>; 3] = std::array::from_fn(|i| ring.linear(a[i], b[i]));
        for m in maps {
            xs = ring.eval_map(m, &xs);
        }
        let num = ring.combine(c1, &xs);
        let inv = (0..8)
            .find_map(|_| {
                let c2: [u64; 3] = std::array::from_fn(|_| rng.gen_range(1..p));
                ring.inverse(&ring.combine(c2, &xs))
            })
            .ok_or_else(|| Error::Invalid("the sample line meets the indeterminacy locus".into()))?;
        let l = ring.linear_complexity(&ring.mul(&num, &inv));
        if 2 * l + cfg.extra <= len {
            return Ok(l.saturating_sub(1) as u64);
        }
        len = (len * 3 / 2).max(2 * l + 2 * cfg.extra);
    }
}

/// deg(fⁿ) for n = 1..=n_max, evaluating the unreduced word letter by letter;
/// the maximum over the two line primes is reported.
pub fn oracle_degrees(w: &ToricWord, n_max: usize, cfg: &LineDegreeConfig) -> Result<Vec<u64>> {
    let maps: Vec<PolyMap> = w.applied().map(PolyMap::from_generator).collect::<Result<_>>()?;
    let mut out: Vec<u64> = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let chain: Vec<PolyMap> = (0..n).flat_map(|_| maps.iter().cloned()).collect();
        let guess = predicted(&out);
        let mut best = 0;
        for (i, &p) in modp::LINE_PRIMES.iter().enumerate() {
            let c = LineDegreeConfig { seed: cfg.seed.wrapping_add((n * 2 + i) as u64), ..*cfg };
            let d = if best > 0 { best } else { guess.unwrap_or(0) };
            let hint = (2 * d as usize + 2 * cfg.extra + 16).max(cfg.start);
            best = best.max(line_degree_from(&chain, p, &c, hint)?);
        }
        out.push(best);
    }
    Ok(out)
}

// Geometric extrapolation of the degrees so far, with some slack.
fn predicted(prev: &[u64]) -> Option<u64> {
    match prev {
        [.., a, b] if *a > 0 => Some(((*b as f64) * (*b as f64) / (*a as f64) * 1.1).ceil() as u64),
        [.., b] => Some(b * 2),
        [] => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> ToricWord {
        ToricWord::parse(s).unwrap()
    }

    #[test]
    fn agrees_with_symbolic_composition() {
        for s in ["g", "m[1,-2;2,1]", "g.m[1,-2;2,1]", "m[1,-2;2,1].g", "g.m[2,1;1,1]", "t[2,3].g.m[0,1;-1,1]"] {
            let word = w(s);
            let line = oracle_degrees(&word, 2, &LineDegreeConfig::default()).unwrap();
            for n in 1..=2 {
                let sym = PolyMap::from_word(&word.power(n), 200).unwrap().degree() as u64;
                assert_eq!(line[n - 1], sym, "{s} n={n}");
            }
        }
    }

    #[test]
    fn involution_cancels() {
        assert_eq!(oracle_degrees(&w("g"), 4, &LineDegreeConfig::default()).unwrap(), vec![2, 1, 2, 1]);
    }

    #[test]
    fn identity_is_linear() {
        assert_eq!(oracle_degrees(&w("m[1,0;0,1]"), 2, &LineDegreeConfig::default()).unwrap(), vec![1, 1]);
    }
}
