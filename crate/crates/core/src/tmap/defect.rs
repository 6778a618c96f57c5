use num_complex::Complex64;
use serde::Serialize;

use super::profile::profile;
use super::word::ToricWord;
use crate::error::Result;

#[derive(Clone, Debug, Serialize)]
pub struct DefectStats {
    pub max: f64,
    pub mean: f64,
    pub count: usize,
    /// Sample indices skipped because they sit on an exceptional curve or
    /// map outside the torus numerically.
    pub flagged: Vec<usize>,
    pub per_sample: Vec<Option<f64>>,
}

fn trop(x: (Complex64, Complex64)) -> [f64; 2] {
    [-x.0.norm().ln(), -x.1.norm().ln()]
}

/// ‖Trop(f(p)) − A_f(Trop p)‖ over the samples, with Trop = −log|·|.
pub fn trop_defect(w: &ToricWord, samples: &[(Complex64, Complex64)]) -> Result<DefectStats> {
    let prof = profile(w)?;
    let word = &prof.word;
    let a = prof.trop.clone();
    let mut per_sample = Vec::with_capacity(samples.len());
    let mut flagged = Vec::new();
    for (i, &p) in samples.iter().enumerate() {
        let near = prof.exc.iter().any(|e| {
            let v = e.poly.eval_c64(p.0, p.1).norm();
            let scale: f64 = e.poly.terms().map(|(m, c)| {
                let (re, im) = c.to_c64();
                Complex64::new(re, im).norm() * p.0.norm().powi(m.0 as i32) * p.1.norm().powi(m.1 as i32)
            }).sum();
            v <= 1e-12 * scale
        });
        let img = word.eval_c64(p);
        let t = trop(img);
        if near || !t[0].is_finite() || !t[1].is_finite() {
            flagged.push(i);
            per_sample.push(None);
            continue;
        }
        let u = a.apply_f64(trop(p));
        per_sample.push(Some((t[0] - u[0]).hypot(t[1] - u[1])));
    }
    let vals: Vec<f64> = per_sample.iter().flatten().copied().collect();
    let max = vals.iter().copied().fold(0.0, f64::max);
    let mean = if vals.is_empty() { 0.0 } else { vals.iter().sum::<f64>() / vals.len() as f64 };
    Ok(DefectStats { max, mean, count: vals.len(), flagged, per_sample })
}
