//! Pullback and pushforward of toric classes under words, degree sequences,
//! dynamical degree estimates and invariant-class iteration.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::lattice::{Fan, IntegerMatrix, LatticeVector};
use crate::scalar::{rat, ratio_to_f64};
use crate::support::PLFunction;
use crate::surface::pl_pairing;
use crate::tmap::{Generator, StabilityVerdict, ToricWord};

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ActConfig {
    pub ray_budget: usize,
    /// Resolve working fans to smooth ones after every letter.
    pub smooth: bool,
}

impl Default for ActConfig {
    fn default() -> Self {
        ActConfig { ray_budget: 512, smooth: false }
    }
}

fn p2_vectors() -> Vec<LatticeVector> {
    Fan::p2_rays().iter().map(|r| r.v().clone()).collect()
}

/// A Cartier class: exact PL data on a fan containing the P² rays.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeilClassRep {
    psi: PLFunction<BigRational>,
    normalized: bool,
}

impl WeilClassRep {
    pub fn new(psi: PLFunction<BigRational>) -> Result<Self> {
        for r in Fan::p2_rays() {
            if !psi.fan().contains(r.v()) {
                return Err(Error::MissingRay(r.to_string()));
            }
        }
        Ok(WeilClassRep { psi, normalized: false })
    }

    /// [line] on P²: values 1/3 at the three rays.
    pub fn line() -> Self {
        let third = rat(1, 3);
        WeilClassRep { psi: PLFunction::new(Fan::p2(), vec![third.clone(), third.clone(), third]).expect("P2"), normalized: true }
    }

    pub fn psi(&self) -> &PLFunction<BigRational> {
        &self.psi
    }

    pub fn fan(&self) -> &Fan {
        self.psi.fan()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn degree(&self) -> BigRational {
        self.psi.degree()
    }

    pub fn is_nef(&self) -> bool {
        self.psi.is_convex()
    }

    pub fn is_principal(&self) -> bool {
        self.psi.is_linear()
    }

    pub fn pairing(&self, o: &WeilClassRep) -> BigRational {
        pl_pairing(&self.psi, &o.psi)
    }

    pub fn add(&self, o: &WeilClassRep) -> WeilClassRep {
        WeilClassRep { psi: self.psi.add(&o.psi), normalized: false }
    }

    pub fn scale(&self, s: &BigRational) -> WeilClassRep {
        WeilClassRep { psi: self.psi.scale(s), normalized: self.normalized }
    }

    pub fn sub(&self, o: &WeilClassRep) -> WeilClassRep {
        self.add(&o.scale(&-BigRational::one()))
    }

    /// Prunes linear rays (keeping the P² rays), normalizes and enforces the ray budget.
    pub fn tidy(&self, cfg: &ActConfig) -> Result<WeilClassRep> {
        let mut psi = self.psi.prune(&p2_vectors()).normalize()?;
        if cfg.smooth && !psi.fan().is_smooth() {
            let fan = psi.fan().smooth_resolution();
            psi = psi.sample_on(&fan);
        }
        if psi.fan().len() > cfg.ray_budget {
            return Err(Error::Budget(format!("working fan has {} rays (budget {})", psi.fan().len(), cfg.ray_budget)));
        }
        Ok(WeilClassRep { psi, normalized: true })
    }

    pub fn eval_f64(&self, v: [f64; 2]) -> f64 {
        self.psi.to_f64().eval_f64(v)
    }
}

pub fn pullback_monomial(c: &WeilClassRep, a: &IntegerMatrix, cfg: &ActConfig) -> Result<WeilClassRep> {
    if a.det().is_zero() {
        return Err(Error::Singular);
    }
    let psi = c.psi.compose_linear(a, &p2_vectors())?;
    WeilClassRep { psi, normalized: false }.tidy(cfg)
}

/// ψ ↦ ψ∘(sign(det A)·adj A), i.e. |det A|·ψ∘A⁻¹.
pub fn pushforward_monomial(c: &WeilClassRep, a: &IntegerMatrix, cfg: &ActConfig) -> Result<WeilClassRep> {
    if a.det().is_zero() {
        return Err(Error::Singular);
    }
    let mut b = a.adj();
    if a.det().is_negative() {
        b = IntegerMatrix::new(-b.entry(0, 0), -b.entry(0, 1), -b.entry(1, 0), -b.entry(1, 1));
    }
    let psi = c.psi.compose_linear(&b, &p2_vectors())?;
    WeilClassRep { psi, normalized: false }.tidy(cfg)
}

/// ψ + (ψ(e₁) + ψ(e₂) + ψ(−e₁−e₂))·[line]: each exceptional line of the
/// involution contributes the coefficient of the pole carrying its image.
pub fn pullback_involution(c: &WeilClassRep, cfg: &ActConfig) -> Result<WeilClassRep> {
    let d = c.psi.degree();
    let psi = c.psi.add(&WeilClassRep::line().psi.scale(&d));
    WeilClassRep { psi, normalized: false }.tidy(cfg)
}

pub fn pullback_letter(c: &WeilClassRep, g: &Generator, cfg: &ActConfig) -> Result<WeilClassRep> {
    match g {
        Generator::Monomial(a) => pullback_monomial(c, a, cfg),
        Generator::Translation(..) => c.tidy(cfg),
        Generator::StdInvolution => pullback_involution(c, cfg),
        Generator::UserBirational(_) => Err(Error::Unsupported("class pullback by user maps".into())),
    }
}

pub fn pushforward_letter(c: &WeilClassRep, g: &Generator, cfg: &ActConfig) -> Result<WeilClassRep> {
    match g {
        Generator::Monomial(a) => pushforward_monomial(c, a, cfg),
        Generator::Translation(..) => c.tidy(cfg),
        Generator::StdInvolution => pullback_involution(c, cfg),
        Generator::UserBirational(_) => Err(Error::Unsupported("class pushforward by user maps".into())),
    }
}

/// f* = L₁*∘…∘L_k* for f = L_k∘…∘L₁.
pub fn pullback_word(c: &WeilClassRep, w: &ToricWord, cfg: &ActConfig) -> Result<WeilClassRep> {
    let mut cur = c.clone();
    for g in w.letters() {
        cur = pullback_letter(&cur, g, cfg)?;
    }
    Ok(cur)
}

pub fn pushforward_word(c: &WeilClassRep, w: &ToricWord, cfg: &ActConfig) -> Result<WeilClassRep> {
    let mut cur = c.clone();
    for g in w.applied() {
        cur = pushforward_letter(&cur, g, cfg)?;
    }
    Ok(cur)
}

/// f_*f^*c − dtop·c.
pub fn eminus(c: &WeilClassRep, w: &ToricWord, dtop: &BigInt, cfg: &ActConfig) -> Result<WeilClassRep> {
    let up = pullback_word(c, w, cfg)?;
    let down = pushforward_word(&up, w, cfg)?;
    down.sub(&c.scale(&BigRational::from_integer(dtop.clone()))).tidy(cfg)
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeSequence {
    /// deg(fⁿ) for n = 1, 2, ...
    #[serde(serialize_with = "ser_rats")]
    pub degrees: Vec<BigRational>,
    pub flags: Vec<String>,
    /// Set when the ray budget stopped the computation early.
    pub truncated: bool,
    pub max_rays: usize,
}

fn ser_rats<S: serde::Serializer>(v: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&crate::scalar::ratio_to_string(x))?;
    }
    seq.end()
}

impl DegreeSequence {
    pub fn as_f64(&self) -> Vec<f64> {
        self.degrees.iter().map(ratio_to_f64).collect()
    }
}

/// deg((fⁿ)*[line]) for n ≤ n_max, pulling back the reduced word fⁿ.
pub fn degree_sequence(w: &ToricWord, n_max: usize, stability: Option<&StabilityVerdict>, cfg: &ActConfig) -> DegreeSequence {
    let mut out = DegreeSequence { degrees: Vec::new(), flags: Vec::new(), truncated: false, max_rays: 3 };
    for n in 1..=n_max {
        let word = w.power(n).reduced();
        match pullback_word(&WeilClassRep::line(), &word, cfg) {
            Ok(c) => {
                out.max_rays = out.max_rays.max(c.fan().len());
                out.degrees.push(c.degree());
            }
            Err(e) => {
                out.truncated = true;
                out.flags.push(format!("stopped at n = {n}: {e}"));
                break;
            }
        }
    }
    match stability {
        Some(v) if v.covers(n_max as u64) => {}
        Some(_) => out.flags.push("unstable - degrees unverified".into()),
        None => out.flags.push("stability not checked".into()),
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct DynDegreeEstimate {
    pub ratios: Vec<f64>,
    pub roots: Vec<f64>,
    pub sqrt_dtop: f64,
    pub deg_f: f64,
    /// √dtop ≤ every root and ratio estimate ≤ deg f, up to rounding.
    pub within_bounds: bool,
}

pub fn dyn_degree_estimate(seq: &[BigRational], dtop: &BigInt) -> Result<DynDegreeEstimate> {
    if seq.len() < 3 {
        return Err(Error::Invalid("need at least three degrees".into()));
    }
    let d: Vec<f64> = seq.iter().map(ratio_to_f64).collect();
    let ratios: Vec<f64> = d.windows(2).map(|w| w[1] / w[0]).collect();
    let roots: Vec<f64> = d.iter().enumerate().map(|(i, x)| x.powf(1.0 / (i + 1) as f64)).collect();
    let sqrt_dtop = crate::scalar::int_to_f64(dtop).sqrt();
    let deg_f = d[0];
    let eps = 1e-9;
    let within_bounds = roots.iter().all(|&r| r >= sqrt_dtop - eps && r <= deg_f + eps)
        && ratios.last().is_some_and(|&r| r <= deg_f + eps);
    Ok(DynDegreeEstimate { ratios, roots, sqrt_dtop, deg_f, within_bounds })
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantIterate {
    pub reps: Vec<WeilClassRep>,
    /// sup over 360 unit directions of |ψ_{k+1} − ψ_k|.
    pub diagnostics: Vec<f64>,
    pub warning: Option<String>,
    pub truncated: bool,
}

/// αₖ = (fᵏ)*[line]/deg(fᵏ) and the Cauchy diagnostic between consecutive reps.
pub fn invariant_class_iterate(w: &ToricWord, n: usize, dtop: &BigInt, cfg: &ActConfig, exec: Exec) -> InvariantIterate {
    let mut reps = Vec::new();
    let mut truncated = false;
    for k in 1..=n {
        match pullback_word(&WeilClassRep::line(), &w.power(k).reduced(), cfg) {
            Ok(c) => {
                let d = c.degree();
                reps.push(c.scale(&(BigRational::one() / d)));
            }
            Err(_) => {
                truncated = true;
                break;
            }
        }
    }
    let mut warning = None;
    if reps.len() >= 2 {
        let d1 = reps.len();
        let seq = degree_sequence(w, d1.min(3), None, cfg);
        if seq.degrees.len() >= 2 {
            let last = ratio_to_f64(&seq.degrees[seq.degrees.len() - 1]);
            let prev = ratio_to_f64(&seq.degrees[seq.degrees.len() - 2]);
            let lambda = last / prev;
            if lambda * lambda <= crate::scalar::int_to_f64(dtop) + 1e-9 {
                warning = Some(format!("regime check failed: estimated lambda1^2 = {:.6} <= dtop", lambda * lambda));
            }
        }
    }
    let fs: Vec<PLFunction<f64>> = reps.iter().map(|r| r.psi.to_f64()).collect();
    let diagnostics = fs
        .windows(2)
        .map(|p| {
            let v = exec.map_range(360, |k| {
                let t = std::f64::consts::TAU * k as f64 / 360.0;
                let u = [t.cos(), t.sin()];
                (p[1].eval_f64(u) - p[0].eval_f64(u)).abs()
            });
            v.into_iter().fold(0.0, f64::max)
        })
        .collect();
    InvariantIterate { reps, diagnostics, warning, truncated }
}

/// Exact spectral radius of an integer matrix, as a float.
pub fn spectral_radius(a: &IntegerMatrix) -> f64 {
    let t = crate::scalar::int_to_f64(&a.trace());
    let d = crate::scalar::int_to_f64(a.det());
    let disc = t * t - 4.0 * d;
    if disc < 0.0 {
        d.abs().sqrt()
    } else {
        (t.abs() + disc.sqrt()) / 2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> ToricWord {
        ToricWord::parse(s).unwrap()
    }

    fn cfg() -> ActConfig {
        ActConfig::default()
    }

    fn flagship() -> IntegerMatrix {
        IntegerMatrix::from_i64(1, -2, 2, 1)
    }

    // a non-nef class on a fan with two extra rays
    fn wiggle() -> WeilClassRep {
        let fan = Fan::from_rays_i64(&[(1, 0), (1, 1), (0, 1), (-1, 2), (-1, -1)]).unwrap();
        let psi = PLFunction::new(fan, vec![rat(0, 1), rat(2, 1), rat(1, 3), rat(-1, 1), rat(5, 2)]).unwrap();
        WeilClassRep::new(psi).unwrap()
    }

    #[test]
    fn line_basics() {
        let l = WeilClassRep::line();
        assert_eq!(l.degree(), BigRational::one());
        assert!(l.is_nef() && !l.is_principal());
        assert_eq!(l.pairing(&l), BigRational::one());
        let id = pullback_monomial(&l, &IntegerMatrix::identity(), &cfg()).unwrap();
        assert_eq!(id, l);
    }

    #[test]
    fn monomial_pullback_degrees() {
        let l = WeilClassRep::line();
        assert_eq!(pullback_monomial(&l, &flagship(), &cfg()).unwrap().degree(), rat(5, 1));
        let d = pullback_monomial(&l, &IntegerMatrix::from_i64(2, 0, 0, 1), &cfg()).unwrap();
        assert_eq!(d.degree(), rat(2, 1));
        let up = pullback_monomial(&l, &IntegerMatrix::from_i64(2, 0, 0, 2), &cfg()).unwrap();
        assert_eq!(up.degree(), rat(2, 1));
        assert!(pullback_monomial(&l, &IntegerMatrix::from_i64(1, 2, 2, 4), &cfg()).is_err());
    }

    #[test]
    fn involution_pullback_is_not_functorial() {
        let l = WeilClassRep::line();
        let once = pullback_involution(&l, &cfg()).unwrap();
        assert_eq!(once.degree(), rat(2, 1));
        assert_eq!(pullback_involution(&once, &cfg()).unwrap().degree(), rat(4, 1));
        assert_eq!(pullback_word(&l, &w("g.g").reduced(), &cfg()).unwrap().degree(), BigRational::one());
    }

    #[test]
    fn principal_stays_principal() {
        let psi = PLFunction::linear(Fan::p2(), rat(3, 1), rat(-7, 2));
        let c = WeilClassRep::new(psi).unwrap();
        assert!(c.is_principal());
        let up = pullback_monomial(&c, &flagship(), &cfg()).unwrap();
        assert!(up.is_principal());
        assert!(up.degree().is_zero());
        assert!(pushforward_monomial(&c, &flagship(), &cfg()).unwrap().is_principal());
    }

    #[test]
    fn projection_formula() {
        let a = wiggle();
        let b = WeilClassRep::line().add(&wiggle().scale(&rat(1, 4)));
        for m in [flagship(), IntegerMatrix::from_i64(2, 1, 1, 1), IntegerMatrix::from_i64(0, -1, 3, 2)] {
            let lhs = pushforward_monomial(&a, &m, &cfg()).unwrap().pairing(&b);
            let rhs = a.pairing(&pullback_monomial(&b, &m, &cfg()).unwrap());
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn monomial_pushpull_is_multiplication_by_dtop() {
        let m = flagship();
        let word = w("m[1,-2;2,1]");
        for c in [WeilClassRep::line(), wiggle()] {
            let e = eminus(&c, &word, m.det(), &cfg()).unwrap();
            assert!(e.psi().values().iter().all(|x| x.is_zero()), "{e:?}");
        }
    }

    #[test]
    fn involution_composite_eminus_is_effective() {
        let e = eminus(&WeilClassRep::line(), &w("g.m[1,-2;2,1]"), &BigInt::from(5), &cfg()).unwrap();
        assert!(e.psi().values().iter().all(|x| !x.is_negative()));
    }

    #[test]
    fn nef_is_preserved() {
        let l = WeilClassRep::line();
        for s in ["m[1,-2;2,1]", "g.m[2,1;1,1]", "t[2,3].g.m[0,1;-1,1]"] {
            assert!(pullback_word(&l, &w(s), &cfg()).unwrap().is_nef(), "{s}");
        }
    }

    #[test]
    fn sequences() {
        let id = degree_sequence(&w("m[1,0;0,1]"), 4, None, &cfg());
        assert!(id.degrees.iter().all(|d| d.is_one()));
        assert_eq!(id.flags, vec!["stability not checked".to_string()]);
        let s = degree_sequence(&w("g.m[1,-2;2,1]"), 5, None, &cfg());
        let d: Vec<i64> = s.as_f64().iter().map(|x| *x as i64).collect();
        assert_eq!(d, vec![10, 66, 454, 3114, 21368]);
        for i in 0..5 {
            for j in 0..5 - i - 1 {
                assert!(s.degrees[i + j + 1] <= &s.degrees[i] * &s.degrees[j]);
            }
        }
        let est = dyn_degree_estimate(&s.degrees, &BigInt::from(5)).unwrap();
        assert!(est.within_bounds);
    }

    #[test]
    fn budget_truncates() {
        let tiny = ActConfig { ray_budget: 4, smooth: false };
        let s = degree_sequence(&w("g.m[1,-2;2,1]"), 5, None, &tiny);
        assert!(s.truncated && s.degrees.len() < 5);
    }

    #[test]
    fn spectral_radii() {
        assert!((spectral_radius(&flagship()) - 5f64.sqrt()).abs() < 1e-12);
        assert!((spectral_radius(&IntegerMatrix::from_i64(2, 1, 1, 1)) - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn invariant_iterate_settles() {
        let it = invariant_class_iterate(&w("g.m[1,-2;2,1]"), 4, &BigInt::from(5), &cfg(), Exec::Sequential);
        assert_eq!(it.reps.len(), 4);
        assert!(it.warning.is_none());
        assert!(it.diagnostics.windows(2).all(|p| p[1] < p[0]));
    }
}
