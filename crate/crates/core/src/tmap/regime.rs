use num_bigint::BigInt;
use serde::Serialize;

use super::profile::{profile, MapProfile};
use super::stability::{is_internally_stable, StabilityVerdict};
use super::word::ToricWord;
use crate::act::{degree_sequence, spectral_radius, ActConfig};
use crate::error::Result;
use crate::scalar::{int_to_f64, ratio_to_f64};
use crate::trop::{rotation_is_rational_linear, RotationClass};

/// Which dynamical regime the exact invariants place a word in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// Internally stable, trop a homeomorphism with irrational rotation.
    #[serde(rename = "ThmA")]
    IrrationalRotation,
    /// No exceptional curves: a shifted monomial map.
    #[serde(rename = "ThmC")]
    ShiftedMonomial,
    RationalRotation,
    Unclassified,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegimeReport {
    pub is_shifted_monomial: bool,
    pub trop_homeomorphism: bool,
    pub rotation: Option<RotationClass>,
    /// Exact for monomial words, otherwise the last degree ratio.
    pub lambda1: Option<f64>,
    pub lambda1_exact: bool,
    pub sqrt_dtop: f64,
    #[serde(serialize_with = "ser_big")]
    pub dtop: BigInt,
    /// λ₁² compared with dtop: "greater", "equal" or "less" (within 1e-9 relative).
    pub lambda1_sq_vs_dtop: Option<&'static str>,
    pub stability: Option<StabilityVerdict>,
    pub regime: Regime,
    pub notes: Vec<String>,
}

fn ser_big<S: serde::Serializer>(b: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&b.to_string())
}

pub fn classify_regime(w: &ToricWord, degree_budget: usize, stability_budget: u64) -> Result<RegimeReport> {
    let p = profile(w)?;
    classify_profile(&p, degree_budget, stability_budget)
}

pub fn classify_profile(p: &MapProfile, degree_budget: usize, stability_budget: u64) -> Result<RegimeReport> {
    let mut notes = p.notes.clone();
    let homeo = p.trop.is_homeomorphism();
    let rotation = match p.trop.as_linear() {
        Some(a) => rotation_is_rational_linear(a).ok(),
        None => {
            notes.push("rotation of a non-linear trop is not decided exactly".into());
            None
        }
    };
    let stability = if p.verified {
        Some(is_internally_stable(p, stability_budget)?)
    } else {
        notes.push("exc/ind unverified: stability not checked".into());
        None
    };
    let shifted = p.is_shifted_monomial() && p.verified;
    let monomial = p.word.is_monomial_only();
    let (lambda1, exact) = if monomial {
        let a = p.trop.as_linear().cloned().unwrap_or_else(crate::lattice::IntegerMatrix::identity);
        (Some(spectral_radius(&a)), true)
    } else if p.word.letters().iter().any(|g| matches!(g, super::Generator::UserBirational(_))) {
        (None, false)
    } else {
        let seq = degree_sequence(&p.word, degree_budget.max(2), stability.as_ref(), &ActConfig::default());
        let d: Vec<f64> = seq.degrees.iter().map(ratio_to_f64).collect();
        if d.len() >= 2 {
            (Some(d[d.len() - 1] / d[d.len() - 2]), false)
        } else {
            (None, false)
        }
    };
    let dt = int_to_f64(&p.dtop);
    let cmp = lambda1.map(|l| {
        let l2 = l * l;
        if (l2 - dt).abs() <= 1e-9 * dt.max(1.0) {
            "equal"
        } else if l2 > dt {
            "greater"
        } else {
            "less"
        }
    });
    let stable = stability.as_ref().is_some_and(|s| s.is_stable());
    let regime = if shifted {
        Regime::ShiftedMonomial
    } else if stable && homeo && rotation == Some(RotationClass::IrrationalCertified) {
        Regime::IrrationalRotation
    } else if homeo && matches!(rotation, Some(RotationClass::Rational { .. })) {
        Regime::RationalRotation
    } else {
        Regime::Unclassified
    };
    Ok(RegimeReport {
        is_shifted_monomial: shifted,
        trop_homeomorphism: homeo,
        rotation,
        lambda1,
        lambda1_exact: exact,
        sqrt_dtop: dt.sqrt(),
        dtop: p.dtop.clone(),
        lambda1_sq_vs_dtop: cmp,
        stability,
        regime,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_monomial_is_shifted() {
        let r = classify_regime(&ToricWord::parse("m[1,-2;2,1]").unwrap(), 4, 50).unwrap();
        assert_eq!(r.regime, Regime::ShiftedMonomial);
        assert!((r.lambda1.unwrap() - 5f64.sqrt()).abs() < 1e-12);
        assert_eq!(r.dtop, BigInt::from(5));
        assert_eq!(r.lambda1_sq_vs_dtop, Some("equal"));
    }

    #[test]
    fn flagship_irrational_rotation() {
        let r = classify_regime(&ToricWord::parse("g.m[1,-2;2,1]").unwrap(), 4, 50).unwrap();
        assert_eq!(r.regime, Regime::IrrationalRotation);
        assert!(!r.is_shifted_monomial);
        assert!(r.trop_homeomorphism);
        assert_eq!(r.rotation, Some(RotationClass::IrrationalCertified));
    }

    #[test]
    fn skew_diagonal_with_translation() {
        let r = classify_regime(&ToricWord::parse("m[2,0;0,2].t[2,3]").unwrap(), 4, 50).unwrap();
        assert!(r.is_shifted_monomial);
        assert!((r.lambda1.unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(r.dtop, BigInt::from(4));
        assert_eq!(r.lambda1_sq_vs_dtop, Some("equal"));
    }
}
