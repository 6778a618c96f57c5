//! Internal stability: no forward image of an exceptional curve ever lands
//! on an indeterminacy point.

use serde::Serialize;

use super::profile::{MapProfile, PoleSet};
use crate::error::{Error, Result};
use crate::lattice::{primitive, IntegerMatrix, PrimitiveRay};
use crate::trop::{rotation_is_rational_linear, RotationClass};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum StabilityVerdict {
    CertifiedStable { reason: String },
    Unstable { n: u64 },
    BoundedOk { n: u64 },
}

impl StabilityVerdict {
    pub fn is_stable(&self) -> bool {
        !matches!(self, StabilityVerdict::Unstable { .. })
    }

    pub fn covers(&self, n: u64) -> bool {
        match self {
            StabilityVerdict::CertifiedStable { .. } => true,
            StabilityVerdict::BoundedOk { n: m } => *m >= n,
            StabilityVerdict::Unstable { .. } => false,
        }
    }
}

const ANCHOR_RANGE: i64 = 64;

fn rational_angle(r: &PrimitiveRay) -> bool {
    let v = r.v();
    matches!(v.to_i64(), Some((a, b)) if a.abs() <= 1 && b.abs() <= 1)
}

/// s with A^s τ on an axis or diagonal, searching |s| ≤ ANCHOR_RANGE.
fn anchor(a: &IntegerMatrix, r: &PrimitiveRay) -> Option<(i64, PrimitiveRay)> {
    if rational_angle(r) {
        return Some((0, r.clone()));
    }
    let mut fwd = r.clone();
    let mut back = r.clone();
    for s in 1..=ANCHOR_RANGE {
        fwd = primitive(&a.apply(fwd.v())).ok()?;
        if rational_angle(&fwd) {
            return Some((s, fwd));
        }
        back = a.preimage_ray(back.v()).ok()?;
        if rational_angle(&back) {
            return Some((-s, back));
        }
    }
    None
}

fn push_n(p: &MapProfile, s: &PoleSet, n: i64) -> Result<PoleSet> {
    let mut cur = s.clone();
    for _ in 0..n {
        cur = p.push(&cur)?;
    }
    Ok(cur)
}

/// Ray-first exact check with point-level descent on ray collisions.
pub fn is_internally_stable(p: &MapProfile, budget: u64) -> Result<StabilityVerdict> {
    if !p.verified {
        return Err(Error::Unverified(p.notes.join("; ")));
    }
    if p.exc.is_empty() {
        return Ok(StabilityVerdict::CertifiedStable { reason: "no exceptional curves".into() });
    }
    let images: Vec<&PoleSet> = p.exc.iter().map(|e| &e.image).collect();
    let ind: Vec<&PoleSet> = p.ind.iter().map(|i| &i.point).collect();
    if ind.is_empty() {
        return Ok(StabilityVerdict::CertifiedStable { reason: "no indeterminacy points".into() });
    }
    if let Some(a) = p.trop.as_linear() {
        if a.is_gaussian() && rotation_is_rational_linear(a)? == RotationClass::IrrationalCertified {
            let ea: Option<Vec<_>> = images.iter().map(|s| anchor(a, &s.ray)).collect();
            let ia: Option<Vec<_>> = ind.iter().map(|s| anchor(a, &s.ray)).collect();
            if let (Some(ea), Some(ia)) = (ea, ia) {
                let mut first: Option<u64> = None;
                for (e, (se, re)) in images.iter().zip(&ea) {
                    for (q, (si, ri)) in ind.iter().zip(&ia) {
                        let k = se - si;
                        if re != ri || k < 0 {
                            continue;
                        }
                        let moved = push_n(p, e, k)?;
                        if moved.meets(q) {
                            let n = k as u64 + 1;
                            first = Some(first.map_or(n, |m| m.min(n)));
                        }
                    }
                }
                return Ok(match first {
                    Some(n) => StabilityVerdict::Unstable { n },
                    None => StabilityVerdict::CertifiedStable {
                        reason: "conformal tropicalization with irrational rotation; all rays anchored at rational angles".into(),
                    },
                });
            }
        }
    }
    let mut cur: Vec<PoleSet> = images.into_iter().cloned().collect();
    for n in 1..=budget {
        for e in &cur {
            if ind.iter().any(|q| q.meets(e)) {
                return Ok(StabilityVerdict::Unstable { n });
            }
        }
        if n < budget {
            cur = cur.iter().map(|e| p.push(e)).collect::<Result<_>>()?;
        }
    }
    Ok(StabilityVerdict::BoundedOk { n: budget })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tmap::{profile, ToricWord};

    fn verdict(s: &str, n: u64) -> StabilityVerdict {
        is_internally_stable(&profile(&ToricWord::parse(s).unwrap()).unwrap(), n).unwrap()
    }

    #[test]
    fn verdicts() {
        assert!(matches!(verdict("g.m[1,-2;2,1]", 20), StabilityVerdict::CertifiedStable { .. }));
        assert!(matches!(verdict("m[1,-2;2,1]", 20), StabilityVerdict::CertifiedStable { .. }));
        assert_eq!(verdict("g.m[2,0;0,2]", 20), StabilityVerdict::Unstable { n: 1 });
        assert_eq!(verdict("g", 20), StabilityVerdict::Unstable { n: 1 });
        assert!(verdict("m[1,-2;2,1].g", 20).is_stable());
    }

    #[test]
    fn bounded_search_finds_late_collision() {
        // -I swaps opposite rays; the identity-rotation word never moves its rays
        let v = verdict("g.m[-1,0;0,-1]", 10);
        assert!(matches!(v, StabilityVerdict::BoundedOk { n: 10 } | StabilityVerdict::Unstable { .. }));
        let v = verdict("g.m[3,0;0,3]", 10);
        assert_eq!(v, StabilityVerdict::Unstable { n: 1 });
    }
}
