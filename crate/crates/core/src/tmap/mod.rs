//! Toric maps as words in generators: profiles, stability, regimes and the
//! tropical approximation defect.

mod defect;
mod profile;
mod regime;
mod stability;
mod word;

pub use defect::{trop_defect, DefectStats};
pub use profile::{involution_exc, involution_ind, profile, pole_character, pull_letter, push_letter, ExcCurve, IndPoint, MapProfile, PoleSet};
pub use regime::{classify_profile, classify_regime, Regime, RegimeReport};
pub use stability::{is_internally_stable, StabilityVerdict};
pub use word::{laurent_after_involution, Generator, ToricWord, UserMap};
