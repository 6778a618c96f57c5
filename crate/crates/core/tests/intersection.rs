use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use toricdyn::act::{pullback_word, pushforward_word, ActConfig, WeilClassRep};
use toricdyn::lattice::{Fan, LatticeVector};
use toricdyn::support::PLFunction;
use toricdyn::surface::{curve_class_from_newton, ExternalDivisor, ToricSurface};
use toricdyn::tmap::{Generator, ToricWord};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn rays() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-6i64..=6, -6i64..=6), 0..6)
}

fn fan_with(extra: &[(i64, i64)]) -> Fan {
    let mut v: Vec<(i64, i64)> = vec![(1, 0), (0, 1), (-1, -1)];
    v.extend(extra.iter().filter(|r| **r != (0, 0)));
    Fan::from_rays_i64(&v).unwrap()
}

fn rationals(n: usize) -> impl Strategy<Value = Vec<BigRational>> {
    prop::collection::vec((-20i64..=20, 1i64..=6), n).prop_map(|v| v.into_iter().map(|(a, b)| q(a, b)).collect())
}

fn monomial() -> impl Strategy<Value = Generator> {
    (-3i64..=3, -3i64..=3, -3i64..=3, -3i64..=3)
        .prop_filter("invertible", |(a, b, c, d)| a * d - b * c != 0)
        .prop_map(|(a, b, c, d)| Generator::monomial(a, b, c, d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn self_intersections_sum_identity(extra in rays()) {
        let s = ToricSurface::new(fan_with(&extra).smooth_resolution()).unwrap();
        let d = s.fan().len() as i64;
        let sum: BigInt = s.self_int().iter().sum();
        prop_assert_eq!(sum, BigInt::from(3 * d - 12));
    }

    #[test]
    fn blowup_is_an_isometry(extra in rays(), more in rays(), c in rationals(128)) {
        let y = ToricSurface::new(fan_with(&extra).smooth_resolution()).unwrap();
        let mut all: Vec<LatticeVector> = y.fan().rays().iter().map(|r| r.v().clone()).collect();
        all.extend(more.iter().filter(|r| **r != (0, 0)).map(|&(a, b)| LatticeVector::new(a, b)));
        let x = ToricSurface::new(Fan::from_rays(&all).unwrap().smooth_resolution()).unwrap();
        prop_assert!(x.dominates(&y));
        let n = y.fan().len();
        let d1 = ExternalDivisor::new(y.clone(), c[..n].to_vec()).unwrap();
        let d2 = ExternalDivisor::new(y.clone(), c[64..64 + n].to_vec()).unwrap();
        let p1 = d1.pullback_pi(&x).unwrap();
        let p2 = d2.pullback_pi(&x).unwrap();
        prop_assert_eq!(p1.intersect(&p2).unwrap(), d1.intersect(&d2).unwrap());
        prop_assert_eq!(p1.pushforward_pi(&y).unwrap(), d1);
    }

    #[test]
    fn projection_formula_for_monomial_words(
        letters in prop::collection::vec(monomial(), 1..3),
        extra in rays(),
        c in rationals(16),
    ) {
        let w = ToricWord::new(letters).unwrap();
        let cfg = ActConfig::default();
        let fan = fan_with(&extra);
        let n = fan.len();
        let a = WeilClassRep::new(PLFunction::new(fan.clone(), c[..n].to_vec()).unwrap()).unwrap();
        let b = WeilClassRep::new(PLFunction::new(fan, c[8..8 + n].to_vec()).unwrap()).unwrap();
        let lhs = pushforward_word(&a, &w, &cfg).unwrap().pairing(&b);
        let rhs = a.pairing(&pullback_word(&b, &w, &cfg).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn newton_curves_balance(pts in prop::collection::vec((-5i64..=5, -5i64..=5), 3..9)) {
        if let Ok(c) = curve_class_from_newton(&pts) {
            prop_assert!(c.balance().is_zero());
        }
    }
}

#[test]
fn principal_divisors_pair_to_zero() {
    let s = ToricSurface::new(fan_with(&[(1, 1), (-1, 2)]).smooth_resolution()).unwrap();
    let lin = PLFunction::linear(s.fan().clone(), q(2, 1), q(-5, 3));
    let d = ExternalDivisor::from_support(&lin, &s).unwrap();
    let other = ExternalDivisor::new(s.clone(), (0..s.fan().len() as i64).map(|i| q(i * i - 3, 2)).collect()).unwrap();
    assert!(d.is_principal());
    assert_eq!(d.intersect(&other).unwrap(), q(0, 1));
}
