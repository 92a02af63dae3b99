mod common;

use common::*;
use heatlab_core::special::erf;
use heatlab_core::*;
use proptest::prelude::*;

const PHI0: f64 = 0.398_942_280_401_432_7;

fn ray_oracle(a: f64) -> f64 {
    0.5 * (1.0 + erf(a / 2.0))
}

#[test]
fn region_examples() {
    let r2 = ParabolicRegion::new(p1(0.0), 2.0).unwrap();
    let r1 = ParabolicRegion::new(p1(0.0), 1.0).unwrap();
    assert!(r2.contains(&SpaceTimePoint::scalar(1.0, 1.0).unwrap()));
    assert!(!r1.contains(&SpaceTimePoint::scalar(1.0, 1.0).unwrap()));
    assert!(r1.contains(&SpaceTimePoint::scalar(0.5, 0.3).unwrap()));
    assert!(ParabolicRegion::new(p1(0.0), 0.0).is_err());
}

#[test]
fn ray_examples() {
    let s = Settings::default();
    let l = ray_limit(&Measure::lebesgue(1).unwrap(), &ParabolicRay::scalar(0.4, 3.0), &s).unwrap();
    assert_eq!(l.value, Some(1.0));
    for a in [-2.0, -1.0, 0.0, 1.0, 2.0] {
        let e = ray_limit(&indicator01(), &ParabolicRay::scalar(0.0, a), &s).unwrap();
        assert!((e.value.unwrap() - ray_oracle(a)).abs() <= 1e-6, "{a}");
    }
    assert!((ray_oracle(2.0) - 0.921_350_396_474_857_4).abs() < 1e-15);
}

#[test]
fn parabolic_limit_examples() {
    let s = Settings::default();
    let l = parabolic_limit(&Measure::lebesgue(1).unwrap(), &ParabolicRegion::new(p1(0.0), 3.0).unwrap(), &s).unwrap();
    assert_eq!(l.limit.value, Some(1.0));
    for alpha in [1.0f64, 4.0] {
        let b = parabolic_limit(&indicator01(), &ParabolicRegion::new(p1(0.0), alpha).unwrap(), &s).unwrap();
        assert_eq!(b.limit.status, LimitStatus::NonConvergent);
        let last = b.slices.last().unwrap();
        let edge = (alpha * (1.0 - s.slice_shrink)).sqrt();
        assert!((last.sup - ray_oracle(edge)).abs() < 1e-6);
        assert!((last.inf - ray_oracle(-edge)).abs() < 1e-6);
    }
    let g = parabolic_limit(&std_gaussian(), &ParabolicRegion::new(p1(0.0), 4.0).unwrap(), &s).unwrap();
    assert!((g.limit.value.unwrap() - PHI0).abs() < 1e-6);
}

#[test]
fn parabolic_limit_in_two_dimensions() {
    let s = Settings::default();
    let g = Measure::gaussian(Point::origin(2), 1.0, 1.0).unwrap();
    let r = parabolic_limit(&g, &ParabolicRegion::new(Point::origin(2), 2.0).unwrap(), &s).unwrap();
    assert!((r.limit.value.unwrap() - 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-6);
}

/// Density `1.3 · N(0.4, 1/4)` at `0`.
const SLOPED_DENSITY: f64 = 0.753_198_037_179_855_1;
/// `1 + (2/π) e^{-1/4}`, unit-disc Lebesgue plus `2 · N((1/2, 0), 1/2)` at the origin.
const DISC_PLUS_BUMP: f64 = 1.495_799_977_238_612;

#[test]
fn limits_with_nonzero_gradient() {
    let s = Settings::default();
    let mu = Measure::gaussian(p1(0.4), 0.25, 1.3).unwrap();
    for alpha in [0.5, 1.0, 4.0, 16.0] {
        let r = parabolic_limit(&mu, &ParabolicRegion::new(p1(0.0), alpha).unwrap(), &s).unwrap();
        assert!((r.limit.value.unwrap() - SLOPED_DENSITY).abs() < 1e-6, "alpha {alpha}: {}", r.note);
    }
    for a in [-2.0, 1.0, 3.0] {
        let l = ray_limit(&mu, &ParabolicRay::scalar(0.0, a), &s).unwrap();
        assert!((l.value.unwrap() - SLOPED_DENSITY).abs() < 1e-6, "ray {a}");
    }
    let disc = Measure::lebesgue(2)
        .unwrap()
        .restrict(&ball(&[0.0, 0.0], 1.0))
        .unwrap()
        .plus(&Measure::gaussian(Point::new(&[0.5, 0.0]).unwrap(), 0.5, 2.0).unwrap())
        .unwrap();
    let r = parabolic_limit(&disc, &ParabolicRegion::new(Point::origin(2), 4.0).unwrap(), &s).unwrap();
    assert!((r.limit.value.unwrap() - DISC_PLUS_BUMP).abs() < 1e-6, "{}", r.note);
}

#[test]
fn two_ray_examples() {
    let s = Settings::default();
    let l = two_ray_test(&Measure::lebesgue(1).unwrap(), 0.0, 1.0, -1.0, &s).unwrap();
    assert_eq!(l.predicted, Some(1.0));
    let b = two_ray_test(&indicator01(), 0.0, 1.0, -1.0, &s).unwrap();
    assert_eq!(b.predicted, None);
    assert!((b.first.value.unwrap() - 0.760_249_938_906_523_3).abs() < 1e-6);
    assert!((b.second.value.unwrap() - 0.239_750_061_093_476_7).abs() < 1e-6);
    assert!((b.difference.unwrap() - erf(0.5)).abs() < 1e-4);
    let g = two_ray_test(&std_gaussian(), 0.0, 1.0, -1.0, &s).unwrap();
    assert!((g.predicted.unwrap() - PHI0).abs() < 1e-6);
}

#[test]
fn consistency_and_aperture_monotonicity() {
    let s = Settings::default();
    for (name, mu) in all_1d() {
        for x0 in [0.0, 0.5] {
            let big = parabolic_limit(&mu, &ParabolicRegion::new(p1(x0), 4.0).unwrap(), &s).unwrap();
            let Some(l) = big.limit.converged_value() else { continue };
            let small = parabolic_limit(&mu, &ParabolicRegion::new(p1(x0), 1.0).unwrap(), &s).unwrap();
            assert!((small.limit.value.unwrap() - l).abs() <= s.tol_agree, "{name} at {x0}");
            for a in [-1.9, -0.5, 0.0, 1.2] {
                let r = ray_limit(&mu, &ParabolicRay::scalar(x0, a), &s).unwrap();
                assert!((r.value.unwrap() - l).abs() <= s.tol_agree, "{name} at {x0}, ray {a}");
            }
        }
    }
}

#[test]
fn corollary_apertures() {
    let s = Settings::default();
    for mu in [Measure::lebesgue(1).unwrap(), std_gaussian(), mixture()] {
        let eta = 1.0;
        let base = parabolic_limit(&mu, &ParabolicRegion::new(p1(0.0), eta).unwrap(), &s).unwrap();
        let l = base.limit.converged_value().unwrap();
        for a in [eta / 4.0, 4.0 * eta, 16.0 * eta] {
            let r = parabolic_limit(&mu, &ParabolicRegion::new(p1(0.0), a).unwrap(), &s).unwrap();
            assert!((r.limit.value.unwrap() - l).abs() <= s.tol_agree);
        }
    }
}

proptest! {
    #[test]
    fn nonisotropic_invariance(x in -3.0..3.0f64, t in 1e-3..3.0f64, alpha in 0.1..10.0f64, r in 1e-3..1e3f64) {
        let reg = ParabolicRegion::new(p1(0.0), alpha).unwrap();
        prop_assume!((x * x - alpha * t).abs() > 1e-9 * alpha * t);
        let a = reg.contains(&SpaceTimePoint::scalar(x, t).unwrap());
        let b = reg.contains(&SpaceTimePoint::scalar(r * x, r * r * t).unwrap());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn ray_samples_lie_in_region(x0 in -2.0..2.0f64, alpha in 0.1..10.0f64, frac in -0.999..0.999f64, k in 0i32..60) {
        let reg = ParabolicRegion::new(p1(x0), alpha).unwrap();
        let ray = ParabolicRay::scalar(x0, frac * alpha.sqrt());
        let t = 0.5f64.powi(k);
        prop_assert!(ray.lies_in(&reg));
        prop_assert!(reg.contains(&ray.at(t).unwrap()));
    }
}
