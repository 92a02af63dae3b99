mod common;

use std::f64::consts::{E, PI};

use common::*;
use heatlab_core::*;

fn settings() -> Settings {
    Settings::default()
}

fn fam() -> BallFamily {
    BallFamily::default_for(1).unwrap()
}

const PHI0: f64 = 0.398_942_280_401_432_7;

#[test]
fn symmetric_examples() {
    let s = settings();
    let l = symmetric_derivative(&Measure::lebesgue(1).unwrap(), &p1(0.37), &s).unwrap();
    assert_eq!((l.status, l.value), (LimitStatus::Converged, Some(1.0)));
    let b = symmetric_derivative(&indicator01(), &p1(0.0), &s).unwrap();
    assert_eq!(b.status, LimitStatus::Converged);
    assert!((b.value.unwrap() - 0.5).abs() <= 1e-6);
    let d = symmetric_derivative(&Measure::dirac(p1(0.0)), &p1(0.0), &s).unwrap();
    assert_eq!(d.status, LimitStatus::Unbounded);
    let d2 = symmetric_derivative(&Measure::dirac(Point::origin(2)), &Point::origin(2), &s).unwrap();
    assert_eq!(d2.status, LimitStatus::Unbounded);
}

#[test]
fn strong_examples() {
    let s = settings();
    let l = strong_derivative(&Measure::lebesgue(1).unwrap(), &p1(-2.0), &fam(), &s).unwrap();
    assert_eq!(l.verdict, Verdict::Exists(1.0));
    let d = strong_derivative(&Measure::dirac(p1(0.0)), &p1(1.0), &fam(), &s).unwrap();
    assert_eq!(d.verdict, Verdict::Exists(0.0));
    let b = strong_derivative(&indicator01(), &p1(0.0), &fam(), &s).unwrap();
    assert_eq!(b.verdict, Verdict::DoesNotExist);
    let right = &b.strong[1];
    let left = &b.strong[2];
    assert_eq!(right.ball.center, p1(1.0));
    assert!((right.limit.value.unwrap() - 1.0).abs() <= 1e-6);
    assert!((left.limit.value.unwrap() - 0.0).abs() <= 1e-6);
}

#[test]
fn strong_in_two_dimensions() {
    let s = settings();
    let fam2 = BallFamily::default_for(2).unwrap();
    let g = Measure::gaussian(Point::origin(2), 1.0, 1.0).unwrap();
    let r = strong_derivative(&g, &Point::origin(2), &fam2, &s).unwrap();
    match r.verdict {
        Verdict::Exists(v) => assert!((v - 1.0 / (2.0 * PI)).abs() < 1e-6),
        other => panic!("{other:?}"),
    }
    // At a corner of the unit square the half-plane balls see 1 or 0.
    let sq = Measure::box_density(&[0.0, 0.0], &[1.0, 1.0], 1.0).unwrap();
    let c = strong_derivative(&sq, &Point::origin(2), &fam2, &s).unwrap();
    assert_eq!(c.verdict, Verdict::DoesNotExist);
    assert!((c.symmetric.value.unwrap() - 0.25).abs() < 1e-6);
}

#[test]
fn strong_implies_symmetric() {
    let s = settings();
    for (name, mu) in all_1d() {
        for x0 in [-0.5, 0.0, 0.25, 0.5, 1.0] {
            let r = strong_derivative(&mu, &p1(x0), &fam(), &s).unwrap();
            if let Verdict::Exists(l) = r.verdict {
                let sym = r.symmetric.value.expect("symmetric converges");
                assert!((sym - l).abs() <= s.tol_agree, "{name} at {x0}");
            }
        }
    }
}

#[test]
fn beta_examples() {
    let s = settings();
    let l = one_d_beta_derivative(&Measure::lebesgue(1).unwrap(), 3.0, &s).unwrap();
    assert_eq!(l.limit.value, Some(1.0));
    let b = one_d_beta_derivative(&indicator01(), 0.0, &s).unwrap();
    assert_eq!(b.limit.status, LimitStatus::NonConvergent);
    assert_eq!(b.right.value, Some(1.0));
    assert_eq!(b.left.value, Some(0.0));
    let g = one_d_beta_derivative(&std_gaussian(), 0.0, &s).unwrap();
    assert!((g.limit.value.unwrap() - PHI0).abs() < 1e-9);
    assert!(one_d_beta_derivative(&Measure::lebesgue(2).unwrap(), 0.0, &s).is_err());
}

#[test]
fn beta_matches_strong_on_catalog() {
    let s = settings();
    for (name, mu) in all_1d() {
        for x0 in [-0.5, 0.0, 0.25, 0.3, 0.5, 1.0] {
            let strong = strong_derivative(&mu, &p1(x0), &fam(), &s).unwrap();
            let beta = one_d_beta_derivative(&mu, x0, &s).unwrap();
            match (strong.verdict, beta.limit.converged_value()) {
                (Verdict::Exists(a), Some(b)) => assert!((a - b).abs() <= s.tol_agree, "{name} at {x0}"),
                (Verdict::Exists(_), None) | (_, Some(_)) => {
                    panic!("{name} at {x0}: {:?} vs {:?}", strong.verdict, beta.limit.status)
                }
                _ => {}
            }
        }
    }
}

#[test]
fn hl_examples() {
    let s = settings();
    let l = hl_maximal(&Measure::lebesgue(1).unwrap(), &p1(0.2), &s).unwrap();
    assert_eq!(l.value, Some(1.0));
    // Quotient 1/2 for r ≤ 1 and 1/(2r) beyond.
    let b = hl_maximal(&indicator01(), &p1(0.0), &s).unwrap();
    assert!((b.value.unwrap() - 0.5).abs() <= 1e-6);
    assert!(hl_maximal(&Measure::dirac(p1(0.0)), &p1(0.0), &s).unwrap().unbounded);
    // sup over r > 1 of 1/(2r), approached as r ↓ 1 (open balls).
    let d = hl_maximal(&Measure::dirac(p1(0.0)), &p1(1.0), &s).unwrap();
    assert!((d.value.unwrap() - 0.5).abs() <= 1e-6, "{:?}", d.value);
}

#[test]
fn hl_dense_oracle() {
    // Off-centre box: quotient (r + 0.3)/(2r) capped at 1 for r ≤ 0.3; the
    // maximum is 1. At x0 = 1.3, the quotient is (r - 0.3)/(2r) on
    // [0.3, 1.3] and 1/(2r) beyond: maximum 1/2.6 at r = 1.3.
    let s = settings();
    let a = hl_maximal(&indicator01(), &p1(0.3), &s).unwrap();
    assert!((a.value.unwrap() - 1.0).abs() <= 1e-12);
    let b = hl_maximal(&indicator01(), &p1(1.3), &s).unwrap();
    assert!((b.value.unwrap() - 1.0 / 2.6).abs() <= 1e-6, "{:?}", b.value);
    // Gaussian: the quotient is decreasing in r, so the sup is the density.
    let g = hl_maximal(&std_gaussian(), &p1(0.0), &s).unwrap();
    assert!((g.value.unwrap() - PHI0).abs() <= 1e-6);
}

#[test]
fn hl_dominates_symmetric() {
    let s = settings();
    for (name, mu) in all_1d() {
        for x0 in [-0.5, 0.0, 0.5, 1.0] {
            let sym = symmetric_derivative(&mu, &p1(x0), &s).unwrap();
            if let Some(v) = sym.converged_value() {
                let hl = hl_maximal(&mu, &p1(x0), &s).unwrap();
                assert!(hl.value.unwrap() >= v - s.tol_max, "{name} at {x0}");
            }
        }
    }
}

#[test]
fn sandwich_examples() {
    let s = settings();
    let c1 = sandwich_constant(1);
    assert!((c1 - 4.0 / (E * (4.0 * PI).sqrt())).abs() < 1e-15);
    assert!((c1 - 0.415_107).abs() < 1e-6);
    let l = sandwich_check(&Measure::lebesgue(1).unwrap(), &p1(0.0), 4.0, &s).unwrap();
    assert!(l.first_holds && l.second_holds);
    assert_eq!(l.parabolic.radial.value, Some(1.0));
    assert_eq!(l.parabolic.region.value, Some(1.0));
    let d = sandwich_check(&Measure::dirac(p1(0.0)), &p1(1.0), 1.0, &s).unwrap();
    assert!(d.first_holds && d.second_holds && !d.hl.unbounded);
    // sup_t W(1, t) = (2πe)^{-1/2}, attained at t = 1/2.
    let want = 1.0 / (2.0 * PI * E).sqrt();
    assert!((d.parabolic.radial.value.unwrap() - want).abs() < 1e-6);
    let b = sandwich_check(&indicator01(), &p1(0.0), 1.0, &s).unwrap();
    assert!(b.first_holds && b.second_holds);
    assert!((b.parabolic.radial.value.unwrap() - 0.5).abs() < 1e-6);
    assert!(b.parabolic.region.value.unwrap() >= 0.5);
    let u = sandwich_check(&Measure::dirac(p1(0.0)), &p1(0.0), 1.0, &s).unwrap();
    assert!(u.consistent && u.hl.unbounded && u.parabolic.radial.unbounded && u.parabolic.region.unbounded);
}

#[test]
fn sandwich_over_catalog() {
    let s = settings();
    for (name, mu) in all_1d() {
        for x0 in [0.0, 0.5, 1.0] {
            let r = sandwich_check(&mu, &p1(x0), 1.0, &s).unwrap();
            assert!(r.consistent && r.first_holds && r.second_holds, "{name} at {x0}: {r:?}");
        }
    }
}
