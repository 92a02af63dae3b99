mod common;

use common::*;
use heatlab_core::{Ball, Interval, Measure, Point};
use proptest::prelude::*;

const EPS: f64 = 1e-10;

/// Inner and outer area of `[0,1]² ∩ B(c, r)` from a dyadic grid of
/// `4^depth` squares.
fn dyadic_square_ball(c: [f64; 2], r: f64, depth: u32) -> (f64, f64) {
    let n = 1usize << depth;
    let h = 1.0 / n as f64;
    let (mut inner, mut outer) = (0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let (x0, y0) = (i as f64 * h, j as f64 * h);
            let near_x = c[0].clamp(x0, x0 + h) - c[0];
            let near_y = c[1].clamp(y0, y0 + h) - c[1];
            let far_x = (x0 - c[0]).abs().max((x0 + h - c[0]).abs());
            let far_y = (y0 - c[1]).abs().max((y0 + h - c[1]).abs());
            if far_x * far_x + far_y * far_y < r * r {
                inner += h * h;
            }
            if near_x * near_x + near_y * near_y < r * r {
                outer += h * h;
            }
        }
    }
    (inner, outer)
}

/// Bounds on the Cantor mass of `(a, b)` by enumerating level-`k` cylinders.
fn cantor_bounds(a: f64, b: f64, k: u32) -> (f64, f64) {
    let mut lefts = vec![0.0f64];
    let mut width = 1.0;
    for _ in 0..k {
        width /= 3.0;
        lefts = lefts.iter().flat_map(|&l| [l, l + 2.0 * width]).collect();
    }
    let w = 0.5f64.powi(k as i32);
    let (mut lo, mut hi) = (0.0, 0.0);
    for l in lefts {
        let r = l + width;
        if l > a && r < b {
            lo += w;
        }
        if r > a && l < b {
            hi += w;
        }
    }
    (lo, hi)
}

#[test]
fn lebesgue_ball_is_twice_radius() {
    let m = Measure::lebesgue(1).unwrap();
    for r in [1e-9, 0.25, 3.0] {
        assert_eq!(m.ball_mass(&ball1(0.0, r)).unwrap(), 2.0 * r);
    }
}

#[test]
fn indicator_half_ball_mass() {
    for h in [0.1, 0.5, 0.999] {
        assert_eq!(indicator01().ball_mass(&ball1(0.0, h)).unwrap(), h);
    }
}

#[test]
fn cantor_middle_third_is_null() {
    let m = Measure::cantor().ball_mass(&ball1(0.5, 1.0 / 6.0)).unwrap();
    assert!(m.abs() <= EPS, "{m}");
}

#[test]
fn cantor_masses_match_cylinder_enumeration() {
    let mu = Measure::cantor();
    for (c, r) in [(0.1, 0.05), (0.25, 0.1), (0.7, 0.3), (0.9, 0.013)] {
        let (lo, hi) = cantor_bounds(c - r, c + r, 16);
        let m = mu.ball_mass(&ball1(c, r)).unwrap();
        assert!(m >= lo - EPS && m <= hi + EPS, "({c}, {r}): {m} not in [{lo}, {hi}]");
    }
}

#[test]
fn square_ball_intersection_within_dyadic_bounds() {
    let mu = Measure::box_density(&[0.0, 0.0], &[1.0, 1.0], 1.0).unwrap();
    for (c, r) in [([0.0, 0.0], 0.5), ([0.5, 0.5], 0.6), ([1.1, 0.3], 0.4), ([0.2, 0.9], 0.05)] {
        let (inner, outer) = dyadic_square_ball(c, r, 9);
        let m = mu.ball_mass(&ball(&c, r)).unwrap();
        assert!(m >= inner && m <= outer, "{c:?} {r}: {m} not in [{inner}, {outer}]");
    }
}

#[test]
fn quarter_disk_is_exact() {
    let mu = Measure::box_density(&[0.0, 0.0], &[1.0, 1.0], 1.0).unwrap();
    let m = mu.ball_mass(&ball(&[0.0, 0.0], 0.5)).unwrap();
    assert!((m - std::f64::consts::PI / 16.0).abs() < EPS);
}

#[test]
fn translation_examples() {
    let d = Measure::dirac(p1(0.0)).translate(&p1(1.0)).unwrap();
    assert_eq!(d.ball_mass(&ball1(-1.0, 0.1)).unwrap(), 1.0);
    for (_, mu) in all_1d() {
        assert_eq!(mu.translate(&p1(0.0)).unwrap(), mu);
    }
    let b = indicator01().translate(&p1(1.0)).unwrap();
    assert!((b.ball_mass(&ball1(-0.5, 0.25)).unwrap() - 0.5).abs() < 1e-15);
}

#[test]
fn dilation_examples() {
    let leb = Measure::lebesgue(2).unwrap();
    assert_eq!(leb.dilate(3.7).unwrap(), leb);
    let d = Measure::dirac(p1(0.6)).dilate(2.0).unwrap();
    assert_eq!(d.atoms(), vec![(p1(0.3), 0.5)]);
    let b = indicator01().dilate(0.5).unwrap();
    // χ_[0,2] dm.
    assert!((b.ball_mass(&ball1(1.0, 1.0)).unwrap() - 2.0).abs() < 1e-15);
    assert!((b.ball_mass(&ball1(2.5, 1.0)).unwrap() - 0.5).abs() < 1e-15);
    assert!(Measure::cantor().dilate(0.0).is_err());
    assert!(Measure::cantor().dilate(f64::NAN).is_err());
}

#[test]
fn restriction_examples() {
    let r = Measure::lebesgue(1).unwrap().restrict(&ball1(0.0, 1.0)).unwrap();
    assert_eq!(r, Measure::indicator(-1.0, 1.0).unwrap());
    assert!(Measure::dirac(p1(2.0)).restrict(&ball1(0.0, 1.0)).unwrap().is_zero());
    let half = indicator01().restrict(&ball1(0.0, 0.5)).unwrap();
    assert_eq!(half, Measure::indicator(0.0, 0.5).unwrap());
}

#[test]
fn class_m_examples() {
    for n in 1..=3 {
        let c = Measure::lebesgue(n).unwrap().class_m_check(1.0);
        let want = (4.0 * std::f64::consts::PI).powf(n as f64 / 2.0);
        assert!(c.member && (c.bound - want).abs() < 1e-12 * want);
    }
    let c = Measure::point_mass(p1(0.0), 2.5).unwrap().class_m_check(0.01);
    assert!(c.member && c.bound == 2.5);
    let c = indicator01().class_m_check(0.25);
    assert!(c.member && c.bound <= 1.0);
}

#[test]
fn dimension_mismatches_are_errors() {
    let b2 = ball(&[0.0, 0.0], 1.0);
    assert!(indicator01().ball_mass(&b2).is_err());
    assert!(indicator01().translate(&Point::origin(2)).is_err());
    assert!(indicator01().restrict(&b2).is_err());
    assert!(Measure::lebesgue(4).is_err());
}

#[test]
fn half_open_intervals_respect_atoms() {
    let d = Measure::dirac(p1(0.0));
    assert_eq!(d.interval_mass(&Interval::right_of(0.0, 0.1)).unwrap(), 1.0);
    assert_eq!(d.interval_mass(&Interval::left_of(0.0, 0.1)).unwrap(), 0.0);
}

fn measure_1d() -> impl Strategy<Value = Measure> {
    (0..all_1d().len()).prop_map(|i| all_1d().swap_remove(i).1)
}

fn measure_2d() -> impl Strategy<Value = Measure> {
    (0..all_2d().len()).prop_map(|i| all_2d().swap_remove(i).1)
}

fn any_ball(dim: usize) -> impl Strategy<Value = Ball> {
    (prop::collection::vec(-2.0..2.0f64, dim), 0.01..2.0f64).prop_map(|(c, r)| Ball::new(Point::new(&c).unwrap(), r).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn positivity(mu in measure_1d(), b in any_ball(1)) {
        prop_assert!(mu.ball_mass(&b).unwrap() >= 0.0);
    }

    #[test]
    fn additivity_of_adjacent_intervals(mu in measure_1d(), a in -2.0..2.0f64, l1 in 0.01..1.0f64, l2 in 0.01..1.0f64) {
        let whole = mu.interval_mass(&Interval::right_of(a, l1 + l2)).unwrap();
        let left = mu.interval_mass(&Interval::right_of(a, l1)).unwrap();
        let right = mu.interval_mass(&Interval::right_of(a + l1, l2)).unwrap();
        prop_assert!((whole - left - right).abs() <= 3.0 * EPS + 1e-14 * whole.abs(), "{whole} vs {left} + {right}");
    }

    #[test]
    fn monotonicity(mu in measure_1d(), b in any_ball(1), grow in 1.0..3.0f64) {
        let big = Ball::new(b.center, b.radius * grow).unwrap();
        prop_assert!(mu.ball_mass(&b).unwrap() <= mu.ball_mass(&big).unwrap() + EPS);
    }

    #[test]
    fn monotonicity_2d(mu in measure_2d(), b in any_ball(2), grow in 1.0..3.0f64) {
        let big = Ball::new(b.center, b.radius * grow).unwrap();
        prop_assert!(mu.ball_mass(&b).unwrap() <= mu.ball_mass(&big).unwrap() + EPS);
    }

    #[test]
    fn dilation_consistency(mu in measure_1d(), b in any_ball(1), r in 0.1..10.0f64) {
        let lhs = mu.dilate(r).unwrap().ball_mass_with(&b, EPS).unwrap();
        let rb = Ball::new(b.center.scale(r), b.radius * r).unwrap();
        let rhs = mu.ball_mass_with(&rb, EPS).unwrap().scale(1.0 / r);
        let bound = lhs.error + rhs.error + 1e-12 * lhs.value.abs();
        prop_assert!((lhs.value - rhs.value).abs() <= bound, "{lhs:?} vs {rhs:?}");
    }

    #[test]
    fn dilation_consistency_2d(mu in measure_2d(), b in any_ball(2), r in 0.1..10.0f64) {
        let lhs = mu.dilate(r).unwrap().ball_mass_with(&b, EPS).unwrap();
        let rb = Ball::new(b.center.scale(r), b.radius * r).unwrap();
        let rhs = mu.ball_mass_with(&rb, EPS).unwrap().scale(1.0 / (r * r));
        // Certified errors scale with the mass, so compare against both bounds.
        let bound = lhs.error + rhs.error + 1e-12 * lhs.value.abs();
        prop_assert!((lhs.value - rhs.value).abs() <= bound, "{lhs:?} vs {rhs:?}");
    }

    #[test]
    fn translation_consistency(mu in measure_1d(), b in any_ball(1), x0 in -2.0..2.0f64) {
        let lhs = mu.translate(&p1(x0)).unwrap().ball_mass(&b).unwrap();
        let rhs = mu.ball_mass(&b.translated(&p1(x0))).unwrap();
        prop_assert!((lhs - rhs).abs() <= 2.0 * EPS + 1e-12 * lhs.abs(), "{lhs} vs {rhs}");
    }

    #[test]
    fn translation_consistency_2d(mu in measure_2d(), b in any_ball(2), x in -2.0..2.0f64, y in -2.0..2.0f64) {
        let x0 = Point::new(&[x, y]).unwrap();
        let lhs = mu.translate(&x0).unwrap().ball_mass(&b).unwrap();
        let rhs = mu.ball_mass(&b.translated(&x0)).unwrap();
        prop_assert!((lhs - rhs).abs() <= 2.0 * EPS + 1e-12 * lhs.abs(), "{lhs} vs {rhs}");
    }

    #[test]
    fn restriction_is_intersection(b in any_ball(1), w in any_ball(1)) {
        for (_, mu) in finite_1d() {
            let restricted = mu.restrict(&w).unwrap().ball_mass(&b).unwrap();
            let lo = (b.center.get(0) - b.radius).max(w.center.get(0) - w.radius);
            let hi = (b.center.get(0) + b.radius).min(w.center.get(0) + w.radius);
            let direct = if hi > lo { mu.ball_mass(&Ball::new(p1(0.5 * (lo + hi)), 0.5 * (hi - lo)).unwrap()).unwrap() } else { 0.0 };
            prop_assert!((restricted - direct).abs() <= 2.0 * EPS + 1e-12, "{restricted} vs {direct}");
        }
    }
}
