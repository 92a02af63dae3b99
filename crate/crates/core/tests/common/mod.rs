#![allow(dead_code)]

use heatlab_core::{Ball, Measure, Point};

pub fn p1(x: f64) -> Point {
    Point::scalar(x)
}

pub fn ball1(c: f64, r: f64) -> Ball {
    Ball::new(Point::scalar(c), r).unwrap()
}

pub fn ball(c: &[f64], r: f64) -> Ball {
    Ball::new(Point::new(c).unwrap(), r).unwrap()
}

pub fn indicator01() -> Measure {
    Measure::indicator(0.0, 1.0).unwrap()
}

pub fn std_gaussian() -> Measure {
    Measure::gaussian(p1(0.0), 1.0, 1.0).unwrap()
}

pub fn mixture() -> Measure {
    Measure::lebesgue(1)
        .unwrap()
        .scaled(0.3)
        .unwrap()
        .plus(&std_gaussian().scaled(0.7).unwrap())
        .unwrap()
}

/// Finite-mass one-dimensional measures of every primitive kind.
pub fn finite_1d() -> Vec<(&'static str, Measure)> {
    vec![
        ("dirac0", Measure::dirac(p1(0.0))),
        ("dirac_half", Measure::point_mass(p1(-0.5), 2.0).unwrap()),
        ("box", indicator01()),
        ("box_wide", Measure::box_density(&[-1.5], &[0.5], 0.7).unwrap()),
        ("gauss", std_gaussian()),
        ("gauss_shifted", Measure::gaussian(p1(0.4), 0.25, 1.3).unwrap()),
        ("cantor", Measure::cantor()),
        (
            "restricted_gauss",
            std_gaussian().restrict(&ball1(0.2, 0.6)).unwrap(),
        ),
    ]
}

pub fn all_1d() -> Vec<(&'static str, Measure)> {
    let mut v = finite_1d();
    v.push(("lebesgue", Measure::lebesgue(1).unwrap()));
    v.push(("mixture", mixture()));
    v
}

pub fn all_2d() -> Vec<(&'static str, Measure)> {
    vec![
        ("lebesgue2", Measure::lebesgue(2).unwrap()),
        ("dirac2", Measure::dirac(Point::new(&[0.3, -0.2]).unwrap())),
        ("box2", Measure::box_density(&[0.0, 0.0], &[1.0, 1.0], 1.0).unwrap()),
        ("gauss2", Measure::gaussian(Point::new(&[0.1, 0.2]).unwrap(), 0.5, 1.0).unwrap()),
        (
            "restricted_lebesgue2",
            Measure::lebesgue(2).unwrap().restrict(&ball(&[0.0, 0.0], 1.0)).unwrap(),
        ),
    ]
}
