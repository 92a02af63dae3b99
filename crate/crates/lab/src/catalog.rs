//! Named measures and the `(μ, x₀)` pairs used by the sweeps.

use heatlab_core::{Ball, Measure, Point, Result};

use crate::error::{LabError, LabResult};

pub const NAMES: &[&str] = &[
    "lebesgue",
    "dirac0",
    "dirac1",
    "dirac_neg_half",
    "box_unit",
    "box_sym",
    "gauss_std",
    "gauss_shifted",
    "mixture",
    "cantor",
    "restricted_gauss",
    "lebesgue2",
    "dirac2",
    "box2",
    "gauss2",
];

fn p1(x: f64) -> Point {
    Point::scalar(x)
}

fn build(name: &str) -> Result<Option<Measure>> {
    let mu = match name {
        "lebesgue" => Measure::lebesgue(1)?,
        "dirac0" => Measure::dirac(p1(0.0)),
        "dirac1" => Measure::dirac(p1(1.0)),
        "dirac_neg_half" => Measure::point_mass(p1(-0.5), 2.0)?,
        "box_unit" => Measure::indicator(0.0, 1.0)?,
        "box_sym" => Measure::box_density(&[-1.0], &[1.0], 0.5)?,
        "gauss_std" => Measure::gaussian(p1(0.0), 1.0, 1.0)?,
        "gauss_shifted" => Measure::gaussian(p1(0.4), 0.25, 1.3)?,
        "mixture" => Measure::lebesgue(1)?
            .scaled(0.3)?
            .plus(&Measure::gaussian(p1(0.0), 1.0, 1.0)?.scaled(0.7)?)?,
        "cantor" => Measure::cantor(),
        "restricted_gauss" => Measure::gaussian(p1(0.0), 1.0, 1.0)?.restrict(&Ball::new(p1(0.2), 0.6)?)?,
        "lebesgue2" => Measure::lebesgue(2)?,
        "dirac2" => Measure::dirac(Point::new(&[0.3, -0.2])?),
        "box2" => Measure::box_density(&[0.0, 0.0], &[1.0, 1.0], 1.0)?,
        "gauss2" => Measure::gaussian(Point::new(&[0.1, 0.2])?, 0.5, 1.0)?,
        _ => return Ok(None),
    };
    Ok(Some(mu))
}

/// The catalog measure called `name`.
pub fn measure(name: &str) -> LabResult<Measure> {
    build(name)?.ok_or_else(|| LabError::UnknownMeasure(name.to_string()))
}

/// Catalog entries of dimension `dim`, in catalog order.
pub fn names_of_dim(dim: usize) -> Vec<&'static str> {
    NAMES
        .iter()
        .copied()
        .filter(|n| measure(n).map(|m| m.dim() == dim).unwrap_or(false))
        .collect()
}

/// Base points at which every one-dimensional entry is probed.
pub const POINTS_1D: &[f64] = &[-0.5, 0.0, 0.25, 0.5, 1.0];

/// `(name, x₀)` pairs for the sweeps: every 1-D entry at every base point,
/// and every 2-D entry at the origin and at `(1, 0)`.
pub fn pairs() -> Vec<(&'static str, Point)> {
    let mut out = Vec::new();
    for name in names_of_dim(1) {
        for &x in POINTS_1D {
            out.push((name, p1(x)));
        }
    }
    for name in names_of_dim(2) {
        for c in [[0.0, 0.0], [1.0, 0.0]] {
            out.push((name, Point::new(&c).expect("finite")));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_name_builds() {
        for n in NAMES {
            assert!(measure(n).is_ok(), "{n}");
        }
        assert!(measure("nope").is_err());
    }

    #[test]
    fn mixture_mass_near_origin() {
        let m = measure("mixture").unwrap();
        let q = m.ball_mass(&Ball::new(p1(0.0), 1e-4).unwrap()).unwrap() / 2e-4;
        assert!((q - (0.3 + 0.7 * 0.398_942_280_401_432_7)).abs() < 1e-8);
    }
}
