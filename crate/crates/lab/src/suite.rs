//! Built-in scenario sets, and dispatch of a scenario file to its
//! experiment.

use heatlab_core::{ParabolicRay, Point, Settings, SpaceTimePoint};

use crate::catalog;
use crate::config::{ExperimentKind, ScenarioConfig};
use crate::error::{LabError, LabResult};
use crate::experiments::*;

pub const FORWARD_APERTURES: [f64; 4] = [0.5, 1.0, 4.0, 16.0];
pub const DEFAULT_DRAWS: usize = 100;
/// Measures whose strong derivative at the origin exists and is not zero.
pub const SMOOTH_AT_ORIGIN: [&str; 3] = ["lebesgue", "gauss_std", "mixture"];

fn origin() -> Point {
    Point::scalar(0.0)
}

/// Lebesgue measure on 10 × 10 space-time grids in one and two dimensions,
/// and `χ_[0,1] dm` on a small grid.
pub fn eval(s: &Settings) -> LabResult<Outcome> {
    let mut out = Outcome::default();
    let times: Vec<f64> = (0..10).map(|k| 2.0f64.powi(2 - 2 * k)).collect();
    for dim in [1usize, 2] {
        let mu = heatlab_core::Measure::lebesgue(dim)?;
        let mut points = Vec::new();
        for i in 0..10 {
            let c = -3.0 + 6.0 * i as f64 / 9.0;
            let x = if dim == 1 {
                Point::scalar(c)
            } else {
                Point::new(&[c, 0.5 * c - 1.0])?
            };
            for &t in &times {
                points.push(SpaceTimePoint::new(x, t)?);
            }
        }
        out.push(run_eval_grid(&format!("eval_lebesgue_{dim}d"), "lebesgue", &mu, &points, s)?);
    }
    let mu = catalog::measure("box_unit")?;
    let mut points = Vec::new();
    for x in [-1.0, -0.5, 0.0, 0.5, 1.0, 1.5] {
        for t in [1.0, 0.25, 0.0625, 0.01] {
            points.push(SpaceTimePoint::scalar(x, t)?);
        }
    }
    out.push(run_eval_grid("eval_box_unit", "box_unit", &mu, &points, s)?);
    Ok(out)
}

/// Every one-dimensional catalog pair.
pub fn cases_1d() -> LabResult<Vec<(String, heatlab_core::Measure, Point)>> {
    let mut out = Vec::new();
    for (name, x0) in catalog::pairs() {
        if x0.dim() == 1 {
            out.push((name.to_string(), catalog::measure(name)?, x0));
        }
    }
    Ok(out)
}

/// Every catalog pair.
pub fn cases_all() -> LabResult<Vec<(String, heatlab_core::Measure, Point)>> {
    catalog::pairs()
        .into_iter()
        .map(|(name, x0)| Ok((name.to_string(), catalog::measure(name)?, x0)))
        .collect()
}

/// `χ_[0,1] dm` at `0`, and the distribution-function sweep over the 1-D
/// catalog.
pub fn derivative(s: &Settings) -> LabResult<Outcome> {
    let mut out = Outcome::default();
    out.push(run_derivative(
        "derivative_box_unit",
        "box_unit",
        &catalog::measure("box_unit")?,
        &origin(),
        s,
    )?);
    out.push(run_beta_sweep("distribution_function_sweep", &cases_1d()?, s)?);
    Ok(out)
}

pub fn ray(s: &Settings) -> LabResult<Outcome> {
    let mut out = Outcome::default();
    out.push(run_ray(
        "ray_gauss_std",
        "gauss_std",
        &catalog::measure("gauss_std")?,
        &ParabolicRay::scalar(0.0, 1.0),
        s,
    )?);
    Ok(out)
}

pub fn limit(s: &Settings) -> LabResult<Outcome> {
    let mut out = Outcome::default();
    for name in ["gauss_std", "box_unit"] {
        out.push(run_parabolic_limit(
            &format!("limit_{name}"),
            name,
            &catalog::measure(name)?,
            &origin(),
            &FORWARD_APERTURES,
            s,
        )?);
    }
    Ok(out)
}

/// Rays `a = ±1` at the origin for the standard Gaussian and for
/// `χ_[0,1] dm`, whose ray limits differ by `erf(1/2)`.
pub fn two_ray(s: &Settings) -> LabResult<Outcome> {
    let mut out = Outcome::default();
    out.push(run_two_ray(
        "two_ray_gauss_std",
        "gauss_std",
        &catalog::measure("gauss_std")?,
        0.0,
        (1.0, -1.0),
        Some(0.0),
        s,
    )?);
    out.push(run_two_ray(
        "two_ray_box_unit",
        "box_unit",
        &catalog::measure("box_unit")?,
        0.0,
        (1.0, -1.0),
        Some(heatlab_core::special::erf(0.5)),
        s,
    )?);
    Ok(out)
}

pub fn sandwich(s: &Settings) -> LabResult<Outcome> {
    let mut out = Outcome::default();
    out.push(run_sandwich("sandwich_catalog", &cases_all()?, 1.0, s)?);
    Ok(out)
}

/// Forward and converse checks at the origin for the smooth measures, and
/// forward checks for a shifted Gaussian at `0` and for `δ_0` at `1`.
pub fn verify(s: &Settings) -> LabResult<Outcome> {
    let mut out = Outcome::default();
    for name in SMOOTH_AT_ORIGIN {
        let mu = catalog::measure(name)?;
        out.push(run_verify_forward(&format!("forward_{name}"), name, &mu, &origin(), &FORWARD_APERTURES, s)?);
    }
    out.push(run_verify_forward(
        "forward_gauss_shifted",
        "gauss_shifted",
        &catalog::measure("gauss_shifted")?,
        &origin(),
        &FORWARD_APERTURES,
        s,
    )?);
    out.push(run_verify_forward(
        "forward_dirac0_at_1",
        "dirac0",
        &catalog::measure("dirac0")?,
        &Point::scalar(1.0),
        &FORWARD_APERTURES,
        s,
    )?);
    for name in SMOOTH_AT_ORIGIN {
        let mu = catalog::measure(name)?;
        out.push(run_verify_converse(&format!("converse_{name}"), name, &mu, &origin(), 1.0, s)?);
    }
    out.push(run_verify_converse(
        "converse_mixture_eta_2",
        "mixture",
        &catalog::measure("mixture")?,
        &origin(),
        2.0,
        s,
    )?);
    out.push(run_verify_converse(
        "converse_box_unit",
        "box_unit",
        &catalog::measure("box_unit")?,
        &origin(),
        1.0,
        s,
    )?);
    Ok(out)
}

pub fn counterexample(s: &Settings) -> LabResult<Outcome> {
    let mut out = Outcome::default();
    out.push(run_counterexample(s)?);
    Ok(out)
}

pub fn identities(seed: u64, s: &Settings) -> LabResult<Outcome> {
    let mut out = Outcome::default();
    out.push(run_identities(seed, DEFAULT_DRAWS, s)?);
    Ok(out)
}

/// Every built-in set, in a fixed order.
pub fn all(seed: u64, s: &Settings) -> LabResult<Outcome> {
    let mut out = Outcome::default();
    out.extend(eval(s)?);
    out.extend(counterexample(s)?);
    out.extend(verify(s)?);
    out.extend(two_ray(s)?);
    out.extend(identities(seed, s)?);
    out.extend(sandwich(s)?);
    out.extend(derivative(s)?);
    out.extend(ray(s)?);
    out.extend(limit(s)?);
    Ok(out)
}

/// Runs the single experiment described by a scenario file.
pub fn from_config(cfg: &ScenarioConfig, seed: u64, s: &Settings) -> LabResult<Outcome> {
    let name = cfg.output.name.clone().unwrap_or_else(|| cfg.experiment.as_str().to_string());
    let missing = |what: &str| LabError::Scenario(format!("{} needs `{what}`", cfg.experiment.as_str()));
    let mut out = Outcome::default();
    if cfg.experiment == ExperimentKind::Counterexample {
        out.push(run_counterexample(s)?);
        return Ok(out);
    }
    if cfg.experiment == ExperimentKind::Identities {
        out.push(run_identities(seed, cfg.draws.unwrap_or(DEFAULT_DRAWS), s)?);
        return Ok(out);
    }
    let mu = cfg.measure()?;
    let label = cfg.measure_label();
    let x0 = cfg.x0()?;
    let apertures = cfg.apertures.clone().unwrap_or_else(|| FORWARD_APERTURES.to_vec());
    let run = match cfg.experiment {
        ExperimentKind::EvalGrid => run_eval_grid(&name, &label, &mu, &cfg.grid_points()?, s)?,
        ExperimentKind::Derivative => run_derivative(&name, &label, &mu, &x0, s)?,
        ExperimentKind::Ray => {
            let dir = cfg.direction.clone().ok_or_else(|| missing("direction"))?;
            let ray = ParabolicRay::new(x0, Point::new(&dir)?)?;
            run_ray(&name, &label, &mu, &ray, s)?
        }
        ExperimentKind::ParabolicLimit => run_parabolic_limit(&name, &label, &mu, &x0, &apertures, s)?,
        ExperimentKind::TwoRay => {
            let [a1, a2] = cfg.rays.ok_or_else(|| missing("rays"))?;
            if cfg.dimension != 1 {
                return Err(LabError::Scenario("two_ray is one-dimensional".into()));
            }
            run_two_ray(&name, &label, &mu, x0.get(0), (a1, a2), cfg.expected_difference, s)?
        }
        ExperimentKind::Sandwich => {
            let alpha = apertures.first().copied().unwrap_or(1.0);
            run_sandwich(&name, &[(label.clone(), mu.clone(), x0)], alpha, s)?
        }
        ExperimentKind::VerifyForward => run_verify_forward(&name, &label, &mu, &x0, &apertures, s)?,
        ExperimentKind::VerifyConverse => {
            run_verify_converse(&name, &label, &mu, &x0, cfg.eta.unwrap_or(1.0), s)?
        }
        ExperimentKind::Counterexample | ExperimentKind::Identities => unreachable!("handled above"),
    };
    out.push(run);
    Ok(out)
}
