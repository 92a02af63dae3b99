//! Scenario files (TOML).
//!
//! ```toml
//! experiment = "parabolic_limit"
//! dimension = 1
//! measure = "box_unit"          # a catalog name, or an array of primitive tables
//! x0 = [0.0]
//! apertures = [1.0, 4.0]
//!
//! [settings]                    # any subset of the numerical settings
//! tol_agree = 1e-4
//!
//! [output]
//! dir = "out"
//! name = "box_limit"
//! ```

use std::path::{Path, PathBuf};

use heatlab_core::{Measure, Point, Settings, SpaceTimePoint, Term};
use serde::{Deserialize, Serialize};

use crate::catalog;
use crate::error::{LabError, LabResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    EvalGrid,
    Derivative,
    Ray,
    ParabolicLimit,
    TwoRay,
    Sandwich,
    VerifyForward,
    VerifyConverse,
    Counterexample,
    Identities,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::EvalGrid => "eval_grid",
            ExperimentKind::Derivative => "derivative",
            ExperimentKind::Ray => "ray",
            ExperimentKind::ParabolicLimit => "parabolic_limit",
            ExperimentKind::TwoRay => "two_ray",
            ExperimentKind::Sandwich => "sandwich",
            ExperimentKind::VerifyForward => "verify_forward",
            ExperimentKind::VerifyConverse => "verify_converse",
            ExperimentKind::Counterexample => "counterexample",
            ExperimentKind::Identities => "identities",
        }
    }
}

/// `"lebesgue"`, any other catalog name, or a list of primitive records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MeasureDecl {
    Named(String),
    Terms(Vec<Term>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Spatial points, each with `dimension` coordinates.
    pub points: Vec<Vec<f64>>,
    pub times: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
    pub name: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub experiment: ExperimentKind,
    #[serde(default = "one")]
    pub dimension: usize,
    pub measure: Option<MeasureDecl>,
    pub x0: Option<Vec<f64>>,
    /// Apertures for `parabolic_limit` and `verify_forward`; the first is
    /// used by `sandwich`.
    pub apertures: Option<Vec<f64>>,
    /// Aperture at which `verify_converse` looks for a limit.
    pub eta: Option<f64>,
    /// Ray direction `a` for `ray`.
    pub direction: Option<Vec<f64>>,
    /// Coefficients `(a₁, a₂)` for `two_ray`.
    pub rays: Option<[f64; 2]>,
    /// Expected `|L₁ - L₂|` for `two_ray`, checked within `tol_agree`.
    pub expected_difference: Option<f64>,
    pub grid: Option<GridSpec>,
    pub seed: Option<u64>,
    pub draws: Option<usize>,
    #[serde(default)]
    pub settings: Settings,
    #[serde(default)]
    pub output: OutputSpec,
}

fn one() -> usize {
    1
}

fn bad(msg: impl Into<String>) -> LabError {
    LabError::Scenario(msg.into())
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> LabResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| LabError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let cfg: ScenarioConfig = toml::from_str(&text).map_err(|source| LabError::Parse {
            path: path.to_path_buf(),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> LabResult<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|source| LabError::Parse {
            path: PathBuf::from("<string>"),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> LabResult<()> {
        self.settings.validate()?;
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(bad(format!("{name} must be positive, got {v}")))
            }
        };
        for a in self.apertures.iter().flatten() {
            positive("aperture", *a)?;
        }
        if let Some(e) = self.eta {
            positive("eta", e)?;
        }
        if let Some([a1, a2]) = self.rays {
            if a1 == a2 || !a1.is_finite() || !a2.is_finite() {
                return Err(bad("rays must be two distinct finite coefficients"));
            }
        }
        if let Some(g) = &self.grid {
            for t in &g.times {
                positive("grid time", *t)?;
            }
            for p in &g.points {
                if p.len() != self.dimension || p.iter().any(|c| !c.is_finite()) {
                    return Err(bad(format!("grid point {p:?} is not a finite {}-vector", self.dimension)));
                }
            }
        }
        let needs_measure = !matches!(self.experiment, ExperimentKind::Counterexample | ExperimentKind::Identities);
        if needs_measure {
            let mu = self.measure()?;
            if mu.dim() != self.dimension {
                return Err(bad(format!(
                    "measure has dimension {} but dimension = {}",
                    mu.dim(),
                    self.dimension
                )));
            }
            self.x0()?;
        }
        Ok(())
    }

    pub fn measure(&self) -> LabResult<Measure> {
        match &self.measure {
            None => Err(bad(format!("experiment {} needs a measure", self.experiment.as_str()))),
            Some(MeasureDecl::Named(name)) if name == "lebesgue" => Ok(Measure::lebesgue(self.dimension)?),
            Some(MeasureDecl::Named(name)) => catalog::measure(name),
            Some(MeasureDecl::Terms(terms)) => Ok(Measure::new(self.dimension, terms.clone())?),
        }
    }

    pub fn measure_label(&self) -> String {
        match &self.measure {
            Some(MeasureDecl::Named(name)) => name.clone(),
            _ => "custom".to_string(),
        }
    }

    /// Defaults to the origin.
    pub fn x0(&self) -> LabResult<Point> {
        match &self.x0 {
            None => Ok(Point::origin(self.dimension)),
            Some(c) if c.len() == self.dimension => Ok(Point::new(c)?),
            Some(c) => Err(bad(format!("x0 {c:?} does not have {} coordinates", self.dimension))),
        }
    }

    pub fn grid_points(&self) -> LabResult<Vec<SpaceTimePoint>> {
        let g = self.grid.as_ref().ok_or_else(|| bad("eval_grid needs a [grid] table"))?;
        let mut out = Vec::with_capacity(g.points.len() * g.times.len());
        for p in &g.points {
            let x = Point::new(p)?;
            for &t in &g.times {
                out.push(SpaceTimePoint::new(x, t)?);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_and_inline_measures() {
        let named = ScenarioConfig::from_toml("experiment = \"ray\"\nmeasure = \"box_unit\"\n").unwrap();
        assert_eq!(named.measure().unwrap(), catalog::measure("box_unit").unwrap());
        let inline = ScenarioConfig::from_toml(
            "experiment = \"ray\"\n[[measure]]\nkind = \"box_density\"\nlo = [0.0]\nhi = [1]\nlevel = 1\n",
        )
        .unwrap();
        assert_eq!(inline.measure().unwrap(), named.measure().unwrap());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ScenarioConfig::from_toml("experiment = \"nope\"\nmeasure = \"lebesgue\"\n").is_err());
        assert!(ScenarioConfig::from_toml("experiment = \"ray\"\nmeasure = \"lebesgue\"\nbogus = 1\n").is_err());
        assert!(ScenarioConfig::from_toml("experiment = \"ray\"\nmeasure = \"lebesgue\"\n[settings]\ntol_agree = -1\n").is_err());
        assert!(ScenarioConfig::from_toml("experiment = \"ray\"\ndimension = 2\nmeasure = \"gauss_std\"\n").is_err());
        assert!(ScenarioConfig::from_toml("experiment = \"two_ray\"\nmeasure = \"lebesgue\"\nrays = [1.0, 1.0]\n").is_err());
    }

    #[test]
    fn partial_settings_keep_defaults() {
        let c = ScenarioConfig::from_toml("experiment = \"ray\"\nmeasure = \"lebesgue\"\n[settings]\ngrid_steps = 10\n").unwrap();
        assert_eq!(c.settings.grid_steps, 10);
        assert_eq!(c.settings.tol_agree, Settings::default().tol_agree);
    }
}
