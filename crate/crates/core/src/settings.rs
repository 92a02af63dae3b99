//! Numerical knobs shared by the estimators. Every field has a default and
//! can be overridden from a configuration file.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, require_positive, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    /// Absolute tolerance for ball masses (relative for balls of volume below one).
    pub eps_mass: f64,
    /// Tolerance for Gauss-Weierstrass evaluations.
    pub tol_eval: f64,
    /// Tolerance for the two sides of the duality identity.
    pub tol_dual: f64,
    /// Oscillation allowed over the final window of a converged sequence.
    pub tol_limit: f64,
    /// Agreement required between limits that should coincide.
    pub tol_agree: f64,
    /// Slack allowed in maximal-function comparisons.
    pub tol_max: f64,
    /// First radius / time of the geometric grids.
    pub grid_start: f64,
    /// Ratio of the geometric grids.
    pub grid_ratio: f64,
    /// Number of grid steps after the first.
    pub grid_steps: usize,
    /// Samples inspected by the limit rule.
    pub limit_window: usize,
    /// Quotient size above which steady growth is called unbounded.
    pub unbounded_threshold: f64,
    /// Sample points per axis on a parabolic slice.
    pub slice_points: usize,
    /// Relative shrink of slice radii to stay inside the open region.
    pub slice_shrink: f64,
    /// Golden-section iterations used when refining extrema.
    pub golden_iterations: usize,
    /// Exponent range of the dyadic radius grid for the maximal function.
    pub hl_min_exp: i32,
    pub hl_max_exp: i32,
    /// Time range and density of the sampler for parabolic suprema.
    pub sup_t_min: f64,
    pub sup_t_max: f64,
    pub sup_per_decade: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            eps_mass: 1e-10,
            tol_eval: 1e-8,
            tol_dual: 1e-7,
            tol_limit: 1e-6,
            tol_agree: 1e-4,
            tol_max: 1e-6,
            grid_start: 1.0,
            grid_ratio: 0.5,
            grid_steps: 40,
            limit_window: 5,
            unbounded_threshold: 1e12,
            slice_points: 33,
            slice_shrink: 1e-3,
            golden_iterations: 20,
            hl_min_exp: -40,
            hl_max_exp: 20,
            sup_t_min: 1e-12,
            sup_t_max: 1e4,
            sup_per_decade: 8,
        }
    }
}

impl Settings {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eps_mass", self.eps_mass),
            ("tol_eval", self.tol_eval),
            ("tol_dual", self.tol_dual),
            ("tol_limit", self.tol_limit),
            ("tol_agree", self.tol_agree),
            ("tol_max", self.tol_max),
            ("grid_start", self.grid_start),
            ("unbounded_threshold", self.unbounded_threshold),
            ("sup_t_min", self.sup_t_min),
            ("sup_t_max", self.sup_t_max),
        ] {
            require_positive(name, v)?;
        }
        if !(self.grid_ratio > 0.0 && self.grid_ratio < 1.0) {
            return Err(invalid("grid_ratio", "must lie in (0, 1)"));
        }
        if !(self.slice_shrink >= 0.0 && self.slice_shrink < 1.0) {
            return Err(invalid("slice_shrink", "must lie in [0, 1)"));
        }
        if self.limit_window < 3 || self.grid_steps + 1 < self.limit_window {
            return Err(invalid("limit_window", "need at least 3 samples and no more than the grid holds"));
        }
        if self.slice_points < 3 {
            return Err(invalid("slice_points", "need at least 3"));
        }
        if self.hl_min_exp >= self.hl_max_exp || self.sup_t_min >= self.sup_t_max || self.sup_per_decade == 0 {
            return Err(invalid("grid", "empty search range"));
        }
        Ok(())
    }

    /// `grid_start · grid_ratio^k` for `k = 0..=grid_steps`.
    pub fn geometric_grid(&self) -> Vec<f64> {
        (0..=self.grid_steps)
            .map(|k| self.grid_start * self.grid_ratio.powi(k as i32))
            .collect()
    }
}
