//! Parabolic regions `P(x₀, α) = {(x, t) : |x - x₀|² < αt}`, rays inside
//! them, and limits of heat fields as `(x, t) → (x₀, 0)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::derivative::slice_offsets;
use crate::error::{invalid, require_positive, Error, Result};
use crate::geometry::{same_dim, Point};
use crate::heat::{gw_eval_rel, SpaceTimePoint};
use crate::limit::{LimitEstimate, LimitRule, LimitStatus};
use crate::measure::Measure;
use crate::quad::golden_max;
use crate::settings::Settings;

/// Relative accuracy of field evaluations along rays and slices.
const REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParabolicRegion {
    pub vertex: Point,
    pub aperture: f64,
}

impl ParabolicRegion {
    pub fn new(vertex: Point, aperture: f64) -> Result<Self> {
        require_positive("aperture", aperture)?;
        Ok(Self { vertex, aperture })
    }

    pub fn contains(&self, p: &SpaceTimePoint) -> bool {
        p.x.dim() == self.vertex.dim() && p.x.dist_sq(&self.vertex) < self.aperture * p.t
    }
}

/// `t ↦ (x₀ + a√t, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParabolicRay {
    pub vertex: Point,
    pub direction: Point,
}

impl ParabolicRay {
    pub fn new(vertex: Point, direction: Point) -> Result<Self> {
        same_dim(vertex.dim(), direction.dim())?;
        Ok(Self { vertex, direction })
    }

    pub fn scalar(x0: f64, a: f64) -> Self {
        Self {
            vertex: Point::scalar(x0),
            direction: Point::scalar(a),
        }
    }

    pub fn at(&self, t: f64) -> Result<SpaceTimePoint> {
        SpaceTimePoint::new(self.vertex.add(&self.direction.scale(t.sqrt())), t)
    }

    /// The ray lies in `P(x₀, α)` exactly when `|a|² < α`.
    pub fn lies_in(&self, region: &ParabolicRegion) -> bool {
        self.vertex == region.vertex && self.direction.norm_sq() < region.aperture
    }
}

/// `lim_{t→0} Wμ(x₀ + a√t, t)` on the geometric time grid.
pub fn ray_limit(mu: &Measure, ray: &ParabolicRay, s: &Settings) -> Result<LimitEstimate> {
    same_dim(mu.dim(), ray.vertex.dim())?;
    let grid = s.geometric_grid();
    let samples: Vec<(f64, f64)> = grid
        .par_iter()
        .map(|&t| Ok((t, gw_eval_rel(mu, &ray.at(t)?, s.tol_eval, REL_TOL)?.value)))
        .collect::<Result<_>>()?;
    Ok(LimitRule::from_settings(s).classify(samples))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SliceRange {
    pub t: f64,
    pub inf: f64,
    pub sup: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionLimitReport {
    pub region: ParabolicRegion,
    pub slices: Vec<SliceRange>,
    /// Limit of the slice midpoints `(sup + inf) / 2`.
    pub limit: LimitEstimate,
    pub note: String,
}

fn slice_range(mu: &Measure, region: &ParabolicRegion, t: f64, s: &Settings) -> Result<SliceRange> {
    let rho = (region.aperture * t * (1.0 - s.slice_shrink)).sqrt();
    let x0 = region.vertex;
    let eval = |x: &Point| -> Result<f64> { Ok(gw_eval_rel(mu, &SpaceTimePoint::new(*x, t)?, s.tol_eval, REL_TOL)?.value) };
    let offsets = slice_offsets(mu.dim(), s.slice_points);
    let values: Vec<f64> = offsets.iter().map(|o| eval(&x0.add(&o.scale(rho)))).collect::<Result<_>>()?;
    let mut sup = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut inf = values.iter().copied().fold(f64::INFINITY, f64::min);
    if mu.dim() == 1 {
        // Refine both extrema between the neighbouring samples.
        let c = x0.get(0);
        let xs: Vec<f64> = offsets.iter().map(|o| c + rho * o.get(0)).collect();
        let imax = argbest(&values, |a, b| a > b);
        let imin = argbest(&values, |a, b| a < b);
        let bracket = |i: usize| (xs[i.saturating_sub(1)], xs[(i + 1).min(xs.len() - 1)]);
        let mut failure = None;
        let mut f1 = |x: f64, sign: f64| match eval(&Point::scalar(x)) {
            Ok(v) => sign * v,
            Err(e) => {
                failure = Some(e);
                f64::NEG_INFINITY
            }
        };
        let (a, b) = bracket(imax);
        let (_, hi, _) = golden_max(|x| f1(x, 1.0), a, b, s.golden_iterations);
        let (a, b) = bracket(imin);
        let (_, lo, _) = golden_max(|x| f1(x, -1.0), a, b, s.golden_iterations);
        if let Some(e) = failure {
            return Err(e);
        }
        sup = sup.max(hi);
        inf = inf.min(-lo);
    }
    Ok(SliceRange { t, inf, sup })
}

fn argbest(v: &[f64], better: impl Fn(f64, f64) -> bool) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if better(*x, v[best]) {
            best = i;
        }
    }
    best
}

/// Limit of `Wμ(x, t)` as `(x, t) → (x₀, 0)` inside `P(x₀, α)`, from the
/// range of the field over shrinking slices `|x - x₀|² ≤ α t (1 - δ)`.
///
/// Converged when the slice midpoints converge and the slice widths
/// converge to at most `10 · tol_limit`; non-convergent when the final
/// slices all keep a width above `3 · tol_agree`. The slices are finite samples of the
/// region, so convergence is evidence rather than proof.
pub fn parabolic_limit(mu: &Measure, region: &ParabolicRegion, s: &Settings) -> Result<RegionLimitReport> {
    same_dim(mu.dim(), region.vertex.dim())?;
    let grid = s.geometric_grid();
    let slices: Vec<SliceRange> = grid
        .par_iter()
        .map(|&t| slice_range(mu, region, t, s))
        .collect::<Result<_>>()?;
    let rule = LimitRule::from_settings(s);
    let mids: Vec<(f64, f64)> = slices.iter().map(|r| (r.t, 0.5 * (r.sup + r.inf))).collect();
    let mut limit = rule.classify(mids);
    let widths = rule.classify(slices.iter().map(|r| (r.t, r.sup - r.inf)).collect());
    let width_limit = widths.converged_value().filter(|w| w.abs() <= 10.0 * s.tol_limit);
    let k = s.limit_window.min(slices.len());
    let tail = &slices[slices.len() - k..];
    let narrowest = tail.iter().map(|r| r.sup - r.inf).fold(f64::INFINITY, f64::min);
    let note;
    if limit.status == LimitStatus::Converged && width_limit.is_none() {
        limit.status = LimitStatus::NonConvergent;
        limit.value = None;
        let last = tail.last().map(|r| r.sup - r.inf).unwrap_or(f64::NAN);
        note = format!("midpoints settle but slices do not shrink to a point ({last:.3e} wide)");
    } else if limit.status != LimitStatus::Unbounded && narrowest > 3.0 * s.tol_agree {
        limit.status = LimitStatus::NonConvergent;
        limit.value = None;
        note = format!("field oscillates by at least {narrowest:.6} on the final slices");
    } else {
        note = match limit.status {
            LimitStatus::Converged => "converged on sampled slices; evidence rather than proof".into(),
            LimitStatus::Unbounded => "field grows without bound towards the vertex".into(),
            LimitStatus::NonConvergent => "no stable value on the final slices".into(),
        };
    }
    Ok(RegionLimitReport {
        region: *region,
        slices,
        limit,
        note,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoRayReport {
    pub a1: f64,
    pub a2: f64,
    pub first: LimitEstimate,
    pub second: LimitEstimate,
    /// `|L₁ - L₂|` when both rays converge.
    pub difference: Option<f64>,
    /// The common limit, when both rays converge to values within
    /// `tol_agree`; it is then the predicted derivative and parabolic limit.
    pub predicted: Option<f64>,
}

/// Limits along the rays with coefficients `a1 ≠ a2` through `x₀ ∈ ℝ`.
pub fn two_ray_test(mu: &Measure, x0: f64, a1: f64, a2: f64, s: &Settings) -> Result<TwoRayReport> {
    if mu.dim() != 1 {
        return Err(Error::Unsupported("the two-ray test is one-dimensional".into()));
    }
    if a1 == a2 || !a1.is_finite() || !a2.is_finite() {
        return Err(invalid("a2", "ray coefficients must be finite and distinct"));
    }
    let first = ray_limit(mu, &ParabolicRay::scalar(x0, a1), s)?;
    let second = ray_limit(mu, &ParabolicRay::scalar(x0, a2), s)?;
    let difference = match (first.converged_value(), second.converged_value()) {
        (Some(u), Some(v)) => Some((u - v).abs()),
        _ => None,
    };
    let predicted = match difference {
        Some(d) if d <= s.tol_agree => first.value,
        _ => None,
    };
    Ok(TwoRayReport {
        a1,
        a2,
        first,
        second,
        difference,
        predicted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_is_excluded() {
        let r = ParabolicRegion::new(Point::scalar(0.0), 1.0).unwrap();
        assert!(!r.contains(&SpaceTimePoint::scalar(1.0, 1.0).unwrap()));
        assert!(r.contains(&SpaceTimePoint::scalar(0.5, 0.3).unwrap()));
        let r2 = ParabolicRegion::new(Point::scalar(0.0), 2.0).unwrap();
        assert!(r2.contains(&SpaceTimePoint::scalar(1.0, 1.0).unwrap()));
    }

    #[test]
    fn equal_rays_rejected() {
        let mu = Measure::lebesgue(1).unwrap();
        assert!(two_ray_test(&mu, 0.0, 1.0, 1.0, &Settings::default()).is_err());
    }
}
