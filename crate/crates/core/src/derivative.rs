//! Symmetric and strong derivatives of measures, the Hardy-Littlewood and
//! parabolic maximal functions, and one-sided difference quotients of the
//! distribution function in one dimension.

use std::f64::consts::{E, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, require_positive, Error, Result};
use crate::geometry::{same_dim, unit_ball_volume, Ball, Interval, Point};
use crate::heat::{gw_eval_rel, SpaceTimePoint};
use crate::limit::{LimitEstimate, LimitRule, LimitStatus};
use crate::measure::Measure;
use crate::quad::golden_max;
use crate::settings::Settings;

/// Relative accuracy of heat evaluations inside maximal-function searches.
const SUP_REL_TOL: f64 = 1e-9;
const SUP_ABS_TOL: f64 = 1e-12;

/// Test shapes `B` for the quotients `μ(x₀ + rB) / m(rB)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Ball>", into = "Vec<Ball>")]
pub struct BallFamily {
    balls: Vec<Ball>,
}

impl TryFrom<Vec<Ball>> for BallFamily {
    type Error = Error;
    fn try_from(balls: Vec<Ball>) -> Result<Self> {
        BallFamily::new(balls)
    }
}

impl From<BallFamily> for Vec<Ball> {
    fn from(f: BallFamily) -> Self {
        f.balls
    }
}

impl BallFamily {
    /// Requires the unit ball about the origin and two disjoint balls that
    /// avoid the origin.
    pub fn new(balls: Vec<Ball>) -> Result<Self> {
        let Some(first) = balls.first() else {
            return Err(invalid("balls", "family is empty"));
        };
        let n = first.dim();
        for b in &balls {
            same_dim(n, b.dim())?;
        }
        if !balls.iter().any(|b| b.radius == 1.0 && b.center.norm_sq() == 0.0) {
            return Err(invalid("balls", "family must contain B(0, 1)"));
        }
        let off: Vec<&Ball> = balls
            .iter()
            .filter(|b| b.center.norm_sq() >= b.radius * b.radius)
            .collect();
        let disjoint_pair = off.iter().enumerate().any(|(i, a)| {
            off[i + 1..].iter().any(|b| {
                let d = a.center.dist_sq(&b.center).sqrt();
                d >= a.radius + b.radius
            })
        });
        if !disjoint_pair {
            return Err(invalid(
                "balls",
                "family needs two disjoint balls that do not contain the origin",
            ));
        }
        Ok(Self { balls })
    }

    /// In 1-D: `B(0,1)`, `B(±1, 1/2)`, `B(±1/2, 1/2)`. In higher
    /// dimensions: `B(0,1)` and `B(±e_i, 1/2)`.
    pub fn default_for(dim: usize) -> Result<Self> {
        crate::geometry::check_dim(dim)?;
        let mut balls = vec![Ball::new(Point::origin(dim), 1.0)?];
        if dim == 1 {
            for c in [1.0, -1.0, 0.5, -0.5] {
                balls.push(Ball::new(Point::scalar(c), 0.5)?);
            }
        } else {
            for i in 0..dim {
                for s in [1.0, -1.0] {
                    balls.push(Ball::new(Point::axis(dim, i, s), 0.5)?);
                }
            }
        }
        Self::new(balls)
    }

    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    pub fn dim(&self) -> usize {
        self.balls[0].dim()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Exists(f64),
    DoesNotExist,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallLimit {
    pub ball: Ball,
    pub limit: LimitEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivativeReport {
    pub verdict: Verdict,
    pub value: Option<f64>,
    pub symmetric: LimitEstimate,
    pub strong: Vec<BallLimit>,
    /// Largest difference between converged per-ball limits.
    pub spread: Option<f64>,
    pub note: String,
}

fn ball_quotient(mu: &Measure, b: &Ball, eps: f64) -> Result<f64> {
    Ok(mu.ball_mass_with(b, eps)?.value / b.volume())
}

fn quotient_sequence(mu: &Measure, x0: &Point, shape: &Ball, s: &Settings) -> Result<LimitEstimate> {
    let grid = s.geometric_grid();
    let samples: Vec<(f64, f64)> = grid
        .par_iter()
        .map(|&r| Ok((r, ball_quotient(mu, &shape.scaled_about(x0, r), s.eps_mass)?)))
        .collect::<Result<_>>()?;
    Ok(LimitRule::from_settings(s).classify(samples))
}

/// `lim_{r→0} μ(B(x₀, r)) / m(B(x₀, r))` on the geometric radius grid.
pub fn symmetric_derivative(mu: &Measure, x0: &Point, s: &Settings) -> Result<LimitEstimate> {
    same_dim(mu.dim(), x0.dim())?;
    let unit = Ball::new(Point::origin(mu.dim()), 1.0)?;
    quotient_sequence(mu, x0, &unit, s)
}

/// Per-ball limits of `μ(x₀ + rB) / m(rB)` over a finite family. A finite
/// family can only under-approximate "every open ball": an `exists` verdict
/// is evidence, a `does_not_exist` verdict comes with a witness.
pub fn strong_derivative(mu: &Measure, x0: &Point, fam: &BallFamily, s: &Settings) -> Result<DerivativeReport> {
    same_dim(mu.dim(), x0.dim())?;
    same_dim(mu.dim(), fam.dim())?;
    let symmetric = symmetric_derivative(mu, x0, s)?;
    let strong: Vec<BallLimit> = fam
        .balls()
        .iter()
        .map(|b| {
            Ok(BallLimit {
                ball: *b,
                limit: quotient_sequence(mu, x0, b, s)?,
            })
        })
        .collect::<Result<_>>()?;
    let converged: Vec<f64> = strong.iter().filter_map(|b| b.limit.converged_value()).collect();
    let spread = if converged.is_empty() {
        None
    } else {
        let hi = converged.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = converged.iter().copied().fold(f64::INFINITY, f64::min);
        Some(hi - lo)
    };
    let all_converged = converged.len() == strong.len();
    let any_divergent = strong.iter().any(|b| b.limit.status != LimitStatus::Converged);
    let (verdict, note) = match spread {
        Some(d) if all_converged && d <= s.tol_agree => {
            let centred = strong
                .iter()
                .find(|b| b.ball.radius == 1.0 && b.ball.center.norm_sq() == 0.0)
                .and_then(|b| b.limit.value)
                .expect("family contains the unit ball");
            (
                Verdict::Exists(centred),
                "all tested balls agree; the family is finite, so this is evidence rather than proof".to_string(),
            )
        }
        Some(d) if d > 3.0 * s.tol_agree => (
            Verdict::DoesNotExist,
            format!("two tested balls have limits {d:.6e} apart"),
        ),
        _ if any_divergent => (
            Verdict::DoesNotExist,
            "a tested ball has an unbounded or non-convergent quotient".to_string(),
        ),
        _ => (
            Verdict::Inconclusive,
            "per-ball limits differ by less than the non-existence margin".to_string(),
        ),
    };
    let value = match verdict {
        Verdict::Exists(l) => Some(l),
        _ => None,
    };
    Ok(DerivativeReport {
        verdict,
        value,
        symmetric,
        strong,
        spread,
        note,
    })
}

/// A supremum over scales, possibly infinite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximalReport {
    pub value: Option<f64>,
    pub unbounded: bool,
    /// Scale (radius or time) at which the largest sample was found.
    pub argmax: Option<f64>,
    /// Every `(scale, sample)` pair evaluated.
    pub samples: Vec<(f64, f64)>,
}

impl MaximalReport {
    fn unbounded(samples: Vec<(f64, f64)>) -> Self {
        Self {
            value: None,
            unbounded: true,
            argmax: None,
            samples,
        }
    }

    fn from_samples(samples: Vec<(f64, f64)>) -> Self {
        let best = samples
            .iter()
            .copied()
            .fold(None::<(f64, f64)>, |acc, s| match acc {
                Some(a) if a.1 >= s.1 => Some(a),
                _ => Some(s),
            });
        Self {
            value: best.map(|b| b.1),
            unbounded: false,
            argmax: best.map(|b| b.0),
            samples,
        }
    }
}

/// Radii where a ball quotient about `x0` can jump: distances to atoms
/// and, in one dimension, to every feature point, each also taken just
/// past the jump.
fn event_radii(mu: &Measure, x0: &Point) -> Vec<f64> {
    let mut d: Vec<f64> = mu.atoms().iter().map(|(p, _)| p.dist_sq(x0).sqrt()).collect();
    if mu.dim() == 1 {
        d.extend(mu.feature_points_1d().iter().map(|p| (p - x0.get(0)).abs()));
    }
    let mut out = Vec::new();
    for r in d {
        if r > 0.0 && r.is_finite() {
            out.push(r);
            out.push(r * (1.0 + 4.0 * f64::EPSILON));
        }
    }
    out
}

/// `sup_{r>0} μ(B(x₀, r)) / m(B(x₀, r))`, searched on the dyadic grid,
/// at event radii, and by golden-section refinement around the best grid
/// radius. The result is a lower bound for the true supremum.
pub fn hl_maximal(mu: &Measure, x0: &Point, s: &Settings) -> Result<MaximalReport> {
    same_dim(mu.dim(), x0.dim())?;
    let sym = symmetric_derivative(mu, x0, s)?;
    if sym.status == LimitStatus::Unbounded {
        return Ok(MaximalReport::unbounded(sym.samples));
    }
    let q = |r: f64| -> Result<f64> { ball_quotient(mu, &Ball::new(*x0, r)?, s.eps_mass) };
    let mut radii: Vec<f64> = (s.hl_min_exp..=s.hl_max_exp).map(|k| 2f64.powi(k)).collect();
    radii.extend(event_radii(mu, x0));
    let mut samples: Vec<(f64, f64)> = radii.par_iter().map(|&r| Ok((r, q(r)?))).collect::<Result<_>>()?;
    let grid_best = samples[..(s.hl_max_exp - s.hl_min_exp + 1) as usize]
        .iter()
        .copied()
        .fold((1.0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    let (lo, hi) = (grid_best.0 * 0.5, grid_best.0 * 2.0);
    let mut failure = None;
    let (_, _, seen) = golden_max(
        |r| match q(r) {
            Ok(v) => v,
            Err(e) => {
                failure = Some(e);
                f64::NEG_INFINITY
            }
        },
        lo,
        hi,
        s.golden_iterations,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    samples.extend(seen);
    Ok(MaximalReport::from_samples(samples))
}

fn argmax_by<T>(v: &[T], key: impl Fn(&T) -> f64) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if key(x) > key(&v[best]) {
            best = i;
        }
    }
    best
}

/// `c_n = e^{-1} m(B(0,1)) 2ⁿ (4π)^{-n/2}`.
pub fn sandwich_constant(n: usize) -> f64 {
    unit_ball_volume(n) * 2f64.powi(n as i32) / (E * (4.0 * PI).powf(n as f64 / 2.0))
}

/// Times at which parabolic suprema are sampled: log-uniform over the
/// configured range plus `(r/2)²` for every radius in `radii`.
fn sup_times(s: &Settings, radii: &[f64]) -> Vec<f64> {
    let (a, b) = (s.sup_t_min.log10(), s.sup_t_max.log10());
    let steps = ((b - a) * s.sup_per_decade as f64).round() as usize;
    let mut ts: Vec<f64> = (0..=steps)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / steps as f64))
        .collect();
    ts.extend(radii.iter().filter(|r| **r > 0.0).map(|r| 0.25 * r * r));
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    ts
}

fn heat_at(mu: &Measure, x: &Point, t: f64) -> Result<f64> {
    Ok(gw_eval_rel(mu, &SpaceTimePoint::new(*x, t)?, SUP_ABS_TOL, SUP_REL_TOL)?.value)
}

/// Radial samples `Wμ(x₀, 4^{-k})`, `k = 0..=20`, classified by the
/// limit rule to detect blow-up at the vertex.
fn radial_blow_up(mu: &Measure, x0: &Point, s: &Settings) -> Result<LimitEstimate> {
    let samples: Vec<(f64, f64)> = (0..=20)
        .into_par_iter()
        .map(|k| {
            let t = 0.25f64.powi(k);
            Ok((t, heat_at(mu, x0, t)?))
        })
        .collect::<Result<_>>()?;
    Ok(LimitRule::from_settings(s).classify(samples))
}

/// Offsets of the slice sample points inside the unit ball; the centre is
/// always included.
pub(crate) fn slice_offsets(dim: usize, per_axis: usize) -> Vec<Point> {
    let per_axis = if per_axis.is_multiple_of(2) { per_axis + 1 } else { per_axis };
    let per_axis = if dim == 3 { per_axis.min(9) } else { per_axis };
    let m = (per_axis - 1) as f64;
    let coord = |i: usize| 2.0 * i as f64 / m - 1.0;
    let mut out = Vec::new();
    match dim {
        1 => {
            for i in 0..per_axis {
                out.push(Point::scalar(coord(i)));
            }
        }
        2 => {
            for i in 0..per_axis {
                for j in 0..per_axis {
                    let (a, b) = (coord(i), coord(j));
                    if a * a + b * b <= 1.0 {
                        out.push(Point::new(&[a, b]).expect("finite"));
                    }
                }
            }
        }
        _ => {
            for i in 0..per_axis {
                for j in 0..per_axis {
                    for k in 0..per_axis {
                        let (a, b, c) = (coord(i), coord(j), coord(k));
                        if a * a + b * b + c * c <= 1.0 {
                            out.push(Point::new(&[a, b, c]).expect("finite"));
                        }
                    }
                }
            }
        }
    }
    out
}

/// Supremum of `Wμ` over a sample of `P(x₀, α)`, together with the radial
/// supremum `sup_t Wμ(x₀, t)` taken over the same times. Every slice sample
/// includes the vertex, so the radial value never exceeds the region value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParabolicMaximal {
    pub radial: MaximalReport,
    pub region: MaximalReport,
}

pub fn parabolic_maximal(
    mu: &Measure,
    x0: &Point,
    alpha: f64,
    s: &Settings,
    extra_radii: &[f64],
) -> Result<ParabolicMaximal> {
    require_positive("alpha", alpha)?;
    same_dim(mu.dim(), x0.dim())?;
    let blow = radial_blow_up(mu, x0, s)?;
    if blow.status == LimitStatus::Unbounded {
        return Ok(ParabolicMaximal {
            radial: MaximalReport::unbounded(blow.samples.clone()),
            region: MaximalReport::unbounded(blow.samples),
        });
    }
    let times = sup_times(s, extra_radii);
    let offsets = slice_offsets(mu.dim(), s.slice_points);
    let row = |t: f64| -> Result<(f64, f64, f64)> {
        let rho = (alpha * t * (1.0 - s.slice_shrink)).sqrt();
        let mut centre = f64::NAN;
        let mut best = f64::NEG_INFINITY;
        for off in &offsets {
            let v = heat_at(mu, &x0.add(&off.scale(rho)), t)?;
            if off.norm_sq() == 0.0 {
                centre = v;
            }
            best = best.max(v);
        }
        Ok((t, centre, best))
    };
    let mut rows: Vec<(f64, f64, f64)> = times.par_iter().map(|&t| row(t)).collect::<Result<_>>()?;
    // Golden-section refinement in log t around both maxima. Every refined
    // time gets a full row, so the vertex stays among the slice samples.
    let mut refined = Vec::new();
    for pick in [1usize, 2] {
        let value = |r: &(f64, f64, f64)| if pick == 1 { r.1 } else { r.2 };
        let i = argmax_by(&rows, value);
        let lo = rows[i.saturating_sub(1)].0.ln();
        let hi = rows[(i + 1).min(rows.len() - 1)].0.ln();
        if hi > lo {
            let mut failure = None;
            let (_, _, seen) = golden_max(
                |u| match row(u.exp()) {
                    Ok(r) => value(&r),
                    Err(e) => {
                        failure = Some(e);
                        f64::NEG_INFINITY
                    }
                },
                lo,
                hi,
                s.golden_iterations,
            );
            if let Some(e) = failure {
                return Err(e);
            }
            refined.extend(seen.into_iter().map(|(u, _)| u.exp()));
        }
    }
    let extra: Vec<(f64, f64, f64)> = refined.par_iter().map(|&t| row(t)).collect::<Result<_>>()?;
    rows.extend(extra);
    let radial = MaximalReport::from_samples(rows.iter().map(|r| (r.0, r.1)).collect());
    let region = MaximalReport::from_samples(rows.iter().map(|r| (r.0, r.2)).collect());
    Ok(ParabolicMaximal { radial, region })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub c_n: f64,
    pub hl: MaximalReport,
    pub parabolic: ParabolicMaximal,
    /// `c_n · M_HL ≤ sup_t Wμ(x₀, t) + slack`.
    pub first_holds: bool,
    /// `sup_t Wμ(x₀, t) ≤ sup_P Wμ`.
    pub second_holds: bool,
    /// All three quantities are finite, or all three are unbounded.
    pub consistent: bool,
    /// `sup_P Wμ / M_HL`, an empirical stand-in for the unknown constant of
    /// the upper bound.
    pub empirical_ratio: Option<f64>,
}

/// Checks `c_n M_HL(μ)(x₀) ≤ sup_t Wμ(x₀, t) ≤ sup_{P(x₀,α)} Wμ`.
pub fn sandwich_check(mu: &Measure, x0: &Point, alpha: f64, s: &Settings) -> Result<SandwichReport> {
    let c_n = sandwich_constant(mu.dim());
    let hl = hl_maximal(mu, x0, s)?;
    let radii: Vec<f64> = hl.samples.iter().map(|p| p.0).collect();
    let parabolic = parabolic_maximal(mu, x0, alpha, s, if hl.unbounded { &[] } else { &radii })?;
    let flags = [hl.unbounded, parabolic.radial.unbounded, parabolic.region.unbounded];
    let consistent = flags.iter().all(|f| *f) || flags.iter().all(|f| !*f);
    let (first_holds, second_holds, empirical_ratio) = match (hl.value, parabolic.radial.value, parabolic.region.value) {
        (Some(m), Some(r), Some(p)) => (
            c_n * m <= r + s.tol_max,
            r <= p,
            if m > 0.0 { Some(p / m) } else { None },
        ),
        _ => (consistent, consistent, None),
    };
    Ok(SandwichReport {
        c_n,
        hl,
        parabolic,
        first_holds,
        second_holds,
        consistent,
        empirical_ratio,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaReport {
    /// `μ([x₀, x₀ + r)) / r`.
    pub right: LimitEstimate,
    /// `μ([x₀ - r, x₀)) / r`.
    pub left: LimitEstimate,
    /// Converged iff both sides converge to values within `tol_agree`.
    pub limit: LimitEstimate,
}

/// One-sided difference quotients of `β(x) = μ((-∞, x))` at `x₀`
/// (equivalently of any distribution function of `μ` without an atom at
/// `x₀`).
pub fn one_d_beta_derivative(mu: &Measure, x0: f64, s: &Settings) -> Result<BetaReport> {
    if mu.dim() != 1 {
        return Err(Error::Unsupported("distribution-function derivatives are one-dimensional".into()));
    }
    if !x0.is_finite() {
        return Err(invalid("x0", "must be finite"));
    }
    let grid = s.geometric_grid();
    let side = |right: bool| -> Result<LimitEstimate> {
        let samples: Vec<(f64, f64)> = grid
            .par_iter()
            .map(|&r| {
                let iv = if right {
                    Interval::right_of(x0, r)
                } else {
                    Interval::left_of(x0, r)
                };
                Ok((r, mu.interval_mass_with(&iv, s.eps_mass)?.value / iv.length()))
            })
            .collect::<Result<_>>()?;
        Ok(LimitRule::from_settings(s).classify(samples))
    };
    let right = side(true)?;
    let left = side(false)?;
    let combined_samples: Vec<(f64, f64)> = right
        .samples
        .iter()
        .zip(&left.samples)
        .map(|(a, b)| (a.0, 0.5 * (a.1 + b.1)))
        .collect();
    let mut limit = LimitRule::from_settings(s).classify(combined_samples);
    match (right.converged_value(), left.converged_value()) {
        (Some(a), Some(b)) if (a - b).abs() <= s.tol_agree => {
            limit.status = LimitStatus::Converged;
            limit.value = Some(a);
        }
        _ => {
            limit.status = if right.status == LimitStatus::Unbounded || left.status == LimitStatus::Unbounded {
                LimitStatus::Unbounded
            } else {
                LimitStatus::NonConvergent
            };
            limit.value = None;
        }
    }
    Ok(BetaReport { right, left, limit })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_for_the_line() {
        let c = sandwich_constant(1);
        assert!((c - 4.0 / (E * (4.0 * PI).sqrt())).abs() < 1e-15);
    }

    #[test]
    fn default_families_are_valid() {
        for n in 1..=3 {
            let f = BallFamily::default_for(n).unwrap();
            assert_eq!(f.balls().len(), if n == 1 { 5 } else { 1 + 2 * n });
        }
    }

    #[test]
    fn family_needs_unit_ball() {
        let b = vec![
            Ball::new(Point::scalar(1.0), 0.5).unwrap(),
            Ball::new(Point::scalar(-1.0), 0.5).unwrap(),
        ];
        assert!(BallFamily::new(b).is_err());
    }

    #[test]
    fn slice_offsets_include_centre() {
        for n in 1..=3 {
            assert!(slice_offsets(n, 33).iter().any(|p| p.norm_sq() == 0.0));
        }
    }
}
