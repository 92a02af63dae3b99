//! A decidable stand-in for `lim_{s→0} q(s)` on a geometric grid of scales.

use serde::{Deserialize, Serialize};

use crate::settings::Settings;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitStatus {
    Converged,
    NonConvergent,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitEstimate {
    /// When converged: the last raw sample, or the Aitken extrapolation for
    /// a geometric tail.
    pub value: Option<f64>,
    pub status: LimitStatus,
    /// `(scale, quotient)`, scales decreasing.
    pub samples: Vec<(f64, f64)>,
    /// `max - min` over the final window.
    pub oscillation: f64,
    /// Aitken extrapolation of the final three samples.
    pub extrapolated: Option<f64>,
}

impl LimitEstimate {
    pub fn is_converged(&self) -> bool {
        self.status == LimitStatus::Converged
    }

    pub fn converged_value(&self) -> Option<f64> {
        if self.is_converged() {
            self.value
        } else {
            None
        }
    }
}

/// Classification of a sequence of samples taken at shrinking scales.
///
/// * converged: the last `window` samples oscillate by at most `tol`, and
///   the Aitken extrapolation of the last three lies within `10 · tol` of
///   the last sample; or the last `window` differences have one sign and
///   contract with nearly constant ratio `ρ ≤ 0.9`, and the geometric tail
///   bound `|Δ| ρ / (1 - ρ)` is at most `100 · tol` (the value is then the
///   Aitken extrapolation);
/// * unbounded: the last `window` samples increase strictly past
///   `threshold`, or (for slow power-law blow-up) over the last twenty
///   steps `ln q` grows by at least `0.1 · ln 2` per step and `q` by a
///   factor of eight in total;
/// * non-convergent otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitRule {
    pub window: usize,
    pub tol: f64,
    pub threshold: f64,
}

const GROWTH_SPAN: usize = 20;
const GROWTH_RATIO: f64 = 8.0;
const GROWTH_SLOPE: f64 = 0.1 * std::f64::consts::LN_2;
const TAIL_RATIO: f64 = 0.9;
const TAIL_RATIO_SPREAD: f64 = 0.05;
const TAIL_SLACK: f64 = 100.0;

impl LimitRule {
    pub fn from_settings(s: &Settings) -> Self {
        Self {
            window: s.limit_window,
            tol: s.tol_limit,
            threshold: s.unbounded_threshold,
        }
    }

    pub fn with_tol(self, tol: f64) -> Self {
        Self { tol, ..self }
    }

    pub fn classify(&self, samples: Vec<(f64, f64)>) -> LimitEstimate {
        let q: Vec<f64> = samples.iter().map(|s| s.1).collect();
        let k = self.window.min(q.len());
        let tail = &q[q.len() - k..];
        let oscillation = if tail.iter().all(|v| v.is_finite()) && !tail.is_empty() {
            let hi = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = tail.iter().copied().fold(f64::INFINITY, f64::min);
            hi - lo
        } else {
            f64::INFINITY
        };
        let extrapolated = aitken(&q);
        let last = q.last().copied();
        let settled = q.len() >= self.window
            && oscillation <= self.tol
            && extrapolated.zip(last).is_some_and(|(e, l)| (e - l).abs() <= 10.0 * self.tol);
        let (status, value) = if settled {
            (LimitStatus::Converged, last)
        } else if let Some(v) = self.geometric_tail(&q).and(extrapolated) {
            (LimitStatus::Converged, Some(v))
        } else if self.is_unbounded(&q) {
            (LimitStatus::Unbounded, None)
        } else {
            (LimitStatus::NonConvergent, None)
        };
        LimitEstimate {
            value,
            status,
            samples,
            oscillation,
            extrapolated,
        }
    }

    /// Bound on `|q_last - lim q|` when the final differences contract
    /// geometrically.
    fn geometric_tail(&self, q: &[f64]) -> Option<f64> {
        if self.window < 3 || q.len() < self.window + 1 {
            return None;
        }
        let tail = &q[q.len() - self.window - 1..];
        let d: Vec<f64> = tail.windows(2).map(|w| w[1] - w[0]).collect();
        if d.iter().any(|x| !x.is_finite() || *x == 0.0) || d.iter().any(|x| x.signum() != d[0].signum()) {
            return None;
        }
        let ratios: Vec<f64> = d.windows(2).map(|w| w[1] / w[0]).collect();
        let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        if hi > TAIL_RATIO || hi - lo > TAIL_RATIO_SPREAD {
            return None;
        }
        let bound = d[d.len() - 1].abs() * hi / (1.0 - hi);
        (bound <= TAIL_SLACK * self.tol).then_some(bound)
    }

    fn is_unbounded(&self, q: &[f64]) -> bool {
        if q.iter().any(|v| v.is_infinite() && *v > 0.0) {
            return true;
        }
        if q.len() >= self.window {
            let tail = &q[q.len() - self.window..];
            if tail.windows(2).all(|w| w[1] > w[0]) && tail[tail.len() - 1] > self.threshold {
                return true;
            }
        }
        if q.len() > GROWTH_SPAN {
            let tail = &q[q.len() - GROWTH_SPAN - 1..];
            if tail.iter().all(|v| *v > 0.0 && v.is_finite()) && tail[GROWTH_SPAN] >= GROWTH_RATIO * tail[0] {
                let logs: Vec<f64> = tail.iter().map(|v| v.ln()).collect();
                return slope(&logs) >= GROWTH_SLOPE;
            }
        }
        false
    }
}

/// Aitken's Δ² applied to the last three terms; the last term when the
/// second difference vanishes.
pub fn aitken(q: &[f64]) -> Option<f64> {
    if q.len() < 3 {
        return None;
    }
    let (a, b, c) = (q[q.len() - 3], q[q.len() - 2], q[q.len() - 1]);
    let (d1, d2) = (b - a, c - b);
    let denom = d2 - d1;
    if !denom.is_finite() {
        return None;
    }
    if denom.abs() <= 1e-300 || denom.abs() <= 1e-14 * c.abs().max(1e-300) {
        Some(c)
    } else {
        Some(c - d2 * d2 / denom)
    }
}

/// Least-squares slope of `y` against its index.
fn slope(y: &[f64]) -> f64 {
    let n = y.len() as f64;
    let mx = (n - 1.0) / 2.0;
    let my = y.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, v) in y.iter().enumerate() {
        let dx = i as f64 - mx;
        num += dx * (v - my);
        den += dx * dx;
    }
    num / den
}
