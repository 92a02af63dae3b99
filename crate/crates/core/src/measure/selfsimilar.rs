//! Self-similar measures on ℝ generated by an iterated function system of
//! similarities `x ↦ r_i x + b_i` with `0 < r_i < 1`.
//!
//! Cylinders are images of the attractor hull under finite compositions.
//! Each one carries its probability, and its mean and variance follow
//! from the global moments by the affine map, which gives certified
//! second-order bounds for smooth integrands.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::Interval;

use super::Estimate;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Contraction {
    pub ratio: f64,
    pub shift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SelfSimilarSpec", into = "SelfSimilarSpec")]
pub struct SelfSimilar {
    maps: Vec<Contraction>,
    probabilities: Vec<f64>,
    weight: f64,
    hull: (f64, f64),
    mean: f64,
    variance: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelfSimilarSpec {
    pub maps: Vec<Contraction>,
    pub probabilities: Vec<f64>,
    pub weight: f64,
}

impl TryFrom<SelfSimilarSpec> for SelfSimilar {
    type Error = Error;
    fn try_from(s: SelfSimilarSpec) -> Result<Self> {
        SelfSimilar::new(s.maps, s.probabilities, s.weight)
    }
}

impl From<SelfSimilar> for SelfSimilarSpec {
    fn from(s: SelfSimilar) -> Self {
        SelfSimilarSpec {
            maps: s.maps,
            probabilities: s.probabilities,
            weight: s.weight,
        }
    }
}

const MAX_DEPTH: u32 = 200;
const MAX_FRONTIER: usize = 1 << 20;

#[derive(Debug, Clone, Copy)]
struct Cylinder {
    scale: f64,
    offset: f64,
    prob: f64,
    depth: u32,
}

impl SelfSimilar {
    pub fn new(maps: Vec<Contraction>, probabilities: Vec<f64>, weight: f64) -> Result<Self> {
        if maps.is_empty() || maps.len() != probabilities.len() {
            return Err(invalid(
                "maps",
                "need at least one map and one probability per map",
            ));
        }
        for m in &maps {
            if !(m.ratio > 0.0 && m.ratio < 1.0) || !m.shift.is_finite() {
                return Err(invalid("ratio", format!("contraction ratio must lie in (0, 1), got {}", m.ratio)));
            }
        }
        if probabilities.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(invalid("probabilities", "must be nonnegative"));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(invalid("probabilities", format!("must sum to 1, got {total}")));
        }
        if !(weight.is_finite() && weight >= 0.0) {
            return Err(invalid("weight", format!("must be nonnegative, got {weight}")));
        }
        let fixed = maps.iter().map(|m| m.shift / (1.0 - m.ratio));
        let lo = fixed.clone().fold(f64::INFINITY, f64::min);
        let hi = fixed.fold(f64::NEG_INFINITY, f64::max);
        let pr: f64 = maps.iter().zip(&probabilities).map(|(m, p)| p * m.ratio).sum();
        let pb: f64 = maps.iter().zip(&probabilities).map(|(m, p)| p * m.shift).sum();
        let mean = pb / (1.0 - pr);
        let pr2: f64 = maps.iter().zip(&probabilities).map(|(m, p)| p * m.ratio * m.ratio).sum();
        let rest: f64 = maps
            .iter()
            .zip(&probabilities)
            .map(|(m, p)| p * (2.0 * m.ratio * m.shift * mean + m.shift * m.shift))
            .sum();
        let second = rest / (1.0 - pr2);
        let variance = (second - mean * mean).max(0.0);
        Ok(Self {
            maps,
            probabilities,
            weight,
            hull: (lo, hi),
            mean,
            variance,
        })
    }

    /// The middle-thirds Cantor measure, a probability on `[0, 1]`.
    pub fn cantor() -> Self {
        Self::new(
            vec![
                Contraction {
                    ratio: 1.0 / 3.0,
                    shift: 0.0,
                },
                Contraction {
                    ratio: 1.0 / 3.0,
                    shift: 2.0 / 3.0,
                },
            ],
            vec![0.5, 0.5],
            1.0,
        )
        .expect("valid IFS")
    }

    pub fn maps(&self) -> &[Contraction] {
        &self.maps
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn hull(&self) -> (f64, f64) {
        self.hull
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            weight: self.weight * c,
            ..self.clone()
        }
    }

    /// Pushforward under `y ↦ y - s`.
    pub fn translated(&self, s: f64) -> Self {
        let maps = self
            .maps
            .iter()
            .map(|m| Contraction {
                ratio: m.ratio,
                shift: m.ratio * s + m.shift - s,
            })
            .collect();
        Self::new(maps, self.probabilities.clone(), self.weight).expect("conjugate of valid IFS")
    }

    /// Pushforward under `y ↦ y / r`, with total weight multiplied by `factor`.
    pub fn pushed_by_dilation(&self, r: f64, factor: f64) -> Self {
        let maps = self
            .maps
            .iter()
            .map(|m| Contraction {
                ratio: m.ratio,
                shift: m.shift / r,
            })
            .collect();
        Self::new(maps, self.probabilities.clone(), self.weight * factor).expect("conjugate of valid IFS")
    }

    fn root(&self) -> Cylinder {
        Cylinder {
            scale: 1.0,
            offset: 0.0,
            prob: 1.0,
            depth: 0,
        }
    }

    fn bounds(&self, c: &Cylinder) -> (f64, f64) {
        (c.scale * self.hull.0 + c.offset, c.scale * self.hull.1 + c.offset)
    }

    fn children<'a>(&'a self, c: &'a Cylinder) -> impl Iterator<Item = Cylinder> + 'a {
        self.maps.iter().zip(&self.probabilities).map(move |(m, p)| Cylinder {
            scale: c.scale * m.ratio,
            offset: c.scale * m.shift + c.offset,
            prob: c.prob * p,
            depth: c.depth + 1,
        })
    }

    fn refinable(&self, c: &Cylinder) -> bool {
        let (lo, hi) = self.bounds(c);
        let ulp = f64::EPSILON * lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        c.depth < MAX_DEPTH && (hi - lo) > 8.0 * ulp && c.prob > 0.0
    }

    /// Mass of an interval. Cylinders straddling an endpoint are refined
    /// level by level until their total probability is below `2 eps`; half
    /// of it is added to the result and half is the reported error.
    pub fn interval_mass(&self, iv: &Interval, eps: f64) -> Estimate {
        if self.weight == 0.0 || iv.is_empty() {
            return Estimate::exact(0.0);
        }
        let target = 2.0 * eps / self.weight;
        let mut decided = 0.0;
        // Cylinders too thin to split further are counted by their midpoint.
        let mut stuck = 0.0;
        let mut stuck_inside = 0.0;
        let mut frontier = vec![self.root()];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            let mut straddle = 0.0;
            for cyl in frontier {
                let (lo, hi) = self.bounds(&cyl);
                let (a, b) = (lo - iv.center, hi - iv.center);
                if b <= -iv.half || a >= iv.half || cyl.prob == 0.0 {
                    continue;
                }
                if a >= -iv.half && b <= iv.half {
                    decided += cyl.prob;
                } else if self.refinable(&cyl) {
                    straddle += cyl.prob;
                    next.push(cyl);
                } else {
                    stuck += cyl.prob;
                    if iv.contains(0.5 * (lo + hi)) {
                        stuck_inside += cyl.prob;
                    }
                }
            }
            if straddle + stuck <= target || next.len() > MAX_FRONTIER {
                return Estimate {
                    value: self.weight * (decided + stuck_inside + 0.5 * straddle),
                    error: self.weight * (0.5 * straddle + stuck),
                };
            }
            frontier = next.into_iter().flat_map(|c| self.children(&c).collect::<Vec<_>>()).collect();
        }
        Estimate {
            value: self.weight * (decided + stuck_inside),
            error: self.weight * stuck,
        }
    }

    /// `∫ g dμ` for a function with a local bound on |g''|: each cylinder
    /// contributes `mass · g(mean)` with error at most
    /// `½ · mass · sup|g''| · variance`. Cylinders are refined until their
    /// share of the error budget `tol` is met.
    ///
    /// `window`, when present, restricts the measure to an open interval.
    pub fn integrate_smooth<G, H>(&self, g: G, second_bound: H, tol: f64, window: Option<Interval>) -> Estimate
    where
        G: Fn(f64) -> f64,
        H: Fn(f64, f64) -> f64,
    {
        if self.weight == 0.0 {
            return Estimate::exact(0.0);
        }
        let budget = tol / self.weight;
        let mut value = 0.0;
        let mut error = 0.0;
        let mut stack = vec![self.root()];
        while let Some(cyl) = stack.pop() {
            let (lo, hi) = self.bounds(&cyl);
            if let Some(w) = window {
                let (a, b) = (lo - w.center, hi - w.center);
                if b <= -w.half || a >= w.half {
                    continue;
                }
                if !(a >= -w.half && b <= w.half) {
                    if self.refinable(&cyl) {
                        stack.extend(self.children(&cyl));
                    } else {
                        let top = g(lo).abs().max(g(hi).abs());
                        value += 0.5 * cyl.prob * g(0.5 * (lo + hi));
                        error += cyl.prob * top;
                    }
                    continue;
                }
            }
            let var = cyl.scale * cyl.scale * self.variance;
            let bound = 0.5 * cyl.prob * second_bound(lo, hi) * var;
            if bound <= budget * cyl.prob || !self.refinable(&cyl) {
                let m = cyl.scale * self.mean + cyl.offset;
                value += cyl.prob * g(m);
                error += bound;
            } else {
                stack.extend(self.children(&cyl));
            }
        }
        Estimate {
            value: self.weight * value,
            error: self.weight * error,
        }
    }

    /// Gauss-Weierstrass integral at `(x, t)`.
    pub fn heat(&self, x: f64, t: f64, tol: f64, window: Option<Interval>) -> Estimate {
        let kernel = |y: f64| heat_kernel_1d(x - y, t);
        let second = |lo: f64, hi: f64| kernel_second_derivative_sup(x - hi, x - lo, t);
        self.integrate_smooth(kernel, second, tol, window)
    }
}

/// One-dimensional heat kernel `(4πt)^{-1/2} e^{-z²/4t}`.
#[inline]
pub(crate) fn heat_kernel_1d(z: f64, t: f64) -> f64 {
    (-(z * z) / (4.0 * t)).exp() / (4.0 * PI * t).sqrt()
}

/// `sup |∂²_z W(z, t)|` over `z ∈ [z1, z2]`. The extrema of `W''` sit at
/// `z = 0` and `z = ±√(6t)`, so checking those and the endpoints is exact.
pub(crate) fn kernel_second_derivative_sup(z1: f64, z2: f64, t: f64) -> f64 {
    let w2 = |z: f64| heat_kernel_1d(z, t) * (z * z / (4.0 * t * t) - 1.0 / (2.0 * t));
    let s = (6.0 * t).sqrt();
    let mut best = w2(z1).abs().max(w2(z2).abs());
    for z in [0.0, s, -s] {
        if z >= z1 && z <= z2 {
            best = best.max(w2(z).abs());
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cantor_moments() {
        let c = SelfSimilar::cantor();
        assert_eq!(c.hull().0, 0.0);
        assert!((c.hull().1 - 1.0).abs() < 1e-15);
        assert!((c.mean() - 0.5).abs() < 1e-15);
        // Variance of the Cantor distribution is 1/8.
        assert!((c.variance() - 0.125).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_ifs() {
        let m = Contraction { ratio: 1.0, shift: 0.0 };
        assert!(SelfSimilar::new(vec![m], vec![1.0], 1.0).is_err());
        let m = Contraction { ratio: 0.5, shift: 0.0 };
        assert!(SelfSimilar::new(vec![m, m], vec![0.5, 0.6], 1.0).is_err());
        assert!(SelfSimilar::new(vec![m], vec![1.0], -1.0).is_err());
    }

    #[test]
    fn cantor_gap_is_empty() {
        let c = SelfSimilar::cantor();
        let m = c.interval_mass(&Interval::open(0.5, 1.0 / 6.0), 1e-10);
        assert_eq!(m.value, 0.0);
        assert!(m.error <= 5e-10);
    }

    #[test]
    fn cantor_mass_of_left_half() {
        // μ([0, 1/2)) = 1/2 by symmetry.
        let c = SelfSimilar::cantor();
        let m = c.interval_mass(&Interval::open(0.0, 0.5), 1e-12);
        assert!((m.value - 0.5).abs() <= 1e-12, "{m:?}");
    }

    #[test]
    fn second_derivative_sup_matches_dense_scan() {
        let t = 0.3;
        let (z1, z2) = (-0.4, 2.1);
        let mut scan: f64 = 0.0;
        for i in 0..=20000 {
            let z = z1 + (z2 - z1) * i as f64 / 20000.0;
            let w = heat_kernel_1d(z, t) * (z * z / (4.0 * t * t) - 1.0 / (2.0 * t));
            scan = scan.max(w.abs());
        }
        let exact = kernel_second_derivative_sup(z1, z2, t);
        assert!(exact >= scan && exact - scan < 1e-6);
    }
}
