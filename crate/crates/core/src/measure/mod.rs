//! Positive measures on ℝⁿ (n ≤ 3) built from a small family of primitives.
//!
//! A [`Measure`] is a finite positive combination of [`Term`]s. Each term
//! is a primitive, optionally restricted to the intersection of a list of
//! open balls (its window). The family is closed under translation,
//! dilation, restriction and positive combination, and ball masses are
//! computed in closed form or with a certified error bound.

mod region;
mod selfsimilar;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, require_positive, Error, Result};
use crate::geometry::{check_dim, same_dim, Ball, Interval, Point};
use crate::special::gaussian_mass_centered;

pub(crate) use region::{integrate as integrate_region, Separable};
pub use selfsimilar::{Contraction, SelfSimilar, SelfSimilarSpec};

/// Default tolerance for ball masses.
pub const DEFAULT_EPS_MASS: f64 = 1e-10;

/// A computed quantity with an upper bound on its absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, error: 0.0 }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: Estimate) -> Estimate {
        Estimate {
            value: self.value + other.value,
            error: self.error + other.error,
        }
    }

    pub fn scale(self, c: f64) -> Estimate {
        Estimate {
            value: c * self.value,
            error: c.abs() * self.error,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Primitive {
    /// `level · m`, Lebesgue measure on all of ℝⁿ.
    Lebesgue { level: f64 },
    PointMass { location: Point, weight: f64 },
    /// `level · χ_Q dm` for the axis-aligned box `Q = Π [lo_i, hi_i]`.
    BoxDensity { lo: Vec<f64>, hi: Vec<f64>, level: f64 },
    /// `weight · N(mean, variance · I)`.
    Gaussian { mean: Point, variance: f64, weight: f64 },
    SelfSimilar(SelfSimilar),
}

impl Primitive {
    fn dim(&self) -> Option<usize> {
        match self {
            Primitive::Lebesgue { .. } => None,
            Primitive::PointMass { location, .. } => Some(location.dim()),
            Primitive::BoxDensity { lo, .. } => Some(lo.len()),
            Primitive::Gaussian { mean, .. } => Some(mean.dim()),
            Primitive::SelfSimilar(_) => Some(1),
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if let Some(d) = self.dim() {
            same_dim(n, d)?;
        }
        let nonneg = |name: &'static str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(invalid(name, format!("must be nonnegative and finite, got {v}")))
            }
        };
        match self {
            Primitive::Lebesgue { level } => nonneg("level", *level),
            Primitive::PointMass { weight, .. } => nonneg("weight", *weight),
            Primitive::BoxDensity { lo, hi, level } => {
                same_dim(lo.len(), hi.len())?;
                for (a, b) in lo.iter().zip(hi) {
                    if !(a.is_finite() && b.is_finite() && a < b) {
                        return Err(invalid("box", format!("need finite lo < hi, got [{a}, {b}]")));
                    }
                }
                nonneg("level", *level)
            }
            Primitive::Gaussian { variance, weight, .. } => {
                require_positive("variance", *variance)?;
                nonneg("weight", *weight)
            }
            Primitive::SelfSimilar(_) => Ok(()),
        }
    }
}

/// A primitive restricted to `W₁ ∩ … ∩ W_k` (no restriction when empty).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    #[serde(flatten)]
    pub primitive: Primitive,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub window: Vec<Ball>,
}

impl Term {
    pub fn new(primitive: Primitive) -> Self {
        Self {
            primitive,
            window: Vec::new(),
        }
    }

    /// The window as an interval (1-D only).
    pub(crate) fn window_interval(&self) -> Option<Interval> {
        let mut out: Option<Interval> = None;
        for w in &self.window {
            let iv = Interval::open(w.center.get(0), w.radius);
            out = Some(match out {
                None => iv,
                Some(cur) => cur.intersect_open(iv.center, iv.half),
            });
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeasure")]
pub struct Measure {
    dim: usize,
    terms: Vec<Term>,
}

#[derive(Deserialize)]
struct RawMeasure {
    dim: usize,
    #[serde(default)]
    terms: Vec<Term>,
}

impl TryFrom<RawMeasure> for Measure {
    type Error = Error;
    fn try_from(raw: RawMeasure) -> Result<Self> {
        Measure::new(raw.dim, raw.terms)
    }
}

/// Certificate that `∫ e^{-|y|²/4t} dμ(y)` is finite, with the bound used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMCertificate {
    pub member: bool,
    pub bound: f64,
    pub method: String,
}

impl Measure {
    pub fn new(dim: usize, terms: Vec<Term>) -> Result<Self> {
        check_dim(dim)?;
        for term in &terms {
            term.primitive.validate(dim)?;
            if matches!(term.primitive, Primitive::SelfSimilar(_)) && dim != 1 {
                return Err(Error::Unsupported("self-similar measures are one-dimensional".into()));
            }
            for w in &term.window {
                same_dim(dim, w.dim())?;
            }
        }
        Ok(Self { dim, terms })
    }

    fn single(dim: usize, primitive: Primitive) -> Result<Self> {
        Self::new(dim, vec![Term::new(primitive)])
    }

    pub fn zero(dim: usize) -> Result<Self> {
        Self::new(dim, Vec::new())
    }

    pub fn lebesgue(dim: usize) -> Result<Self> {
        Self::single(dim, Primitive::Lebesgue { level: 1.0 })
    }

    pub fn dirac(location: Point) -> Self {
        Self::point_mass(location, 1.0).expect("unit weight")
    }

    pub fn point_mass(location: Point, weight: f64) -> Result<Self> {
        Self::single(location.dim(), Primitive::PointMass { location, weight })
    }

    pub fn box_density(lo: &[f64], hi: &[f64], level: f64) -> Result<Self> {
        Self::single(
            lo.len(),
            Primitive::BoxDensity {
                lo: lo.to_vec(),
                hi: hi.to_vec(),
                level,
            },
        )
    }

    /// `χ_[lo, hi] dm` on ℝ.
    pub fn indicator(lo: f64, hi: f64) -> Result<Self> {
        Self::box_density(&[lo], &[hi], 1.0)
    }

    pub fn gaussian(mean: Point, variance: f64, weight: f64) -> Result<Self> {
        Self::single(
            mean.dim(),
            Primitive::Gaussian {
                mean,
                variance,
                weight,
            },
        )
    }

    pub fn self_similar(s: SelfSimilar) -> Self {
        Self::single(1, Primitive::SelfSimilar(s)).expect("one-dimensional")
    }

    pub fn cantor() -> Self {
        Self::self_similar(SelfSimilar::cantor())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Whether some term is a multiple of Lebesgue measure on all of ℝⁿ.
    pub fn has_global_lebesgue(&self) -> bool {
        self.terms
            .iter()
            .any(|t| t.window.is_empty() && matches!(t.primitive, Primitive::Lebesgue { level } if level > 0.0))
    }

    /// `c · μ` for `c ≥ 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c >= 0.0) {
            return Err(invalid("factor", format!("must be nonnegative and finite, got {c}")));
        }
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                primitive: match &t.primitive {
                    Primitive::Lebesgue { level } => Primitive::Lebesgue { level: level * c },
                    Primitive::PointMass { location, weight } => Primitive::PointMass {
                        location: *location,
                        weight: weight * c,
                    },
                    Primitive::BoxDensity { lo, hi, level } => Primitive::BoxDensity {
                        lo: lo.clone(),
                        hi: hi.clone(),
                        level: level * c,
                    },
                    Primitive::Gaussian {
                        mean,
                        variance,
                        weight,
                    } => Primitive::Gaussian {
                        mean: *mean,
                        variance: *variance,
                        weight: weight * c,
                    },
                    Primitive::SelfSimilar(s) => Primitive::SelfSimilar(s.scaled(c)),
                },
                window: t.window.clone(),
            })
            .collect();
        Self::new(self.dim, terms)
    }

    /// `μ + ν`.
    pub fn plus(&self, other: &Measure) -> Result<Self> {
        same_dim(self.dim, other.dim)?;
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self::new(self.dim, terms)
    }

    /// Total mass, or `None` when infinite.
    pub fn total_mass(&self) -> Option<f64> {
        let mut total = 0.0;
        for t in &self.terms {
            total += match &t.primitive {
                Primitive::Lebesgue { level } => {
                    if t.window.is_empty() && *level > 0.0 {
                        return None;
                    }
                    if *level == 0.0 {
                        0.0
                    } else {
                        self.term_ball_mass(t, &t.window[0], DEFAULT_EPS_MASS).value
                    }
                }
                _ if !t.window.is_empty() => self.term_ball_mass(t, &t.window[0], DEFAULT_EPS_MASS).value,
                Primitive::PointMass { weight, .. } => *weight,
                Primitive::BoxDensity { lo, hi, level } => {
                    level * lo.iter().zip(hi).map(|(a, b)| b - a).product::<f64>()
                }
                Primitive::Gaussian { weight, .. } => *weight,
                Primitive::SelfSimilar(s) => s.weight(),
            };
        }
        Some(total)
    }

    /// `μ(B)` to within the default tolerance (relative for balls of volume
    /// below one).
    pub fn ball_mass(&self, b: &Ball) -> Result<f64> {
        Ok(self.ball_mass_with(b, DEFAULT_EPS_MASS)?.value)
    }

    /// `μ(B)` with error at most `eps · min(1, m(B))`.
    pub fn ball_mass_with(&self, b: &Ball, eps: f64) -> Result<Estimate> {
        same_dim(self.dim, b.dim())?;
        require_positive("eps", eps)?;
        if self.dim == 1 {
            return self.interval_mass_with(&Interval::from_ball(b), eps);
        }
        let tol = eps * b.volume().min(1.0) / self.terms.len().max(1) as f64;
        let mut acc = Estimate::exact(0.0);
        for t in &self.terms {
            acc = acc.add(self.term_ball_mass(t, b, tol));
        }
        Ok(clamp_nonneg(acc))
    }

    /// Mass of an interval (1-D only), honouring the interval's closedness.
    pub fn interval_mass(&self, iv: &Interval) -> Result<f64> {
        Ok(self.interval_mass_with(iv, DEFAULT_EPS_MASS)?.value)
    }

    pub fn interval_mass_with(&self, iv: &Interval, eps: f64) -> Result<Estimate> {
        if self.dim != 1 {
            return Err(Error::Unsupported("interval masses are one-dimensional".into()));
        }
        require_positive("eps", eps)?;
        let tol = eps * iv.length().min(1.0) / self.terms.len().max(1) as f64;
        let mut acc = Estimate::exact(0.0);
        for t in &self.terms {
            let region = match t.window_interval() {
                None => *iv,
                Some(w) => iv.intersect_open(w.center, w.half),
            };
            if region.is_empty() {
                continue;
            }
            acc = acc.add(match &t.primitive {
                Primitive::Lebesgue { level } => Estimate::exact(level * region.length()),
                Primitive::PointMass { location, weight } => {
                    Estimate::exact(if region.contains(location.get(0)) { *weight } else { 0.0 })
                }
                Primitive::BoxDensity { lo, hi, level } => Estimate::exact(level * region.overlap(lo[0], hi[0])),
                Primitive::Gaussian {
                    mean,
                    variance,
                    weight,
                } => Estimate::exact(weight * gaussian_mass_centered(mean.get(0), *variance, region.center, region.half)),
                Primitive::SelfSimilar(s) => s.interval_mass(&region, tol),
            });
        }
        Ok(clamp_nonneg(acc))
    }

    /// Mass of one term on `b` for n ≥ 2 (or via the window's first ball).
    fn term_ball_mass(&self, t: &Term, b: &Ball, tol: f64) -> Estimate {
        if self.dim == 1 {
            let iv = Interval::from_ball(b);
            let single = Measure {
                dim: 1,
                terms: vec![t.clone()],
            };
            return single
                .interval_mass_with(&iv, tol.max(f64::MIN_POSITIVE) / iv.length().min(1.0))
                .unwrap_or(Estimate::exact(0.0));
        }
        let mut balls = Vec::with_capacity(1 + t.window.len());
        balls.push(*b);
        balls.extend(t.window.iter().copied());
        let n = self.dim;
        match &t.primitive {
            Primitive::PointMass { location, weight } => {
                Estimate::exact(if balls.iter().all(|w| w.contains(location)) { *weight } else { 0.0 })
            }
            Primitive::Lebesgue { level } => {
                if t.window.is_empty() {
                    Estimate::exact(level * b.volume())
                } else {
                    integrate_region(&Separable::new(n), &balls, tol / level.max(1e-300)).scale(*level)
                }
            }
            Primitive::BoxDensity { lo, hi, level } => {
                let sep = Separable::new(n).with_box(lo, hi);
                integrate_region(&sep, &balls, tol / level.max(1e-300)).scale(*level)
            }
            Primitive::Gaussian {
                mean,
                variance,
                weight,
            } => {
                let mut sep = Separable::new(n);
                for i in 0..n {
                    sep = sep.times_gauss(i, mean.get(i), *variance);
                }
                integrate_region(&sep, &balls, tol / weight.max(1e-300)).scale(*weight)
            }
            Primitive::SelfSimilar(_) => unreachable!("validated as one-dimensional"),
        }
    }

    /// `τ_{-x0} μ`, the measure `E ↦ μ(E + x0)`.
    pub fn translate(&self, x0: &Point) -> Result<Self> {
        same_dim(self.dim, x0.dim())?;
        let shift = x0.scale(-1.0);
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                primitive: match &t.primitive {
                    Primitive::Lebesgue { level } => Primitive::Lebesgue { level: *level },
                    Primitive::PointMass { location, weight } => Primitive::PointMass {
                        location: location.add(&shift),
                        weight: *weight,
                    },
                    Primitive::BoxDensity { lo, hi, level } => Primitive::BoxDensity {
                        lo: lo.iter().zip(x0.coords()).map(|(a, s)| a - s).collect(),
                        hi: hi.iter().zip(x0.coords()).map(|(a, s)| a - s).collect(),
                        level: *level,
                    },
                    Primitive::Gaussian {
                        mean,
                        variance,
                        weight,
                    } => Primitive::Gaussian {
                        mean: mean.add(&shift),
                        variance: *variance,
                        weight: *weight,
                    },
                    Primitive::SelfSimilar(s) => Primitive::SelfSimilar(s.translated(x0.get(0))),
                },
                window: t.window.iter().map(|w| w.translated(&shift)).collect(),
            })
            .collect();
        Self::new(self.dim, terms)
    }

    /// The dilate `ν_r(E) = r^{-n} μ(rE)`.
    pub fn dilate(&self, r: f64) -> Result<Self> {
        require_positive("r", r)?;
        let n = self.dim as i32;
        let jac = r.powi(-n);
        let inv = 1.0 / r;
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                primitive: match &t.primitive {
                    Primitive::Lebesgue { level } => Primitive::Lebesgue { level: *level },
                    Primitive::PointMass { location, weight } => Primitive::PointMass {
                        location: location.scale(inv),
                        weight: weight * jac,
                    },
                    Primitive::BoxDensity { lo, hi, level } => Primitive::BoxDensity {
                        lo: lo.iter().map(|a| a / r).collect(),
                        hi: hi.iter().map(|a| a / r).collect(),
                        level: *level,
                    },
                    Primitive::Gaussian {
                        mean,
                        variance,
                        weight,
                    } => Primitive::Gaussian {
                        mean: mean.scale(inv),
                        variance: variance / (r * r),
                        weight: weight * jac,
                    },
                    Primitive::SelfSimilar(s) => Primitive::SelfSimilar(s.pushed_by_dilation(r, jac)),
                },
                window: t
                    .window
                    .iter()
                    .map(|w| Ball {
                        center: w.center.scale(inv),
                        radius: w.radius / r,
                    })
                    .collect(),
            })
            .collect();
        Self::new(self.dim, terms)
    }

    /// Restriction `E ↦ μ(E ∩ B)`.
    pub fn restrict(&self, b: &Ball) -> Result<Self> {
        same_dim(self.dim, b.dim())?;
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            match &t.primitive {
                Primitive::PointMass { location, .. } => {
                    if b.contains(location) {
                        terms.push(t.clone());
                    }
                }
                Primitive::Lebesgue { level } if self.dim == 1 => {
                    let mut iv = Interval::from_ball(b);
                    if let Some(w) = t.window_interval() {
                        iv = iv.intersect_open(w.center, w.half);
                    }
                    if !iv.is_empty() {
                        terms.push(Term::new(Primitive::BoxDensity {
                            lo: vec![iv.lo()],
                            hi: vec![iv.hi()],
                            level: *level,
                        }));
                    }
                }
                Primitive::BoxDensity { lo, hi, level } if self.dim == 1 => {
                    let mut iv = Interval::from_ball(b);
                    if let Some(w) = t.window_interval() {
                        iv = iv.intersect_open(w.center, w.half);
                    }
                    let (a, c) = (lo[0].max(iv.lo()), hi[0].min(iv.hi()));
                    if c > a {
                        terms.push(Term::new(Primitive::BoxDensity {
                            lo: vec![a],
                            hi: vec![c],
                            level: *level,
                        }));
                    }
                }
                _ => {
                    let mut t = t.clone();
                    t.window.push(*b);
                    terms.push(t);
                }
            }
        }
        Self::new(self.dim, terms)
    }

    /// Certified bound on `∫ e^{-|y|²/4t} dμ(y)`.
    pub fn class_m_check(&self, t: f64) -> ClassMCertificate {
        if !(t.is_finite() && t > 0.0) {
            return ClassMCertificate {
                member: false,
                bound: f64::INFINITY,
                method: "time must be positive".into(),
            };
        }
        let n = self.dim as i32;
        let s = (4.0 * PI * t).sqrt();
        let mut bound = 0.0;
        let mut methods: Vec<&str> = Vec::new();
        for term in &self.terms {
            let (b, m) = match &term.primitive {
                Primitive::Lebesgue { level } => (level * s.powi(n), "gaussian integral"),
                Primitive::PointMass { location, weight } => {
                    (weight * (-location.norm_sq() / (4.0 * t)).exp(), "atom weight")
                }
                Primitive::BoxDensity { lo, hi, level } => {
                    let w = (4.0 * t).sqrt();
                    let prod: f64 = lo
                        .iter()
                        .zip(hi)
                        .map(|(a, c)| s * crate::special::half_erf_diff(a / w, c / w))
                        .product();
                    (level * prod, "erf product")
                }
                Primitive::Gaussian {
                    mean,
                    variance,
                    weight,
                } => {
                    let v = variance + 2.0 * t;
                    let dens = (-mean.norm_sq() / (2.0 * v)).exp() / (2.0 * PI * v).sqrt().powi(n);
                    (weight * s.powi(n) * dens, "gaussian convolution")
                }
                Primitive::SelfSimilar(ss) => (ss.weight(), "total mass"),
            };
            bound += b;
            if !methods.contains(&m) {
                methods.push(m);
            }
        }
        ClassMCertificate {
            member: bound.is_finite(),
            bound,
            method: if methods.is_empty() {
                "zero measure".into()
            } else {
                methods.join(", ")
            },
        }
    }

    /// Points of ℝ where the 1-D measure changes character: atoms, box
    /// endpoints, Gaussian means, self-similar hull ends and window ends.
    pub fn feature_points_1d(&self) -> Vec<f64> {
        let mut pts = Vec::new();
        if self.dim != 1 {
            return pts;
        }
        for t in &self.terms {
            match &t.primitive {
                Primitive::Lebesgue { .. } => {}
                Primitive::PointMass { location, .. } => pts.push(location.get(0)),
                Primitive::BoxDensity { lo, hi, .. } => {
                    pts.push(lo[0]);
                    pts.push(hi[0]);
                }
                Primitive::Gaussian { mean, .. } => pts.push(mean.get(0)),
                Primitive::SelfSimilar(s) => {
                    pts.push(s.hull().0);
                    pts.push(s.hull().1);
                }
            }
            if let Some(w) = t.window_interval() {
                pts.push(w.lo());
                pts.push(w.hi());
            }
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// Atoms of the measure with their weights.
    pub fn atoms(&self) -> Vec<(Point, f64)> {
        self.terms
            .iter()
            .filter_map(|t| match &t.primitive {
                Primitive::PointMass { location, weight } if *weight > 0.0 => Some((*location, *weight)),
                _ => None,
            })
            .collect()
    }
}

fn clamp_nonneg(e: Estimate) -> Estimate {
    Estimate {
        value: e.value.max(0.0),
        error: e.error,
    }
}
