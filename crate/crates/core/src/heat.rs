//! The heat kernel and Gauss-Weierstrass integrals of measures.
//!
//! Every primitive has a closed form or a certified expansion: atoms and
//! Gaussians are exact, boxes are products of error functions, restricted
//! terms in several dimensions go through the sliced region integrator,
//! and self-similar terms through cylinder refinement.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};
use crate::geometry::{same_dim, Point};
use crate::measure::{integrate_region, Estimate, Measure, Primitive, Separable, Term};
use crate::special::{gaussian_mass, gaussian_mass_centered, normal_pdf};

/// A point `(x, t)` of the upper half-space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpaceTime")]
pub struct SpaceTimePoint {
    pub x: Point,
    pub t: f64,
}

#[derive(Deserialize)]
struct RawSpaceTime {
    x: Point,
    t: f64,
}

impl TryFrom<RawSpaceTime> for SpaceTimePoint {
    type Error = Error;
    fn try_from(raw: RawSpaceTime) -> Result<Self> {
        SpaceTimePoint::new(raw.x, raw.t)
    }
}

impl SpaceTimePoint {
    pub fn new(x: Point, t: f64) -> Result<Self> {
        require_positive("t", t)?;
        Ok(Self { x, t })
    }

    pub fn scalar(x: f64, t: f64) -> Result<Self> {
        Self::new(Point::scalar(x), t)
    }
}

/// `W(x, t) = (4πt)^{-n/2} e^{-|x|²/4t}`.
pub fn heat_kernel(x: &Point, t: f64) -> Result<f64> {
    require_positive("t", t)?;
    Ok(kernel(x, t))
}

#[inline]
pub(crate) fn kernel(x: &Point, t: f64) -> f64 {
    let n = x.dim() as i32;
    (-x.norm_sq() / (4.0 * t)).exp() / (4.0 * PI * t).sqrt().powi(n)
}

/// The profile `h(x) = W(x, 1)`.
pub fn profile(x: &Point) -> f64 {
    kernel(x, 1.0)
}

/// `Wμ(x, t)` with absolute error at most `tol`.
pub fn gw_eval(mu: &Measure, p: &SpaceTimePoint, tol: f64) -> Result<Estimate> {
    require_positive("tol", tol)?;
    same_dim(mu.dim(), p.x.dim())?;
    let cert = mu.class_m_check(p.t);
    if !cert.member {
        return Err(Error::Unsupported(format!(
            "no finite Gaussian-weighted mass bound at t = {}",
            p.t
        )));
    }
    let share = tol / mu.terms().len().max(1) as f64;
    let mut acc = Estimate::exact(0.0);
    for term in mu.terms() {
        acc = acc.add(term_heat(mu.dim(), term, &p.x, p.t, share));
    }
    acc.value = acc.value.max(0.0);
    Ok(acc)
}

/// `Wμ(x, t)` with error at most `max(abs_tol, rel_tol · Wμ(x, t))`.
pub fn gw_eval_rel(mu: &Measure, p: &SpaceTimePoint, abs_tol: f64, rel_tol: f64) -> Result<Estimate> {
    require_positive("rel_tol", rel_tol)?;
    let pilot = gw_eval(mu, p, abs_tol * 1e3)?;
    let tol = abs_tol.max(rel_tol * (pilot.value - pilot.error).max(0.0));
    if pilot.error <= tol {
        return Ok(pilot);
    }
    gw_eval(mu, p, tol)
}

fn term_heat(dim: usize, term: &Term, x: &Point, t: f64, tol: f64) -> Estimate {
    let var = 2.0 * t;
    let windowed = !term.window.is_empty();
    let kernel_sep = || {
        let mut sep = Separable::new(dim);
        for i in 0..dim {
            sep = sep.times_gauss(i, x.get(i), var);
        }
        sep
    };
    match &term.primitive {
        Primitive::Lebesgue { level } => {
            if !windowed {
                Estimate::exact(*level)
            } else if dim == 1 {
                let w = term.window_interval().expect("windowed");
                Estimate::exact(level * gaussian_mass_centered(x.get(0), var, w.center, w.half))
            } else {
                integrate_region(&kernel_sep(), &term.window, tol / level.max(1e-300)).scale(*level)
            }
        }
        Primitive::PointMass { location, weight } => {
            if term.window.iter().all(|w| w.contains(location)) {
                Estimate::exact(weight * kernel(&x.sub(location), t))
            } else {
                Estimate::exact(0.0)
            }
        }
        Primitive::BoxDensity { lo, hi, level } => {
            if dim == 1 {
                let (mut a, mut b) = (lo[0], hi[0]);
                if let Some(w) = term.window_interval() {
                    a = a.max(w.lo());
                    b = b.min(w.hi());
                }
                Estimate::exact(level * gaussian_mass(x.get(0), var, a, b))
            } else if !windowed {
                let prod: f64 = (0..dim).map(|i| gaussian_mass(x.get(i), var, lo[i], hi[i])).product();
                Estimate::exact(level * prod)
            } else {
                let sep = kernel_sep().with_box(lo, hi);
                integrate_region(&sep, &term.window, tol / level.max(1e-300)).scale(*level)
            }
        }
        Primitive::Gaussian {
            mean,
            variance,
            weight,
        } => {
            if !windowed {
                let prod: f64 = (0..dim)
                    .map(|i| normal_pdf(x.get(i), mean.get(i), variance + var))
                    .product();
                Estimate::exact(weight * prod)
            } else if dim == 1 {
                let w = term.window_interval().expect("windowed");
                let (m, v) = (mean.get(0), *variance);
                let s = v + var;
                let c = normal_pdf(m, x.get(0), s);
                let m2 = (m * var + x.get(0) * v) / s;
                let v2 = v * var / s;
                Estimate::exact(weight * c * gaussian_mass_centered(m2, v2, w.center, w.half))
            } else {
                let mut sep = kernel_sep();
                for i in 0..dim {
                    sep = sep.times_gauss(i, mean.get(i), *variance);
                }
                integrate_region(&sep, &term.window, tol / weight.max(1e-300)).scale(*weight)
            }
        }
        Primitive::SelfSimilar(s) => s.heat(x.get(0), t, tol, term.window_interval()),
    }
}

/// `Wμ` as a field on the upper half-space, evaluated to a fixed tolerance.
#[derive(Debug, Clone)]
pub struct HeatField {
    pub measure: Measure,
    pub tol: f64,
}

impl HeatField {
    pub fn new(measure: Measure, tol: f64) -> Result<Self> {
        require_positive("tol", tol)?;
        Ok(Self { measure, tol })
    }

    pub fn eval(&self, p: &SpaceTimePoint) -> Result<Estimate> {
        gw_eval(&self.measure, p, self.tol)
    }

    /// Evaluates every point independently (in parallel); the output order
    /// matches the input.
    pub fn eval_grid(&self, points: &[SpaceTimePoint]) -> Result<Vec<Estimate>> {
        points.par_iter().map(|p| self.eval(p)).collect()
    }
}

/// `|W(ν_r)(x, t) - Wν(rx, r²t)|`.
pub fn gw_field_dilate_check(mu: &Measure, r: f64, p: &SpaceTimePoint, tol: f64) -> Result<f64> {
    let lhs = gw_eval(&mu.dilate(r)?, p, tol)?;
    let q = SpaceTimePoint::new(p.x.scale(r), r * r * p.t)?;
    let rhs = gw_eval(mu, &q, tol)?;
    Ok((lhs.value - rhs.value).abs())
}

/// `|W(τ_{-x0}μ)(x, t) - Wμ(x + x0, t)|`.
pub fn translation_check(mu: &Measure, x0: &Point, p: &SpaceTimePoint, tol: f64) -> Result<f64> {
    let lhs = gw_eval(&mu.translate(x0)?, p, tol)?;
    let q = SpaceTimePoint::new(p.x.add(x0), p.t)?;
    let rhs = gw_eval(mu, &q, tol)?;
    Ok((lhs.value - rhs.value).abs())
}
