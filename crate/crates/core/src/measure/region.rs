//! Integration of separable densities over `box ∩ B₁ ∩ … ∩ B_k`.
//!
//! Every density in the primitive family (and its product with the heat
//! kernel) factors over coordinates into constants and one-dimensional
//! Gaussians. The region is swept coordinate by coordinate: each slice of a
//! ball is again a ball, the last coordinate is integrated in closed form
//! and the outer ones adaptively along chords.

use crate::geometry::{Ball, MAX_DIM};
use crate::quad::integrate_chord;
use crate::special::{gaussian_mass_centered, normal_pdf};

use super::Estimate;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Factor {
    One,
    /// Normalised density of `N(mean, var)`.
    Gauss { mean: f64, var: f64 },
}

impl Factor {
    fn value(&self, y: f64) -> f64 {
        match *self {
            Factor::One => 1.0,
            Factor::Gauss { mean, var } => normal_pdf(y, mean, var),
        }
    }

    fn mass(&self, center: f64, half: f64) -> f64 {
        match *self {
            Factor::One => 2.0 * half,
            Factor::Gauss { mean, var } => gaussian_mass_centered(mean, var, center, half),
        }
    }

    /// Upper bound for the integral of the factor over `[lo, hi]`.
    fn mass_bound(&self, lo: f64, hi: f64) -> f64 {
        match self {
            Factor::One => hi - lo,
            Factor::Gauss { .. } => 1.0,
        }
    }

    /// Product with the normalised density `N(mean, var)`, returned as a
    /// constant times a new factor.
    pub(crate) fn times_gauss(self, mean: f64, var: f64) -> (f64, Factor) {
        match self {
            Factor::One => (1.0, Factor::Gauss { mean, var }),
            Factor::Gauss { mean: m, var: v } => {
                let s = v + var;
                let c = normal_pdf(m, mean, s);
                (
                    c,
                    Factor::Gauss {
                        mean: (m * var + mean * v) / s,
                        var: v * var / s,
                    },
                )
            }
        }
    }

    fn shifted(self, by: f64) -> Factor {
        match self {
            Factor::One => Factor::One,
            Factor::Gauss { mean, var } => Factor::Gauss {
                mean: mean - by,
                var,
            },
        }
    }

    fn breakpoints(&self, out: &mut Vec<f64>) {
        if let Factor::Gauss { mean, var } = *self {
            let sd = var.sqrt();
            for k in [0.0, 1.0, 4.0, 12.0] {
                out.push(mean - k * sd);
                out.push(mean + k * sd);
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Separable {
    pub dim: usize,
    pub scale: f64,
    pub factors: [Factor; MAX_DIM],
    pub lo: [f64; MAX_DIM],
    pub hi: [f64; MAX_DIM],
}

impl Separable {
    pub(crate) fn new(dim: usize) -> Self {
        Self {
            dim,
            scale: 1.0,
            factors: [Factor::One; MAX_DIM],
            lo: [f64::NEG_INFINITY; MAX_DIM],
            hi: [f64::INFINITY; MAX_DIM],
        }
    }

    pub(crate) fn with_box(mut self, lo: &[f64], hi: &[f64]) -> Self {
        for i in 0..self.dim {
            self.lo[i] = self.lo[i].max(lo[i]);
            self.hi[i] = self.hi[i].min(hi[i]);
        }
        self
    }

    pub(crate) fn times_gauss(mut self, i: usize, mean: f64, var: f64) -> Self {
        let (c, f) = self.factors[i].times_gauss(mean, var);
        self.scale *= c;
        self.factors[i] = f;
        self
    }
}

#[derive(Clone, Copy)]
struct Slice {
    c: [f64; MAX_DIM],
    r2: f64,
}

/// Integral of `sep` over its box intersected with all `balls` (at least
/// one), to absolute tolerance `tol`.
pub(crate) fn integrate(sep: &Separable, balls: &[Ball], tol: f64) -> Estimate {
    debug_assert!(!balls.is_empty());
    if sep.scale == 0.0 {
        return Estimate::exact(0.0);
    }
    // Work relative to the first ball's centre.
    let origin = balls[0].center;
    let mut local = *sep;
    for i in 0..sep.dim {
        let o = origin.get(i);
        local.lo[i] = sep.lo[i] - o;
        local.hi[i] = sep.hi[i] - o;
        local.factors[i] = sep.factors[i].shifted(o);
    }
    let slices: Vec<Slice> = balls
        .iter()
        .map(|b| {
            let mut c = [0.0; MAX_DIM];
            for (i, ci) in c.iter_mut().enumerate().take(sep.dim) {
                *ci = b.center.get(i) - origin.get(i);
            }
            Slice {
                c,
                r2: b.radius * b.radius,
            }
        })
        .collect();
    let inner_tol = tol / sep.scale.abs();
    let (v, e) = sweep(&local, 0, &slices, inner_tol);
    Estimate {
        value: sep.scale * v,
        error: sep.scale.abs() * e,
    }
}

fn sweep(sep: &Separable, k: usize, balls: &[Slice], tol: f64) -> (f64, f64) {
    let mut lo = sep.lo[k];
    let mut hi = sep.hi[k];
    for b in balls {
        let h = b.r2.sqrt();
        lo = lo.max(b.c[k] - h);
        hi = hi.min(b.c[k] + h);
    }
    if !(hi > lo) {
        return (0.0, 0.0);
    }
    let factor = sep.factors[k];
    if k + 1 == sep.dim {
        return (factor.mass(0.5 * (lo + hi), 0.5 * (hi - lo)), 0.0);
    }
    let mut breaks = Vec::new();
    factor.breakpoints(&mut breaks);
    for b in balls {
        breaks.push(b.c[k]);
    }
    if k + 2 == sep.dim {
        planar_kinks(sep, k, balls, &mut breaks);
    }
    let inner_tol = 0.5 * tol / factor.mass_bound(lo, hi).max(1.0);
    let mut sliced: Vec<Slice> = balls.to_vec();
    let q = integrate_chord(
        |y| {
            let fy = factor.value(y);
            if fy == 0.0 {
                return 0.0;
            }
            for (s, b) in sliced.iter_mut().zip(balls) {
                let d = y - b.c[k];
                s.r2 = b.r2 - d * d;
                if s.r2 <= 0.0 {
                    return 0.0;
                }
            }
            fy * sweep(sep, k + 1, &sliced, inner_tol).0
        },
        lo,
        hi,
        &breaks,
        0.5 * tol,
    );
    (q.value, q.error + inner_tol * factor.mass_bound(lo, hi))
}

/// Abscissae in coordinate `k` where the chord in coordinate `k + 1` stops
/// being smooth: circles crossing each other or a face of the box.
fn planar_kinks(sep: &Separable, k: usize, balls: &[Slice], out: &mut Vec<f64>) {
    let j = k + 1;
    for (i, a) in balls.iter().enumerate() {
        for face in [sep.lo[j], sep.hi[j]] {
            let d = face - a.c[j];
            let h2 = a.r2 - d * d;
            if face.is_finite() && h2 > 0.0 {
                out.push(a.c[k] - h2.sqrt());
                out.push(a.c[k] + h2.sqrt());
            }
        }
        for b in &balls[i + 1..] {
            let (dx, dy) = (b.c[k] - a.c[k], b.c[j] - a.c[j]);
            let d2 = dx * dx + dy * dy;
            if d2 == 0.0 {
                continue;
            }
            let along = 0.5 * (d2 + a.r2 - b.r2) / d2;
            let h2 = a.r2 / d2 - along * along;
            if h2 > 0.0 {
                let h = h2.sqrt();
                out.push(a.c[k] + along * dx - h * dy);
                out.push(a.c[k] + along * dx + h * dy);
            }
        }
    }
}
