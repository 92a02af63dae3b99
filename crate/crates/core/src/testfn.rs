//! Compactly supported test functions, their heat evolutions, the duality
//! identity and the uniform ratio convergence `Wf(·, t)/h → f/h`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, require_positive, Error, Result};
use crate::geometry::{same_dim, unit_ball_volume, Interval, Point};
use crate::heat::{gw_eval, profile, SpaceTimePoint};
use crate::measure::{Estimate, Measure, Primitive};
use crate::quad::{integrate_partition, QuadOptions};
use crate::special::{gaussian_mass, normal_pdf};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction {
    Zero {
        dim: usize,
    },
    /// `height · max(0, 1 - |x - center| / half_width)` on ℝ.
    Triangle {
        center: f64,
        half_width: f64,
        height: f64,
    },
    /// `height · (1 - |x - center|² / radius²)^power` inside the ball.
    RadialBump {
        center: Point,
        radius: f64,
        power: u32,
        height: f64,
    },
}

impl TestFunction {
    /// The triangle of height one on `[-1, 1]`.
    pub fn standard_bump() -> Self {
        TestFunction::Triangle {
            center: 0.0,
            half_width: 1.0,
            height: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            TestFunction::Zero { dim } => crate::geometry::check_dim(*dim),
            TestFunction::Triangle {
                center,
                half_width,
                height,
            } => {
                if !center.is_finite() || !height.is_finite() {
                    return Err(invalid("triangle", "non-finite parameter"));
                }
                require_positive("half_width", *half_width)
            }
            TestFunction::RadialBump {
                radius, power, height, ..
            } => {
                if !height.is_finite() {
                    return Err(invalid("height", "must be finite"));
                }
                if *power < 2 {
                    return Err(invalid("power", "must be at least 2"));
                }
                require_positive("radius", *radius)
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            TestFunction::Zero { dim } => *dim,
            TestFunction::Triangle { .. } => 1,
            TestFunction::RadialBump { center, .. } => center.dim(),
        }
    }

    pub fn eval(&self, x: &Point) -> f64 {
        match self {
            TestFunction::Zero { .. } => 0.0,
            TestFunction::Triangle {
                center,
                half_width,
                height,
            } => height * (1.0 - (x.get(0) - center).abs() / half_width).max(0.0),
            TestFunction::RadialBump {
                center,
                radius,
                power,
                height,
            } => {
                let u = 1.0 - x.dist_sq(center) / (radius * radius);
                if u > 0.0 {
                    height * u.powi(*power as i32)
                } else {
                    0.0
                }
            }
        }
    }

    /// Radius `R` of a ball about the origin containing the support.
    pub fn support_radius(&self) -> f64 {
        match self {
            TestFunction::Zero { .. } => 0.0,
            TestFunction::Triangle {
                center, half_width, ..
            } => center.abs() + half_width,
            TestFunction::RadialBump { center, radius, .. } => center.norm_sq().sqrt() + radius,
        }
    }

    /// Support as an interval (1-D), or `None` for the zero function.
    fn support_1d(&self) -> Option<(f64, f64, f64)> {
        match self {
            TestFunction::Zero { .. } => None,
            TestFunction::Triangle {
                center, half_width, ..
            } => Some((center - half_width, *center, center + half_width)),
            TestFunction::RadialBump { center, radius, .. } => {
                let c = center.get(0);
                Some((c - radius, c, c + radius))
            }
        }
    }

    /// `∫ |f|`.
    pub fn l1_norm(&self) -> f64 {
        match self {
            TestFunction::Zero { .. } => 0.0,
            TestFunction::Triangle {
                half_width, height, ..
            } => height.abs() * half_width,
            TestFunction::RadialBump {
                center,
                radius,
                power,
                height,
            } => {
                // ∫_{|u|<1} (1 - |u|²)^k du = m(B(0,1)) · Γ(k+1) Γ(n/2+1) / Γ(k+n/2+1).
                let n = center.dim() as f64;
                let k = *power as f64;
                let ratio = (libm::lgamma(k + 1.0) + libm::lgamma(n / 2.0 + 1.0) - libm::lgamma(k + n / 2.0 + 1.0)).exp();
                height.abs() * unit_ball_volume(center.dim()) * ratio * radius.powi(center.dim() as i32)
            }
        }
    }

    /// `∫ f` (equal to the L¹ norm up to the sign of the height).
    pub fn integral(&self) -> f64 {
        let sign = match self {
            TestFunction::Zero { .. } => 1.0,
            TestFunction::Triangle { height, .. } | TestFunction::RadialBump { height, .. } => height.signum(),
        };
        sign * self.l1_norm()
    }

    /// `Wf(x, t) = ∫ W(x - y, t) f(y) dy` on ℝ.
    pub fn heat(&self, x: f64, t: f64, tol: f64) -> Result<Estimate> {
        require_positive("t", t)?;
        if self.dim() != 1 {
            return Err(Error::Unsupported("heat evolution of test functions is one-dimensional".into()));
        }
        let var = 2.0 * t;
        match self {
            TestFunction::Zero { .. } => Ok(Estimate::exact(0.0)),
            TestFunction::Triangle {
                center,
                half_width,
                height,
            } => {
                let (a, c) = (*half_width, *center);
                let slope = height / a;
                // On each piece f(y) = f_lin(x) + β (y - x); the mean and
                // first moment of N(x, 2t) over the piece are closed form.
                let piece = |p: f64, q: f64, beta: f64, at_x: f64| {
                    at_x * gaussian_mass(x, var, p, q) + beta * var * (normal_pdf(p, x, var) - normal_pdf(q, x, var))
                };
                let left = piece(c - a, c, slope, height * (1.0 + (x - c) / a));
                let right = piece(c, c + a, -slope, height * (1.0 - (x - c) / a));
                Ok(Estimate::exact(left + right))
            }
            TestFunction::RadialBump { .. } => {
                let (lo, mid, hi) = self.support_1d().expect("nonzero");
                let s = var.sqrt();
                let mut pts = vec![lo, mid, hi];
                for k in [0.0, 1.0, 3.0, 8.0] {
                    pts.push(x - k * s);
                    pts.push(x + k * s);
                }
                pts.retain(|p| *p >= lo && *p <= hi);
                let q = integrate_partition(
                    |y| normal_pdf(y, x, var) * self.eval(&Point::scalar(y)),
                    &pts,
                    QuadOptions::new(tol),
                );
                Ok(Estimate {
                    value: q.value,
                    error: q.error,
                })
            }
        }
    }

    /// Upper bound for `|∂²_x Wf(x, t)|` over all `x`.
    pub fn heat_second_derivative_bound(&self, t: f64) -> f64 {
        match self {
            TestFunction::Zero { .. } => 0.0,
            TestFunction::Triangle {
                half_width, height, ..
            } => 4.0 * height.abs() / (half_width * (4.0 * PI * t).sqrt()),
            TestFunction::RadialBump {
                radius,
                power,
                height,
                ..
            } => {
                let k = *power as f64;
                height.abs() * (4.0 * k * (k - 1.0) + 2.0 * k) / (radius * radius)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    /// `∫ Wf(·, t) dν`.
    pub left: Estimate,
    /// `∫ Wν(·, t) f dx`.
    pub right: Estimate,
    pub residual: f64,
}

/// Number of standard deviations of `N(0, 2t)` after which `Wf` is
/// negligible outside the support of `f`.
const HEAT_REACH: f64 = 14.0;

/// Both sides of `∫ Wf(x, t) dν(x) = ∫ Wν(x, t) f(x) dx` on ℝ.
pub fn duality_check(f: &TestFunction, nu: &Measure, t: f64, tol: f64) -> Result<DualityReport> {
    f.validate()?;
    require_positive("t", t)?;
    require_positive("tol", tol)?;
    same_dim(f.dim(), nu.dim())?;
    if nu.dim() != 1 {
        return Err(Error::Unsupported("the duality check is one-dimensional".into()));
    }
    let Some((flo, fmid, fhi)) = f.support_1d() else {
        return Ok(DualityReport {
            left: Estimate::exact(0.0),
            right: Estimate::exact(0.0),
            residual: 0.0,
        });
    };
    let sd = (2.0 * t).sqrt();
    let reach = HEAT_REACH * sd;
    let inner_tol = 1e-3 * tol;
    let share = 0.25 * tol / nu.terms().len().max(1) as f64;
    let wf = |y: f64| f.heat(y, t, inner_tol).map(|e| e.value).unwrap_or(f64::NAN);
    // Outside supp f ± reach, Wf ≤ ‖f‖₁ (4πt)^{-1/2} e^{-reach²/4t}, and
    // its integral there is at most ‖f‖₁ erfc(reach / 2√t).
    let far = f.l1_norm() * (-(reach * reach) / (4.0 * t)).exp() / (4.0 * PI * t).sqrt();
    let far_mass = f.l1_norm() * crate::special::erfc(reach / (2.0 * t.sqrt()));

    let quad = |g: &dyn Fn(f64) -> f64, a: f64, b: f64, extra: &[f64]| -> Result<Estimate> {
        if !(b > a) {
            return Ok(Estimate::exact(0.0));
        }
        let mut pts = vec![a, b, fmid, flo, fhi];
        for k in [-6.0, -2.0, 0.0, 2.0, 6.0] {
            pts.push(flo + k * sd);
            pts.push(fhi + k * sd);
            pts.push(fmid + k * sd);
            for e in extra {
                pts.push(e + k * sd);
            }
        }
        pts.retain(|p| *p >= a && *p <= b);
        let q = integrate_partition(g, &pts, QuadOptions::new(share));
        if !q.converged {
            return Err(Error::NonConvergence {
                what: "duality quadrature",
                requested: share,
                achieved: q.error,
            });
        }
        Ok(Estimate {
            value: q.value,
            error: q.error,
        })
    };

    let mut left = Estimate::exact(0.0);
    for term in nu.terms() {
        let w = term.window_interval();
        let clip = |a: f64, b: f64| -> (f64, f64) {
            let (mut a, mut b) = (a.max(flo - reach), b.min(fhi + reach));
            if let Some(w) = w {
                a = a.max(w.lo());
                b = b.min(w.hi());
            }
            (a, b)
        };
        let part = match &term.primitive {
            Primitive::PointMass { location, weight } => {
                let y = location.get(0);
                if w.is_none_or(|w: Interval| w.contains(y)) {
                    Estimate {
                        value: weight * wf(y),
                        error: weight * inner_tol,
                    }
                } else {
                    Estimate::exact(0.0)
                }
            }
            Primitive::Lebesgue { level } => {
                if w.is_none() {
                    Estimate::exact(level * f.integral())
                } else {
                    let (a, b) = clip(f64::NEG_INFINITY, f64::INFINITY);
                    quad(&|y| wf(y), a, b, &[])?.scale(*level).add(Estimate {
                        value: 0.0,
                        error: level * far_mass,
                    })
                }
            }
            Primitive::BoxDensity { lo, hi, level } => {
                let (a, b) = clip(lo[0], hi[0]);
                let tail = level * far_mass;
                quad(&|y| wf(y), a, b, &[lo[0], hi[0]])?.scale(*level).add(Estimate {
                    value: 0.0,
                    error: tail,
                })
            }
            Primitive::Gaussian {
                mean,
                variance,
                weight,
            } => {
                let (m, v) = (mean.get(0), *variance);
                let s = v.sqrt();
                let (a, b) = clip(m - 40.0 * s, m + 40.0 * s);
                quad(&|y| normal_pdf(y, m, v) * wf(y), a, b, &[m, m - s, m + s])?
                    .scale(*weight)
                    .add(Estimate {
                        value: 0.0,
                        error: weight * far,
                    })
            }
            Primitive::SelfSimilar(s) => {
                let bound = f.heat_second_derivative_bound(t);
                let e = s.integrate_smooth(wf, |_, _| bound, share, w);
                Estimate {
                    value: e.value,
                    error: e.error + s.weight() * inner_tol,
                }
            }
        };
        left = left.add(part);
    }

    let features = nu.feature_points_1d();
    let eval_tol = 1e-2 * tol / (fhi - flo).max(1.0);
    let wnu = |x: f64| {
        SpaceTimePoint::scalar(x, t)
            .and_then(|p| gw_eval(nu, &p, eval_tol))
            .map(|e| e.value)
            .unwrap_or(f64::NAN)
    };
    let right = quad(&|x| wnu(x) * f.eval(&Point::scalar(x)), flo, fhi, &features)?;
    let right = right.add(Estimate {
        value: 0.0,
        error: eval_tol * f.l1_norm(),
    });
    if !(left.value.is_finite() && right.value.is_finite()) {
        return Err(Error::NonConvergence {
            what: "duality evaluation",
            requested: tol,
            achieved: f64::INFINITY,
        });
    }
    Ok(DualityReport {
        left,
        right,
        residual: (left.value - right.value).abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformRatioReport {
    /// Certified bound on `sup_x |Wf(x, t) - f(x)| / h(x)` (grid value only
    /// when not certified).
    pub value: f64,
    pub grid_sup: f64,
    pub padding: f64,
    /// Bound on the ratio for `|x| ≥ 2R`, available for `t < 1/4`.
    pub tail_bound: Option<f64>,
    pub certified: bool,
}

const RATIO_GRID: usize = 4001;

/// `sup_x |Wf(x, t) - f(x)| / h(x)` for a one-dimensional test function.
///
/// On `|x| < 2R` the supremum is sampled on a uniform grid and padded by
/// the largest difference between neighbouring samples. On `|x| ≥ 2R` it
/// is bounded by `t^{-1/2} e^{-R²(1/(4t) - 1)} ‖f‖₁`, valid for `t < 1/4`.
/// For larger `t` only the grid value is returned, flagged as not
/// certified.
pub fn uniform_ratio_error(f: &TestFunction, t: f64) -> Result<UniformRatioReport> {
    f.validate()?;
    require_positive("t", t)?;
    if let TestFunction::Zero { .. } = f {
        return Ok(UniformRatioReport {
            value: 0.0,
            grid_sup: 0.0,
            padding: 0.0,
            tail_bound: Some(0.0),
            certified: true,
        });
    }
    if f.dim() != 1 {
        return Err(Error::Unsupported("uniform ratio error is one-dimensional".into()));
    }
    let r = f.support_radius();
    let ratios: Vec<f64> = (0..RATIO_GRID)
        .map(|i| {
            let x = -2.0 * r + 4.0 * r * i as f64 / (RATIO_GRID - 1) as f64;
            let p = Point::scalar(x);
            let w = f.heat(x, t, 1e-13)?.value;
            Ok((w - f.eval(&p)).abs() / profile(&p))
        })
        .collect::<Result<_>>()?;
    let grid_sup = ratios.iter().copied().fold(0.0, f64::max);
    let padding = ratios.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
    let certified = t < 0.25;
    let tail_bound = certified.then(|| (-(r * r) * (1.0 / (4.0 * t) - 1.0)).exp() * f.l1_norm() / t.sqrt());
    let value = match tail_bound {
        Some(tb) => (grid_sup + padding).max(tb),
        None => grid_sup + padding,
    };
    Ok(UniformRatioReport {
        value,
        grid_sup,
        padding,
        tail_bound,
        certified,
    })
}
