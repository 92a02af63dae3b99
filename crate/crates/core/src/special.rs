//! Error function and Gaussian interval masses.
//!
//! `erf`/`erfc` come from `libm` (a port of the musl/FreeBSD routines, below
//! one ulp). The helpers here avoid the cancellation that a naive
//! `erf(b) - erf(a)` suffers in the tails and on very short intervals.

use std::f64::consts::{PI, SQRT_2};
use std::sync::OnceLock;

#[inline]
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// `(erf(b) - erf(a)) / 2` for `a <= b`; routed through `erfc` when both
/// arguments sit in the same tail.
pub fn half_erf_diff(a: f64, b: f64) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let d = if a >= 0.0 {
        erfc(a) - erfc(b)
    } else if b <= 0.0 {
        erfc(-b) - erfc(-a)
    } else {
        erf(b) - erf(a)
    };
    (0.5 * d).max(0.0)
}

/// Density of `N(mean, var)` at `x` (one coordinate).
#[inline]
pub fn normal_pdf(x: f64, mean: f64, var: f64) -> f64 {
    let z = x - mean;
    (-(z * z) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
}

/// Mass of `N(mean, var)` on the interval `center ± half`.
///
/// Short intervals (width below one standard deviation) use a 12-point
/// Gauss-Legendre rule, which keeps full relative precision where the erf
/// difference would cancel.
pub fn gaussian_mass_centered(mean: f64, var: f64, center: f64, half: f64) -> f64 {
    if !(half > 0.0) {
        return 0.0;
    }
    let sd = var.sqrt();
    if half.is_finite() && 2.0 * half <= sd {
        let (nodes, weights) = legendre12();
        let offset = center - mean;
        let mut acc = 0.0;
        for (x, w) in nodes.iter().zip(weights) {
            let z = offset + half * x;
            acc += w * (-(z * z) / (2.0 * var)).exp();
        }
        acc * half / (2.0 * PI * var).sqrt()
    } else {
        let s = sd * SQRT_2;
        half_erf_diff((center - half - mean) / s, (center + half - mean) / s)
    }
}

/// Mass of `N(mean, var)` on `[lo, hi]` (infinite endpoints allowed).
pub fn gaussian_mass(mean: f64, var: f64, lo: f64, hi: f64) -> f64 {
    if !(hi > lo) {
        return 0.0;
    }
    if lo.is_finite() && hi.is_finite() {
        gaussian_mass_centered(mean, var, 0.5 * (lo + hi), 0.5 * (hi - lo))
    } else {
        let s = (var.sqrt()) * SQRT_2;
        half_erf_diff((lo - mean) / s, (hi - mean) / s)
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, computed by Newton
/// iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn legendre12() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(12))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from mpmath at 30 digits.
    #[test]
    fn erf_matches_reference() {
        let cases = [
            (0.5, 0.520_499_877_813_046_5),
            (1.0, 0.842_700_792_949_714_9),
            (2.5, 0.999_593_047_982_555),
        ];
        for (x, want) in cases {
            assert!((erf(x) - want).abs() <= 1e-15 * want, "erf({x})");
        }
        let tail = erfc(6.0);
        assert!((tail - 2.151_973_671_249_891_3e-17).abs() <= 1e-15 * tail);
    }

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let (x, w) = gauss_legendre(12);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
        // x^22 integrates to 2/23 exactly with 12 nodes.
        let p: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(22)).sum();
        assert!((p - 2.0 / 23.0).abs() < 1e-14);
    }

    #[test]
    fn short_interval_keeps_relative_precision() {
        let h = 1e-13;
        let m = gaussian_mass_centered(0.0, 1.0, 0.3, h);
        let want = 2.0 * h * normal_pdf(0.3, 0.0, 1.0);
        assert!(((m - want) / want).abs() < 1e-12);
    }

    #[test]
    fn tail_difference_uses_erfc() {
        // Mass of N(0,1) on [10, 11]; naive erf difference returns 0.
        let m = gaussian_mass(0.0, 1.0, 10.0, 11.0);
        let want = 7.619_661_958_203_076e-24;
        assert!(((m - want) / want).abs() < 1e-10, "{m}");
    }
}
