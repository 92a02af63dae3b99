//! Adaptive Gauss-Kronrod (7/15) quadrature and golden-section search.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Value of an adaptive integral with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
    pub evaluations: usize,
}

/// Kronrod value and |Kronrod - Gauss| on `[a, b]`.
pub fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Limits for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub max_segments: usize,
}

impl QuadOptions {
    pub fn new(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            max_segments: 4000,
        }
    }
}

/// Globally adaptive integration over `[points[0], points[last]]`, starting
/// from the partition given by `points` (sorted, deduplicated internally).
///
/// The worst segment is bisected until the summed |K - G| estimates fall
/// below `abs_tol`. The order of refinement depends only on the integrand,
/// so results are reproducible.
pub fn integrate_partition<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    opts: QuadOptions,
) -> Quadrature {
    let mut pts: Vec<f64> = points.iter().copied().filter(|p| p.is_finite()).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    if pts.len() < 2 {
        return Quadrature {
            value: 0.0,
            error: 0.0,
            converged: true,
            evaluations: 0,
        };
    }
    let mut evaluations = 0usize;
    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Segment> = Vec::new();
    for w in pts.windows(2) {
        let (value, error) = gk15(&mut f, w[0], w[1]);
        evaluations += 15;
        heap.push(Segment {
            a: w[0],
            b: w[1],
            value,
            error,
        });
    }
    let mut total_err: f64 = heap.iter().map(|s| s.error).sum();
    loop {
        if total_err <= opts.abs_tol || heap.len() + frozen.len() >= opts.max_segments {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) || (worst.b - worst.a) <= 1e-15 * mid.abs().max(1e-300) {
            frozen.push(worst);
            continue;
        }
        let (v1, e1) = gk15(&mut f, worst.a, mid);
        let (v2, e2) = gk15(&mut f, mid, worst.b);
        evaluations += 30;
        total_err += e1 + e2 - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
    let mut segs: Vec<Segment> = heap.into_vec();
    segs.extend(frozen);
    // Sum in a fixed order so that the result does not depend on heap layout.
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = segs.iter().map(|s| s.value).sum();
    let error: f64 = segs.iter().map(|s| s.error).sum();
    Quadrature {
        value,
        error,
        converged: error <= opts.abs_tol,
        evaluations,
    }
}

/// Adaptive integral of `f` over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> Quadrature {
    integrate_partition(f, &[a, b], QuadOptions::new(abs_tol))
}

/// Adaptive integral over `[a, b]` after the substitution
/// `x = mid - half * cos(phi)`, which removes square-root behaviour at both
/// endpoints (chords of balls). `breaks` are interior points in `x`.
pub fn integrate_chord<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    abs_tol: f64,
) -> Quadrature {
    if !(b > a) {
        return Quadrature {
            value: 0.0,
            error: 0.0,
            converged: true,
            evaluations: 0,
        };
    }
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut pts = vec![0.0, std::f64::consts::PI];
    for &x in breaks {
        if x > a && x < b {
            let c = ((mid - x) / half).clamp(-1.0, 1.0);
            pts.push(c.acos());
        }
    }
    integrate_partition(
        |phi| {
            let x = mid - half * phi.cos();
            f(x) * half * phi.sin()
        },
        &pts,
        QuadOptions::new(abs_tol),
    )
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a maximum of `f` on `[a, b]`. Returns the best
/// point seen and every evaluation made, in order.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, iterations: usize) -> (f64, f64, Vec<(f64, f64)>) {
    let mut seen = Vec::with_capacity(iterations + 2);
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    seen.push((x1, f1));
    seen.push((x2, f2));
    for _ in 0..iterations {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
            seen.push((x1, f1));
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
            seen.push((x2, f2));
        }
    }
    let (bx, bf) = seen
        .iter()
        .copied()
        .fold((f64::NAN, f64::NEG_INFINITY), |acc, s| if s.1 > acc.1 { s } else { acc });
    (bx, bf, seen)
}
