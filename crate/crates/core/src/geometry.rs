//! Points, balls and one-dimensional intervals.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub const MAX_DIM: usize = 3;

/// A point of ℝⁿ, n ∈ {1, 2, 3}. Stored inline so that it is `Copy`.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point {
    dim: u8,
    c: [f64; MAX_DIM],
}

impl Point {
    pub fn new(coords: &[f64]) -> Result<Self> {
        check_dim(coords.len())?;
        if let Some(bad) = coords.iter().find(|x| !x.is_finite()) {
            return Err(invalid("point", format!("non-finite coordinate {bad}")));
        }
        let mut c = [0.0; MAX_DIM];
        c[..coords.len()].copy_from_slice(coords);
        Ok(Self {
            dim: coords.len() as u8,
            c,
        })
    }

    /// A point of ℝ¹.
    pub fn scalar(x: f64) -> Self {
        Self {
            dim: 1,
            c: [x, 0.0, 0.0],
        }
    }

    pub fn origin(dim: usize) -> Self {
        debug_assert!((1..=MAX_DIM).contains(&dim));
        Self {
            dim: dim as u8,
            c: [0.0; MAX_DIM],
        }
    }

    /// `value` times the i-th unit vector.
    pub fn axis(dim: usize, i: usize, value: f64) -> Self {
        let mut p = Self::origin(dim);
        p.c[i] = value;
        p
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn coords(&self) -> &[f64] {
        &self.c[..self.dim()]
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        self.c[i]
    }

    pub fn add(&self, other: &Point) -> Point {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Point) -> Point {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Point {
        let mut p = *self;
        for x in &mut p.c[..self.dim()] {
            *x *= s;
        }
        p
    }

    pub fn norm_sq(&self) -> f64 {
        self.coords().iter().map(|x| x * x).sum()
    }

    pub fn dist_sq(&self, other: &Point) -> f64 {
        self.sub(other).norm_sq()
    }

    pub fn is_finite(&self) -> bool {
        self.coords().iter().all(|x| x.is_finite())
    }

    fn zip(&self, other: &Point, f: impl Fn(f64, f64) -> f64) -> Point {
        debug_assert_eq!(self.dim, other.dim);
        let mut p = *self;
        for i in 0..self.dim() {
            p.c[i] = f(self.c[i], other.c[i]);
        }
        p
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coords()).finish()
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Point::new(&v)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.coords().to_vec()
    }
}

pub(crate) fn check_dim(n: usize) -> Result<()> {
    if (1..=MAX_DIM).contains(&n) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(n))
    }
}

pub(crate) fn same_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Lebesgue measure of the unit ball of ℝⁿ.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => PI,
        3 => 4.0 * PI / 3.0,
        _ => f64::NAN,
    }
}

/// Open ball `B(center, radius)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBall")]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

#[derive(Deserialize)]
struct RawBall {
    center: Point,
    radius: f64,
}

impl TryFrom<RawBall> for Ball {
    type Error = Error;
    fn try_from(raw: RawBall) -> Result<Self> {
        Ball::new(raw.center, raw.radius)
    }
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(invalid("radius", format!("must be positive and finite, got {radius}")));
        }
        Ok(Self { center, radius })
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn volume(&self) -> f64 {
        unit_ball_volume(self.dim()) * self.radius.powi(self.dim() as i32)
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.center.dist_sq(p) < self.radius * self.radius
    }

    /// `x0 + r·B`.
    pub fn scaled_about(&self, x0: &Point, r: f64) -> Ball {
        Ball {
            center: x0.add(&self.center.scale(r)),
            radius: self.radius * r,
        }
    }

    pub fn translated(&self, shift: &Point) -> Ball {
        Ball {
            center: self.center.add(shift),
            radius: self.radius,
        }
    }
}

/// An interval of ℝ stored as centre and half-width, with independent
/// closedness of each end. Keeping the centre form makes the length of
/// tiny intervals exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub center: f64,
    pub half: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn open(center: f64, half: f64) -> Self {
        Self {
            center,
            half,
            lo_closed: false,
            hi_closed: false,
        }
    }

    /// `[a, a + len)`.
    pub fn right_of(a: f64, len: f64) -> Self {
        Self {
            center: a + 0.5 * len,
            half: 0.5 * len,
            lo_closed: true,
            hi_closed: false,
        }
    }

    /// `[a - len, a)`.
    pub fn left_of(a: f64, len: f64) -> Self {
        Self {
            center: a - 0.5 * len,
            half: 0.5 * len,
            lo_closed: true,
            hi_closed: false,
        }
    }

    pub fn from_ball(b: &Ball) -> Self {
        Self::open(b.center.get(0), b.radius)
    }

    pub fn lo(&self) -> f64 {
        self.center - self.half
    }

    pub fn hi(&self) -> f64 {
        self.center + self.half
    }

    pub fn length(&self) -> f64 {
        2.0 * self.half
    }

    pub fn is_empty(&self) -> bool {
        !(self.half > 0.0)
    }

    pub fn contains(&self, x: f64) -> bool {
        let d = x - self.center;
        let lo_ok = if self.lo_closed { d >= -self.half } else { d > -self.half };
        let hi_ok = if self.hi_closed { d <= self.half } else { d < self.half };
        lo_ok && hi_ok
    }

    /// Intersection with an open interval `(c - h, c + h)`.
    pub fn intersect_open(&self, c: f64, h: f64) -> Interval {
        let (lo, hi) = (self.lo(), self.hi());
        let (wlo, whi) = (c - h, c + h);
        let (mut out_lo, mut lo_closed) = (lo, self.lo_closed);
        let (mut out_hi, mut hi_closed) = (hi, self.hi_closed);
        if wlo >= lo {
            out_lo = wlo;
            lo_closed = false;
        }
        if whi <= hi {
            out_hi = whi;
            hi_closed = false;
        }
        if out_lo == lo && out_hi == hi {
            return *self;
        }
        if !(out_hi > out_lo) {
            return Interval::open(0.5 * (out_lo + out_hi), 0.0);
        }
        Interval {
            center: 0.5 * (out_lo + out_hi),
            half: 0.5 * (out_hi - out_lo),
            lo_closed,
            hi_closed,
        }
    }

    /// Length of the overlap with `[lo, hi]`, computed relative to the
    /// centre.
    pub fn overlap(&self, lo: f64, hi: f64) -> f64 {
        let a = (lo - self.center).max(-self.half);
        let b = (hi - self.center).min(self.half);
        (b - a).max(0.0)
    }
}
