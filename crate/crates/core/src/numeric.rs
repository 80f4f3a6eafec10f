//! Small numeric helpers shared by the construction modules.

use std::ops::AddAssign;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Irrational rotation constant stored as an unevaluated double-double sum.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Rotation {
    hi: f64,
    lo: f64,
}

/// Fractional part of the golden ratio.
pub(crate) const GOLDEN: Rotation = Rotation {
    hi: 0.618_033_988_749_894_9,
    lo: -5.432_115_203_682_506e-17,
};

/// Fractional part of sqrt(2).
pub(crate) const SQRT2: Rotation = Rotation {
    hi: 0.414_213_562_373_095_03,
    lo: 1.434_936_932_798_652_3e-17,
};

/// Fractional part of sqrt(3).
pub(crate) const SQRT3: Rotation = Rotation {
    hi: 0.732_050_807_568_877_3,
    lo: -1.067_146_024_444_662_8e-17,
};

impl Rotation {
    /// `frac(i * alpha)` accurate to a few ulps of 1 for any `i < 2^53`.
    pub(crate) fn frac_mul(self, i: u64) -> f64 {
        let n = i as f64;
        let p = n * self.hi;
        let err = n.mul_add(self.hi, -p);
        let mut x = p - p.floor();
        x += err + n * self.lo;
        if x < 0.0 {
            x += 1.0;
        }
        if x >= 1.0 {
            x -= 1.0;
        }
        x
    }
}

/// Point `i` of the two-dimensional Kronecker sequence
/// `(frac(i·φ), frac(i·√2))`, `φ` the golden ratio.
pub fn kronecker(i: u64) -> (f64, f64) {
    (GOLDEN.frac_mul(i), SQRT2.frac_mul(i))
}

/// Neumaier-compensated accumulator for real sums.
#[derive(Debug, Default, Clone, Copy)]
pub struct NeumaierSum {
    s: f64,
    c: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn sum(&self) -> f64 {
        self.s + self.c
    }
}

impl AddAssign<f64> for NeumaierSum {
    fn add_assign(&mut self, x: f64) {
        let t = self.s + x;
        if self.s.abs() >= x.abs() {
            self.c += (self.s - t) + x;
        } else {
            self.c += (x - t) + self.s;
        }
        self.s = t;
    }
}

/// Compensated accumulator for complex sums (componentwise Neumaier).
#[derive(Debug, Default, Clone, Copy)]
pub struct ComplexSum {
    re: NeumaierSum,
    im: NeumaierSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn sum(&self) -> Complex64 {
        Complex64::new(self.re.sum(), self.im.sum())
    }
}

impl AddAssign<Complex64> for ComplexSum {
    fn add_assign(&mut self, z: Complex64) {
        self.re += z.re;
        self.im += z.im;
    }
}

/// Closed axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        debug_assert!(x0 <= x1 && y0 <= y1, "malformed rectangle");
        Self { x0, x1, y0, y1 }
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.x0 && z.re <= self.x1 && z.im >= self.y0 && z.im <= self.y1
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        other.x0 >= self.x0 && other.x1 <= self.x1 && other.y0 >= self.y0 && other.y1 <= self.y1
    }

    /// Intersection, or `None` when the rectangles are disjoint.
    pub fn intersect(&self, other: &Rect) -> Option<Rect> {
        let x0 = self.x0.max(other.x0);
        let x1 = self.x1.min(other.x1);
        let y0 = self.y0.max(other.y0);
        let y1 = self.y1.min(other.y1);
        (x0 <= x1 && y0 <= y1).then_some(Rect { x0, x1, y0, y1 })
    }
}

pub(crate) fn is_finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
