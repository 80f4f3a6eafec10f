//! Dyadic squares of the unit square and the regularly shrinking blocks
//! `L_{n,p}(z)` around a point.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::Rect;
use crate::spectrum::ComplexPoint;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DyadicError {
    #[error("point lies on a stage-{n} grid line")]
    OnGridLine { n: u32 },
    #[error("point lies outside the open unit square")]
    OutsideUnitSquare,
    #[error("block size {p} outside 1..={p_max}")]
    POutOfRange { p: u64, p_max: u64 },
    #[error("stage {0} exceeds the supported depth")]
    StageTooDeep(u32),
}

/// Largest stage for which square indices are exact in `f64`.
pub const MAX_STAGE: u32 = 52;

/// Square `[l 2^-n, (l+1) 2^-n] x [m 2^-n, (m+1) 2^-n]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SquareIndex {
    pub n: u32,
    pub l: u64,
    pub m: u64,
}

impl SquareIndex {
    pub fn new(n: u32, l: u64, m: u64) -> Self {
        assert!(n <= MAX_STAGE);
        assert!(l < (1u64 << n) && m < (1u64 << n), "square index out of range");
        Self { n, l, m }
    }

    pub fn side(&self) -> f64 {
        0.5f64.powi(self.n as i32)
    }

    /// The closed square.
    pub fn rect(&self) -> Rect {
        let h = self.side();
        Rect::new(
            self.l as f64 * h,
            (self.l + 1) as f64 * h,
            self.m as f64 * h,
            (self.m + 1) as f64 * h,
        )
    }

    /// Strict interior membership.
    pub fn interior_contains(&self, z: ComplexPoint) -> bool {
        let r = self.rect();
        z.re > r.x0 && z.re < r.x1 && z.im > r.y0 && z.im < r.y1
    }

    /// The stage-`n-1` square containing this one.
    pub fn parent(&self) -> Option<SquareIndex> {
        (self.n > 0).then(|| SquareIndex {
            n: self.n - 1,
            l: self.l / 2,
            m: self.m / 2,
        })
    }

    /// All `4^n` squares of stage `n`, column-major.
    pub fn all(n: u32) -> impl Iterator<Item = SquareIndex> {
        let side = 1u64 << n;
        (0..side).flat_map(move |l| (0..side).map(move |m| SquareIndex { n, l, m }))
    }
}

/// Areas relating the inner square `P`, the block `L` and the ball `B`
/// circumscribing `L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShrinkCertificate {
    pub inner_area: f64,
    pub outer_ball_area: f64,
    pub ratio: f64,
}

/// The block of `(2p-1)^2` stage-`n` squares centred on the square of `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LRegion {
    pub center: SquareIndex,
    pub p: u64,
    pub rect: Rect,
    pub certificate: ShrinkCertificate,
}

impl LRegion {
    pub fn square_count(&self) -> u64 {
        (2 * self.p - 1).pow(2)
    }

    pub fn area(&self) -> f64 {
        self.rect.area()
    }

    pub fn squares(&self) -> impl Iterator<Item = SquareIndex> + '_ {
        let (c, r) = (self.center, self.p - 1);
        (c.l - r..=c.l + r).flat_map(move |l| (c.m - r..=c.m + r).map(move |m| SquareIndex { n: c.n, l, m }))
    }
}

fn grid_coord(x: f64, n: u32) -> Result<u64, DyadicError> {
    let scaled = x * 2f64.powi(n as i32);
    if scaled.fract() == 0.0 {
        return Err(DyadicError::OnGridLine { n });
    }
    Ok(scaled.floor() as u64)
}

/// The stage-`n` open square containing `z`.
pub fn square_index(z: ComplexPoint, n: u32) -> Result<SquareIndex, DyadicError> {
    if n > MAX_STAGE {
        return Err(DyadicError::StageTooDeep(n));
    }
    if !(z.re > 0.0 && z.re < 1.0 && z.im > 0.0 && z.im < 1.0) {
        return Err(DyadicError::OutsideUnitSquare);
    }
    let l = grid_coord(z.re, n)?;
    let m = grid_coord(z.im, n)?;
    Ok(SquareIndex { n, l, m })
}

/// Largest block size keeping `L_{n,p}(z)` inside the unit square.
pub fn p_max(z: ComplexPoint, n: u32) -> Result<u64, DyadicError> {
    let s = square_index(z, n)?;
    let side = 1u64 << n;
    Ok((s.m + 1).min(s.l + 1).min(side - s.m).min(side - s.l))
}

pub fn l_region(z: ComplexPoint, n: u32, p: u64) -> Result<LRegion, DyadicError> {
    let center = square_index(z, n)?;
    let pm = p_max(z, n)?;
    if p == 0 || p > pm {
        return Err(DyadicError::POutOfRange { p, p_max: pm });
    }
    let h = center.side();
    let r = (p - 1) as f64;
    let rect = Rect::new(
        (center.l as f64 - r) * h,
        (center.l as f64 + r + 1.0) * h,
        (center.m as f64 - r) * h,
        (center.m as f64 + r + 1.0) * h,
    );
    let block_side = (2 * p - 1) as f64 * h;
    let inner_area = (p as f64 * h).powi(2);
    // circumscribed disc of a square of side a has area pi a^2 / 2
    let outer_ball_area = PI * block_side * block_side / 2.0;
    Ok(LRegion {
        center,
        p,
        rect,
        certificate: ShrinkCertificate {
            inner_area,
            outer_ball_area,
            ratio: outer_ball_area / inner_area,
        },
    })
}
