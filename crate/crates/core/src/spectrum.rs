//! Shipped perfect compact spectra.
//!
//! Each model supplies a dense injective eigenvalue enumeration, exact
//! distance and planar-measure queries, the density classification used to
//! split the set into density points and the exceptional remainder, and a
//! staged covering of that remainder by open balls.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{Rect, GOLDEN, SQRT2, SQRT3};
use crate::point_index::PointIndex;

/// Points of the plane are stored as complex numbers.
pub type ComplexPoint = Complex64;

/// Distance below which a point counts as lying on a model's set.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

/// Dyadic grids finer than this are below the resolution of `f64` inputs in
/// the unit square and are not tested for grid-line membership.
pub const GRID_DEPTH: i32 = 40;

/// Default radius for the isolated-point heuristic.
pub const DEFAULT_ISOLATION_RADIUS: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("eigenvalues {i} and {j} coincide")]
    DuplicateEigenvalue { i: usize, j: usize },
    #[error("unknown spectrum model `{0}`")]
    UnknownModel(String),
    #[error("invalid model parameter: {0}")]
    InvalidParameter(String),
    #[error("validation needs a prefix of at least 2 eigenvalues, got {0}")]
    PrefixTooShort(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectrumModel {
    /// The closed unit square `[0,1]^2`.
    UnitSquare,
    /// The segment `[0,1]` on the real axis.
    Segment,
    /// The unit circle `|z| = 1`.
    UnitCircle,
    /// Symmetric Cantor set in `[0,1]` keeping two intervals of relative length `ratio`.
    CantorSet { ratio: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DensityClass {
    DensityOne,
    Exceptional,
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: ComplexPoint,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: ComplexPoint, radius: f64) -> Self {
        assert!(radius > 0.0, "ball radius must be positive");
        Self { center, radius }
    }

    pub fn diam(&self) -> f64 {
        2.0 * self.radius
    }

    /// Open-ball membership.
    pub fn contains(&self, z: ComplexPoint) -> bool {
        (z - self.center).norm() < self.radius
    }
}

impl SpectrumModel {
    pub fn cantor() -> Self {
        SpectrumModel::CantorSet { ratio: 1.0 / 3.0 }
    }

    /// Build a model from its CLI id; `ratio` only applies to `cantor`.
    pub fn from_id(id: &str, ratio: Option<f64>) -> Result<Self, ModelError> {
        let model = match id {
            "square" | "unit_square" => SpectrumModel::UnitSquare,
            "segment" => SpectrumModel::Segment,
            "circle" | "unit_circle" => SpectrumModel::UnitCircle,
            "cantor" | "cantor_set" => SpectrumModel::CantorSet {
                ratio: ratio.unwrap_or(1.0 / 3.0),
            },
            other => return Err(ModelError::UnknownModel(other.to_string())),
        };
        model.check()?;
        Ok(model)
    }

    pub fn id(&self) -> &'static str {
        match self {
            SpectrumModel::UnitSquare => "square",
            SpectrumModel::Segment => "segment",
            SpectrumModel::UnitCircle => "circle",
            SpectrumModel::CantorSet { .. } => "cantor",
        }
    }

    pub fn check(&self) -> Result<(), ModelError> {
        if let SpectrumModel::CantorSet { ratio } = *self {
            if !(ratio > 0.0 && ratio < 0.5) {
                return Err(ModelError::InvalidParameter(format!(
                    "cantor ratio must lie in (0, 1/2), got {ratio}"
                )));
            }
        }
        Ok(())
    }

    pub fn has_positive_area(&self) -> bool {
        matches!(self, SpectrumModel::UnitSquare)
    }

    /// Smallest axis-aligned rectangle containing the set.
    pub fn bounding_rect(&self) -> Rect {
        match self {
            SpectrumModel::UnitSquare => Rect::new(0.0, 1.0, 0.0, 1.0),
            SpectrumModel::Segment | SpectrumModel::CantorSet { .. } => Rect::new(0.0, 1.0, 0.0, 0.0),
            SpectrumModel::UnitCircle => Rect::new(-1.0, 1.0, -1.0, 1.0),
        }
    }

    /// The `i`-th eigenvalue, `i >= 1`.
    pub fn lambda(&self, i: usize) -> ComplexPoint {
        assert!(i >= 1, "eigenvalues are numbered from 1");
        let n = i as u64;
        match *self {
            SpectrumModel::Segment => Complex64::new(GOLDEN.frac_mul(n), 0.0),
            SpectrumModel::UnitSquare => Complex64::new(SQRT2.frac_mul(n), SQRT3.frac_mul(n)),
            SpectrumModel::UnitCircle => Complex64::from_polar(1.0, 2.0 * PI * GOLDEN.frac_mul(n)),
            SpectrumModel::CantorSet { ratio } => Complex64::new(cantor_endpoint(ratio, i), 0.0),
        }
    }

    /// The first `n` eigenvalues.
    pub fn lambdas(&self, n: usize) -> Vec<ComplexPoint> {
        (1..=n).map(|i| self.lambda(i)).collect()
    }

    /// Euclidean distance from `z` to the set.
    pub fn distance(&self, z: ComplexPoint) -> f64 {
        match *self {
            SpectrumModel::UnitSquare => {
                let dx = (0.0 - z.re).max(z.re - 1.0).max(0.0);
                let dy = (0.0 - z.im).max(z.im - 1.0).max(0.0);
                dx.hypot(dy)
            }
            SpectrumModel::Segment => {
                let dx = (0.0 - z.re).max(z.re - 1.0).max(0.0);
                dx.hypot(z.im)
            }
            SpectrumModel::UnitCircle => (z.norm() - 1.0).abs(),
            SpectrumModel::CantorSet { ratio } => cantor_distance_1d(ratio, z.re).hypot(z.im),
        }
    }

    /// Planar Lebesgue measure of the set inside `rect`.
    pub fn measure_in_rect(&self, rect: &Rect) -> f64 {
        match self {
            SpectrumModel::UnitSquare => rect.intersect(&Rect::new(0.0, 1.0, 0.0, 1.0)).map_or(0.0, |r| r.area()),
            _ => 0.0,
        }
    }

    pub fn contains(&self, z: ComplexPoint) -> bool {
        self.distance(z) <= MEMBERSHIP_TOL
    }

    pub fn density_class(&self, z: ComplexPoint) -> DensityClass {
        if !self.contains(z) {
            return DensityClass::Outside;
        }
        match self {
            SpectrumModel::UnitSquare => {
                let interior = z.re > 0.0 && z.re < 1.0 && z.im > 0.0 && z.im < 1.0;
                if interior && !on_dyadic_grid(z.re) && !on_dyadic_grid(z.im) {
                    DensityClass::DensityOne
                } else {
                    DensityClass::Exceptional
                }
            }
            // null sets have no density points
            _ => DensityClass::Exceptional,
        }
    }

    /// An offset `d` with `p + d` in the set, `0 < |d| <= radius`, for `p`
    /// an eigenvalue of this model. The offset is returned separately so
    /// that offsets far below the spacing of `f64` near `p` stay exact.
    pub fn nearby_offset(&self, p: ComplexPoint, radius: f64) -> Option<Complex64> {
        if !(radius.is_finite() && radius > 0.0) {
            return None;
        }
        let r = radius.min(0.25);
        match *self {
            SpectrumModel::Segment | SpectrumModel::UnitSquare => {
                let dir = if p.re < 0.5 { 1.0 } else { -1.0 };
                Some(Complex64::new(dir * r, 0.0))
            }
            SpectrumModel::UnitCircle => {
                // rotate by angle t = r/2: p (e^{it} - 1), chord length < r
                let t = 0.5 * r;
                let half = (0.5 * t).sin();
                let rot_minus_one = Complex64::new(-2.0 * half * half, t.sin());
                Some(p * rot_minus_one)
            }
            SpectrumModel::CantorSet { ratio } => cantor_offset(ratio, p.re, r).map(|d| Complex64::new(d, 0.0)),
        }
    }

    /// Deterministic points of the set that are not eigenvalues.
    pub fn sample_points(&self, count: usize) -> Vec<ComplexPoint> {
        (1..=count as u64)
            .map(|i| match *self {
                SpectrumModel::Segment => Complex64::new(SQRT2.frac_mul(i), 0.0),
                SpectrumModel::UnitSquare => Complex64::new(SQRT3.frac_mul(i), GOLDEN.frac_mul(i)),
                SpectrumModel::UnitCircle => Complex64::from_polar(1.0, 2.0 * PI * SQRT2.frac_mul(i)),
                SpectrumModel::CantorSet { ratio } => Complex64::new(cantor_sample(ratio, SQRT2.frac_mul(i)), 0.0),
            })
            .collect()
    }

    pub fn cover(&self) -> CoverStream {
        CoverStream { model: *self }
    }

    /// Check distinctness and spacing of the first `prefix` eigenvalues.
    pub fn validate(&self, prefix: usize) -> Result<ValidationReport, ModelError> {
        if prefix < 2 {
            return Err(ModelError::PrefixTooShort(prefix));
        }
        check_lambdas(&self.lambdas(prefix), DEFAULT_ISOLATION_RADIUS)
    }
}

fn on_dyadic_grid(x: f64) -> bool {
    (x * 2f64.powi(GRID_DEPTH)).fract() == 0.0
}

/// Level and address of the removed interval whose endpoints are
/// eigenvalues `i` (for `i >= 3`), plus which side.
fn cantor_endpoint(ratio: f64, i: usize) -> f64 {
    match i {
        1 => 0.0,
        2 => 1.0,
        _ => {
            let t = i - 3;
            let q = t / 2;
            let right = t % 2 == 1;
            // level-l gaps are numbered 2^{l-1} - 1 .. 2^l - 2
            let level = (usize::BITS - (q + 1).leading_zeros()) as i32;
            let addr = q + 1 - (1usize << (level - 1));
            let (a, len) = cantor_interval(ratio, level - 1, addr);
            if right {
                a + (1.0 - ratio) * len
            } else {
                a + ratio * len
            }
        }
    }
}

/// Left end and length of the retained interval at `level` with binary
/// address `addr` (most significant bit = first choice).
fn cantor_interval(ratio: f64, level: i32, addr: usize) -> (f64, f64) {
    let mut a = 0.0;
    let mut len = 1.0;
    for t in (0..level).rev() {
        if (addr >> t) & 1 == 1 {
            a += (1.0 - ratio) * len;
        }
        len *= ratio;
    }
    (a, len)
}

fn cantor_distance_1d(ratio: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return -x;
    }
    if x >= 1.0 {
        return x - 1.0;
    }
    let mut a = 0.0;
    let mut len = 1.0;
    while len > 1e-18 {
        let left_end = a + ratio * len;
        let right_start = a + (1.0 - ratio) * len;
        if x <= left_end {
            len *= ratio;
        } else if x >= right_start {
            a = right_start;
            len *= ratio;
        } else {
            return (x - left_end).min(right_start - x);
        }
    }
    0.0
}

/// Offset from a Cantor endpoint `x` to a non-endpoint point of the set
/// within `r`: the point of a deeper retained interval sitting at relative
/// position `ratio / (1 + ratio)` (address 0101...) from the endpoint.
fn cantor_offset(ratio: f64, x: f64, r: f64) -> Option<f64> {
    let tol = 1e-14;
    let mut a = 0.0;
    let mut len = 1.0;
    let side = loop {
        if (x - a).abs() <= tol {
            break 1.0;
        }
        if (x - (a + len)).abs() <= tol {
            break -1.0;
        }
        if len < 1e-12 {
            return None;
        }
        if x <= a + ratio * len + tol {
            len *= ratio;
        } else if x >= a + (1.0 - ratio) * len - tol {
            a += (1.0 - ratio) * len;
            len *= ratio;
        } else {
            return None;
        }
    };
    let frac = ratio / (1.0 + ratio);
    let mut scale = len;
    // smallest depth with offset <= r
    let depth = ((scale * frac / r).ln() / (1.0 / ratio).ln()).ceil().max(0.0);
    scale *= ratio.powi(depth as i32);
    while scale * frac > r {
        scale *= ratio;
    }
    let d = scale * frac;
    (d > 0.0).then_some(side * d)
}

/// Point of the Cantor set whose first 24 addresses are read off the
/// binary digits of `seed`, followed by the non-terminating tail 0101...
fn cantor_sample(ratio: f64, seed: f64) -> f64 {
    let mut a = 0.0;
    let mut len = 1.0;
    let mut s = seed;
    // seed bits interleaved with alternating ones keep runs short, so the
    // point stays away from endpoints of shallow intervals
    for k in 0..24 {
        let right = if k % 2 == 0 {
            s *= 2.0;
            let b = s >= 1.0;
            if b {
                s -= 1.0;
            }
            b
        } else {
            k % 4 == 1
        };
        if right {
            a += (1.0 - ratio) * len;
        }
        len *= ratio;
    }
    a + len * ratio / (1.0 + ratio)
}

/// Summary of an eigenvalue prefix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub distinct: bool,
    pub duplicates: Vec<[usize; 2]>,
    pub min_gap: f64,
    pub mean_nn: f64,
    pub max_nn: f64,
    pub isolated_warnings: Vec<usize>,
}

/// Distinctness, nearest-neighbour statistics and isolated-point warnings.
/// Fails with the first duplicate pair (lowest `j`, then lowest `i`).
pub fn check_lambdas(lambdas: &[ComplexPoint], isolation_radius: f64) -> Result<ValidationReport, ModelError> {
    let report = summarize_lambdas(lambdas, isolation_radius);
    match report.duplicates.first() {
        Some(&[i, j]) => Err(ModelError::DuplicateEigenvalue { i, j }),
        None => Ok(report),
    }
}

/// Like [`check_lambdas`] but records duplicates instead of failing.
pub fn summarize_lambdas(lambdas: &[ComplexPoint], isolation_radius: f64) -> ValidationReport {
    let mut order: Vec<usize> = (0..lambdas.len()).collect();
    order.sort_by(|&a, &b| {
        lambdas[a]
            .re
            .total_cmp(&lambdas[b].re)
            .then(lambdas[a].im.total_cmp(&lambdas[b].im))
            .then(a.cmp(&b))
    });
    let mut duplicates = Vec::new();
    let mut run_start = 0;
    for w in 1..=order.len() {
        if w == order.len() || lambdas[order[w]] != lambdas[order[run_start]] {
            let mut run: Vec<usize> = order[run_start..w].iter().map(|k| k + 1).collect();
            run.sort_unstable();
            for (a, &i) in run.iter().enumerate() {
                for &j in &run[a + 1..] {
                    duplicates.push([i, j]);
                }
            }
            run_start = w;
        }
    }
    duplicates.sort_by_key(|&[i, j]| (j, i));

    let index = PointIndex::new(lambdas);
    let mut min_gap = f64::INFINITY;
    let mut sum_nn = 0.0;
    let mut max_nn: f64 = 0.0;
    let mut isolated_warnings = Vec::new();
    for (k, &p) in lambdas.iter().enumerate() {
        let nn = index.nearest(p, Some(k + 1)).map_or(f64::INFINITY, |(_, d)| d);
        min_gap = min_gap.min(nn);
        sum_nn += nn;
        max_nn = max_nn.max(nn);
        if nn >= isolation_radius {
            isolated_warnings.push(k + 1);
        }
    }
    let n = lambdas.len().max(1) as f64;
    ValidationReport {
        distinct: duplicates.is_empty(),
        duplicates,
        min_gap,
        mean_nn: sum_nn / n,
        max_nn,
        isolated_warnings,
    }
}

/// First `count` balls of the model's covering stream.
pub fn exceptional_cover(model: &SpectrumModel, count: usize) -> Vec<Ball> {
    let cover = model.cover();
    let mut balls = Vec::with_capacity(count);
    let mut stage = 1;
    while balls.len() < count {
        let len = cover.stage_len(stage);
        let take = (count - balls.len()).min(len);
        balls.extend((0..take).map(|k| cover.stage_ball(stage, k)));
        stage += 1;
    }
    balls
}

/// Staged ball covering of the exceptional part of a model's set.
///
/// Stage `s >= 1` covers the whole exceptional set on its own, so any point
/// of it lies in at least one ball of every stage. Balls are numbered in a
/// single stream: all of stage 1, then all of stage 2, and so on.
#[derive(Debug, Clone, Copy)]
pub struct CoverStream {
    model: SpectrumModel,
}

impl CoverStream {
    /// Number of balls emitted at `stage`.
    pub fn stage_len(&self, stage: u32) -> usize {
        assert!(stage >= 1);
        match self.model {
            SpectrumModel::Segment => (1usize << stage) + 1,
            SpectrumModel::UnitSquare => 2 * ((1usize << stage) + 1) * ((1usize << (2 * stage)) + 1),
            SpectrumModel::UnitCircle => 1usize << (stage + 2),
            SpectrumModel::CantorSet { .. } => 1usize << stage,
        }
    }

    /// Stream index of the first ball of `stage`.
    pub fn stage_offset(&self, stage: u32) -> usize {
        (1..stage).map(|s| self.stage_len(s)).sum()
    }

    /// Number of balls in stages `1..=stage`.
    pub fn balls_through(&self, stage: u32) -> usize {
        self.stage_offset(stage + 1)
    }

    /// Stage and in-stage position of a stream index.
    pub fn locate(&self, index: usize) -> (u32, usize) {
        let mut stage = 1;
        let mut rest = index;
        loop {
            let len = self.stage_len(stage);
            if rest < len {
                return (stage, rest);
            }
            rest -= len;
            stage += 1;
        }
    }

    /// Number of complete stages among the first `count` balls.
    pub fn complete_stages(&self, count: usize) -> u32 {
        let mut stage = 0;
        while self.balls_through(stage + 1) <= count {
            stage += 1;
        }
        stage
    }

    pub fn ball(&self, index: usize) -> Ball {
        let (stage, k) = self.locate(index);
        self.stage_ball(stage, k)
    }

    pub fn stage_radius(&self, stage: u32) -> f64 {
        match self.model {
            SpectrumModel::Segment => 0.5f64.powi(stage as i32),
            SpectrumModel::UnitSquare => 0.25f64.powi(stage as i32),
            SpectrumModel::UnitCircle => PI * 0.5f64.powi(stage as i32 + 2),
            SpectrumModel::CantorSet { ratio } => ratio.powi(stage as i32),
        }
    }

    /// Ball `k` of `stage`.
    pub fn stage_ball(&self, stage: u32, k: usize) -> Ball {
        let r = self.stage_radius(stage);
        let center = match self.model {
            SpectrumModel::Segment => Complex64::new(k as f64 * 0.5f64.powi(stage as i32), 0.0),
            SpectrumModel::UnitSquare => {
                let per_line = (1usize << (2 * stage)) + 1;
                let lines = (1usize << stage) + 1;
                let (line, j) = (k / per_line, k % per_line);
                let along = j as f64 * r;
                if line < lines {
                    Complex64::new(line as f64 * 0.5f64.powi(stage as i32), along)
                } else {
                    Complex64::new(along, (line - lines) as f64 * 0.5f64.powi(stage as i32))
                }
            }
            SpectrumModel::UnitCircle => {
                let m = self.stage_len(stage) as f64;
                Complex64::from_polar(1.0, 2.0 * PI * k as f64 / m)
            }
            SpectrumModel::CantorSet { ratio } => {
                let (a, len) = cantor_interval(ratio, stage as i32, k);
                Complex64::new(a + 0.5 * len, 0.0)
            }
        };
        Ball::new(center, r)
    }

    /// Stream indices of the stage-`stage` balls containing `z`.
    pub fn balls_containing(&self, z: ComplexPoint, stage: u32) -> Vec<usize> {
        let offset = self.stage_offset(stage);
        let r = self.stage_radius(stage);
        let mut hits: Vec<usize> = match self.model {
            SpectrumModel::Segment => {
                let scale = 2f64.powi(stage as i32);
                let n = 1i64 << stage;
                let lo = ((z.re - r) * scale).ceil().max(0.0) as i64;
                let hi = (((z.re + r) * scale).floor() as i64).min(n);
                (lo..=hi).map(|k| k as usize).collect()
            }
            SpectrumModel::UnitSquare => square_hits(stage, z, r),
            SpectrumModel::UnitCircle => {
                let m = self.stage_len(stage) as i64;
                let t = z.im.atan2(z.re) / (2.0 * PI) * m as f64;
                let k0 = t.round() as i64;
                let mut ks: Vec<usize> = (k0 - 1..=k0 + 1).map(|k| k.rem_euclid(m) as usize).collect();
                ks.sort_unstable();
                ks.dedup();
                ks
            }
            SpectrumModel::CantorSet { ratio } => {
                let mut out = Vec::new();
                cantor_hits(ratio, z.re, r, stage, 0, 0, 0.0, 1.0, &mut out);
                out
            }
        };
        hits.retain(|&k| self.stage_ball(stage, k).contains(z));
        hits.iter_mut().for_each(|k| *k += offset);
        hits
    }

    /// Sum of squared diameters over stage `stage`.
    pub fn stage_diam_sq(&self, stage: u32) -> f64 {
        let d = 2.0 * self.stage_radius(stage);
        let two = 2f64.powi(stage as i32);
        let count = match self.model {
            SpectrumModel::Segment => two + 1.0,
            SpectrumModel::UnitSquare => 2.0 * (two + 1.0) * (two * two + 1.0),
            SpectrumModel::UnitCircle => 4.0 * two,
            SpectrumModel::CantorSet { .. } => two,
        };
        count * d * d
    }

    /// Closed-form sum of squared diameters over the whole stream.
    pub fn budget(&self) -> f64 {
        match self.model {
            SpectrumModel::Segment => 16.0 / 3.0,
            SpectrumModel::UnitSquare => 8.0 * (1.0 + 1.0 / 3.0 + 1.0 / 7.0 + 1.0 / 15.0),
            SpectrumModel::UnitCircle => PI * PI,
            SpectrumModel::CantorSet { ratio } => {
                let q = 2.0 * ratio * ratio;
                4.0 * q / (1.0 - q)
            }
        }
    }

    /// Upper bound on the squared-diameter mass of balls `count..`.
    pub fn budget_after(&self, count: usize) -> f64 {
        let (stage, k) = self.locate(count);
        let full: f64 = (1..stage).map(|s| self.stage_diam_sq(s)).sum();
        let d = 2.0 * self.stage_radius(stage);
        (self.budget() - full - k as f64 * d * d).max(0.0)
    }
}

fn square_hits(stage: u32, z: ComplexPoint, r: f64) -> Vec<usize> {
    let lines = (1i64 << stage) + 1;
    let per_line = (1i64 << (2 * stage)) + 1;
    let grid = 2f64.powi(stage as i32);
    let fine = 4f64.powi(stage as i32);
    let mut out = Vec::new();
    let range = |c: f64, scale: f64, max: i64| {
        let lo = ((c - r) * scale).ceil().max(0.0) as i64;
        let hi = (((c + r) * scale).floor() as i64).min(max);
        lo..=hi
    };
    // vertical lines x = v / 2^s, centres at y = j / 4^s
    for v in range(z.re, grid, lines - 1) {
        for j in range(z.im, fine, per_line - 1) {
            out.push((v * per_line + j) as usize);
        }
    }
    // horizontal lines y = h / 2^s
    for h in range(z.im, grid, lines - 1) {
        for j in range(z.re, fine, per_line - 1) {
            out.push(((lines + h) * per_line + j) as usize);
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn cantor_hits(ratio: f64, x: f64, r: f64, stage: u32, level: u32, addr: usize, a: f64, len: f64, out: &mut Vec<usize>) {
    // balls of descendants lie within [a - r, a + len + r]
    if x < a - r || x > a + len + r {
        return;
    }
    if level == stage {
        out.push(addr);
        return;
    }
    let child = len * ratio;
    cantor_hits(ratio, x, r, stage, level + 1, addr << 1, a, child, out);
    cantor_hits(ratio, x, r, stage, level + 1, (addr << 1) | 1, a + len - child, child, out);
}
