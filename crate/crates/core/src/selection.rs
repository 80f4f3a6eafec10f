//! Staged eigenvalue selection and the range-avoiding vector `u`.
//!
//! Stage `n` picks one fresh eigenvalue inside every stage-`n` dyadic
//! square of positive measure (the `I` picks) and one fresh eigenvalue in
//! the `n`-th ball of the exceptional cover (the `J` pick). Weights on the
//! picks make `Σ |u_i|^2 / |z - λ_i|^2` diverge at every point of the set
//! that is not an eigenvalue.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

use crate::dyadic::SquareIndex;
use crate::numeric::NeumaierSum;
use crate::point_index::PointIndex;
use crate::spectrum::{Ball, ComplexPoint, DensityClass, SpectrumModel};
use crate::vector::WeightedVector;

/// Default stage offset in the density-point lower bound.
pub const DEFAULT_ALPHA: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PickTarget {
    Square(SquareIndex),
    Ball { stream_index: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SelectionError {
    #[error("no unused eigenvalue below the horizon lies in {target:?} at stage {stage}")]
    PickExhausted { stage: u32, target: PickTarget },
    #[error("point coincides with eigenvalue {0}")]
    HitsEigenvalue(usize),
    #[error("point lies outside the spectrum")]
    OutsideSpectrum,
    #[error("stage {0} is not part of the plan")]
    StageNotPlanned(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquarePick {
    pub square: SquareIndex,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StagePlan {
    pub n: u32,
    /// One pick per square of `E_n`, in square order.
    pub picks_i: Vec<SquarePick>,
    pub beta: usize,
    pub pick_j: usize,
    pub ball: Ball,
}

impl StagePlan {
    /// The squares `E_n` meeting the density-one part of the set.
    pub fn e_n(&self) -> impl Iterator<Item = SquareIndex> + '_ {
        self.picks_i.iter().map(|p| p.square)
    }

    /// Weight carried by each `I` pick of this stage.
    pub fn square_weight(&self) -> f64 {
        1.0 / ((self.n as f64 + 2.0) * (self.beta as f64).sqrt())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionPlan {
    pub model: SpectrumModel,
    pub max_stage: u32,
    pub horizon: usize,
    pub stages: Vec<StagePlan>,
    pub leftover: Vec<usize>,
}

impl SelectionPlan {
    /// Every picked index, stage by stage (`I` picks before the `J` pick).
    pub fn picked(&self) -> impl Iterator<Item = usize> + '_ {
        self.stages
            .iter()
            .flat_map(|s| s.picks_i.iter().map(|p| p.index).chain(std::iter::once(s.pick_j)))
    }

    pub fn stage(&self, n: u32) -> Result<&StagePlan, SelectionError> {
        self.stages.get(n as usize).ok_or(SelectionError::StageNotPlanned(n))
    }
}

/// Run stages `0..=max_stage` over eigenvalues `1..=horizon`.
pub fn build_selection(model: &SpectrumModel, max_stage: u32, horizon: usize) -> Result<SelectionPlan, SelectionError> {
    let lambdas = model.lambdas(horizon);
    let index = PointIndex::new(&lambdas);
    let cover = model.cover();
    let mut used = vec![false; horizon + 1];
    let mut stages = Vec::with_capacity(max_stage as usize + 1);

    for n in 0..=max_stage {
        let picks_i = if model.has_positive_area() {
            pick_squares(model, &lambdas, &mut used, n)?
        } else {
            Vec::new()
        };
        let ball = cover.ball(n as usize);
        let pick_j = index
            .first_in_ball(ball.center, ball.radius, |i| !used[i])
            .ok_or(SelectionError::PickExhausted {
                stage: n,
                target: PickTarget::Ball { stream_index: n as usize },
            })?;
        used[pick_j] = true;
        stages.push(StagePlan {
            n,
            beta: picks_i.len(),
            picks_i,
            pick_j,
            ball,
        });
    }

    let leftover = (1..=horizon).filter(|&i| !used[i]).collect();
    Ok(SelectionPlan {
        model: *model,
        max_stage,
        horizon,
        stages,
        leftover,
    })
}

/// First unused eigenvalue in each open stage-`n` square of positive measure.
fn pick_squares(model: &SpectrumModel, lambdas: &[ComplexPoint], used: &mut [bool], n: u32) -> Result<Vec<SquarePick>, SelectionError> {
    let side = 1usize << n;
    let scale = side as f64;
    let wanted: Vec<bool> = SquareIndex::all(n).map(|s| model.measure_in_rect(&s.rect()) > 0.0).collect();
    let mut remaining = wanted.iter().filter(|&&w| w).count();
    let mut slots = vec![0usize; side * side];
    for (k, z) in lambdas.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        let i = k + 1;
        if used[i] || !(z.re > 0.0 && z.re < 1.0 && z.im > 0.0 && z.im < 1.0) {
            continue;
        }
        let (x, y) = (z.re * scale, z.im * scale);
        if x.fract() == 0.0 || y.fract() == 0.0 {
            continue;
        }
        let slot = x as usize * side + y as usize;
        if wanted[slot] && slots[slot] == 0 {
            slots[slot] = i;
            remaining -= 1;
        }
    }
    let mut picks = Vec::with_capacity(slots.len());
    for (slot, &i) in slots.iter().enumerate() {
        if !wanted[slot] {
            continue;
        }
        let square = SquareIndex::new(n, (slot / side) as u64, (slot % side) as u64);
        if i == 0 {
            return Err(SelectionError::PickExhausted {
                stage: n,
                target: PickTarget::Square(square),
            });
        }
        used[i] = true;
        picks.push(SquarePick { square, index: i });
    }
    Ok(picks)
}

/// Squared norms of the three orthogonal pieces of `u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UComponents {
    pub squares: f64,
    pub balls: f64,
    pub leftover: f64,
}

pub fn assemble_u(plan: &SelectionPlan) -> WeightedVector {
    let mut entries = Vec::with_capacity(plan.horizon);
    for stage in &plan.stages {
        let w = stage.square_weight();
        entries.extend(stage.picks_i.iter().map(|p| (p.index, Complex64::new(w, 0.0))));
        entries.push((stage.pick_j, Complex64::new(stage.ball.diam(), 0.0)));
    }
    entries.extend(plan.leftover.iter().map(|&i| (i, Complex64::new(1.0 / (i as f64 + 1.0), 0.0))));
    WeightedVector::new(entries).expect("plan indices are distinct and weights positive")
}

pub fn u_components(plan: &SelectionPlan) -> UComponents {
    let mut squares = NeumaierSum::new();
    let mut balls = NeumaierSum::new();
    let mut leftover = NeumaierSum::new();
    for stage in &plan.stages {
        if stage.beta > 0 {
            squares += 1.0 / (stage.n as f64 + 2.0).powi(2);
        }
        balls += stage.ball.diam().powi(2);
    }
    for &i in &plan.leftover {
        leftover += 1.0 / (i as f64 + 1.0).powi(2);
    }
    UComponents {
        squares: squares.sum(),
        balls: balls.sum(),
        leftover: leftover.sum(),
    }
}

/// `Σ_{i<=upto} |u_i|^2 / |z - λ_i|^2`.
pub fn resolvent_energy(u: &WeightedVector, model: &SpectrumModel, z: ComplexPoint, upto: usize) -> Result<f64, SelectionError> {
    let mut s = NeumaierSum::new();
    for (i, ui) in u.iter().take_while(|e| e.0 <= upto) {
        let d = (z - model.lambda(i)).norm_sqr();
        if d == 0.0 {
            return Err(SelectionError::HitsEigenvalue(i));
        }
        s += ui.norm_sqr() / d;
    }
    Ok(s.sum())
}

/// Running partial sums of [`resolvent_energy`], one per stored entry.
pub fn resolvent_energy_partials(u: &WeightedVector, model: &SpectrumModel, z: ComplexPoint) -> Result<Vec<f64>, SelectionError> {
    let mut s = NeumaierSum::new();
    let mut out = Vec::with_capacity(u.len());
    for (i, ui) in u.iter() {
        let d = (z - model.lambda(i)).norm_sqr();
        if d == 0.0 {
            return Err(SelectionError::HitsEigenvalue(i));
        }
        s += ui.norm_sqr() / d;
        out.push(s.sum());
    }
    Ok(out)
}

/// `Σ_{i<=upto} |u_i|^p`.
pub fn summability_diagnostic(u: &WeightedVector, p: f64, upto: usize) -> f64 {
    let mut s = NeumaierSum::new();
    for (_, ui) in u.iter().take_while(|e| e.0 <= upto) {
        s += ui.norm().powf(p);
    }
    s.sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub stage: u32,
    pub partial_sum: f64,
    pub lower_bound: f64,
}

/// Least-squares line through `(stage, value)` with a one-sided 95% lower
/// confidence bound on the slope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_lower95: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub z: ComplexPoint,
    pub class: DensityClass,
    pub rows: Vec<GrowthRow>,
    /// Density points: per-stage normalized envelope `(1/β_n) Σ_k min(|z-λ|^-2, 4^n/2)`.
    pub envelope: Vec<(u32, f64)>,
    pub fit: Option<SlopeFit>,
    /// Exceptional points: cover stages with a `J` pick contributing at least 1.
    pub stages_hit: u32,
    pub stages_total: u32,
}

impl GrowthReport {
    /// Growth consistent with divergence: positive slope for density
    /// points, hits in at least half of the cover stages otherwise.
    pub fn certified(&self) -> bool {
        match self.class {
            DensityClass::DensityOne => self.fit.is_some_and(|f| f.slope_lower95 > 0.0),
            DensityClass::Exceptional => self.stages_total >= 1 && 2 * self.stages_hit >= self.stages_total,
            DensityClass::Outside => false,
        }
    }
}

pub fn fit_slope(points: &[(u32, f64)]) -> Option<SlopeFit> {
    let k = points.len();
    if k < 3 {
        return None;
    }
    let kf = k as f64;
    let mx = points.iter().map(|p| p.0 as f64).sum::<f64>() / kf;
    let my = points.iter().map(|p| p.1).sum::<f64>() / kf;
    let sxx: f64 = points.iter().map(|p| (p.0 as f64 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 as f64 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0 as f64).powi(2)).sum();
    let se = (sse / (kf - 2.0) / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, kf - 2.0).ok()?.inverse_cdf(0.95);
    Some(SlopeFit {
        slope,
        intercept,
        slope_lower95: slope - t * se,
        points: k,
    })
}

/// Finite evidence that `Σ |u_i|^2/|z-λ_i|^2` diverges at a point `z` of the set.
///
/// For density points `stages` lists construction stages; the report holds
/// cumulative sums over their `I` picks and a fitted slope of the
/// normalized envelope. For exceptional points `stages` lists cover
/// stages; each stage whose covering ball's `J` pick shares the ball with
/// `z` contributes at least 1.
pub fn divergence_diagnostic(
    u: &WeightedVector,
    plan: &SelectionPlan,
    z: ComplexPoint,
    stages: &[u32],
    alpha: f64,
) -> Result<GrowthReport, SelectionError> {
    let model = plan.model;
    let class = model.density_class(z);
    let mut rows = Vec::with_capacity(stages.len());
    let mut envelope = Vec::new();
    let mut partial = NeumaierSum::new();
    let mut bound = 0.0;
    let mut stages_hit = 0;
    let mut stages_total = 0;
    match class {
        DensityClass::Outside => return Err(SelectionError::OutsideSpectrum),
        DensityClass::DensityOne => {
            for &n in stages {
                let stage = plan.stage(n)?;
                let cap = 4f64.powi(n as i32) / 2.0;
                let mut w = NeumaierSum::new();
                for p in &stage.picks_i {
                    let d = (z - model.lambda(p.index)).norm_sqr();
                    if d == 0.0 {
                        return Err(SelectionError::HitsEigenvalue(p.index));
                    }
                    w += (1.0 / d).min(cap);
                    partial += u.get(p.index).norm_sqr() / d;
                }
                if stage.beta > 0 {
                    envelope.push((n, w.sum() / stage.beta as f64));
                }
                let shape = (std::f64::consts::LN_2 / 2.0) * (n as f64 - alpha);
                bound += shape.max(0.0) / (n as f64 + 2.0).powi(2);
                rows.push(GrowthRow {
                    stage: n,
                    partial_sum: partial.sum(),
                    lower_bound: bound,
                });
            }
        }
        DensityClass::Exceptional => {
            let cover = model.cover();
            let complete = cover.complete_stages(plan.stages.len());
            for &s in stages {
                if s == 0 || s > complete {
                    continue;
                }
                stages_total += 1;
                let mut hit = false;
                for b in cover.balls_containing(z, s) {
                    let j = plan.stages[b].pick_j;
                    let d = (z - model.lambda(j)).norm_sqr();
                    if d == 0.0 {
                        return Err(SelectionError::HitsEigenvalue(j));
                    }
                    let term = u.get(j).norm_sqr() / d;
                    partial += term;
                    hit |= term >= 1.0;
                }
                if hit {
                    stages_hit += 1;
                }
                rows.push(GrowthRow {
                    stage: s,
                    partial_sum: partial.sum(),
                    lower_bound: stages_hit as f64,
                });
            }
        }
    }
    let fit = fit_slope(&envelope);
    Ok(GrowthReport {
        z,
        class,
        rows,
        envelope,
        fit,
        stages_hit,
        stages_total,
    })
}
