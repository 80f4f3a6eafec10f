//! The assembled perturbation `D + u⊗v`, its eigenvalue test, and finite
//! sections.

pub mod cells;

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eigen::{self, EigenError};
use crate::nonvanishing::{self, CoefficientTable, EpsSchedule, GammaSchedule, NonvanishingError, TableConfig};
use crate::numeric::ComplexSum;
use crate::point_index::PointIndex;
use crate::selection::{self, SelectionError, SelectionPlan};
use crate::spectrum::{ComplexPoint, DensityClass, SpectrumModel, MEMBERSHIP_TOL};
use crate::vector::{VectorError, WeightedVector};

pub use cells::{cell_partition, cell_u_norms, cell_weights, CellAssignment, CellWeight};

/// Default size of the perturbation, `‖u⊗v‖ <= δ ‖u‖^2`.
pub const DEFAULT_DELTA: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PerturbationError {
    #[error("|c_{index}| = {c_abs} exceeds δ|u_{index}|^2 = {bound}")]
    GammaMismatch { index: usize, c_abs: f64, bound: f64 },
    #[error("u has no entry at index {0}")]
    ZeroUEntry(usize),
    #[error("delta must be positive, got {0}")]
    InvalidDelta(f64),
    #[error("truncation {n} exceeds the horizon {horizon}")]
    BeyondHorizon { n: usize, horizon: usize },
    #[error(transparent)]
    Selection(#[from] SelectionError),
    #[error(transparent)]
    Coefficients(#[from] NonvanishingError),
    #[error(transparent)]
    Vector(#[from] VectorError),
    #[error(transparent)]
    Solver(#[from] EigenError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationBundle {
    pub model: SpectrumModel,
    pub horizon: usize,
    pub delta: f64,
    pub lambdas: Vec<ComplexPoint>,
    pub u: WeightedVector,
    /// Limit coefficients `c_i = u_i conj(v_i)`.
    pub c: Vec<Complex64>,
    pub v: WeightedVector,
    pub mus: Vec<ComplexPoint>,
    pub mu_offsets: Vec<Complex64>,
    /// `Σ_{i>horizon} γ_i`: bound on the coefficient mass past the horizon.
    pub gamma_tail: f64,
    pub u_norm: f64,
    pub v_norm: f64,
    /// `‖u⊗v‖ = ‖u‖ ‖v‖`.
    pub rank_one_norm: f64,
    /// `δ ‖u‖^2`.
    pub norm_bound: f64,
}

/// `v_i = conj(c_i)/conj(u_i)` on the table's horizon, after checking
/// `0 < |c_i| <= δ |u_i|^2`.
pub fn assemble_bundle(
    model: &SpectrumModel,
    u: &WeightedVector,
    table: &CoefficientTable,
    delta: f64,
) -> Result<PerturbationBundle, PerturbationError> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(PerturbationError::InvalidDelta(delta));
    }
    let horizon = table.horizon();
    let u = u.prefix(horizon);
    let mut v_entries = Vec::with_capacity(horizon);
    for (k, &ci) in table.c.iter().enumerate() {
        let i = k + 1;
        let ui = u.get(i);
        if ui == Complex64::new(0.0, 0.0) {
            return Err(PerturbationError::ZeroUEntry(i));
        }
        let bound = delta * ui.norm_sqr();
        if ci.norm() > bound || ci.norm() == 0.0 {
            return Err(PerturbationError::GammaMismatch {
                index: i,
                c_abs: ci.norm(),
                bound,
            });
        }
        v_entries.push((i, ci.conj() / ui.conj()));
    }
    let v = WeightedVector::new(v_entries)?;
    let (u_norm, v_norm) = (u.norm(), v.norm());
    Ok(PerturbationBundle {
        model: *model,
        horizon,
        delta,
        lambdas: table.lambdas.clone(),
        c: table.c.clone(),
        mus: table.mus.clone(),
        mu_offsets: table.mu_offsets.clone(),
        gamma_tail: table.gamma_tail,
        u_norm,
        v_norm,
        rank_one_norm: u_norm * v_norm,
        norm_bound: delta * u.norm_sq(),
        u,
        v,
    })
}

/// Upper bound on `Σ_{i>H} |u_i|^2` for the vector the plan would keep
/// building past its horizon: later square stages, the rest of the cover
/// budget and the `1/(i+1)` leftover weights.
pub fn u_tail_mass(plan: &SelectionPlan) -> f64 {
    let squares = if plan.model.has_positive_area() {
        1.0 / (plan.max_stage as f64 + 2.0)
    } else {
        0.0
    };
    let balls = plan.model.cover().budget_after(plan.stages.len());
    squares + balls + 1.0 / (plan.horizon as f64 + 1.0)
}

/// Everything produced by one construction run.
#[derive(Debug, Clone, PartialEq)]
pub struct Construction {
    pub plan: SelectionPlan,
    pub table: CoefficientTable,
    pub bundle: PerturbationBundle,
}

/// Selection, coefficients with `γ_i = δ |u_i|^2`, and the assembled bundle.
pub fn construct(
    model: &SpectrumModel,
    max_stage: u32,
    horizon: usize,
    delta: f64,
    eps: EpsSchedule,
) -> Result<Construction, PerturbationError> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(PerturbationError::InvalidDelta(delta));
    }
    let plan = selection::build_selection(model, max_stage, horizon)?;
    let u = selection::assemble_u(&plan);
    let config = TableConfig {
        eps,
        gamma: GammaSchedule::Weighted {
            delta,
            weights: u.to_dense(horizon).iter().map(|z| z.norm_sqr()).collect(),
            tail_mass: u_tail_mass(&plan),
        },
        probe_budget: nonvanishing::DEFAULT_PROBE_BUDGET,
    };
    let table = nonvanishing::build_table(model, &model.lambdas(horizon), &config, horizon)?;
    let bundle = assemble_bundle(model, &u, &table, delta)?;
    Ok(Construction { plan, table, bundle })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    #[serde(rename = "Condition1_IsEigenvalueOfD")]
    Condition1IsEigenvalueOfD,
    #[serde(rename = "Condition2_DivergenceCertified")]
    Condition2DivergenceCertified,
    #[serde(rename = "Condition3_SumNotOne")]
    Condition3SumNotOne,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    Eigenvalue {
        index: usize,
        distance: f64,
    },
    Divergence {
        class: DensityClass,
        slope_lower95: Option<f64>,
        stages_hit: u32,
        stages_total: u32,
        partial_sum: f64,
    },
    SumNotOne {
        abs_f: f64,
        tail_bound: f64,
        margin: f64,
    },
    /// Some `u_i` or `v_i` vanishes, outside the criterion's hypotheses.
    ZeroEntry {
        index: usize,
    },
    Failure {
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IonascuVerdict {
    pub z: ComplexPoint,
    pub branch: Branch,
    pub evidence: Evidence,
}

/// Settings of the divergence branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    /// Stage offset in the density-point lower bound.
    pub alpha: f64,
    /// Largest construction stage used by the density-point fit.
    pub max_fit_stage: Option<u32>,
}

impl Default for Probe {
    fn default() -> Self {
        Self {
            alpha: selection::DEFAULT_ALPHA,
            max_fit_stage: None,
        }
    }
}

/// Reusable state for running the eigenvalue test at many points.
pub struct IonascuContext<'a> {
    bundle: &'a PerturbationBundle,
    plan: &'a SelectionPlan,
    u_full: WeightedVector,
    index: PointIndex,
    zero_entry: Option<usize>,
    probe: Probe,
}

impl<'a> IonascuContext<'a> {
    pub fn new(bundle: &'a PerturbationBundle, plan: &'a SelectionPlan, probe: Probe) -> Self {
        let zero_entry =
            (1..=bundle.horizon).find(|&i| bundle.u.get(i) == Complex64::new(0.0, 0.0) || bundle.v.get(i) == Complex64::new(0.0, 0.0));
        Self {
            bundle,
            plan,
            u_full: selection::assemble_u(plan),
            index: PointIndex::new(&bundle.lambdas),
            zero_entry,
            probe,
        }
    }

    /// Decide which of the three conditions excludes `z` from the point
    /// spectrum, with the numeric evidence.
    pub fn test(&self, z: ComplexPoint) -> IonascuVerdict {
        let verdict = |branch, evidence| IonascuVerdict { z, branch, evidence };
        if let Some((index, distance)) = self.index.nearest(z, None) {
            if distance <= MEMBERSHIP_TOL {
                return verdict(Branch::Condition1IsEigenvalueOfD, Evidence::Eigenvalue { index, distance });
            }
        }
        if let Some(index) = self.zero_entry {
            return verdict(Branch::Inconclusive, Evidence::ZeroEntry { index });
        }
        let model = &self.bundle.model;
        let class = model.density_class(z);
        if class != DensityClass::Outside {
            let stages = diagnostic_stages(self.plan, class, &self.probe);
            return match selection::divergence_diagnostic(&self.u_full, self.plan, z, &stages, self.probe.alpha) {
                Ok(report) => {
                    let evidence = Evidence::Divergence {
                        class,
                        slope_lower95: report.fit.map(|f| f.slope_lower95),
                        stages_hit: report.stages_hit,
                        stages_total: report.stages_total,
                        partial_sum: report.rows.last().map_or(0.0, |r| r.partial_sum),
                    };
                    let branch = if report.certified() {
                        Branch::Condition2DivergenceCertified
                    } else {
                        Branch::Inconclusive
                    };
                    verdict(branch, evidence)
                }
                Err(e) => verdict(Branch::Inconclusive, Evidence::Failure { message: e.to_string() }),
            };
        }
        let mut s = ComplexSum::new();
        for ((i, ui), (_, vi)) in self.bundle.u.iter().zip(self.bundle.v.iter()) {
            s += ui * vi.conj() / (z - self.bundle.lambdas[i - 1]);
        }
        let abs_f = (1.0 - s.sum()).norm();
        let tail_bound = self.bundle.gamma_tail / model.distance(z);
        let margin = abs_f - tail_bound;
        let branch = if margin > 0.0 {
            Branch::Condition3SumNotOne
        } else {
            Branch::Inconclusive
        };
        verdict(branch, Evidence::SumNotOne { abs_f, tail_bound, margin })
    }
}

/// Stages examined by the divergence branch: construction stages
/// `max(1, min(4, S-2))..=S` for density points, every complete cover
/// stage for exceptional points.
pub fn diagnostic_stages(plan: &SelectionPlan, class: DensityClass, probe: &Probe) -> Vec<u32> {
    match class {
        DensityClass::DensityOne => {
            let s = probe.max_fit_stage.unwrap_or(plan.max_stage).min(plan.max_stage);
            let first = 1.max(4.min(s.saturating_sub(2)));
            (first..=s).collect()
        }
        DensityClass::Exceptional => (1..=plan.model.cover().complete_stages(plan.stages.len())).collect(),
        DensityClass::Outside => Vec::new(),
    }
}

/// One-off eigenvalue test; prefer [`IonascuContext`] for many points.
pub fn ionascu_test(bundle: &PerturbationBundle, plan: &SelectionPlan, z: ComplexPoint, probe: Probe) -> IonascuVerdict {
    IonascuContext::new(bundle, plan, probe).test(z)
}

/// `diag(λ) + u v*` from dense parts.
pub fn rank_one_matrix(lambdas: &[ComplexPoint], u: &[Complex64], v: &[Complex64]) -> Array2<Complex64> {
    let n = lambdas.len();
    let mut a = Array2::from_shape_fn((n, n), |(i, j)| u[i] * v[j].conj());
    for i in 0..n {
        a[[i, i]] += lambdas[i];
    }
    a
}

/// Finite section of `D + u⊗v` on the first `n` basis vectors.
pub fn truncate_matrix(bundle: &PerturbationBundle, n: usize) -> Result<Array2<Complex64>, PerturbationError> {
    if n > bundle.horizon {
        return Err(PerturbationError::BeyondHorizon {
            n,
            horizon: bundle.horizon,
        });
    }
    Ok(rank_one_matrix(&bundle.lambdas[..n], &bundle.u.to_dense(n), &bundle.v.to_dense(n)))
}

/// Eigenvalues of the `n`-section. With `use_partial_coeffs`, `v` is rebuilt
/// from `c_{·,n}` so that the section's spectrum is exactly `{μ_1..μ_n}`.
pub fn secular_eigenvalues(bundle: &PerturbationBundle, n: usize, use_partial_coeffs: bool) -> Result<Vec<Complex64>, PerturbationError> {
    if !use_partial_coeffs {
        return Ok(eigen::eigenvalues(&truncate_matrix(bundle, n)?)?);
    }
    if n > bundle.horizon {
        return Err(PerturbationError::BeyondHorizon {
            n,
            horizon: bundle.horizon,
        });
    }
    let lambdas = &bundle.lambdas[..n];
    let c = nonvanishing::coefficients(lambdas, &bundle.mu_offsets[..n], n)?;
    let u = bundle.u.to_dense(n);
    let v: Vec<Complex64> = c.iter().zip(&u).map(|(ci, ui)| ci.conj() / ui.conj()).collect();
    Ok(eigen::eigenvalues(&rank_one_matrix(lambdas, &u, &v))?)
}
