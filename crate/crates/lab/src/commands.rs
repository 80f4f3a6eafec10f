use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use anyhow::{anyhow, Context, Result};
use num_complex::Complex64;
use rankone::eigen::match_points;
use rankone::numeric::ComplexSum;
use rankone::perturbation::{self, Branch, Evidence, IonascuContext, IonascuVerdict, PerturbationBundle, Probe};
use rankone::selection::{self, SelectionPlan};
use rankone::spectrum::{check_lambdas, DEFAULT_ISOLATION_RADIUS};
use rankone::SpectrumModel;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::artifacts::{self, fmt_float, BundleArtifact, CoeffsArtifact, Provenance};
use crate::config::RunConfig;
use crate::grid::{self, GridKind};
use crate::{Classify, ExitKind};

/// Worker pool sized by `LAB_THREADS` when set.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("LAB_THREADS") {
        let n: usize = v
            .parse()
            .with_context(|| format!("LAB_THREADS={v} is not a count"))
            .kind(ExitKind::Config)?;
        builder = builder.num_threads(n.max(1));
    }
    builder.build().map_err(|e| anyhow!(e)).kind(ExitKind::Config)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstructSummary {
    pub horizon: usize,
    pub stages: usize,
    pub u_norm: f64,
    pub v_norm: f64,
    pub rank_one_norm: f64,
    pub norm_bound: f64,
}

pub fn construct(config: &RunConfig) -> Result<ConstructSummary> {
    config.validate().kind(ExitKind::Config)?;
    let model = config.spectrum().kind(ExitKind::Config)?;
    let start = Instant::now();
    check_lambdas(&model.lambdas(config.horizon), DEFAULT_ISOLATION_RADIUS).kind(ExitKind::Construction)?;
    let run = perturbation::construct(&model, config.stages, config.horizon, config.delta, config.eps_schedule)
        .context("construction failed")
        .kind(ExitKind::Construction)?;
    let out = &config.out;
    fs::create_dir_all(out)
        .with_context(|| format!("creating {}", out.display()))
        .kind(ExitKind::Artifact)?;
    let provenance = Provenance {
        generator: concat!("rankone-lab ", env!("CARGO_PKG_VERSION")).to_string(),
        model: model.id().to_string(),
        stages: config.stages,
        horizon: config.horizon,
        delta: config.delta,
        eps_schedule: config.eps_schedule,
    };
    let b = &run.bundle;
    let summary = ConstructSummary {
        horizon: b.horizon,
        stages: run.plan.stages.len(),
        u_norm: b.u_norm,
        v_norm: b.v_norm,
        rank_one_norm: b.rank_one_norm,
        norm_bound: b.norm_bound,
    };
    let bundle = BundleArtifact {
        provenance,
        bundle: run.bundle,
    };
    artifacts::write(out, artifacts::BUNDLE_FILE, &bundle).kind(ExitKind::Artifact)?;
    artifacts::write(out, artifacts::PLAN_FILE, &run.plan).kind(ExitKind::Artifact)?;
    artifacts::write(out, artifacts::COEFFS_FILE, &CoeffsArtifact::from(&run.table)).kind(ExitKind::Artifact)?;
    eprintln!(
        "construct: {} stages, horizon {}, |u||v| = {:.3e} <= {:.3e} ({:.2?})",
        summary.stages,
        summary.horizon,
        summary.rank_one_norm,
        summary.norm_bound,
        start.elapsed()
    );
    Ok(summary)
}

fn load(dir: &Path) -> Result<(PerturbationBundle, SelectionPlan)> {
    let bundle: BundleArtifact = artifacts::read(dir, artifacts::BUNDLE_FILE).kind(ExitKind::Artifact)?;
    let plan: SelectionPlan = artifacts::read(dir, artifacts::PLAN_FILE).kind(ExitKind::Artifact)?;
    let coeffs: CoeffsArtifact = artifacts::read(dir, artifacts::COEFFS_FILE).kind(ExitKind::Artifact)?;
    let b = bundle.bundle;
    if plan.model != b.model || plan.horizon != b.horizon || coeffs.c != b.c {
        return Err(anyhow!("artifacts in {} come from different runs", dir.display())).kind(ExitKind::Artifact);
    }
    Ok((b, plan))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub pass: bool,
    pub measured: f64,
    pub threshold: f64,
    /// Wall time; reported on stderr only so that reports stay reproducible.
    #[serde(skip)]
    pub runtime: Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub pass: bool,
    pub model: String,
    pub horizon: usize,
    pub grid_points: usize,
    pub branches: BTreeMap<String, usize>,
    pub checks: Vec<CheckRecord>,
}

struct Checks(Vec<CheckRecord>);

impl Checks {
    /// Record `measured <= threshold`, timing `f`.
    fn at_most(&mut self, name: impl Into<String>, threshold: f64, f: impl FnOnce() -> Result<f64>) -> Result<()> {
        let start = Instant::now();
        let measured = f()?;
        self.0.push(CheckRecord {
            name: name.into(),
            pass: measured <= threshold,
            measured,
            threshold,
            runtime: start.elapsed(),
        });
        Ok(())
    }

    /// Record `measured > threshold`.
    fn above(&mut self, name: impl Into<String>, threshold: f64, f: impl FnOnce() -> Result<f64>) -> Result<()> {
        let start = Instant::now();
        let measured = f()?;
        self.0.push(CheckRecord {
            name: name.into(),
            pass: measured > threshold,
            measured,
            threshold,
            runtime: start.elapsed(),
        });
        Ok(())
    }
}

fn branch_name(b: Branch) -> String {
    serde_json::to_value(b)
        .ok()
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_default()
}

/// Run the eigenvalue test over the verification grid and the bundle checks.
pub fn verify(config: &RunConfig) -> Result<VerifyReport> {
    config.validate().kind(ExitKind::Config)?;
    let (bundle, plan) = load(&config.out)?;
    let model = bundle.model;
    if config.grid_exact > bundle.horizon {
        return Err(anyhow!(
            "grid_exact {} exceeds the bundle horizon {}",
            config.grid_exact,
            bundle.horizon
        ))
        .kind(ExitKind::Config);
    }
    let pool = thread_pool()?;
    let grid = grid::verification_grid(&model, config).kind(ExitKind::Config)?;
    let mut checks = Checks(Vec::new());

    let start = Instant::now();
    let ctx = IonascuContext::new(&bundle, &plan, Probe::default());
    let verdicts: Vec<IonascuVerdict> = pool.install(|| grid.par_iter().map(|&(_, z)| ctx.test(z)).collect());
    let grid_time = start.elapsed();

    let mut branches = BTreeMap::new();
    for v in &verdicts {
        *branches.entry(branch_name(v.branch)).or_insert(0) += 1;
    }
    let inconclusive = verdicts.iter().filter(|v| v.branch == Branch::Inconclusive).count();
    checks.0.push(CheckRecord {
        name: "grid_inconclusive_verdicts".into(),
        pass: inconclusive == 0,
        measured: inconclusive as f64,
        threshold: 0.0,
        runtime: grid_time,
    });
    let expected = |kind: GridKind, v: &IonascuVerdict| match kind {
        GridKind::Eigenvalue => v.branch == Branch::Condition1IsEigenvalueOfD,
        // a sample within the coincidence tolerance of some λ is one numerically
        GridKind::InSet => matches!(v.branch, Branch::Condition2DivergenceCertified | Branch::Condition1IsEigenvalueOfD),
        GridKind::Outside => v.branch == Branch::Condition3SumNotOne,
    };
    let misplaced = grid.iter().zip(&verdicts).filter(|((k, _), v)| !expected(*k, v)).count();
    checks.at_most("grid_unexpected_branches", 0.0, || Ok(misplaced as f64))?;
    checks.above("condition3_min_margin", 0.0, || {
        Ok(verdicts
            .iter()
            .filter_map(|v| match v.evidence {
                Evidence::SumNotOne { margin, .. } => Some(margin),
                _ => None,
            })
            .fold(f64::INFINITY, f64::min))
    })?;

    checks.at_most("bundle_v_formula_max_error", 0.0, || {
        Ok((1..=bundle.horizon)
            .map(|i| (bundle.v.get(i) - bundle.c[i - 1].conj() / bundle.u.get(i).conj()).norm())
            .fold(0.0, f64::max))
    })?;
    checks.at_most("bundle_c_over_delta_u_sq", 1.0, || {
        Ok((1..=bundle.horizon)
            .map(|i| bundle.c[i - 1].norm() / (bundle.delta * bundle.u.get(i).norm_sqr()))
            .fold(0.0, f64::max))
    })?;
    checks.at_most("bundle_rank_one_over_bound", 1.0, || Ok(bundle.rank_one_norm / bundle.norm_bound))?;
    checks.above("bundle_min_abs_c", 0.0, || {
        Ok(bundle.c.iter().map(|c| c.norm()).fold(f64::INFINITY, f64::min))
    })?;
    checks.above("bundle_min_abs_v", 0.0, || {
        Ok(bundle.v.iter().map(|(_, v)| v.norm()).fold(f64::INFINITY, f64::min))
    })?;
    checks.at_most("cover_mass_over_budget", 1.0, || {
        let used: f64 = plan.stages.iter().map(|s| s.ball.diam().powi(2)).sum();
        Ok(used / model.cover().budget())
    })?;

    let secular: Vec<Result<(usize, f64, Duration)>> = pool.install(|| {
        config
            .truncations
            .par_iter()
            .map(|&n| {
                let start = Instant::now();
                let eig = perturbation::secular_eigenvalues(&bundle, n, true)?;
                let (_, worst) = match_points(&eig, &bundle.mus[..n]);
                Ok((n, worst, start.elapsed()))
            })
            .collect()
    });
    for r in secular {
        let (n, worst, runtime) = r.kind(ExitKind::Verification)?;
        checks.0.push(CheckRecord {
            name: format!("secular_partial_n{n}_max_error"),
            pass: worst <= if n <= 16 { 1e-8 } else { 1e-6 },
            measured: worst,
            threshold: if n <= 16 { 1e-8 } else { 1e-6 },
            runtime,
        });
    }

    let report = VerifyReport {
        pass: checks.0.iter().all(|c| c.pass),
        model: model.id().to_string(),
        horizon: bundle.horizon,
        grid_points: grid.len(),
        branches,
        checks: checks.0,
    };
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    fs::write(config.out.join(artifacts::VERIFY_FILE), json).kind(ExitKind::Artifact)?;
    let mut lines = String::new();
    for v in &verdicts {
        lines.push_str(&serde_json::to_string(v)?);
        lines.push('\n');
    }
    fs::write(config.out.join(artifacts::VERDICTS_FILE), lines).kind(ExitKind::Artifact)?;
    for c in &report.checks {
        eprintln!(
            "{:<32} {} measured={:.3e} threshold={:.3e} ({:.2?})",
            c.name,
            if c.pass { "pass" } else { "FAIL" },
            c.measured,
            c.threshold,
            c.runtime
        );
    }
    Ok(report)
}

fn csv_writer(path: &Path, header: &[&str]) -> Result<csv::Writer<fs::File>> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("creating {}", path.display()))
        .kind(ExitKind::Artifact)?;
    w.write_record(header)?;
    Ok(w)
}

/// `1 - Σ_i u_i conj(v_i)/(z - λ_i)` over the bundle horizon.
fn f_horizon(bundle: &PerturbationBundle, z: Complex64) -> Complex64 {
    let mut s = ComplexSum::new();
    for (k, (c, l)) in bundle.c.iter().zip(&bundle.lambdas).enumerate() {
        debug_assert!(k < bundle.horizon);
        s += c / (z - l);
    }
    1.0 - s.sum()
}

/// Heat map of `|f|`, truncation eigenvalues and growth curves.
pub fn sweep(config: &RunConfig) -> Result<()> {
    config.validate().kind(ExitKind::Config)?;
    let (bundle, plan) = load(&config.out)?;
    let model: SpectrumModel = bundle.model;
    let pool = thread_pool()?;
    let out = &config.out;

    let lattice = grid::heatmap_lattice(&model, config.heatmap_resolution, config.grid_min_distance, config.grid_margin);
    let rows: Vec<[String; 5]> = pool.install(|| {
        lattice
            .par_iter()
            .map(|&z| {
                let abs_f = f_horizon(&bundle, z).norm();
                let bound = bundle.gamma_tail / model.distance(z);
                [z.re, z.im, abs_f, bound, abs_f - bound].map(fmt_float)
            })
            .collect()
    });
    let mut w = csv_writer(&out.join(artifacts::HEATMAP_FILE), &artifacts::HEATMAP_COLUMNS)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;

    if !config.truncations.is_empty() {
        let eigs: Vec<Result<(usize, Vec<Complex64>)>> = pool.install(|| {
            config
                .truncations
                .par_iter()
                .map(|&n| {
                    let mut e = perturbation::secular_eigenvalues(&bundle, n, false)?;
                    e.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
                    Ok((n, e))
                })
                .collect()
        });
        let mut w = csv_writer(&out.join(artifacts::EIGS_FILE), &artifacts::EIGS_COLUMNS)?;
        for r in eigs {
            let (n, e) = r.kind(ExitKind::Verification)?;
            for z in e {
                let nearest = (0..n)
                    .map(|j| ((z - bundle.lambdas[j]) - bundle.mu_offsets[j]).norm())
                    .fold(f64::INFINITY, f64::min);
                w.write_record(&[n.to_string(), fmt_float(z.re), fmt_float(z.im), fmt_float(nearest)])?;
            }
        }
        w.flush()?;
    } else {
        let stale = out.join(artifacts::EIGS_FILE);
        if stale.exists() {
            fs::remove_file(stale)?;
        }
    }

    let u = selection::assemble_u(&plan);
    let mut w = csv_writer(&out.join(artifacts::GROWTH_FILE), &artifacts::GROWTH_COLUMNS)?;
    for z in model.sample_points(config.growth_points) {
        let stages = perturbation::diagnostic_stages(&plan, model.density_class(z), &Probe::default());
        let report = selection::divergence_diagnostic(&u, &plan, z, &stages, selection::DEFAULT_ALPHA).kind(ExitKind::Verification)?;
        for r in report.rows {
            w.write_record(&[
                fmt_float(z.re),
                fmt_float(z.im),
                r.stage.to_string(),
                fmt_float(r.partial_sum),
                fmt_float(r.lower_bound),
            ])?;
        }
    }
    w.flush()?;
    eprintln!("sweep: wrote outputs to {}", out.display());
    Ok(())
}
