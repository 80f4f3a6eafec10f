//! End-to-end acceptance criteria. Each criterion prints one PASS/FAIL line;
//! the process exits nonzero if any criterion fails or overruns its budget.

use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rankone::eigen::{eigenvalues, match_points};
use rankone::nonvanishing::{self, CoefficientTable, EpsSchedule, TableConfig};
use rankone::perturbation::{self, rank_one_matrix, Branch, Evidence, IonascuContext, Probe};
use rankone::selection;
use rankone::{DensityClass, SpectrumModel, WeightedVector};
use rankone_lab::config::RunConfig;
use rankone_lab::grid::{verification_grid, GridKind};

type Poly = Vec<Complex64>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_point(rng: &mut StdRng) -> Complex64 {
    c(rng.gen::<f64>(), rng.gen::<f64>())
}

/// `n` eigenvalues and `n` zeros in the unit square, all `2n` points at
/// least `gap` apart.
fn separated_pairs(rng: &mut StdRng, n: usize, gap: f64) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut pts: Vec<Complex64> = Vec::with_capacity(2 * n);
    while pts.len() < 2 * n {
        let z = random_point(rng);
        if pts.iter().all(|p| (p - z).norm() >= gap) {
            pts.push(z);
        }
    }
    let mus = pts.split_off(n);
    (pts, mus)
}

/// Eigenvalues at least `10^-2` apart with each zero `μ_k = λ_k + d_k`,
/// `10^-3 <= |d_k| <= g_k/4` for `g_k` the distance from `λ_k` to the other
/// eigenvalues. All `2n` points stay at least `10^-3` apart.
fn paired_instance(rng: &mut StdRng, n: usize) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut lambdas: Vec<Complex64> = Vec::with_capacity(n);
    while lambdas.len() < n {
        let z = random_point(rng);
        if lambdas.iter().all(|p| (p - z).norm() >= 1e-2) {
            lambdas.push(z);
        }
    }
    let offsets = (0..n)
        .map(|k| {
            let g = (0..n)
                .filter(|&j| j != k)
                .map(|j| (lambdas[k] - lambdas[j]).norm())
                .fold(1.0, f64::min);
            let r = rng.gen_range(1e-3..=0.25 * g);
            Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
        })
        .collect();
    (lambdas, offsets)
}

fn poly_from_roots(roots: &[Complex64]) -> Poly {
    let mut p = vec![c(1.0, 0.0)];
    for r in roots {
        let mut next = vec![c(0.0, 0.0); p.len() + 1];
        for (k, a) in p.iter().enumerate() {
            next[k + 1] += a;
            next[k] -= a * r;
        }
        p = next;
    }
    p
}

/// `Π(z - λ_i) · (sign_one + Σ c_i/(z - λ_i))` expanded into coefficients.
fn secular_poly(lambdas: &[Complex64], coeffs: &[Complex64], sign_one: f64) -> Poly {
    let mut p: Poly = poly_from_roots(lambdas).into_iter().map(|a| a * sign_one).collect();
    for (i, ci) in coeffs.iter().enumerate() {
        let others: Vec<Complex64> = lambdas.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, l)| *l).collect();
        for (k, a) in poly_from_roots(&others).into_iter().enumerate() {
            p[k] += ci * a;
        }
    }
    p
}

/// Direct `c_{k,n} = -(λ_k - μ_k) Π_{j≠k} (λ_k - μ_j)/(λ_k - λ_j)`.
fn direct_coefficients(lambdas: &[Complex64], mus: &[Complex64]) -> Vec<Complex64> {
    (0..lambdas.len())
        .map(|k| {
            let mut p = -(lambdas[k] - mus[k]);
            for j in 0..lambdas.len() {
                if j != k {
                    p *= (lambdas[k] - mus[j]) / (lambdas[k] - lambdas[j]);
                }
            }
            p
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let mut rng = StdRng::seed_from_u64(11);
    let (mut worst, mut worst_direct, mut samples) = (0.0f64, 0.0f64, 0usize);
    let mut independent = 0.0f64;
    for inst in 0..400 {
        let n = rng.gen_range(1..=12);
        // first 200: the paired regime of the construction; last 200: unrelated zeros, reported only
        let paired = inst < 200;
        let (lambdas, offsets) = if paired {
            paired_instance(&mut rng, n)
        } else {
            let (l, m) = separated_pairs(&mut rng, n, 1e-3);
            let d = m.iter().zip(&l).map(|(m, l)| m - l).collect();
            (l, d)
        };
        let coeffs = nonvanishing::coefficients(&lambdas, &offsets, n).unwrap();
        let mut taken = 0;
        while taken < 100 {
            let z = c(rng.gen_range(-0.5..1.5), rng.gen_range(-0.5..1.5));
            if lambdas.iter().any(|l| (z - l).norm() < 1e-2) {
                continue;
            }
            let p = nonvanishing::eval_product(&lambdas, &offsets, z, n).unwrap();
            let s = nonvanishing::eval_sum(&lambdas, &coeffs, z, n).unwrap();
            let rel = (p - s).norm() / p.norm();
            taken += 1;
            if !paired {
                independent = independent.max(rel);
                continue;
            }
            let direct: Complex64 = (0..n).map(|i| (z - lambdas[i] - offsets[i]) / (z - lambdas[i])).product();
            worst = worst.max(rel);
            worst_direct = worst_direct.max((p - direct).norm() / direct.norm());
            samples += 1;
        }
    }
    outcome(
        worst <= 1e-10 && worst_direct <= 1e-10,
        format!(
            "200 paired instances, {samples} samples: max |product - sum|/|product| = {worst:.2e}, vs direct product {worst_direct:.2e} (tol 1e-10); unrelated zeros (not gated) {independent:.2e}"
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut rng = StdRng::seed_from_u64(22);
    let (mut worst, mut unrepaired_fails, mut worst_lead) = (0.0f64, 0usize, f64::INFINITY);
    let mut instances = 0;
    for n in 1..=4 {
        for _ in 0..25 {
            let (lambdas, mus) = separated_pairs(&mut rng, n, 1e-2);
            let offsets: Vec<Complex64> = mus.iter().zip(&lambdas).map(|(m, l)| m - l).collect();
            let ours = nonvanishing::coefficients(&lambdas, &offsets, n).unwrap();
            let target = poly_from_roots(&mus);
            // repaired: Π(z-λ)(1 - Σ c/(z-λ))
            let neg: Vec<Complex64> = ours.iter().map(|x| -x).collect();
            let lhs = secular_poly(&lambdas, &neg, 1.0);
            for (a, b) in lhs.iter().zip(&target) {
                worst = worst.max((a - b).norm() / b.norm().max(f64::MIN_POSITIVE));
            }
            // unrepaired: Π(z-λ)(Σ c'/(z-λ) - 1) with c' = (λ_k - μ_k) Π_{j≠k} (λ_k - μ_j)/(λ_k - λ_j)
            let theirs: Vec<Complex64> = direct_coefficients(&lambdas, &mus).iter().map(|x| -x).collect();
            let other = secular_poly(&lambdas, &theirs, -1.0);
            let lead = (other[n] - target[n]).norm();
            worst_lead = worst_lead.min(lead);
            if lead > 1e-9 {
                unrepaired_fails += 1;
            }
            instances += 1;
        }
    }
    outcome(
        worst <= 1e-9 && unrepaired_fails == instances,
        format!(
            "{instances} instances N<=4: repaired max coefficient rel error {worst:.2e} (tol 1e-9); unrepaired leading coefficient off in {unrepaired_fails}/{instances} (min gap {worst_lead:.1})"
        ),
    )
}

fn criterion_3() -> Outcome {
    let mut rng = StdRng::seed_from_u64(33);
    let sizes = [2usize, 4, 8, 16, 32, 64];
    let mut worst = [0.0f64; 6];
    for inst in 0..50 {
        let slot = inst % sizes.len();
        let n = sizes[slot];
        let (lambdas, offsets) = paired_instance(&mut rng, n);
        let mus: Vec<Complex64> = lambdas.iter().zip(&offsets).map(|(l, d)| l + d).collect();
        let coeffs = nonvanishing::coefficients(&lambdas, &offsets, n).unwrap();
        // balanced factorisation c_i = u_i conj(v_i)
        let u: Vec<Complex64> = coeffs.iter().map(|ci| c(ci.norm().sqrt(), 0.0)).collect();
        let v: Vec<Complex64> = coeffs.iter().zip(&u).map(|(ci, ui)| ci.conj() / ui.conj()).collect();
        let eig = eigenvalues(&rank_one_matrix(&lambdas, &u, &v)).unwrap();
        let (_, err) = match_points(&eig, &mus);
        worst[slot] = worst[slot].max(err);
    }
    let pass = sizes.iter().zip(&worst).all(|(&n, &e)| e <= if n <= 16 { 1e-8 } else { 1e-6 });
    let parts: Vec<String> = sizes.iter().zip(&worst).map(|(n, e)| format!("N={n}: {e:.1e}")).collect();
    outcome(
        pass,
        format!(
            "50 paired instances, max matched error {} (tol 1e-8 for N<=16, 1e-6 above)",
            parts.join(", ")
        ),
    )
}

/// `d_k Π_{j≠k} (1 - d_j/(λ_k - λ_j))` straight from the offsets.
fn limit_coefficients(t: &CoefficientTable) -> Vec<Complex64> {
    let h = t.horizon();
    (0..h)
        .map(|k| {
            let mut p = t.mu_offsets[k];
            for j in 0..h {
                if j != k {
                    p *= 1.0 - t.mu_offsets[j] / (t.lambdas[k] - t.lambdas[j]);
                }
            }
            p
        })
        .collect()
}

fn criterion_4() -> Outcome {
    let models = [
        SpectrumModel::Segment,
        SpectrumModel::UnitSquare,
        SpectrumModel::UnitCircle,
        SpectrumModel::cantor(),
    ];
    let mut details = Vec::new();
    let mut pass = true;
    for model in models {
        let table = nonvanishing::build_table(&model, &model.lambdas(500), &TableConfig::default(), 500).unwrap();
        let oracle = limit_coefficients(&table);
        let rel = table
            .c
            .iter()
            .zip(&oracle)
            .map(|(a, b)| (a - b).norm() / b.norm())
            .fold(0.0, f64::max);
        let ratio = table.c.iter().zip(&table.gammas).map(|(ci, g)| ci.norm() / g).fold(0.0, f64::max);
        let nonzero = table.c.iter().all(|ci| ci.norm() > 0.0);
        let ok = rel <= 1e-12 && ratio <= 1.0 && nonzero && table.bound_violations().is_empty();
        pass &= ok;
        details.push(format!("{}: max|c|/γ {ratio:.2}, oracle {rel:.0e}", model.id()));
    }
    outcome(pass, format!("k<=500, default schedules; {}", details.join("; ")))
}

/// Stage balls of `stage` containing `z`, by scanning a window of candidate
/// centres around `z`.
fn square_cover_count(z: Complex64, stage: u32) -> usize {
    let r = 0.25f64.powi(stage as i32);
    let (grid, fine) = (2f64.powi(stage as i32), 4f64.powi(stage as i32));
    let mut count = 0;
    let lines = (z.re * grid).round() as i64;
    let along = (z.im * fine).round() as i64;
    for v in lines - 2..=lines + 2 {
        for j in along - 2..=along + 2 {
            if (0..=1 << stage).contains(&v) && (0..=1i64 << (2 * stage)).contains(&j) {
                let centre = c(v as f64 / grid, j as f64 / fine);
                count += usize::from((z - centre).norm() <= r);
            }
        }
    }
    let lines = (z.im * grid).round() as i64;
    let along = (z.re * fine).round() as i64;
    for h in lines - 2..=lines + 2 {
        for j in along - 2..=along + 2 {
            if (0..=1 << stage).contains(&h) && (0..=1i64 << (2 * stage)).contains(&j) {
                let centre = c(j as f64 / fine, h as f64 / grid);
                count += usize::from((z - centre).norm() <= r);
            }
        }
    }
    count
}

fn criterion_5() -> Outcome {
    // segment: stage s has 2^s + 1 balls of radius 2^-s
    let seg = SpectrumModel::Segment.cover();
    let mass: f64 = (1..=20).map(|s| (2f64.powi(s) + 1.0) * (2.0 * 0.5f64.powi(s)).powi(2)).sum();
    let lib_mass: f64 = (1..=20).map(|s| seg.stage_diam_sq(s)).sum();
    let mut seg_min = usize::MAX;
    let mut seg_agree = true;
    for z in SpectrumModel::Segment.sample_points(100) {
        let mut hits = 0;
        for s in 1..=20u32 {
            let r = 0.5f64.powi(s as i32);
            let brute = (0..=1usize << s).filter(|&k| (z.re - k as f64 * r).abs() <= r).count();
            seg_agree &= brute == seg.balls_containing(z, s).len();
            hits += brute;
        }
        seg_min = seg_min.min(hits);
    }

    // square grid lines: stage s has 2(2^s + 1)(4^s + 1) balls of radius 4^-s
    let sq = SpectrumModel::UnitSquare.cover();
    let sq_mass: f64 = (1..=12)
        .map(|s| 2.0 * (2f64.powi(s) + 1.0) * (4f64.powi(s) + 1.0) * (2.0 * 0.25f64.powi(s)).powi(2))
        .sum();
    let lib_sq_mass: f64 = (1..=12).map(|s| sq.stage_diam_sq(s)).sum();
    let mut sq_min = usize::MAX;
    let mut sq_agree = true;
    for i in 1..=100u64 {
        // a point on the level-n skeleton, n in 1..=3
        let n = 1 + (i % 3) as i32;
        let l = 2 * ((i / 3) % (1 << (n - 1))) + 1;
        let (t, _) = rankone::numeric::kronecker(i);
        let x = l as f64 / 2f64.powi(n);
        let z = if i % 2 == 0 { c(x, t) } else { c(t, x) };
        let mut hits = 0;
        for s in 1..=12u32 {
            let brute = square_cover_count(z, s);
            sq_agree &= brute == sq.balls_containing(z, s).len();
            hits += brute;
        }
        sq_min = sq_min.min(hits);
    }
    let pass = mass <= 16.0
        && (mass - lib_mass).abs() <= 1e-12 * mass
        && seg_min >= 18
        && seg_agree
        && sq_mass <= sq.budget()
        && (sq_mass - lib_sq_mass).abs() <= 1e-12 * sq_mass
        && sq_min >= 10
        && sq_agree;
    outcome(
        pass,
        format!(
            "segment 20 stages Σdiam² {mass:.4} (<= 16), min multiplicity {seg_min} (>= 18); square 12 stages Σdiam² {sq_mass:.4} (<= {:.4}), min multiplicity {sq_min} (>= 10); brute-force counts agree: {}",
            sq.budget(),
            seg_agree && sq_agree
        ),
    )
}

/// Least-squares slope and its one-sided 95% lower bound.
fn slope_lower95(points: &[(f64, f64)]) -> (f64, f64) {
    // t quantiles at 0.95 for 1..=8 degrees of freedom
    const T95: [f64; 8] = [6.313752, 2.919986, 2.353363, 2.131847, 2.015048, 1.943180, 1.894579, 1.859548];
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let rss: f64 = points.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
    let se = (rss / (k - 2.0) / sxx).sqrt();
    (slope, slope - T95[points.len() - 3] * se)
}

fn outside_bound(u: &WeightedVector, model: &SpectrumModel) -> (bool, usize) {
    let points = rankone_lab::grid::outside_points(model, 100, 0.1, 1.0).unwrap();
    let mut ok = 0;
    for z in points {
        let d = model.distance(z);
        let partials = selection::resolvent_energy_partials(u, model, z).unwrap();
        let cap = u.norm_sq() / (d * d);
        let direct: f64 = u.iter().map(|(i, ui)| ui.norm_sqr() / (z - model.lambda(i)).norm_sqr()).sum();
        let last = *partials.last().unwrap();
        if partials.iter().all(|&s| s <= cap) && (last - direct).abs() <= 1e-10 * direct {
            ok += 1;
        }
    }
    (ok == 100, ok)
}

fn criterion_6() -> Outcome {
    let probe = Probe::default();

    let square = SpectrumModel::UnitSquare;
    let plan = selection::build_selection(&square, 9, 1 << 20).unwrap();
    let u = selection::assemble_u(&plan);
    let (mut certified, mut min_kappa, mut agree) = (0, f64::INFINITY, true);
    for z in square.sample_points(20) {
        assert_eq!(square.density_class(z), DensityClass::DensityOne);
        let stages = perturbation::diagnostic_stages(&plan, DensityClass::DensityOne, &probe);
        let report = selection::divergence_diagnostic(&u, &plan, z, &stages, selection::DEFAULT_ALPHA).unwrap();
        // stagewise envelope (1/β_n) Σ_I min(|z-λ|^-2, 4^n/2), recomputed
        let env: Vec<(f64, f64)> = (4..=9u32)
            .map(|n| {
                let st = &plan.stages[n as usize];
                let cap = 4f64.powi(n as i32) / 2.0;
                let w: f64 = st
                    .picks_i
                    .iter()
                    .map(|p| (1.0 / (z - square.lambda(p.index)).norm_sqr()).min(cap))
                    .sum();
                (n as f64, w / st.beta as f64)
            })
            .collect();
        let (kappa, lower) = slope_lower95(&env);
        let fit = report.fit.unwrap();
        agree &= (fit.slope - kappa).abs() <= 1e-9 * kappa.abs() && (fit.slope_lower95 - lower).abs() <= 1e-6 * lower.abs().max(1.0);
        min_kappa = min_kappa.min(lower);
        certified += usize::from(kappa > 0.0 && lower > 0.0 && report.certified());
    }
    let (square_outside, _) = outside_bound(&u, &square);

    let segment = SpectrumModel::Segment;
    let cover = segment.cover();
    let plan = selection::build_selection(&segment, cover.balls_through(20) as u32 - 1, 1 << 22).unwrap();
    let u = selection::assemble_u(&plan);
    let mut min_hits = u32::MAX;
    for z in segment.sample_points(20) {
        let stages = perturbation::diagnostic_stages(&plan, DensityClass::Exceptional, &probe);
        let report = selection::divergence_diagnostic(&u, &plan, z, &stages, selection::DEFAULT_ALPHA).unwrap();
        // unit contributions diam²/|z - λ_j|² >= 1 from the J pick of a ball containing z
        let mut hits = 0;
        for s in 1..=20u32 {
            let r = 0.5f64.powi(s as i32);
            let offset = cover.stage_offset(s);
            let hit = (0..=1usize << s).any(|k| {
                let centre = k as f64 * r;
                let j = plan.stages[offset + k].pick_j;
                (z.re - centre).abs() <= r && (2.0 * r).powi(2) / (z - segment.lambda(j)).norm_sqr() >= 1.0
            });
            hits += u32::from(hit);
        }
        agree &= hits == report.stages_hit && report.stages_total == 20;
        min_hits = min_hits.min(hits);
    }
    let (segment_outside, _) = outside_bound(&u, &segment);

    outcome(
        certified == 20 && min_hits >= 18 && square_outside && segment_outside && agree,
        format!(
            "square: {certified}/20 density points with slope lower bound > 0 over stages 4..9 (min {min_kappa:.2}); segment: min {min_hits}/20 unit contributions (>= 18); outside S_M <= |u|²/d² at 100 points: square {square_outside}, segment {segment_outside}; oracle agreement {agree}"
        ),
    )
}

fn criterion_7() -> Outcome {
    let delta = 1e-3;
    let mut pass = true;
    let mut details = Vec::new();
    for (model, stages) in [
        (SpectrumModel::Segment, 10),
        (SpectrumModel::UnitSquare, 3),
        (SpectrumModel::UnitCircle, 10),
        (SpectrumModel::cantor(), 10),
    ] {
        let run = perturbation::construct(&model, stages, 1024, delta, EpsSchedule::InverseSquare).unwrap();
        let b = &run.bundle;
        let exact = (1..=b.horizon).all(|i| b.v.get(i) == b.c[i - 1].conj() / b.u.get(i).conj());
        let bound = (1..=b.horizon).all(|i| b.c[i - 1].norm() <= delta * b.u.get(i).norm_sqr());
        let nonzero = (1..=b.horizon).all(|i| b.u.get(i).norm() > 0.0 && b.v.get(i).norm() > 0.0);
        let u_norm = (1..=b.horizon).map(|i| b.u.get(i).norm_sqr()).sum::<f64>().sqrt();
        let v_norm = (1..=b.horizon).map(|i| b.v.get(i).norm_sqr()).sum::<f64>().sqrt();
        let norms = u_norm * v_norm <= delta * u_norm * u_norm && (b.rank_one_norm - u_norm * v_norm).abs() <= 1e-12 * b.rank_one_norm;
        pass &= exact && bound && nonzero && norms;
        details.push(format!(
            "{} |u||v|/δ|u|² = {:.3}",
            model.id(),
            u_norm * v_norm / (delta * u_norm * u_norm)
        ));
    }
    outcome(pass, format!("horizon 1024, δ = 1e-3; {}", details.join(", ")))
}

fn criterion_8() -> Outcome {
    let model = SpectrumModel::Segment;
    let stages = model.cover().balls_through(8) as u32 - 1;
    let run = perturbation::construct(&model, stages, 2048, 1e-3, EpsSchedule::InverseSquare).unwrap();
    let config = RunConfig {
        grid_points: 10_000,
        grid_exact: 100,
        grid_in_set: 1000,
        grid_min_distance: 0.1,
        ..RunConfig::default()
    };
    let grid = verification_grid(&model, &config).unwrap();
    let ctx = IonascuContext::new(&run.bundle, &run.plan, Probe::default());
    let b = &run.bundle;
    let (mut inconclusive, mut wrong, mut min_margin, mut worst_f) = (0, 0, f64::INFINITY, 0.0f64);
    for &(kind, z) in &grid {
        let v = ctx.test(z);
        inconclusive += usize::from(v.branch == Branch::Inconclusive);
        let expected = match kind {
            GridKind::Eigenvalue => Branch::Condition1IsEigenvalueOfD,
            GridKind::InSet => Branch::Condition2DivergenceCertified,
            GridKind::Outside => Branch::Condition3SumNotOne,
        };
        wrong += usize::from(v.branch != expected);
        if let Evidence::SumNotOne { abs_f, tail_bound, margin } = v.evidence {
            // |1 - Σ u_i conj(v_i)/(z - λ_i)| and the tail bound, recomputed
            let f: Complex64 = c(1.0, 0.0)
                - (1..=b.horizon)
                    .map(|i| b.u.get(i) * b.v.get(i).conj() / (z - b.lambdas[i - 1]))
                    .sum::<Complex64>();
            let tb = b.gamma_tail / model.distance(z);
            worst_f = worst_f.max((f.norm() - abs_f).abs()).max((tb - tail_bound).abs());
            min_margin = min_margin.min(margin.min(f.norm() - tb));
        }
    }
    outcome(
        inconclusive == 0 && wrong == 0 && min_margin > 0.0 && worst_f <= 1e-12,
        format!(
            "{} points ({} stages, horizon 2048): {inconclusive} inconclusive, {wrong} unexpected branches, min Condition3 margin {min_margin:.3}, recomputation error {worst_f:.1e}",
            grid.len(),
            run.plan.stages.len()
        ),
    )
}

fn criterion_9() -> Outcome {
    let model = SpectrumModel::Segment;
    let run = perturbation::construct(&model, 20, 256, 1e-3, EpsSchedule::InverseSquare).unwrap();
    let table = &run.table;
    let grid: Vec<Complex64> = (0..100)
        .map(|k| c(0.5, 0.0) + Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 100.0))
        .collect();
    let f = |z: Complex64, n: usize| -> Complex64 { (0..n).map(|i| 1.0 - table.mu_offsets[i] / (z - table.lambdas[i])).product() };
    let mut pass = true;
    let mut prev = f64::INFINITY;
    let mut details = Vec::new();
    for h in [8usize, 16, 32, 64] {
        let (mut sup_diff, mut bound) = (0.0f64, f64::INFINITY);
        for &z in &grid {
            let d = model.distance(z);
            let tb = nonvanishing::tail_bound(table, h, d).unwrap();
            let diff = (f(z, 2 * h) - f(z, h)).norm();
            pass &= diff <= tb;
            sup_diff = sup_diff.max(diff);
            bound = bound.min(tb);
        }
        let sup_bound = nonvanishing::tail_bound(table, h, 0.5).unwrap();
        pass &= sup_bound < prev;
        prev = sup_bound;
        details.push(format!("H={h}: sup|f_2H-f_H| {sup_diff:.2e} <= {bound:.2e}"));
    }
    outcome(
        pass,
        format!("100 points on |z-0.5|=1, bounds strictly decreasing; {}", details.join(", ")),
    )
}

fn run_cli(args: &[&str], out: &Path) -> bool {
    Command::new(env!("CARGO_BIN_EXE_rankone-lab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env("LAB_THREADS", "4")
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false)
}

fn criterion_10() -> Outcome {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut ok = true;
    for d in &dirs {
        for cmd in ["construct", "verify", "sweep"] {
            ok &= run_cli(&[cmd, "--model", "segment"], d.path());
        }
    }
    let names = [
        "bundle.json",
        "plan.json",
        "coeffs.json",
        "verify.json",
        "verdicts.jsonl",
        "heatmap.csv",
        "eigs.csv",
        "growth.csv",
    ];
    let mut same = 0;
    for name in names {
        let a = std::fs::read(dirs[0].path().join(name)).unwrap_or_default();
        let b = std::fs::read(dirs[1].path().join(name)).unwrap_or_default();
        same += usize::from(!a.is_empty() && a == b);
    }
    outcome(
        ok && same == names.len(),
        format!(
            "two default segment runs: commands succeeded {ok}, {same}/{} files byte-identical",
            names.len()
        ),
    )
}

fn main() {
    type Criterion = (u32, &'static str, u64, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        (1, "partial-fraction/product identity", 10, criterion_1),
        (2, "sign-repair polynomial oracle", 1, criterion_2),
        (3, "secular eigenvalue oracle", 30, criterion_3),
        (4, "coefficient bounds", 5, criterion_4),
        (5, "covering budget and multiplicity", 10, criterion_5),
        (6, "divergence certificates", 60, criterion_6),
        (7, "bundle invariants", 1, criterion_7),
        (8, "eigenvalue-free verdicts", 120, criterion_8),
        (9, "tail-bound convergence", 10, criterion_9),
        (10, "determinism", 120, criterion_10),
    ];
    let mut failed = 0;
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(run));
        let elapsed = start.elapsed();
        let (pass, detail) = match result {
            Ok(o) => (o.pass && elapsed <= Duration::from_secs(budget), o.detail),
            Err(e) => (
                false,
                format!(
                    "panicked: {}",
                    e.downcast_ref::<String>()
                        .cloned()
                        .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                        .unwrap_or_default()
                ),
            ),
        };
        failed += usize::from(!pass);
        println!(
            "{} criterion {id:>2} {name}: {detail} [{:.2}s, budget {budget}s]",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
