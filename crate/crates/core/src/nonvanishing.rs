//! Partial-fraction expansions `f_N(z) = 1 - Σ c_{i,N}/(z - λ_i)` that
//! factor as `Π (z - μ_i)/(z - λ_i)` with every zero `μ_i` inside the set.
//!
//! Each `μ_k` is stored through its offset `d_k = μ_k - λ_k`. The offsets
//! shrink geometrically with `k` and drop far below the spacing of `f64`
//! near `λ_k`, so every quantity is computed from the offsets directly:
//!
//! ```text
//! (z - μ_i)/(z - λ_i)         = 1 - d_i/(z - λ_i)
//! c_{k,N} = d_k · Π_{j≤N, j≠k} (1 - d_j/(λ_k - λ_j))
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{ComplexSum, NeumaierSum};
use crate::point_index::PointIndex;
use crate::spectrum::{ComplexPoint, SpectrumModel, MEMBERSHIP_TOL};

/// Default number of shrinking-radius probes per `μ_k`.
pub const DEFAULT_PROBE_BUDGET: usize = 10_000;

const SINH_PI_OVER_PI: f64 = 3.676_077_910_374_978;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NonvanishingError {
    #[error("no admissible zero found for index {0}")]
    SearchFailed(usize),
    #[error("eigenvalues {0} and {1} coincide")]
    DegenerateLambda(usize, usize),
    #[error("evaluation point is the pole λ_{0}")]
    PoleHit(usize),
    #[error("truncation {n} exceeds the table horizon {horizon}")]
    BeyondHorizon { n: usize, horizon: usize },
    #[error("{what} has length {got}, expected {expected}")]
    LengthMismatch { what: &'static str, got: usize, expected: usize },
}

/// Schedule of the `ε_k` with `Π (1 + ε_k) < ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsSchedule {
    /// `ε_k = 2^-k`.
    Geometric,
    /// `ε_k = 1/k^2`.
    InverseSquare,
}

impl EpsSchedule {
    pub fn eps(&self, k: usize) -> f64 {
        match self {
            EpsSchedule::Geometric => 0.5f64.powi(k as i32),
            EpsSchedule::InverseSquare => 1.0 / (k as f64 * k as f64),
        }
    }

    /// `Π_{i>k} (1 + ε_i)` for `k = 0..=n`.
    pub fn tail_products(&self, n: usize) -> Vec<f64> {
        match self {
            EpsSchedule::Geometric => {
                // log-sum of the whole tail, then peel terms off the front
                let mut logs: Vec<f64> = (1..=n).map(|i| self.eps(i).ln_1p()).collect();
                let mut beyond = NeumaierSum::new();
                let mut i = n + 1;
                loop {
                    let e = self.eps(i);
                    if e < 1e-20 {
                        beyond += e;
                        break;
                    }
                    beyond += e.ln_1p();
                    i += 1;
                }
                let mut out = vec![0.0; n + 1];
                let mut acc = beyond.sum();
                out[n] = acc.exp();
                for k in (0..n).rev() {
                    acc += logs.pop().unwrap();
                    out[k] = acc.exp();
                }
                out
            }
            EpsSchedule::InverseSquare => {
                let mut out = Vec::with_capacity(n + 1);
                let mut head = 1.0;
                out.push(SINH_PI_OVER_PI);
                for i in 1..=n {
                    head *= 1.0 + self.eps(i);
                    out.push(SINH_PI_OVER_PI / head);
                }
                out
            }
        }
    }
}

/// Schedule of the bounds `γ_k` with `Σ γ_k < ∞`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaSchedule {
    /// `γ_k = 2^-k`.
    Geometric,
    /// `γ_k = δ w_k`; `tail_mass` bounds `Σ_{k>len} w_k`.
    Weighted { delta: f64, weights: Vec<f64>, tail_mass: f64 },
    /// Finitely many values, zero beyond.
    Explicit(Vec<f64>),
}

impl GammaSchedule {
    pub fn gamma(&self, k: usize) -> f64 {
        match self {
            GammaSchedule::Geometric => 0.5f64.powi(k as i32),
            GammaSchedule::Weighted { delta, weights, .. } => weights.get(k - 1).map_or(0.0, |w| delta * w),
            GammaSchedule::Explicit(v) => v.get(k - 1).copied().unwrap_or(0.0),
        }
    }

    /// `Σ_{i>n} γ_i`.
    pub fn tail_sum(&self, n: usize) -> f64 {
        match self {
            GammaSchedule::Geometric => 0.5f64.powi(n as i32),
            GammaSchedule::Weighted { delta, weights, tail_mass } => {
                let mut s = NeumaierSum::new();
                for w in weights.iter().skip(n) {
                    s += *w;
                }
                s += *tail_mass;
                delta * s.sum()
            }
            GammaSchedule::Explicit(v) => {
                let mut s = NeumaierSum::new();
                for g in v.iter().skip(n) {
                    s += *g;
                }
                s.sum()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableConfig {
    pub eps: EpsSchedule,
    pub gamma: GammaSchedule,
    pub probe_budget: usize,
}

impl Default for TableConfig {
    fn default() -> Self {
        Self {
            eps: EpsSchedule::Geometric,
            gamma: GammaSchedule::Geometric,
            probe_budget: DEFAULT_PROBE_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTable {
    pub lambdas: Vec<ComplexPoint>,
    pub mus: Vec<ComplexPoint>,
    /// `d_k = μ_k - λ_k`, exact.
    pub mu_offsets: Vec<Complex64>,
    pub eps: Vec<f64>,
    pub gammas: Vec<f64>,
    /// `Σ_{i>horizon} γ_i`.
    pub gamma_tail: f64,
    /// `Π_{i>k} (1 + ε_i)` for `k = 0..=horizon`.
    pub tail_products: Vec<f64>,
    /// `K_k = (λ_k - μ_k) Π_{j<k} (λ_k - μ_j)/(λ_k - λ_j)`.
    pub heads: Vec<Complex64>,
    pub working_n: usize,
    /// `c_{k,N}` at `N = working_n`.
    pub c_partial: Vec<Complex64>,
    /// `c_k` evaluated at the horizon.
    pub c: Vec<Complex64>,
}

impl CoefficientTable {
    pub fn horizon(&self) -> usize {
        self.lambdas.len()
    }

    /// Table for given zeros, treating the horizon as the end of the sequence.
    pub fn from_offsets(
        lambdas: Vec<ComplexPoint>,
        mu_offsets: Vec<Complex64>,
        eps: EpsSchedule,
        gamma: &GammaSchedule,
        working_n: usize,
    ) -> Result<Self, NonvanishingError> {
        let h = lambdas.len();
        if mu_offsets.len() != h {
            return Err(NonvanishingError::LengthMismatch {
                what: "mu_offsets",
                got: mu_offsets.len(),
                expected: h,
            });
        }
        if working_n > h {
            return Err(NonvanishingError::BeyondHorizon { n: working_n, horizon: h });
        }
        check_distinct(&lambdas)?;
        let heads = (1..=h)
            .map(|k| -mu_offsets[k - 1] * head_product(&lambdas, &mu_offsets, k))
            .collect();
        let (c_partial, c) = coefficients_pair(&lambdas, &mu_offsets, working_n)?;
        Ok(Self {
            mus: lambdas.iter().zip(&mu_offsets).map(|(l, d)| l + d).collect(),
            eps: (1..=h).map(|k| eps.eps(k)).collect(),
            gammas: (1..=h).map(|k| gamma.gamma(k)).collect(),
            gamma_tail: gamma.tail_sum(h),
            tail_products: eps.tail_products(h),
            lambdas,
            mu_offsets,
            heads,
            working_n,
            c_partial,
            c,
        })
    }

    /// `Σ_{i>n} γ_i` from the recorded values.
    pub fn gamma_tail_sum(&self, n: usize) -> f64 {
        let mut s = NeumaierSum::new();
        for g in self.gammas.iter().skip(n) {
            s += *g;
        }
        s += self.gamma_tail;
        s.sum()
    }

    /// `c_{·,n}` for any `n <= horizon`.
    pub fn coefficients(&self, n: usize) -> Result<Vec<Complex64>, NonvanishingError> {
        if n > self.horizon() {
            return Err(NonvanishingError::BeyondHorizon {
                n,
                horizon: self.horizon(),
            });
        }
        coefficients(&self.lambdas, &self.mu_offsets, n)
    }

    /// Numerator `Σ_{i<=n} |c_i - c_{i,n}| + Σ_{i>n} γ_i` of the tail bound.
    pub fn tail_numerator(&self, n: usize) -> Result<f64, NonvanishingError> {
        let cn = self.coefficients(n)?;
        let mut s = NeumaierSum::new();
        for (a, b) in self.c.iter().zip(&cn) {
            s += (a - b).norm();
        }
        s += self.gamma_tail_sum(n);
        Ok(s.sum())
    }

    /// Indices `k` with `|c_k| > γ_k` or `c_k = 0`.
    pub fn bound_violations(&self) -> Vec<usize> {
        self.c
            .iter()
            .zip(&self.gammas)
            .enumerate()
            .filter(|(_, (c, g))| c.norm() > **g || c.norm() == 0.0)
            .map(|(k, _)| k + 1)
            .collect()
    }

    pub fn eval_product(&self, z: ComplexPoint, n: usize) -> Result<Complex64, NonvanishingError> {
        eval_product(&self.lambdas, &self.mu_offsets, z, n)
    }

    pub fn eval_sum(&self, z: ComplexPoint, n: usize) -> Result<Complex64, NonvanishingError> {
        let c = if n == self.working_n {
            self.c_partial.clone()
        } else {
            self.coefficients(n)?
        };
        eval_sum(&self.lambdas, &c, z, n)
    }
}

fn check_distinct(lambdas: &[ComplexPoint]) -> Result<(), NonvanishingError> {
    let mut order: Vec<usize> = (0..lambdas.len()).collect();
    order.sort_by(|&a, &b| {
        lambdas[a]
            .re
            .total_cmp(&lambdas[b].re)
            .then(lambdas[a].im.total_cmp(&lambdas[b].im))
    });
    for w in order.windows(2) {
        if lambdas[w[0]] == lambdas[w[1]] {
            let (i, j) = (w[0].min(w[1]) + 1, w[0].max(w[1]) + 1);
            return Err(NonvanishingError::DegenerateLambda(i, j));
        }
    }
    Ok(())
}

/// `Π_{j<k} (1 - d_j/(λ_k - λ_j))`, 1-based `k`.
fn head_product(lambdas: &[ComplexPoint], offsets: &[Complex64], k: usize) -> Complex64 {
    let lk = lambdas[k - 1];
    let mut p = Complex64::new(1.0, 0.0);
    for j in 0..k - 1 {
        p *= 1.0 - offsets[j] / (lk - lambdas[j]);
    }
    p
}

/// `c_{k,n} = d_k Π_{j<=n, j≠k} (1 - d_j/(λ_k - λ_j))` for `k <= n`.
pub fn coefficients(lambdas: &[ComplexPoint], offsets: &[Complex64], n: usize) -> Result<Vec<Complex64>, NonvanishingError> {
    Ok(coefficients_pair(lambdas, offsets, n)?.0)
}

/// `(c_{·,n}, c_{·,H})` in one sweep, `H = lambdas.len()`.
fn coefficients_pair(
    lambdas: &[ComplexPoint],
    offsets: &[Complex64],
    n: usize,
) -> Result<(Vec<Complex64>, Vec<Complex64>), NonvanishingError> {
    let h = lambdas.len().min(offsets.len());
    if n > h {
        return Err(NonvanishingError::BeyondHorizon { n, horizon: h });
    }
    let mut partial = Vec::with_capacity(n);
    let mut full = Vec::with_capacity(h);
    for k in 0..h {
        let lk = lambdas[k];
        let mut p = offsets[k];
        for j in 0..h {
            if j == n && k < n {
                partial.push(p);
            }
            if j == k {
                continue;
            }
            let gap = lk - lambdas[j];
            if gap == Complex64::new(0.0, 0.0) {
                return Err(NonvanishingError::DegenerateLambda(j.min(k) + 1, j.max(k) + 1));
            }
            p *= 1.0 - offsets[j] / gap;
        }
        if n == h {
            partial.push(p);
        }
        full.push(p);
    }
    Ok((partial, full))
}

/// `Π_{i<=n} (z - μ_i)/(z - λ_i)` with `μ_i = λ_i + d_i`, in index order.
pub fn eval_product(lambdas: &[ComplexPoint], offsets: &[Complex64], z: ComplexPoint, n: usize) -> Result<Complex64, NonvanishingError> {
    let mut p = Complex64::new(1.0, 0.0);
    for i in 0..n {
        let w = z - lambdas[i];
        if w == Complex64::new(0.0, 0.0) {
            return Err(NonvanishingError::PoleHit(i + 1));
        }
        p *= (w - offsets[i]) / w;
    }
    Ok(p)
}

/// `1 - Σ_{i<=n} c_i/(z - λ_i)` with compensated summation.
pub fn eval_sum(lambdas: &[ComplexPoint], c: &[Complex64], z: ComplexPoint, n: usize) -> Result<Complex64, NonvanishingError> {
    let mut s = ComplexSum::new();
    for i in 0..n {
        let w = z - lambdas[i];
        if w == Complex64::new(0.0, 0.0) {
            return Err(NonvanishingError::PoleHit(i + 1));
        }
        s += c[i] / w;
    }
    Ok(1.0 - s.sum())
}

/// `(1/dist) (Σ_{i<=n} |c_i - c_{i,n}| + Σ_{i>n} γ_i)`.
pub fn tail_bound(table: &CoefficientTable, n: usize, dist: f64) -> Result<f64, NonvanishingError> {
    Ok(table.tail_numerator(n)? / dist)
}

/// Shrinking-radius search for admissible zeros `μ_k`.
pub struct MuSearch<'a> {
    model: &'a SpectrumModel,
    lambdas: &'a [ComplexPoint],
    index: PointIndex,
    config: &'a TableConfig,
    tail_products: Vec<f64>,
}

/// Outcome of one successful search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuChoice {
    pub offset: Complex64,
    pub head: Complex64,
    pub probes: usize,
}

impl<'a> MuSearch<'a> {
    pub fn new(model: &'a SpectrumModel, lambdas: &'a [ComplexPoint], config: &'a TableConfig) -> Self {
        Self {
            model,
            lambdas,
            index: PointIndex::new(lambdas),
            config,
            tail_products: config.eps.tail_products(lambdas.len()),
        }
    }

    /// Offset `d_k` for 1-based `k`, given the offsets of `1..k`.
    ///
    /// Enforces `|d_k| <= ε_k min_{j<k} |λ_j - λ_k|` and
    /// `|K_k| <= γ_k / Π_{i>k} (1 + ε_i)`, with `μ_k` in the set and distinct
    /// from every `λ_i` and every earlier `μ_j`.
    pub fn choose(&self, k: usize, earlier: &[Complex64]) -> Result<MuChoice, NonvanishingError> {
        assert_eq!(earlier.len(), k - 1, "offsets must be chosen in order");
        let lk = self.lambdas[k - 1];
        let mut gap = f64::INFINITY;
        let mut head = Complex64::new(1.0, 0.0);
        for (j, (l, d)) in self.lambdas.iter().zip(earlier).enumerate() {
            let w = lk - l;
            if w == Complex64::new(0.0, 0.0) {
                return Err(NonvanishingError::DegenerateLambda(j + 1, k));
            }
            gap = gap.min(w.norm());
            head *= 1.0 - d / w;
        }
        let eps_bound = self.config.eps.eps(k) * gap;
        let gamma_bound = self.config.gamma.gamma(k) / (self.tail_products[k] * head.norm());
        let r_max = eps_bound.min(gamma_bound);
        if r_max.is_nan() || r_max <= 0.0 {
            return Err(NonvanishingError::SearchFailed(k));
        }
        let r_max = r_max.min(1.0);
        let nearest_other = self.index.nearest(lk, Some(k)).map_or(f64::INFINITY, |(_, d)| d);
        let mut r = 0.5 * r_max;
        for probe in 1..=self.config.probe_budget {
            if r == 0.0 {
                break;
            }
            if let Some(d) = self.model.nearby_offset(lk, r) {
                let m = d.norm();
                let admissible = m > 0.0
                    && m <= r_max
                    && 2.0 * m < nearest_other
                    && self.model.distance(lk + d) <= MEMBERSHIP_TOL
                    && (0..k - 1).all(|j| (lk - self.lambdas[j]) + d - earlier[j] != Complex64::new(0.0, 0.0));
                if admissible {
                    return Ok(MuChoice {
                        offset: d,
                        head: -d * head,
                        probes: probe,
                    });
                }
            }
            r *= 0.5;
        }
        Err(NonvanishingError::SearchFailed(k))
    }
}

/// Choose `μ_1..μ_H` for `H = lambdas.len()` and fill the coefficients.
pub fn build_table(
    model: &SpectrumModel,
    lambdas: &[ComplexPoint],
    config: &TableConfig,
    working_n: usize,
) -> Result<CoefficientTable, NonvanishingError> {
    check_distinct(lambdas)?;
    let search = MuSearch::new(model, lambdas, config);
    let mut offsets = Vec::with_capacity(lambdas.len());
    for k in 1..=lambdas.len() {
        let choice = search.choose(k, &offsets)?;
        offsets.push(choice.offset);
    }
    CoefficientTable::from_offsets(lambdas.to_vec(), offsets, config.eps, &config.gamma, working_n)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub z: ComplexPoint,
    pub abs_f: f64,
    pub tail_bound: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub n: usize,
    pub records: Vec<CertificateRecord>,
    pub min_abs_product: f64,
    pub pass: bool,
}

/// `|f_N(z)| - tail_bound` at every grid point; passes iff all margins are positive.
pub fn nonvanishing_certificate(
    table: &CoefficientTable,
    model: &SpectrumModel,
    grid: &[ComplexPoint],
    n: usize,
) -> Result<CertificateReport, NonvanishingError> {
    let numerator = table.tail_numerator(n)?;
    let mut records = Vec::with_capacity(grid.len());
    let mut min_abs_product = f64::INFINITY;
    for &z in grid {
        let abs_f = table.eval_sum(z, n)?.norm();
        min_abs_product = min_abs_product.min(table.eval_product(z, n)?.norm());
        let bound = numerator / model.distance(z);
        records.push(CertificateRecord {
            z,
            abs_f,
            tail_bound: bound,
            margin: abs_f - bound,
        });
    }
    let pass = records.iter().all(|r| r.margin > 0.0) && min_abs_product > 0.0;
    Ok(CertificateReport {
        n,
        records,
        min_abs_product,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn toy() -> CoefficientTable {
        CoefficientTable::from_offsets(
            vec![c(0.0), c(1.0)],
            vec![c(0.1), c(-0.1)],
            EpsSchedule::Geometric,
            &GammaSchedule::Explicit(vec![0.1, 0.1]),
            2,
        )
        .unwrap()
    }

    #[test]
    fn two_point_example() {
        let t = toy();
        assert_abs_diff_eq!(t.c_partial[0].re, 0.09, epsilon = 1e-15);
        assert_abs_diff_eq!(t.c_partial[1].re, -0.09, epsilon = 1e-15);
        let z = c(2.0);
        assert_abs_diff_eq!(t.eval_product(z, 2).unwrap().re, 1.045, epsilon = 1e-15);
        assert_abs_diff_eq!(t.eval_sum(z, 2).unwrap().re, 1.045, epsilon = 1e-15);
        assert_eq!(t.eval_product(c(0.1), 2).unwrap(), c(0.0));
        assert_eq!(t.eval_product(z, 0).unwrap(), c(1.0));
        assert_eq!(t.eval_sum(z, 0).unwrap(), c(1.0));
        assert_eq!(t.eval_product(c(1.0), 2), Err(NonvanishingError::PoleHit(2)));
    }

    #[test]
    fn single_term_coefficient() {
        let t = CoefficientTable::from_offsets(vec![c(0.3)], vec![c(0.05)], EpsSchedule::Geometric, &GammaSchedule::Geometric, 1).unwrap();
        // c_{1,1} = μ_1 - λ_1
        assert_eq!(t.c[0], c(0.05));
        assert_eq!(t.heads[0], c(-0.05));
    }

    #[test]
    fn zero_coefficients_give_one() {
        let lambdas = vec![c(0.0), c(0.5)];
        let z = Complex64::new(0.3, 0.7);
        assert_eq!(eval_sum(&lambdas, &[c(0.0), c(0.0)], z, 2).unwrap(), c(1.0));
    }

    #[test]
    fn degenerate_lambdas_rejected() {
        let r = CoefficientTable::from_offsets(
            vec![c(0.0), c(0.0)],
            vec![c(0.1), c(0.1)],
            EpsSchedule::Geometric,
            &GammaSchedule::Geometric,
            2,
        );
        assert_eq!(r, Err(NonvanishingError::DegenerateLambda(1, 2)));
    }

    #[test]
    fn tail_products_match_direct_products() {
        for eps in [EpsSchedule::Geometric, EpsSchedule::InverseSquare] {
            let tp = eps.tail_products(10);
            let direct = |k: usize| (k + 1..2_000_000).map(|i| 1.0 + eps.eps(i)).product::<f64>();
            for k in [0, 1, 5, 10] {
                let tol = if eps == EpsSchedule::Geometric { 1e-14 } else { 5e-6 };
                assert!((tp[k] - direct(k)).abs() < tol, "{eps:?} {k}");
            }
        }
    }

    #[test]
    fn gamma_tails() {
        assert_eq!(GammaSchedule::Geometric.tail_sum(10), 0.5f64.powi(10));
        let w = GammaSchedule::Weighted {
            delta: 0.5,
            weights: vec![1.0, 0.5, 0.25],
            tail_mass: 0.25,
        };
        assert_eq!(w.gamma(2), 0.25);
        assert_eq!(w.tail_sum(1), 0.5);
        assert_eq!(GammaSchedule::Explicit(vec![1.0, 2.0]).tail_sum(2), 0.0);
    }

    #[test]
    fn search_example_on_segment() {
        let lambdas = vec![c(0.5)];
        let config = TableConfig {
            eps: EpsSchedule::Geometric,
            gamma: GammaSchedule::Explicit(vec![0.1]),
            probe_budget: 100,
        };
        let search = MuSearch::new(&SpectrumModel::Segment, &lambdas, &config);
        let choice = search.choose(1, &[]).unwrap();
        // single point: tail product of 2^-i is about 1.38, so |d| <= 0.1/1.38
        assert!(choice.offset.norm() <= 0.1 / config.eps.tail_products(1)[1]);
        assert_eq!(choice.head, -choice.offset);
        let none = TableConfig { probe_budget: 0, ..config };
        let search = MuSearch::new(&SpectrumModel::Segment, &lambdas, &none);
        assert_eq!(search.choose(1, &[]), Err(NonvanishingError::SearchFailed(1)));
    }

    #[test]
    fn tables_respect_gamma_bounds() {
        for model in [
            SpectrumModel::UnitSquare,
            SpectrumModel::Segment,
            SpectrumModel::UnitCircle,
            SpectrumModel::cantor(),
        ] {
            for eps in [EpsSchedule::Geometric, EpsSchedule::InverseSquare] {
                let lambdas = model.lambdas(200);
                let config = TableConfig {
                    eps,
                    ..TableConfig::default()
                };
                let t = build_table(&model, &lambdas, &config, 50).unwrap();
                assert!(t.bound_violations().is_empty(), "{model:?} {eps:?}");
                for k in 0..t.horizon() {
                    assert!(t.heads[k].norm() <= t.gammas[k] / t.tail_products[k + 1] * (1.0 + 1e-12));
                    assert!(model.distance(t.lambdas[k] + t.mu_offsets[k]) <= MEMBERSHIP_TOL);
                }
            }
        }
    }

    #[test]
    fn tail_bound_scaling() {
        let model = SpectrumModel::Segment;
        let t = build_table(&model, &model.lambdas(64), &TableConfig::default(), 64).unwrap();
        let b1 = tail_bound(&t, 10, 1.0).unwrap();
        let b2 = tail_bound(&t, 10, 2.0).unwrap();
        assert_eq!(b1, 2.0 * b2);
        assert!(b1 <= t.tail_numerator(10).unwrap() + 0.5f64.powi(10));
        assert_abs_diff_eq!(tail_bound(&t, 64, 1.0).unwrap(), 0.5f64.powi(64), epsilon = 1e-30);
    }

    #[test]
    fn certificate_examples() {
        let t = toy();
        let model = SpectrumModel::Segment;
        let mut grid = Vec::new();
        for a in 0..50 {
            for b in 0..50 {
                let z = Complex64::new(-2.0 + 5.0 * a as f64 / 49.0, -2.0 + 4.0 * b as f64 / 49.0);
                if model.distance(z) >= 0.5 {
                    grid.push(z);
                }
            }
        }
        let report = nonvanishing_certificate(&t, &model, &grid, 2).unwrap();
        assert!(report.pass);
        assert!(report.records.iter().all(|r| r.tail_bound == 0.0));

        let lambdas = model.lambdas(16);
        let built = build_table(&model, &lambdas, &TableConfig::default(), 8).unwrap();
        let near = Complex64::new(0.5, 1e-6);
        let report = nonvanishing_certificate(&built, &model, &[near], 8).unwrap();
        assert!(!report.pass && report.records[0].margin <= 0.0);
    }

    fn instance() -> impl Strategy<Value = (Vec<Complex64>, Vec<Complex64>)> {
        (1usize..=12)
            .prop_flat_map(|n| {
                (
                    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n),
                    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n),
                )
            })
            .prop_filter("well separated", |(l, m)| {
                let pts: Vec<(f64, f64)> = l.iter().chain(m.iter()).copied().collect();
                pts.iter()
                    .enumerate()
                    .all(|(a, p)| pts[a + 1..].iter().all(|q| (p.0 - q.0).hypot(p.1 - q.1) >= 1e-3))
            })
            .prop_map(|(l, m)| {
                let l: Vec<Complex64> = l.into_iter().map(|(x, y)| Complex64::new(x, y)).collect();
                let d = m.into_iter().zip(&l).map(|((x, y), li)| Complex64::new(x, y) - li).collect();
                (l, d)
            })
    }

    proptest! {
        #[test]
        fn product_equals_partial_fractions((lambdas, offsets) in instance(), zr in -3.0..3.0f64, zi in -3.0..3.0f64) {
            let z = Complex64::new(zr, zi);
            prop_assume!(lambdas.iter().all(|l| (z - l).norm() >= 1e-2));
            let n = lambdas.len();
            let cs = coefficients(&lambdas, &offsets, n).unwrap();
            let p = eval_product(&lambdas, &offsets, z, n).unwrap();
            let s = eval_sum(&lambdas, &cs, z, n).unwrap();
            prop_assert!((p - s).norm() <= 1e-10 * (1.0 + p.norm()), "{} vs {}", p, s);
        }

        #[test]
        fn coefficients_sum_to_total_offset((lambdas, offsets) in instance()) {
            let n = lambdas.len();
            let cs = coefficients(&lambdas, &offsets, n).unwrap();
            let total: Complex64 = cs.iter().sum();
            let expect: Complex64 = offsets.iter().sum();
            let scale: f64 = cs.iter().map(|c| c.norm()).sum::<f64>() + 1.0;
            prop_assert!((total - expect).norm() <= 1e-12 * scale);
        }
    }
}
