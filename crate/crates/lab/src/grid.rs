//! Deterministic evaluation grids.

use anyhow::{bail, Result};
use num_complex::Complex64;
use rankone::numeric::kronecker;
use rankone::SpectrumModel;

use crate::config::RunConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    Eigenvalue,
    InSet,
    Outside,
}

/// Verification grid: exact eigenvalues, points of the set, then points at
/// least `grid_min_distance` away from it.
pub fn verification_grid(model: &SpectrumModel, config: &RunConfig) -> Result<Vec<(GridKind, Complex64)>> {
    let mut grid = Vec::with_capacity(config.grid_points);
    grid.extend(model.lambdas(config.grid_exact).into_iter().map(|z| (GridKind::Eigenvalue, z)));
    grid.extend(model.sample_points(config.grid_in_set).into_iter().map(|z| (GridKind::InSet, z)));
    let outside = config.grid_points - grid.len();
    grid.extend(
        outside_points(model, outside, config.grid_min_distance, config.grid_margin)?
            .into_iter()
            .map(|z| (GridKind::Outside, z)),
    );
    Ok(grid)
}

/// `count` Kronecker points of the grown bounding box at distance `>= min_distance`.
pub fn outside_points(model: &SpectrumModel, count: usize, min_distance: f64, margin: f64) -> Result<Vec<Complex64>> {
    let b = model.bounding_rect();
    let (x0, y0) = (b.x0 - margin, b.y0 - margin);
    let (w, h) = (b.width() + 2.0 * margin, b.height() + 2.0 * margin);
    let mut out = Vec::with_capacity(count);
    let mut i = 0u64;
    while out.len() < count {
        i += 1;
        if i > 1000 * (count as u64 + 1) {
            bail!("could not place {count} points at distance {min_distance} within margin {margin}");
        }
        let (a, c) = kronecker(i);
        let z = Complex64::new(x0 + a * w, y0 + c * h);
        if model.distance(z) >= min_distance {
            out.push(z);
        }
    }
    Ok(out)
}

/// Regular `res x res` lattice over the grown bounding box, keeping points
/// at distance `>= min_distance`.
pub fn heatmap_lattice(model: &SpectrumModel, res: usize, min_distance: f64, margin: f64) -> Vec<Complex64> {
    let b = model.bounding_rect();
    let step = |lo: f64, len: f64, k: usize| lo + len * k as f64 / (res.max(2) - 1) as f64;
    let mut out = Vec::with_capacity(res * res);
    for a in 0..res {
        for c in 0..res {
            let z = Complex64::new(
                step(b.x0 - margin, b.width() + 2.0 * margin, a),
                step(b.y0 - margin, b.height() + 2.0 * margin, c),
            );
            if model.distance(z) >= min_distance {
                out.push(z);
            }
        }
    }
    out
}
