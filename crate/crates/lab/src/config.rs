use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rankone::nonvanishing::EpsSchedule;
use rankone::SpectrumModel;
use serde::{Deserialize, Serialize};

/// Run configuration; the config file is a flat TOML document with these keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: String,
    pub cantor_ratio: Option<f64>,
    /// Last construction stage (stages run from 0).
    pub stages: u32,
    pub horizon: usize,
    pub delta: f64,
    pub eps_schedule: EpsSchedule,
    /// Total verification grid size.
    pub grid_points: usize,
    /// Grid points placed exactly on eigenvalues.
    pub grid_exact: usize,
    /// Grid points sampled from the set.
    pub grid_in_set: usize,
    /// Minimum distance from the set for the remaining grid points.
    pub grid_min_distance: f64,
    /// Outside points are drawn from the set's bounding box grown by this margin.
    pub grid_margin: f64,
    pub heatmap_resolution: usize,
    pub growth_points: usize,
    pub truncations: Vec<usize>,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: "segment".into(),
            cantor_ratio: None,
            stages: 12,
            horizon: 4096,
            delta: 1e-3,
            eps_schedule: EpsSchedule::InverseSquare,
            grid_points: 10_000,
            grid_exact: 100,
            grid_in_set: 1000,
            grid_min_distance: 0.1,
            grid_margin: 1.0,
            heatmap_resolution: 100,
            growth_points: 20,
            truncations: vec![16, 32, 64],
            out: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn spectrum(&self) -> Result<SpectrumModel> {
        Ok(SpectrumModel::from_id(&self.model, self.cantor_ratio)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.spectrum()?;
        if self.horizon < 2 {
            bail!("horizon must be at least 2, got {}", self.horizon);
        }
        if let Some(&max) = self.truncations.iter().max() {
            if max > self.horizon {
                bail!("truncation {max} exceeds horizon {}", self.horizon);
            }
        }
        if self.truncations.contains(&0) {
            bail!("truncations must be positive");
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            bail!("delta must be positive, got {}", self.delta);
        }
        if !(self.grid_min_distance > 0.0 && self.grid_min_distance.is_finite()) {
            bail!("grid_min_distance must be positive, got {}", self.grid_min_distance);
        }
        if self.grid_margin.is_nan() || self.grid_margin <= self.grid_min_distance {
            bail!("grid_margin must exceed grid_min_distance");
        }
        if self.grid_exact + self.grid_in_set > self.grid_points {
            bail!("grid_exact + grid_in_set exceeds grid_points");
        }
        if self.grid_exact > self.horizon {
            bail!("grid_exact exceeds horizon");
        }
        Ok(())
    }
}
