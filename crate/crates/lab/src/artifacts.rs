//! On-disk formats. JSON artifacts are wrapped in a versioned envelope;
//! CSV floats use 17 significant digits.

use std::fmt;
use std::path::Path;

use anyhow::Context;

use num_complex::Complex64;
use rankone::nonvanishing::CoefficientTable;
use rankone::perturbation::PerturbationBundle;
use rankone::selection::SelectionPlan;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

pub const BUNDLE_FILE: &str = "bundle.json";
pub const PLAN_FILE: &str = "plan.json";
pub const COEFFS_FILE: &str = "coeffs.json";
pub const VERIFY_FILE: &str = "verify.json";
pub const VERDICTS_FILE: &str = "verdicts.jsonl";
pub const HEATMAP_FILE: &str = "heatmap.csv";
pub const EIGS_FILE: &str = "eigs.csv";
pub const GROWTH_FILE: &str = "growth.csv";

/// Column layout of every CSV output.
pub const HEATMAP_COLUMNS: [&str; 5] = ["z_re", "z_im", "abs_fN", "tail_bound", "margin"];
pub const EIGS_COLUMNS: [&str; 4] = ["n", "re", "im", "nearest_mu_distance"];
pub const GROWTH_COLUMNS: [&str; 5] = ["z_re", "z_im", "stage", "partial_sum", "lower_bound"];

#[derive(Debug)]
pub struct SchemaMismatch {
    pub file: String,
    pub detail: String,
}

impl fmt::Display for SchemaMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "schema mismatch in {}: {}", self.file, self.detail)
    }
}

impl std::error::Error for SchemaMismatch {}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Envelope<T> {
    schema_version: u32,
    kind: String,
    data: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub generator: String,
    pub model: String,
    pub stages: u32,
    pub horizon: usize,
    pub delta: f64,
    pub eps_schedule: rankone::nonvanishing::EpsSchedule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleArtifact {
    pub provenance: Provenance,
    pub bundle: PerturbationBundle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoeffsArtifact {
    pub mus: Vec<Complex64>,
    pub mu_offsets: Vec<Complex64>,
    pub eps: Vec<f64>,
    pub gammas: Vec<f64>,
    pub gamma_tail: f64,
    pub c: Vec<Complex64>,
}

impl From<&CoefficientTable> for CoeffsArtifact {
    fn from(t: &CoefficientTable) -> Self {
        Self {
            mus: t.mus.clone(),
            mu_offsets: t.mu_offsets.clone(),
            eps: t.eps.clone(),
            gammas: t.gammas.clone(),
            gamma_tail: t.gamma_tail,
            c: t.c.clone(),
        }
    }
}

pub trait Artifact: Serialize + DeserializeOwned {
    const KIND: &'static str;
}

impl Artifact for BundleArtifact {
    const KIND: &'static str = "bundle";
}

impl Artifact for SelectionPlan {
    const KIND: &'static str = "plan";
}

impl Artifact for CoeffsArtifact {
    const KIND: &'static str = "coefficients";
}

pub fn to_json<T: Artifact>(value: &T) -> String {
    let env = Envelope {
        schema_version: SCHEMA_VERSION,
        kind: T::KIND.to_string(),
        data: value,
    };
    let mut s = serde_json::to_string(&env).expect("artifacts serialize");
    s.push('\n');
    s
}

pub fn from_json<T: Artifact>(text: &str, file: &str) -> Result<T, SchemaMismatch> {
    let mismatch = |detail: String| SchemaMismatch {
        file: file.to_string(),
        detail,
    };
    let head: serde_json::Value = serde_json::from_str(text).map_err(|e| mismatch(e.to_string()))?;
    let version = head.get("schema_version").and_then(|v| v.as_u64());
    if version != Some(SCHEMA_VERSION as u64) {
        return Err(mismatch(format!("expected schema_version {SCHEMA_VERSION}, found {version:?}")));
    }
    let kind = head.get("kind").and_then(|v| v.as_str());
    if kind != Some(T::KIND) {
        return Err(mismatch(format!("expected kind {:?}, found {kind:?}", T::KIND)));
    }
    let env: Envelope<T> = serde_json::from_value(head).map_err(|e| mismatch(e.to_string()))?;
    Ok(env.data)
}

pub fn write<T: Artifact>(dir: &Path, file: &str, value: &T) -> std::io::Result<()> {
    std::fs::write(dir.join(file), to_json(value))
}

pub fn read<T: Artifact>(dir: &Path, file: &str) -> anyhow::Result<T> {
    let path = dir.join(file);
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    Ok(from_json(&text, &path.display().to_string())?)
}

pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}
