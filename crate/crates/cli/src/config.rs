//! Experiment configuration files.
//!
//! A config is a single JSON document, for example
//!
//! ```json
//! {
//!   "space": { "type": "euclidean", "dim": 2 },
//!   "family": { "type": "box_projection", "lo": [-1, -1], "hi": [1, 1] },
//!   "schedule": { "type": "harmonic", "lambda": 0.5 },
//!   "u": [2, -1], "x0": [-1.5, 0.5], "p": [1, -1],
//!   "horizon": 20000, "k_max": 3
//! }
//! ```
//!
//! Star-tree points are written `{ "ray": 1, "t": 2.0 }`.

use std::path::{Path, PathBuf};

use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: field `{field}`: {message}")]
    Parse {
        path: PathBuf,
        field: String,
        message: String,
    },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceSpec {
    Euclidean {
        dim: usize,
        /// Sampling box for the property checks.
        #[serde(default = "default_lo")]
        lo: f64,
        #[serde(default = "default_hi")]
        hi: f64,
    },
    StarTree {
        rays: usize,
        #[serde(default = "default_radius")]
        radius: f64,
    },
    /// `ℝⁿ` with a deliberately wrong convex combination; for testing the
    /// axiom checks.
    BrokenSquareLine {
        #[serde(default = "default_dim")]
        dim: usize,
    },
}

fn default_lo() -> f64 {
    -1.0
}
fn default_hi() -> f64 {
    1.0
}
fn default_radius() -> f64 {
    5.0
}
fn default_dim() -> usize {
    1
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MonotoneSpec {
    Zero,
    L1 { rho: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    LinearPsd { q: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum CocoerciveSpec {
    Zero,
    /// `x ↦ D(Dx - b)` for `D = diag(diag)`.
    Quadratic {
        diag: Vec<f64>,
        b: Vec<f64>,
    },
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    Identity,
    BoxProjection { lo: Vec<f64>, hi: Vec<f64> },
    TreeContraction { c: f64 },
    ResolventL1 { rho: f64 },
    ResolventQuadratic { q: Vec<Vec<f64>> },
    ForwardBackward { a: MonotoneSpec, b: CocoerciveSpec },
}

impl FamilySpec {
    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::Identity => "identity",
            FamilySpec::BoxProjection { .. } => "box_projection",
            FamilySpec::TreeContraction { .. } => "tree_contraction",
            FamilySpec::ResolventL1 { .. } => "resolvent_l1",
            FamilySpec::ResolventQuadratic { .. } => "resolvent_quadratic",
            FamilySpec::ForwardBackward { .. } => "forward_backward",
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "snake_case")]
pub enum Psi0Spec {
    /// The schedule's own choice.
    #[default]
    Default,
    ChiShift,
    Minimal,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScheduleSpec {
    /// `β_n = 1 - 1/(n+1)`, `γ_n = 1 + 1/(n+1)`, constant `λ`.
    Harmonic {
        lambda: f64,
        #[serde(default)]
        psi0: Psi0Spec,
    },
    /// `β_n = 1 - 2/(n+2)`, `γ_n = (n+3)/(n+2)`, constant `λ`.
    Linear {
        lambda: f64,
        #[serde(default)]
        psi0: Psi0Spec,
    },
    /// Explicit finite tables without declared moduli.
    Table {
        beta: Vec<f64>,
        lambda: Vec<f64>,
        #[serde(default)]
        gamma: Option<Vec<f64>>,
    },
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum PointSpec {
    Coords(Vec<f64>),
    Star { ray: usize, t: f64 },
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub space: SpaceSpec,
    pub family: FamilySpec,
    pub schedule: ScheduleSpec,
    pub u: PointSpec,
    pub x0: PointSpec,
    /// Common fixed point of the family.
    pub p: PointSpec,
    /// Replaces the computed bound `M`; must not be smaller than it.
    #[serde(default)]
    pub m_override: Option<u64>,
    pub horizon: u64,
    pub k_max: u64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Relative to the config file.
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    /// Samples for the axiom, nonexpansiveness and family-coherence checks.
    #[serde(default = "default_samples")]
    pub check_samples: usize,
    /// Add the coordinates of `x_n` to trace.csv.
    #[serde(default)]
    pub trace_points: bool,
}

fn default_tolerance() -> f64 {
    1e-9
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_samples() -> usize {
    2000
}

impl ExperimentConfig {
    pub fn parse(text: &str, path: &Path) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let field = e.path().to_string();
            ConfigError::Parse {
                path: path.to_path_buf(),
                field,
                message: e.into_inner().to_string(),
            }
        })?;
        config.validate()?;
        Ok(config)
    }

    /// Reads a config and resolves `output_dir` against the file's directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let mut config = Self::parse(&text, path)?;
        if config.output_dir.is_relative() {
            let base = path.parent().unwrap_or(Path::new("."));
            config.output_dir = base.join(&config.output_dir);
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.horizon == 0 {
            return Err(ConfigError::Invalid("horizon must be at least 1".into()));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(ConfigError::Invalid(format!(
                "tolerance {} must be positive",
                self.tolerance
            )));
        }
        if self.check_samples == 0 {
            return Err(ConfigError::Invalid(
                "check_samples must be at least 1".into(),
            ));
        }
        Ok(())
    }
}
