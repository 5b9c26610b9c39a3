//! Experiment harness for the `tikmann` library: JSON configs in, CSV
//! artifacts and a text report out.

pub mod config;
pub mod experiment;
pub mod suite;

use std::path::PathBuf;

pub use config::ExperimentConfig;
pub use experiment::{run_experiment, ExperimentError, ExperimentOutcome};
pub use suite::{run_suite, SuiteOutcome};

/// Command-line values that replace config fields.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub horizon: Option<u64>,
    pub k_max: Option<u64>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(&self, config: &mut ExperimentConfig) {
        if let Some(h) = self.horizon {
            config.horizon = h;
        }
        if let Some(k) = self.k_max {
            config.k_max = k;
        }
        if let Some(s) = self.seed {
            config.seed = s;
        }
        if let Some(out) = &self.output_dir {
            config.output_dir = out.clone();
        }
    }
}
