//! Running a directory of configs.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use tikmann::rates::CertStatus;

use crate::config::ExperimentConfig;
use crate::experiment::{run_experiment, ExperimentError, EXIT_CONFIG, EXIT_PASS};
use crate::Overrides;

#[derive(Debug, thiserror::Error)]
pub enum SuiteError {
    #[error("cannot list {path}: {source}")]
    List {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("no *.json configs in {0}")]
    Empty(PathBuf),
    #[error("cannot write suite summary: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot write suite summary: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteRow {
    pub config: String,
    pub exit_code: u8,
    pub m: Option<u64>,
    pub checks_failed: usize,
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
    pub message: String,
}

impl SuiteRow {
    pub fn status(&self) -> &'static str {
        match self.exit_code {
            EXIT_PASS => "pass",
            EXIT_CONFIG => "error",
            _ => "fail",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub rows: Vec<SuiteRow>,
}

impl SuiteOutcome {
    /// The worst exit code over all configs.
    pub fn exit_code(&self) -> u8 {
        self.rows
            .iter()
            .map(|r| r.exit_code)
            .max()
            .unwrap_or(EXIT_PASS)
    }
}

pub fn config_files(dir: &Path) -> Result<Vec<PathBuf>, SuiteError> {
    let entries = fs::read_dir(dir).map_err(|source| SuiteError::List {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(SuiteError::Empty(dir.to_path_buf()));
    }
    Ok(files)
}

fn run_one(path: &Path, overrides: &Overrides, out: &Path) -> SuiteRow {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let result = ExperimentConfig::load(path)
        .map_err(ExperimentError::from)
        .and_then(|mut config| {
            overrides.apply(&mut config);
            config.output_dir = out.join(&stem);
            run_experiment(&config)
        });
    match result {
        Ok(o) => SuiteRow {
            config: stem,
            exit_code: o.exit_code(),
            m: Some(o.m),
            checks_failed: o.checks.iter().filter(|c| !c.passed).count(),
            pass: o.count(CertStatus::Pass),
            fail: o.count(CertStatus::Fail),
            inconclusive: o.count(CertStatus::Inconclusive),
            message: o
                .checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| c.name.as_str())
                .collect::<Vec<_>>()
                .join(" "),
        },
        Err(e) => SuiteRow {
            config: stem,
            exit_code: e.exit_code(),
            m: None,
            checks_failed: 0,
            pass: 0,
            fail: 0,
            inconclusive: 0,
            message: e.to_string(),
        },
    }
}

/// Runs every `*.json` config in `dir` in parallel. Each experiment writes into
/// `out/<config stem>/`; a summary goes to `out/suite_summary.csv`. A failing
/// config does not stop the others.
pub fn run_suite(
    dir: &Path,
    overrides: &Overrides,
    out: &Path,
) -> Result<SuiteOutcome, SuiteError> {
    let files = config_files(dir)?;
    let rows: Vec<SuiteRow> = files
        .par_iter()
        .map(|f| run_one(f, overrides, out))
        .collect();
    fs::create_dir_all(out)?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(out.join("suite_summary.csv"))?;
    w.write_record([
        "config",
        "status",
        "exit_code",
        "m",
        "checks_failed",
        "cert_pass",
        "cert_fail",
        "cert_inconclusive",
        "message",
    ])?;
    for r in &rows {
        w.write_record([
            r.config.clone(),
            r.status().to_string(),
            r.exit_code.to_string(),
            r.m.map(|m| m.to_string()).unwrap_or_default(),
            r.checks_failed.to_string(),
            r.pass.to_string(),
            r.fail.to_string(),
            r.inconclusive.to_string(),
            r.message.clone(),
        ])?;
    }
    w.flush()?;
    Ok(SuiteOutcome { rows })
}
