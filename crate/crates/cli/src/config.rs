//! Experiment configuration file.
//!
//! ```toml
//! [pipeline]
//! data_root = "corpus"
//! annotation_format = "auto"   # auto | tusz-csv | simple | tse
//! problem = "5class"           # 7class | 5class
//! scheme = "seizure"           # seizure | patient
//! dtcwt_levels = 4
//! segment_seconds = 2.0
//! target_rate = 250.0
//! seed = 0
//!
//! [gbdt]
//! num_rounds = 500
//! learning_rate = 0.05
//! ```
//!
//! Every key is optional. Command-line flags override file values.

use std::path::{Path, PathBuf};

use seizure_core::dtcwt::MAX_LEVELS;
use seizure_core::edf::AnnotationFormat;
use seizure_core::evaluation::{Problem, Scheme};
use seizure_core::gbdt::GbdtConfig;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum AnnotationChoice {
    #[default]
    Auto,
    TuszCsv,
    Simple,
    Tse,
}

impl AnnotationChoice {
    pub fn format(self) -> Option<AnnotationFormat> {
        match self {
            AnnotationChoice::Auto => None,
            AnnotationChoice::TuszCsv => Some(AnnotationFormat::TuszCsv),
            AnnotationChoice::Simple => Some(AnnotationFormat::Simple),
            AnnotationChoice::Tse => Some(AnnotationFormat::Tse),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub data_root: Option<PathBuf>,
    pub annotation_format: AnnotationChoice,
    pub problem: Problem,
    pub scheme: Scheme,
    pub dtcwt_levels: usize,
    pub segment_seconds: f64,
    pub target_rate: f64,
    /// Fold count; the scheme's default (5 or 3) when absent.
    pub folds: Option<usize>,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            data_root: None,
            annotation_format: AnnotationChoice::Auto,
            problem: Problem::SevenClass,
            scheme: Scheme::Seizure,
            dtcwt_levels: 4,
            segment_seconds: 2.0,
            target_rate: 250.0,
            folds: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub pipeline: PipelineConfig,
    pub gbdt: GbdtConfig,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        let cfg: Config = toml::from_str(&text).map_err(|e| CliError::Config {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        cfg.validate().map_err(|message| CliError::Config {
            path: path.to_path_buf(),
            message,
        })?;
        Ok(cfg)
    }

    /// Samples per segment at the target rate.
    pub fn window(&self) -> usize {
        (self.pipeline.segment_seconds * self.pipeline.target_rate).round() as usize
    }

    pub fn folds(&self) -> usize {
        self.pipeline.folds.unwrap_or(self.pipeline.scheme.default_folds())
    }

    pub fn validate(&self) -> Result<(), String> {
        let p = &self.pipeline;
        if !(1..=MAX_LEVELS).contains(&p.dtcwt_levels) {
            return Err(format!("dtcwt_levels must lie in [1, {MAX_LEVELS}]"));
        }
        if !(p.target_rate > 0.0 && p.segment_seconds > 0.0) {
            return Err("target_rate and segment_seconds must be positive".into());
        }
        let samples = p.segment_seconds * p.target_rate;
        if (samples - samples.round()).abs() > 1e-9 || (samples.round() as usize) < 1 << p.dtcwt_levels {
            return Err(format!(
                "segment_seconds x target_rate = {samples} must be an integer of at least 2^{} samples",
                p.dtcwt_levels
            ));
        }
        if p.folds.is_some_and(|k| k < 2) {
            return Err("folds must be at least 2".into());
        }
        self.gbdt.validate().map_err(|e| e.to_string())
    }
}
