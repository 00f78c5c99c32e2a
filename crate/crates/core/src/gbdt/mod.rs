//! Multiclass gradient-boosted decision trees.
//!
//! Features are discretised once into quantile bins; every boosting round
//! fits one regression tree per class to the softmax cross-entropy gradients.
//! Trees grow leaf-wise from per-node gradient histograms.

mod binning;
mod booster;
mod search;
mod serialize;
mod tree;

pub use binning::BinMapper;
pub use booster::{fit, fit_with_validation, ImportanceKind, TrainedModel};
pub use search::{random_search, SearchResult, SearchSpace, Trial};
pub use serialize::{decode_model, encode_model, MAGIC, VERSION};
pub use tree::{best_split, grow_tree, BinnedColumns, GrowParams, Node, SplitCandidate, Tree};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GbdtError {
    #[error("training labels contain a single class")]
    SingleClassInput,
    #[error("feature matrix has no rows or no columns")]
    EmptyFeatureMatrix,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{rows} rows cannot satisfy min_samples_leaf = {min_samples_leaf} on both sides of a split")]
    TooFewRows { rows: usize, min_samples_leaf: usize },
    #[error("expected {expected} values, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GbdtConfig {
    pub num_rounds: usize,
    pub learning_rate: f64,
    pub max_leaves: usize,
    pub min_samples_leaf: usize,
    pub l2_lambda: f64,
    pub max_bins: usize,
    /// Fraction of features offered to each tree.
    pub feature_fraction: f64,
    pub seed: u64,
    /// Stop after this many rounds without validation-loss improvement.
    /// Only used when a validation set is supplied.
    pub early_stopping_rounds: Option<usize>,
}

impl Default for GbdtConfig {
    fn default() -> Self {
        Self {
            num_rounds: 500,
            learning_rate: 0.05,
            max_leaves: 31,
            min_samples_leaf: 20,
            l2_lambda: 1.0,
            max_bins: 255,
            feature_fraction: 0.9,
            seed: 0,
            early_stopping_rounds: None,
        }
    }
}

impl GbdtConfig {
    pub fn validate(&self) -> Result<(), GbdtError> {
        let bad = |m: &str| Err(GbdtError::InvalidConfig(m.to_string()));
        if self.num_rounds < 1 {
            return bad("num_rounds must be at least 1");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if self.max_leaves < 2 {
            return bad("max_leaves must be at least 2");
        }
        if self.min_samples_leaf < 1 {
            return bad("min_samples_leaf must be at least 1");
        }
        if !(self.l2_lambda >= 0.0 && self.l2_lambda.is_finite()) {
            return bad("l2_lambda must be non-negative");
        }
        if !(2..=255).contains(&self.max_bins) {
            return bad("max_bins must lie in [2, 255]");
        }
        if !(self.feature_fraction > 0.0 && self.feature_fraction <= 1.0) {
            return bad("feature_fraction must lie in (0, 1]");
        }
        if self.early_stopping_rounds == Some(0) {
            return bad("early_stopping_rounds must be at least 1");
        }
        Ok(())
    }

    pub(crate) fn grow_params(&self) -> GrowParams {
        GrowParams {
            max_leaves: self.max_leaves,
            min_samples_leaf: self.min_samples_leaf,
            l2_lambda: self.l2_lambda,
            learning_rate: self.learning_rate,
        }
    }
}
