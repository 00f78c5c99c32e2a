//! Cross-validation and classification metrics.

mod experiment;
mod metrics;
mod problem;
mod split;

pub use experiment::{
    permute_labels, run_experiment, run_experiment_k, EvaluationReport, ExperimentError, FoldReport, MeanMetrics,
};
pub use metrics::{compute_metrics, ConfusionMatrix, Metrics, MetricsError};
pub use problem::{Problem, Scheme};
pub use split::{patient_kfold, stratified_kfold, Fold, SplitError};
