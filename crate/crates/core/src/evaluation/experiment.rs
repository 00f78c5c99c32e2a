//! Cross-validated training and reporting.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::metrics::{compute_metrics, ConfusionMatrix, MetricsError};
use super::problem::{Problem, Scheme};
use super::split::{patient_kfold, stratified_kfold, Fold, SplitError};
use crate::features::FeatureVector;
use crate::gbdt::{self, GbdtConfig, GbdtError};
use crate::SeizureClass;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    #[error("no rows belong to the {0} problem")]
    NoRows(Problem),
    #[error(transparent)]
    Split(#[from] SplitError),
    #[error(transparent)]
    Gbdt(#[from] GbdtError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub confusion: ConfusionMatrix,
    pub accuracy: f64,
    pub weighted_f1: f64,
    pub weighted_sensitivity: f64,
    pub weighted_specificity: f64,
    pub kappa: f64,
    pub per_class_f1: Vec<f64>,
}

/// Unweighted means over folds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanMetrics {
    pub accuracy: f64,
    pub weighted_f1: f64,
    pub weighted_sensitivity: f64,
    pub weighted_specificity: f64,
    pub kappa: f64,
    pub per_class_f1: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub problem: Problem,
    pub scheme: Scheme,
    pub seed: u64,
    /// Problem classes present in the data; the confusion matrix order.
    pub classes: Vec<SeizureClass>,
    pub n_rows: usize,
    pub folds: Vec<FoldReport>,
    pub mean: MeanMetrics,
}

/// Train and test on each fold of `scheme` with its default fold count.
pub fn run_experiment(
    rows: &[FeatureVector],
    problem: Problem,
    scheme: Scheme,
    cfg: &GbdtConfig,
    seed: u64,
) -> Result<EvaluationReport, ExperimentError> {
    run_experiment_k(rows, problem, scheme, scheme.default_folds(), cfg, seed)
}

pub fn run_experiment_k(
    rows: &[FeatureVector],
    problem: Problem,
    scheme: Scheme,
    k: usize,
    cfg: &GbdtConfig,
    seed: u64,
) -> Result<EvaluationReport, ExperimentError> {
    let wanted = problem.classes();
    let kept: Vec<&FeatureVector> = rows.iter().filter(|r| wanted.contains(&r.label)).collect();
    if kept.is_empty() {
        return Err(ExperimentError::NoRows(problem));
    }
    let classes: Vec<SeizureClass> = wanted.iter().copied().filter(|c| kept.iter().any(|r| r.label == *c)).collect();
    if classes.len() < 2 {
        return Err(GbdtError::SingleClassInput.into());
    }
    let y: Vec<usize> = kept.iter().map(|r| classes.iter().position(|c| *c == r.label).unwrap()).collect();

    let folds: Vec<Fold> = match scheme {
        Scheme::Seizure => stratified_kfold(&y, k, seed)?,
        Scheme::Patient => {
            let patients: Vec<String> = kept.iter().map(|r| r.patient_id.clone()).collect();
            patient_kfold(&y, &patients, k, seed)?
        }
    };

    let fold_reports = folds
        .par_iter()
        .enumerate()
        .map(|(i, fold)| {
            let train_x: Vec<&[f64]> = fold.train.iter().map(|&j| kept[j].values.as_slice()).collect();
            let train_y: Vec<usize> = fold.train.iter().map(|&j| y[j]).collect();
            let model = gbdt::fit(&train_x, &train_y, cfg)?;
            let mut cm = ConfusionMatrix::new(classes.len());
            for &j in &fold.test {
                cm.add(y[j], model.predict(&kept[j].values)?);
            }
            let m = compute_metrics(&cm)?;
            log::info!("fold {i}: weighted F1 {:.4}, kappa {:.4}", m.weighted_f1, m.kappa);
            Ok(FoldReport {
                fold: i,
                n_train: fold.train.len(),
                n_test: fold.test.len(),
                confusion: cm,
                accuracy: m.accuracy,
                weighted_f1: m.weighted_f1,
                weighted_sensitivity: m.weighted_sensitivity,
                weighted_specificity: m.weighted_specificity,
                kappa: m.kappa,
                per_class_f1: m.f1,
            })
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;

    let nf = fold_reports.len() as f64;
    let mean_of = |f: &dyn Fn(&FoldReport) -> f64| fold_reports.iter().map(f).sum::<f64>() / nf;
    let mean = MeanMetrics {
        accuracy: mean_of(&|r| r.accuracy),
        weighted_f1: mean_of(&|r| r.weighted_f1),
        weighted_sensitivity: mean_of(&|r| r.weighted_sensitivity),
        weighted_specificity: mean_of(&|r| r.weighted_specificity),
        kappa: mean_of(&|r| r.kappa),
        per_class_f1: (0..classes.len()).map(|c| mean_of(&|r| r.per_class_f1[c])).collect(),
    };
    Ok(EvaluationReport {
        problem,
        scheme,
        seed,
        classes,
        n_rows: kept.len(),
        folds: fold_reports,
        mean,
    })
}

/// Copy of `rows` with labels randomly reassigned among them.
pub fn permute_labels(rows: &[FeatureVector], seed: u64) -> Vec<FeatureVector> {
    let mut labels: Vec<SeizureClass> = rows.iter().map(|r| r.label).collect();
    labels.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    rows.iter()
        .zip(labels)
        .map(|(r, label)| FeatureVector { label, ..r.clone() })
        .collect()
}

impl EvaluationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises to JSON")
    }

    /// Aligned plain-text summary with every fold's confusion matrix.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{} problem, {}-wise {}-fold cross-validation, {} rows, seed {}",
            self.problem,
            self.scheme,
            self.folds.len(),
            self.n_rows,
            self.seed
        );
        let _ = writeln!(s);
        let _ = writeln!(s, "{:<8} {:>9} {:>11} {:>11} {:>9} {:>9}", "fold", "F1", "sensitivity", "specificity", "kappa", "accuracy");
        for f in &self.folds {
            let _ = writeln!(
                s,
                "{:<8} {:>9.4} {:>11.4} {:>11.4} {:>9.4} {:>9.4}",
                f.fold + 1,
                f.weighted_f1,
                f.weighted_sensitivity,
                f.weighted_specificity,
                f.kappa,
                f.accuracy
            );
        }
        let m = &self.mean;
        let _ = writeln!(
            s,
            "{:<8} {:>9.4} {:>11.4} {:>11.4} {:>9.4} {:>9.4}",
            "average", m.weighted_f1, m.weighted_sensitivity, m.weighted_specificity, m.kappa, m.accuracy
        );

        let _ = writeln!(s);
        let _ = write!(s, "{:<8}", "F1");
        for c in &self.classes {
            let _ = write!(s, " {:>6}", c.as_str());
        }
        let _ = writeln!(s);
        for f in &self.folds {
            let _ = write!(s, "{:<8}", f.fold + 1);
            for v in &f.per_class_f1 {
                let _ = write!(s, " {v:>6.3}");
            }
            let _ = writeln!(s);
        }

        for f in &self.folds {
            let _ = writeln!(s);
            let _ = writeln!(s, "fold {} confusion (rows actual, columns predicted)", f.fold + 1);
            let width = f.confusion.counts.iter().flatten().max().map_or(1, |m| m.to_string().len()).max(4);
            let _ = write!(s, "{:<6}", "");
            for c in &self.classes {
                let _ = write!(s, " {:>width$}", c.as_str());
            }
            let _ = writeln!(s);
            for (c, row) in self.classes.iter().zip(&f.confusion.counts) {
                let _ = write!(s, "{:<6}", c.as_str());
                for v in row {
                    let _ = write!(s, " {v:>width$}");
                }
                let _ = writeln!(s);
            }
        }
        s
    }

    /// One row per fold: `fold,<class>...` holding per-class F1.
    pub fn per_class_csv(&self) -> String {
        let mut s = String::from("fold");
        for c in &self.classes {
            s.push(',');
            s.push_str(c.as_str());
        }
        s.push('\n');
        for f in &self.folds {
            let _ = write!(s, "{}", f.fold + 1);
            for v in &f.per_class_f1 {
                let _ = write!(s, ",{v}");
            }
            s.push('\n');
        }
        s
    }
}
