//! Random hyperparameter search on a stratified holdout.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::booster::fit;
use super::{GbdtConfig, GbdtError};
use crate::evaluation::{compute_metrics, ConfusionMatrix};

/// Inclusive ranges sampled per trial. Set both ends equal to pin a value.
/// The learning rate is drawn log-uniformly, everything else uniformly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchSpace {
    pub num_rounds: (usize, usize),
    pub learning_rate: (f64, f64),
    pub max_leaves: (usize, usize),
    pub min_samples_leaf: (usize, usize),
    pub l2_lambda: (f64, f64),
    pub feature_fraction: (f64, f64),
}

impl Default for SearchSpace {
    fn default() -> Self {
        Self {
            num_rounds: (50, 500),
            learning_rate: (0.01, 0.3),
            max_leaves: (7, 63),
            min_samples_leaf: (5, 40),
            l2_lambda: (0.0, 10.0),
            feature_fraction: (0.5, 1.0),
        }
    }
}

impl SearchSpace {
    /// Only the learning rate varies; everything else comes from `base`.
    pub fn learning_rate_only(base: &GbdtConfig, lo: f64, hi: f64) -> Self {
        Self {
            num_rounds: (base.num_rounds, base.num_rounds),
            learning_rate: (lo, hi),
            max_leaves: (base.max_leaves, base.max_leaves),
            min_samples_leaf: (base.min_samples_leaf, base.min_samples_leaf),
            l2_lambda: (base.l2_lambda, base.l2_lambda),
            feature_fraction: (base.feature_fraction, base.feature_fraction),
        }
    }

    fn check(&self) -> Result<(), GbdtError> {
        let ordered = self.num_rounds.0 <= self.num_rounds.1
            && self.learning_rate.0 <= self.learning_rate.1
            && self.max_leaves.0 <= self.max_leaves.1
            && self.min_samples_leaf.0 <= self.min_samples_leaf.1
            && self.l2_lambda.0 <= self.l2_lambda.1
            && self.feature_fraction.0 <= self.feature_fraction.1;
        if !ordered {
            return Err(GbdtError::InvalidConfig("search range with lower bound above upper bound".into()));
        }
        if self.learning_rate.0.is_nan() || self.learning_rate.0 <= 0.0 {
            return Err(GbdtError::InvalidConfig("learning_rate range must be positive".into()));
        }
        Ok(())
    }

    fn sample(&self, base: &GbdtConfig, rng: &mut ChaCha8Rng) -> GbdtConfig {
        let (lo, hi) = self.learning_rate;
        GbdtConfig {
            num_rounds: rng.random_range(self.num_rounds.0..=self.num_rounds.1),
            learning_rate: rng.random_range(lo.ln()..=hi.ln()).exp().clamp(lo, hi),
            max_leaves: rng.random_range(self.max_leaves.0..=self.max_leaves.1),
            min_samples_leaf: rng.random_range(self.min_samples_leaf.0..=self.min_samples_leaf.1),
            l2_lambda: rng.random_range(self.l2_lambda.0..=self.l2_lambda.1),
            feature_fraction: rng.random_range(self.feature_fraction.0..=self.feature_fraction.1),
            ..base.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub config: GbdtConfig,
    pub validation_f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub best: GbdtConfig,
    pub best_f1: f64,
    pub trials: Vec<Trial>,
}

/// Per class, a seeded shuffle moves `round(fraction * n)` rows (at least one
/// when the class has two or more) into the validation set.
fn stratified_holdout(labels: &[usize], fraction: f64, rng: &mut ChaCha8Rng) -> (Vec<usize>, Vec<usize>) {
    let mut by_class: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        by_class.entry(l).or_default().push(i);
    }
    let (mut train, mut valid) = (Vec::new(), Vec::new());
    for idx in by_class.values_mut() {
        idx.shuffle(rng);
        let n = idx.len();
        let n_valid = if n < 2 { 0 } else { ((fraction * n as f64).round() as usize).clamp(1, n - 1) };
        valid.extend_from_slice(&idx[..n_valid]);
        train.extend_from_slice(&idx[n_valid..]);
    }
    train.sort_unstable();
    valid.sort_unstable();
    (train, valid)
}

/// Sample `budget` configurations around `base` and return the one with the
/// highest weighted F1 on a stratified validation split (earliest on ties).
pub fn random_search(
    rows: &[&[f64]],
    labels: &[usize],
    base: &GbdtConfig,
    space: &SearchSpace,
    budget: usize,
    validation_fraction: f64,
    seed: u64,
) -> Result<SearchResult, GbdtError> {
    if budget < 1 {
        return Err(GbdtError::InvalidConfig("search budget must be at least 1".into()));
    }
    if !(validation_fraction > 0.0 && validation_fraction < 1.0) {
        return Err(GbdtError::InvalidConfig("validation_fraction must lie in (0, 1)".into()));
    }
    space.check()?;
    if rows.len() != labels.len() {
        return Err(GbdtError::DimensionMismatch {
            expected: rows.len(),
            found: labels.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (train_idx, valid_idx) = stratified_holdout(labels, validation_fraction, &mut rng);
    let train_rows: Vec<&[f64]> = train_idx.iter().map(|&i| rows[i]).collect();
    let train_labels: Vec<usize> = train_idx.iter().map(|&i| labels[i]).collect();

    let mut trials: Vec<Trial> = Vec::with_capacity(budget);
    for _ in 0..budget {
        let cfg = space.sample(base, &mut rng);
        let model = fit(&train_rows, &train_labels, &cfg)?;
        let k = model.classes.len();
        let pos = |l: usize| model.classes.binary_search(&l).unwrap_or(k);
        // One extra row/column catches labels the model never saw.
        let mut cm = ConfusionMatrix::new(k + 1);
        for &i in &valid_idx {
            cm.add(pos(labels[i]), pos(model.predict(rows[i])?));
        }
        let f1 = compute_metrics(&cm).map(|m| m.weighted_f1).unwrap_or(0.0);
        log::debug!("search trial {}: weighted F1 {f1:.4}", trials.len());
        trials.push(Trial { config: cfg, validation_f1: f1 });
    }

    let mut best = 0;
    for (i, t) in trials.iter().enumerate() {
        if t.validation_f1 > trials[best].validation_f1 {
            best = i;
        }
    }
    Ok(SearchResult {
        best: trials[best].config.clone(),
        best_f1: trials[best].validation_f1,
        trials,
    })
}
