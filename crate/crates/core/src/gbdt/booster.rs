//! Softmax boosting and the trained model.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::binning::BinMapper;
use super::tree::{grow_tree, BinnedColumns, Tree};
use super::{GbdtConfig, GbdtError};

const MIN_HESSIAN: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImportanceKind {
    /// Number of splits using the feature.
    Split,
    /// Summed gain of those splits.
    Gain,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub config: GbdtConfig,
    /// Sorted class labels; position `k` is output column `k`.
    pub classes: Vec<usize>,
    pub n_features: usize,
    /// Log prior of each class.
    pub init_scores: Vec<f64>,
    pub bin_edges: Vec<Vec<f64>>,
    /// `trees[round][class]`.
    pub trees: Vec<Vec<Tree>>,
    /// Mean training cross-entropy; entry `i` is the loss after `i` rounds.
    pub train_loss: Vec<f64>,
}

impl TrainedModel {
    pub fn n_rounds(&self) -> usize {
        self.trees.len()
    }

    /// The same model truncated to its first `rounds` rounds.
    pub fn with_rounds(&self, rounds: usize) -> Self {
        let mut m = self.clone();
        m.trees.truncate(rounds);
        m.train_loss.truncate(m.trees.len() + 1);
        m
    }

    /// Raw per-class scores before the softmax.
    pub fn decision_function(&self, x: &[f64]) -> Result<Vec<f64>, GbdtError> {
        if x.len() != self.n_features {
            return Err(GbdtError::DimensionMismatch {
                expected: self.n_features,
                found: x.len(),
            });
        }
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(GbdtError::InvalidInput(format!("feature {i} is not finite")));
        }
        let mut scores = self.init_scores.clone();
        for round in &self.trees {
            for (s, t) in scores.iter_mut().zip(round) {
                *s += t.predict(x);
            }
        }
        Ok(scores)
    }

    /// Posterior per class, in `classes` order.
    pub fn predict_proba(&self, x: &[f64]) -> Result<Vec<f64>, GbdtError> {
        let mut p = self.decision_function(x)?;
        softmax_in_place(&mut p);
        Ok(p)
    }

    /// Most probable class label; ties go to the smaller label.
    pub fn predict(&self, x: &[f64]) -> Result<usize, GbdtError> {
        let p = self.predict_proba(x)?;
        Ok(self.classes[argmax(&p)])
    }

    pub fn feature_importance(&self, kind: ImportanceKind) -> Vec<f64> {
        let mut out = vec![0.0; self.n_features];
        for t in self.trees.iter().flatten() {
            for (f, gain) in t.splits() {
                out[f] += match kind {
                    ImportanceKind::Split => 1.0,
                    ImportanceKind::Gain => gain,
                };
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serialises to JSON")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

pub(crate) fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

fn softmax_in_place(s: &mut [f64]) {
    let m = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in s.iter_mut() {
        *v = (*v - m).exp();
        sum += *v;
    }
    for v in s.iter_mut() {
        *v /= sum;
    }
}

/// Mean of `logsumexp(s) - s[y]` over rows of a flat `n x k` score matrix.
fn cross_entropy(scores: &[f64], y: &[usize], k: usize) -> f64 {
    let total: f64 = scores
        .chunks_exact(k)
        .zip(y)
        .map(|(s, &c)| {
            let m = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lse = m + s.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
            lse - s[c]
        })
        .sum();
    total / y.len() as f64
}

/// Check shape and contents; returns the column count.
fn check_matrix(rows: &[&[f64]], labels: &[usize]) -> Result<usize, GbdtError> {
    if rows.len() != labels.len() {
        return Err(GbdtError::DimensionMismatch {
            expected: rows.len(),
            found: labels.len(),
        });
    }
    let n_features = rows.first().map_or(0, |r| r.len());
    if rows.is_empty() || n_features == 0 {
        return Err(GbdtError::EmptyFeatureMatrix);
    }
    for (i, r) in rows.iter().enumerate() {
        if r.len() != n_features {
            return Err(GbdtError::DimensionMismatch {
                expected: n_features,
                found: r.len(),
            });
        }
        if r.iter().any(|v| !v.is_finite()) {
            return Err(GbdtError::InvalidInput(format!("row {i} has a non-finite value")));
        }
    }
    Ok(n_features)
}

/// Train on `rows` with integer class `labels`.
///
/// `early_stopping_rounds` is ignored here since there is no validation set;
/// see [`fit_with_validation`].
pub fn fit(rows: &[&[f64]], labels: &[usize], cfg: &GbdtConfig) -> Result<TrainedModel, GbdtError> {
    train(rows, labels, cfg, None)
}

/// Train with a held-out set used for early stopping. When stopping triggers,
/// the model keeps the rounds up to the best validation loss.
pub fn fit_with_validation(
    rows: &[&[f64]],
    labels: &[usize],
    cfg: &GbdtConfig,
    valid_rows: &[&[f64]],
    valid_labels: &[usize],
) -> Result<TrainedModel, GbdtError> {
    train(rows, labels, cfg, Some((valid_rows, valid_labels)))
}

fn train(
    rows: &[&[f64]],
    labels: &[usize],
    cfg: &GbdtConfig,
    valid: Option<(&[&[f64]], &[usize])>,
) -> Result<TrainedModel, GbdtError> {
    cfg.validate()?;
    let n_features = check_matrix(rows, labels)?;
    let mut classes: Vec<usize> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(GbdtError::SingleClassInput);
    }
    let n = rows.len();
    if n < 2 * cfg.min_samples_leaf {
        return Err(GbdtError::TooFewRows {
            rows: n,
            min_samples_leaf: cfg.min_samples_leaf,
        });
    }
    let k = classes.len();
    let y: Vec<usize> = labels.iter().map(|l| classes.binary_search(l).unwrap()).collect();

    let valid = match valid {
        Some((vr, vl)) if !vr.is_empty() => {
            if check_matrix(vr, vl)? != n_features {
                return Err(GbdtError::DimensionMismatch {
                    expected: n_features,
                    found: vr[0].len(),
                });
            }
            let vy = vl
                .iter()
                .map(|l| {
                    classes
                        .binary_search(l)
                        .map_err(|_| GbdtError::InvalidInput(format!("validation label {l} absent from training data")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            Some((vr, vy))
        }
        _ => None,
    };

    let mapper = BinMapper::fit(rows, cfg.max_bins);
    let bins = mapper.transform(rows);
    let data = BinnedColumns {
        bins: &bins,
        cuts: &mapper.cuts,
    };

    let mut counts = vec![0usize; k];
    for &c in &y {
        counts[c] += 1;
    }
    let init_scores: Vec<f64> = counts.iter().map(|&c| (c as f64 / n as f64).ln()).collect();
    let mut scores: Vec<f64> = (0..n).flat_map(|_| init_scores.iter().copied()).collect();
    let mut train_loss = vec![cross_entropy(&scores, &y, k)];

    let mut valid_scores: Vec<f64> = valid
        .as_ref()
        .map(|(vr, _)| (0..vr.len()).flat_map(|_| init_scores.iter().copied()).collect())
        .unwrap_or_default();
    let mut best_valid = (f64::INFINITY, 0usize);

    let n_sampled = ((cfg.feature_fraction * n_features as f64).round() as usize).clamp(1, n_features);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let params = cfg.grow_params();
    let all_rows: Vec<u32> = (0..n as u32).collect();
    let mut trees: Vec<Vec<Tree>> = Vec::with_capacity(cfg.num_rounds);
    let mut grad = vec![0.0; n];
    let mut hess = vec![0.0; n];

    for round in 0..cfg.num_rounds {
        let mut prob = scores.clone();
        for row in prob.chunks_exact_mut(k) {
            softmax_in_place(row);
        }
        let mut round_trees = Vec::with_capacity(k);
        let mut deltas = Vec::with_capacity(k);
        for class in 0..k {
            for i in 0..n {
                let p = prob[i * k + class];
                grad[i] = p - if y[i] == class { 1.0 } else { 0.0 };
                hess[i] = (p * (1.0 - p)).max(MIN_HESSIAN);
            }
            let features: Vec<usize> = if n_sampled == n_features {
                (0..n_features).collect()
            } else {
                let mut f = rand::seq::index::sample(&mut rng, n_features, n_sampled).into_vec();
                f.sort_unstable();
                f
            };
            let (tree, fitted) = grow_tree(&data, &grad, &hess, all_rows.clone(), &features, &params);
            round_trees.push(tree);
            deltas.push(fitted);
        }
        for (class, fitted) in deltas.iter().enumerate() {
            for i in 0..n {
                scores[i * k + class] += fitted[i];
            }
        }
        train_loss.push(cross_entropy(&scores, &y, k));

        if let Some((vr, vy)) = &valid {
            for (i, x) in vr.iter().enumerate() {
                for (class, t) in round_trees.iter().enumerate() {
                    valid_scores[i * k + class] += t.predict(x);
                }
            }
            trees.push(round_trees);
            let loss = cross_entropy(&valid_scores, vy, k);
            if loss < best_valid.0 {
                best_valid = (loss, round + 1);
            } else if let Some(patience) = cfg.early_stopping_rounds {
                if round + 1 - best_valid.1 >= patience {
                    log::debug!("early stop at round {}; best round {}", round + 1, best_valid.1);
                    trees.truncate(best_valid.1);
                    train_loss.truncate(best_valid.1 + 1);
                    break;
                }
            }
        } else {
            trees.push(round_trees);
        }
    }

    Ok(TrainedModel {
        config: cfg.clone(),
        classes,
        n_features,
        init_scores,
        bin_edges: mapper.cuts,
        trees,
        train_loss,
    })
}
