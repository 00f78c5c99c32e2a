//! Confusion matrices and support-weighted classification scores.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("confusion matrix is empty")]
    EmptyMatrix,
}

/// `counts[actual][predicted]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn new(k: usize) -> Self {
        Self { counts: vec![vec![0; k]; k] }
    }

    pub fn from_counts(counts: Vec<Vec<u64>>) -> Self {
        assert!(counts.iter().all(|r| r.len() == counts.len()), "confusion matrix must be square");
        Self { counts }
    }

    pub fn from_predictions(k: usize, actual: &[usize], predicted: &[usize]) -> Self {
        assert_eq!(actual.len(), predicted.len());
        let mut m = Self::new(k);
        for (&a, &p) in actual.iter().zip(predicted) {
            m.add(a, p);
        }
        m
    }

    pub fn add(&mut self, actual: usize, predicted: usize) {
        self.counts[actual][predicted] += 1;
    }

    pub fn k(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<u64> {
        (0..self.k()).map(|j| self.counts.iter().map(|r| r[j]).sum()).collect()
    }

    pub fn trace(&self) -> u64 {
        (0..self.k()).map(|i| self.counts[i][i]).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub support: Vec<u64>,
    pub precision: Vec<f64>,
    pub recall: Vec<f64>,
    pub f1: Vec<f64>,
    pub specificity: Vec<f64>,
    pub accuracy: f64,
    pub weighted_f1: f64,
    pub weighted_sensitivity: f64,
    pub weighted_specificity: f64,
    pub kappa: f64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Per-class and weighted scores. Empty denominators give 0.
pub fn compute_metrics(cm: &ConfusionMatrix) -> Result<Metrics, MetricsError> {
    let n = cm.total();
    if n == 0 {
        return Err(MetricsError::EmptyMatrix);
    }
    let rows = cm.row_sums();
    let cols = cm.col_sums();
    let k = cm.k();
    let mut m = Metrics {
        support: rows.clone(),
        precision: Vec::with_capacity(k),
        recall: Vec::with_capacity(k),
        f1: Vec::with_capacity(k),
        specificity: Vec::with_capacity(k),
        accuracy: ratio(cm.trace(), n),
        weighted_f1: 0.0,
        weighted_sensitivity: 0.0,
        weighted_specificity: 0.0,
        kappa: 0.0,
    };
    for c in 0..k {
        let tp = cm.counts[c][c];
        let p = ratio(tp, cols[c]);
        let r = ratio(tp, rows[c]);
        let f1 = if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 };
        let fp = cols[c] - tp;
        let tn = n - rows[c] - fp;
        let spec = ratio(tn, tn + fp);
        let w = ratio(rows[c], n);
        m.weighted_f1 += w * f1;
        m.weighted_sensitivity += w * r;
        m.weighted_specificity += w * spec;
        m.precision.push(p);
        m.recall.push(r);
        m.f1.push(f1);
        m.specificity.push(spec);
    }
    m.kappa = kappa(n, cm.trace(), &rows, &cols);
    Ok(m)
}

/// `(p_o - p_e) / (1 - p_e)` evaluated on integers scaled by `n^2`, so exact
/// ratios such as 0.7 come out correctly rounded.
fn kappa(n: u64, trace: u64, rows: &[u64], cols: &[u64]) -> f64 {
    let n = n as u128;
    let chance: u128 = rows.iter().zip(cols).map(|(&r, &c)| r as u128 * c as u128).sum();
    let observed = n * trace as u128;
    let den = n * n - chance;
    if den == 0 {
        // p_e = 1: every row and prediction sits in one class.
        return if observed == n * n { 1.0 } else { 0.0 };
    }
    let num = observed as i128 - chance as i128;
    num as f64 / den as f64
}
