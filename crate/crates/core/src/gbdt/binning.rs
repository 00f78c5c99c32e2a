//! Quantile discretisation of feature columns.

use serde::{Deserialize, Serialize};

/// Per-feature cut points. A value `x` falls into bin `b`, the first with
/// `x <= cuts[b]`, or into the last bin when it exceeds every cut.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinMapper {
    pub cuts: Vec<Vec<f64>>,
}

impl BinMapper {
    /// Fit cuts on the columns of `rows`. When a feature has at most
    /// `max_bins` distinct values each value gets its own bin, with cuts at
    /// midpoints; otherwise cuts sit between quantiles of equal row count.
    pub fn fit(rows: &[&[f64]], max_bins: usize) -> Self {
        assert!((2..=256).contains(&max_bins));
        let n_features = rows.first().map_or(0, |r| r.len());
        let cuts = (0..n_features)
            .map(|f| {
                let mut col: Vec<f64> = rows.iter().map(|r| r[f]).collect();
                col.sort_by(f64::total_cmp);
                feature_cuts(&col, max_bins)
            })
            .collect();
        Self { cuts }
    }

    pub fn n_features(&self) -> usize {
        self.cuts.len()
    }

    pub fn n_bins(&self, feature: usize) -> usize {
        self.cuts[feature].len() + 1
    }

    pub fn bin(&self, feature: usize, x: f64) -> u8 {
        self.cuts[feature].partition_point(|&c| c < x) as u8
    }

    /// Column-major bin codes: `out[feature][row]`.
    pub fn transform(&self, rows: &[&[f64]]) -> Vec<Vec<u8>> {
        (0..self.n_features())
            .map(|f| rows.iter().map(|r| self.bin(f, r[f])).collect())
            .collect()
    }
}

fn midpoint(a: f64, b: f64) -> f64 {
    let m = a + (b - a) / 2.0;
    // Keep the cut strictly below `b` so `b` lands in the right-hand bin.
    if m < b {
        m
    } else {
        a
    }
}

fn feature_cuts(sorted: &[f64], max_bins: usize) -> Vec<f64> {
    let mut distinct: Vec<(f64, usize)> = Vec::new();
    for &v in sorted {
        match distinct.last_mut() {
            Some((last, count)) if *last == v => *count += 1,
            _ => distinct.push((v, 1)),
        }
    }
    if distinct.len() <= max_bins {
        return distinct.windows(2).map(|w| midpoint(w[0].0, w[1].0)).collect();
    }
    // Close a bin once it has reached its share of the remaining rows.
    let mut cuts = Vec::with_capacity(max_bins - 1);
    let mut seen = 0usize;
    let mut in_bin = 0usize;
    let total = sorted.len();
    for (i, &(v, c)) in distinct.iter().enumerate() {
        seen += c;
        in_bin += c;
        let bins_left = max_bins - cuts.len();
        let target = (total - (seen - in_bin)) as f64 / bins_left as f64;
        if i + 1 < distinct.len() && bins_left > 1 && in_bin as f64 >= target {
            cuts.push(midpoint(v, distinct[i + 1].0));
            in_bin = 0;
        }
    }
    cuts
}
