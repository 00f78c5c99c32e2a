use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnovaError {
    #[error("ANOVA needs at least 2 classes, found {0}")]
    InsufficientClasses(usize),
    #[error("class {class} has {count} sample(s); ANOVA needs at least 2 per class")]
    ClassTooSmall { class: String, count: usize },
    #[error("row {row} has {found} values, expected {expected}")]
    RaggedRows { row: usize, expected: usize, found: usize },
}

/// One-way ANOVA F-statistic for every column of `rows` grouped by `labels`.
///
/// A column with no between-group variation scores 0; one with between-group
/// but no within-group variation scores `+inf`.
pub fn anova_f_values<L: Ord + Clone + std::fmt::Debug>(
    rows: &[&[f64]],
    labels: &[L],
) -> Result<Vec<f64>, AnovaError> {
    assert_eq!(rows.len(), labels.len(), "one label per row");
    let mut groups: BTreeMap<L, Vec<usize>> = BTreeMap::new();
    for (i, l) in labels.iter().enumerate() {
        groups.entry(l.clone()).or_default().push(i);
    }
    if groups.len() < 2 {
        return Err(AnovaError::InsufficientClasses(groups.len()));
    }
    if let Some((class, idx)) = groups.iter().find(|(_, idx)| idx.len() < 2) {
        return Err(AnovaError::ClassTooSmall {
            class: format!("{class:?}"),
            count: idx.len(),
        });
    }
    let cols = rows[0].len();
    if let Some((row, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
        return Err(AnovaError::RaggedRows { row, expected: cols, found: r.len() });
    }

    let n = rows.len() as f64;
    let k = groups.len() as f64;
    let f = (0..cols)
        .map(|j| {
            let means: Vec<(f64, f64)> = groups
                .values()
                .map(|idx| {
                    let m = idx.iter().map(|&i| rows[i][j]).sum::<f64>() / idx.len() as f64;
                    (idx.len() as f64, m)
                })
                .collect();
            if means.iter().all(|&(_, m)| m == means[0].1) {
                return 0.0;
            }
            let grand = means.iter().map(|(c, m)| c * m).sum::<f64>() / n;
            let ssb: f64 = means.iter().map(|(c, m)| c * (m - grand) * (m - grand)).sum();
            let ssw: f64 = groups
                .values()
                .zip(&means)
                .map(|(idx, &(_, m))| idx.iter().map(|&i| (rows[i][j] - m).powi(2)).sum::<f64>())
                .sum();
            if ssw == 0.0 {
                f64::INFINITY
            } else {
                (ssb / (k - 1.0)) / (ssw / (n - k))
            }
        })
        .collect();
    Ok(f)
}

/// Mean over channels of a channel-major vector with `per_channel` entries
/// per channel.
pub fn channel_average(values: &[f64], per_channel: usize) -> Vec<f64> {
    assert!(per_channel > 0 && values.len().is_multiple_of(per_channel));
    let n_channels = values.len() / per_channel;
    (0..per_channel)
        .map(|j| (0..n_channels).map(|c| values[c * per_channel + j]).sum::<f64>() / n_channels as f64)
        .collect()
}
