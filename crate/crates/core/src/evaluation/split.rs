//! Cross-validation splitters.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Debug;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SplitError {
    #[error("k must be at least 2, got {0}")]
    InvalidK(usize),
    #[error("class {class} has {count} row(s), fewer than k = {k}")]
    ClassTooSmall { class: String, count: usize, k: usize },
    #[error("class {class} spans {patients} patient(s), fewer than k = {k}")]
    InsufficientPatients { class: String, patients: usize, k: usize },
    #[error("fold {0} received no rows")]
    EmptyFold(usize),
}

/// Row indices of one fold, both sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

fn folds_from_assignment(fold_of: &[usize], k: usize) -> Result<Vec<Fold>, SplitError> {
    let folds: Vec<Fold> = (0..k)
        .map(|f| {
            let (test, train): (Vec<usize>, Vec<usize>) = (0..fold_of.len()).partition(|&i| fold_of[i] == f);
            Fold { train, test }
        })
        .collect();
    match folds.iter().position(|f| f.test.is_empty()) {
        Some(i) => Err(SplitError::EmptyFold(i)),
        None => Ok(folds),
    }
}

fn group_rows<L: Ord + Clone>(labels: &[L]) -> BTreeMap<L, Vec<usize>> {
    let mut by_class: BTreeMap<L, Vec<usize>> = BTreeMap::new();
    for (i, l) in labels.iter().enumerate() {
        by_class.entry(l.clone()).or_default().push(i);
    }
    by_class
}

/// Stratified k-fold over rows.
///
/// Classes are visited in sorted order; each class's rows are shuffled and
/// dealt round-robin, the dealing position carrying over from one class to
/// the next so that fold sizes stay within one row of each other.
pub fn stratified_kfold<L: Ord + Clone + Debug>(labels: &[L], k: usize, seed: u64) -> Result<Vec<Fold>, SplitError> {
    if k < 2 {
        return Err(SplitError::InvalidK(k));
    }
    let mut by_class = group_rows(labels);
    if let Some((class, idx)) = by_class.iter().find(|(_, idx)| idx.len() < k) {
        return Err(SplitError::ClassTooSmall {
            class: format!("{class:?}"),
            count: idx.len(),
            k,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_of = vec![0; labels.len()];
    let mut next = 0;
    for idx in by_class.values_mut() {
        idx.shuffle(&mut rng);
        for &i in idx.iter() {
            fold_of[i] = next;
            next = (next + 1) % k;
        }
    }
    folds_from_assignment(&fold_of, k)
}

/// Grouped k-fold keeping every patient inside a single fold.
///
/// Patients are shuffled, then stably sorted by descending row count, and
/// each goes to the fold where it least increases
/// `sum_f sum_c (n_fc - N_c / k)^2`, the squared deviation of per-fold class
/// counts from an even share. Ties go to the fold with fewer rows, then the
/// lower index.
pub fn patient_kfold<L: Ord + Clone + Debug>(
    labels: &[L],
    patients: &[String],
    k: usize,
    seed: u64,
) -> Result<Vec<Fold>, SplitError> {
    assert_eq!(labels.len(), patients.len(), "one patient id per row");
    if k < 2 {
        return Err(SplitError::InvalidK(k));
    }
    let classes: Vec<L> = group_rows(labels).into_keys().collect();
    let class_pos = |l: &L| classes.binary_search(l).unwrap();

    let mut patient_rows: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, p) in patients.iter().enumerate() {
        patient_rows.entry(p.as_str()).or_default().push(i);
    }
    for class in &classes {
        let spanning: BTreeSet<&str> =
            labels.iter().zip(patients).filter(|(l, _)| *l == class).map(|(_, p)| p.as_str()).collect();
        if spanning.len() < k {
            return Err(SplitError::InsufficientPatients {
                class: format!("{class:?}"),
                patients: spanning.len(),
                k,
            });
        }
    }

    let nc = classes.len();
    let mut totals = vec![0.0; nc];
    for l in labels {
        totals[class_pos(l)] += 1.0;
    }
    let share: Vec<f64> = totals.iter().map(|t| t / k as f64).collect();

    let mut order: Vec<(&str, Vec<f64>, usize)> = patient_rows
        .iter()
        .map(|(p, rows)| {
            let mut counts = vec![0.0; nc];
            for &i in rows {
                counts[class_pos(&labels[i])] += 1.0;
            }
            (*p, counts, rows.len())
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    order.sort_by_key(|o| std::cmp::Reverse(o.2));

    let mut fold_counts = vec![vec![0.0; nc]; k];
    let mut fold_sizes = vec![0usize; k];
    let mut fold_of = vec![0; labels.len()];
    for (patient, counts, size) in &order {
        let delta = |f: usize| -> f64 {
            counts
                .iter()
                .enumerate()
                .map(|(c, &p)| p * (2.0 * (fold_counts[f][c] - share[c]) + p))
                .sum()
        };
        let mut best = 0;
        let mut best_delta = delta(0);
        for f in 1..k {
            let d = delta(f);
            if d < best_delta || (d == best_delta && fold_sizes[f] < fold_sizes[best]) {
                best = f;
                best_delta = d;
            }
        }
        for (c, &p) in counts.iter().enumerate() {
            fold_counts[best][c] += p;
        }
        fold_sizes[best] += size;
        for &i in &patient_rows[patient] {
            fold_of[i] = best;
        }
    }
    folds_from_assignment(&fold_of, k)
}
