//! Regression trees and leaf-wise histogram growth.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        value: f64,
    },
    Split {
        feature: usize,
        /// Raw-value threshold; `x <= threshold` goes left.
        threshold: f64,
        /// Highest bin sent left.
        bin: u8,
        left: usize,
        right: usize,
        gain: f64,
    },
}

/// Node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { value } => return value,
                Node::Split { feature, threshold, left, right, .. } => {
                    i = if x[feature] <= threshold { left } else { right };
                }
            }
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }

    pub fn splits(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.nodes.iter().filter_map(|n| match n {
            Node::Split { feature, gain, .. } => Some((*feature, *gain)),
            Node::Leaf { .. } => None,
        })
    }
}

/// Growth limits for one tree.
#[derive(Debug, Clone, Copy)]
pub struct GrowParams {
    pub max_leaves: usize,
    pub min_samples_leaf: usize,
    pub l2_lambda: f64,
    pub learning_rate: f64,
}

/// Binned training columns plus the raw thresholds for each bin.
pub struct BinnedColumns<'a> {
    /// `bins[feature][row]`.
    pub bins: &'a [Vec<u8>],
    pub cuts: &'a [Vec<f64>],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitCandidate {
    pub feature: usize,
    pub bin: u8,
    pub gain: f64,
}

fn score(g: f64, h: f64, lambda: f64) -> f64 {
    g * g / (h + lambda)
}

/// Best split of `rows` over `features`. Ties prefer the lowest feature,
/// then the lowest bin. Only splits with positive gain and at least
/// `min_samples_leaf` rows per side qualify.
pub fn best_split(
    data: &BinnedColumns,
    grad: &[f64],
    hess: &[f64],
    rows: &[u32],
    features: &[usize],
    params: &GrowParams,
) -> Option<SplitCandidate> {
    let g_total: f64 = rows.iter().map(|&r| grad[r as usize]).sum();
    let h_total: f64 = rows.iter().map(|&r| hess[r as usize]).sum();
    let parent = score(g_total, h_total, params.l2_lambda);
    let n = rows.len();
    if n < 2 * params.min_samples_leaf.max(1) {
        return None;
    }

    let per_feature: Vec<Option<SplitCandidate>> = features
        .par_iter()
        .map(|&f| {
            let n_bins = data.cuts[f].len() + 1;
            if n_bins < 2 {
                return None;
            }
            let col = &data.bins[f];
            let mut hist = vec![(0.0f64, 0.0f64, 0usize); n_bins];
            for &r in rows {
                let cell = &mut hist[col[r as usize] as usize];
                cell.0 += grad[r as usize];
                cell.1 += hess[r as usize];
                cell.2 += 1;
            }
            let mut best: Option<SplitCandidate> = None;
            let (mut gl, mut hl, mut nl) = (0.0, 0.0, 0usize);
            for (b, &(g, h, c)) in hist.iter().enumerate().take(n_bins - 1) {
                gl += g;
                hl += h;
                nl += c;
                let nr = n - nl;
                if nl < params.min_samples_leaf || nr < params.min_samples_leaf {
                    continue;
                }
                let gain = score(gl, hl, params.l2_lambda) + score(g_total - gl, h_total - hl, params.l2_lambda) - parent;
                if gain > 0.0 && best.is_none_or(|s| gain > s.gain) {
                    best = Some(SplitCandidate { feature: f, bin: b as u8, gain });
                }
            }
            best
        })
        .collect();

    per_feature.into_iter().flatten().fold(None, |acc: Option<SplitCandidate>, c| match acc {
        Some(a) if a.gain >= c.gain => Some(a),
        _ => Some(c),
    })
}

struct OpenLeaf {
    node: usize,
    rows: Vec<u32>,
    split: Option<SplitCandidate>,
}

/// Grow one tree leaf-wise: repeatedly split the leaf with the largest gain
/// until `max_leaves` or no leaf can split. Open leaves are kept in creation
/// order (a split leaf is removed, its children appended), and ties go to the
/// first leaf in that order.
///
/// Returns the tree and, for every training row in `rows`, the leaf value it
/// received (zero for rows not listed).
pub fn grow_tree(
    data: &BinnedColumns,
    grad: &[f64],
    hess: &[f64],
    rows: Vec<u32>,
    features: &[usize],
    params: &GrowParams,
) -> (Tree, Vec<f64>) {
    let n_rows = grad.len();
    let mut nodes = vec![Node::Leaf { value: 0.0 }];
    let root_split = best_split(data, grad, hess, &rows, features, params);
    let mut leaves = vec![OpenLeaf { node: 0, rows, split: root_split }];

    while leaves.len() < params.max_leaves.max(1) {
        let mut pick: Option<usize> = None;
        for (i, leaf) in leaves.iter().enumerate() {
            if let Some(s) = leaf.split {
                if pick.is_none_or(|p| s.gain > leaves[p].split.unwrap().gain) {
                    pick = Some(i);
                }
            }
        }
        let Some(i) = pick else { break };
        let leaf = leaves.remove(i);
        let split = leaf.split.unwrap();
        let col = &data.bins[split.feature];
        let (left_rows, right_rows): (Vec<u32>, Vec<u32>) =
            leaf.rows.iter().partition(|&&r| col[r as usize] <= split.bin);

        let left = nodes.len();
        let right = left + 1;
        nodes.push(Node::Leaf { value: 0.0 });
        nodes.push(Node::Leaf { value: 0.0 });
        nodes[leaf.node] = Node::Split {
            feature: split.feature,
            threshold: data.cuts[split.feature][split.bin as usize],
            bin: split.bin,
            left,
            right,
            gain: split.gain,
        };
        let left_split = best_split(data, grad, hess, &left_rows, features, params);
        let right_split = best_split(data, grad, hess, &right_rows, features, params);
        leaves.push(OpenLeaf { node: left, rows: left_rows, split: left_split });
        leaves.push(OpenLeaf { node: right, rows: right_rows, split: right_split });
    }

    let mut fitted = vec![0.0; n_rows];
    for leaf in &leaves {
        let g: f64 = leaf.rows.iter().map(|&r| grad[r as usize]).sum();
        let h: f64 = leaf.rows.iter().map(|&r| hess[r as usize]).sum();
        let value = -g / (h + params.l2_lambda) * params.learning_rate;
        nodes[leaf.node] = Node::Leaf { value };
        for &r in &leaf.rows {
            fitted[r as usize] = value;
        }
    }
    (Tree { nodes }, fitted)
}
