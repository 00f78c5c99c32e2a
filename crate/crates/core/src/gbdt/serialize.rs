//! GBDT model file.
//!
//! ```text
//! "GBDT" | version u16
//! config: rounds u32 | learning_rate f64 | max_leaves u32 | min_samples_leaf u32
//!         | l2_lambda f64 | max_bins u16 | feature_fraction f64 | seed u64
//!         | early_stopping_rounds u32 (0 = none)
//! n_features u32
//! n_classes u32 | class label u64 ...
//! init score f64 ... (one per class)
//! per feature: n_edges u16 | edge f64 ...
//! n_rounds u32 | per round, per class: n_nodes u32 | node ...
//!   node = 0u8 value f64
//!        | 1u8 feature u32 threshold f64 bin u16 left u32 right u32 gain f64
//! n_loss u32 | loss f64 ...
//! ```
//!
//! All integers little-endian.

use super::booster::TrainedModel;
use super::tree::{Node, Tree};
use super::GbdtConfig;
use crate::io::{ByteReader, ByteWriter, FormatError};

pub const MAGIC: &[u8; 4] = b"GBDT";
pub const VERSION: u16 = 1;

pub fn encode_model(m: &TrainedModel) -> Vec<u8> {
    let mut w = ByteWriter::new();
    w.bytes(MAGIC);
    w.u16(VERSION);
    let c = &m.config;
    w.u32(c.num_rounds as u32);
    w.f64(c.learning_rate);
    w.u32(c.max_leaves as u32);
    w.u32(c.min_samples_leaf as u32);
    w.f64(c.l2_lambda);
    w.u16(c.max_bins as u16);
    w.f64(c.feature_fraction);
    w.u64(c.seed);
    w.u32(c.early_stopping_rounds.unwrap_or(0) as u32);

    w.u32(m.n_features as u32);
    w.u32(m.classes.len() as u32);
    for &l in &m.classes {
        w.u64(l as u64);
    }
    for &s in &m.init_scores {
        w.f64(s);
    }
    for edges in &m.bin_edges {
        w.u16(edges.len() as u16);
        for &e in edges {
            w.f64(e);
        }
    }
    w.u32(m.trees.len() as u32);
    for t in m.trees.iter().flatten() {
        w.u32(t.nodes.len() as u32);
        for node in &t.nodes {
            match *node {
                Node::Leaf { value } => {
                    w.u8(0);
                    w.f64(value);
                }
                Node::Split { feature, threshold, bin, left, right, gain } => {
                    w.u8(1);
                    w.u32(feature as u32);
                    w.f64(threshold);
                    w.u16(bin as u16);
                    w.u32(left as u32);
                    w.u32(right as u32);
                    w.f64(gain);
                }
            }
        }
    }
    w.u32(m.train_loss.len() as u32);
    for &l in &m.train_loss {
        w.f64(l);
    }
    w.into_inner()
}

pub fn decode_model(bytes: &[u8]) -> Result<TrainedModel, FormatError> {
    let mut r = ByteReader::new(bytes);
    r.expect_magic(MAGIC)?;
    let version = r.u16()?;
    if version != VERSION {
        return Err(r.error(format!("unsupported GBDT version {version}")));
    }
    let config = GbdtConfig {
        num_rounds: r.u32()? as usize,
        learning_rate: r.f64()?,
        max_leaves: r.u32()? as usize,
        min_samples_leaf: r.u32()? as usize,
        l2_lambda: r.f64()?,
        max_bins: r.u16()? as usize,
        feature_fraction: r.f64()?,
        seed: r.u64()?,
        early_stopping_rounds: match r.u32()? {
            0 => None,
            n => Some(n as usize),
        },
    };

    let n_features = r.u32()? as usize;
    let n_classes = r.u32()? as usize;
    if n_classes < 2 || n_classes > r.remaining() / 8 {
        return Err(r.error(format!("implausible class count {n_classes}")));
    }
    let classes = (0..n_classes).map(|_| r.u64().map(|v| v as usize)).collect::<Result<Vec<_>, _>>()?;
    let init_scores = (0..n_classes).map(|_| r.f64()).collect::<Result<Vec<_>, _>>()?;
    if n_features > r.remaining() / 2 {
        return Err(r.error(format!("implausible feature count {n_features}")));
    }
    let mut bin_edges = Vec::with_capacity(n_features);
    for _ in 0..n_features {
        let n = r.u16()? as usize;
        bin_edges.push((0..n).map(|_| r.f64()).collect::<Result<Vec<_>, _>>()?);
    }

    let n_rounds = r.u32()? as usize;
    let mut trees = Vec::new();
    for _ in 0..n_rounds {
        let mut round = Vec::with_capacity(n_classes);
        for _ in 0..n_classes {
            round.push(read_tree(&mut r, n_features)?);
        }
        trees.push(round);
    }
    let n_loss = r.u32()? as usize;
    if n_loss > r.remaining() / 8 {
        return Err(r.error(format!("implausible loss count {n_loss}")));
    }
    let train_loss = (0..n_loss).map(|_| r.f64()).collect::<Result<Vec<_>, _>>()?;
    if !r.is_at_end() {
        return Err(r.error("trailing bytes after model"));
    }
    Ok(TrainedModel {
        config,
        classes,
        n_features,
        init_scores,
        bin_edges,
        trees,
        train_loss,
    })
}

fn read_tree(r: &mut ByteReader, n_features: usize) -> Result<Tree, FormatError> {
    let n_nodes = r.u32()? as usize;
    if n_nodes == 0 || n_nodes > r.remaining() / 9 {
        return Err(r.error(format!("implausible node count {n_nodes}")));
    }
    let mut nodes = Vec::with_capacity(n_nodes);
    for i in 0..n_nodes {
        let at = r.offset();
        let node = match r.u8()? {
            0 => {
                let value = r.f64()?;
                if !value.is_finite() {
                    return Err(FormatError { offset: at, message: "non-finite leaf value".into() });
                }
                Node::Leaf { value }
            }
            1 => {
                let feature = r.u32()? as usize;
                let threshold = r.f64()?;
                let bin = r.u16()?;
                let left = r.u32()? as usize;
                let right = r.u32()? as usize;
                let gain = r.f64()?;
                // Children always follow their parent, which rules out cycles.
                if feature >= n_features || bin > u8::MAX as u16 || left <= i || right <= i || left >= n_nodes || right >= n_nodes {
                    return Err(FormatError { offset: at, message: format!("invalid split node {i}") });
                }
                Node::Split { feature, threshold, bin: bin as u8, left, right, gain }
            }
            tag => return Err(FormatError { offset: at, message: format!("unknown node tag {tag}") }),
        };
        nodes.push(node);
    }
    Ok(Tree { nodes })
}
