//! Sub-band statistics and the flattened feature vector.
//!
//! Each channel is decomposed with the DTCWT; every magnitude sub-band
//! (detail levels 1..L, then the approximation) contributes six statistics.
//! With 20 channels and 4 levels this gives 20 * 5 * 6 = 600 values, laid
//! out as `idx = ch * 30 + band * 6 + stat`.

mod anova;
mod matrix;
mod stats;

use rayon::prelude::*;

pub use anova::{anova_f_values, channel_average, AnovaError};
pub use matrix::{decode_features, encode_features, write_csv};
pub use stats::{subband_stats, N_STATS, STAT_NAMES};

use crate::dtcwt::{self, DtcwtError, FilterBank};
use crate::preprocess::{channel_names, SegmentTensor};
use crate::SeizureClass;

pub const DEFAULT_LEVELS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub label: SeizureClass,
    pub patient_id: String,
    /// Source `(event id, segment index)`; not stored in feature files.
    pub provenance: Option<(u32, u32)>,
}

/// Number of values per channel for a given depth.
pub fn per_channel(levels: usize) -> usize {
    (levels + 1) * N_STATS
}

/// Position of one statistic in the flattened vector.
pub fn feature_index(channel: usize, band: usize, stat: usize, levels: usize) -> usize {
    channel * per_channel(levels) + band * N_STATS + stat
}

pub fn band_names(levels: usize) -> Vec<String> {
    (1..=levels)
        .map(|l| format!("D{l}"))
        .chain(std::iter::once(format!("A{levels}")))
        .collect()
}

/// Column names such as `FP1-F7_D1_MAV`, in vector order.
pub fn feature_names(levels: usize) -> Vec<String> {
    let bands = band_names(levels);
    let mut out = Vec::new();
    for ch in channel_names() {
        for b in &bands {
            for s in STAT_NAMES {
                out.push(format!("{ch}_{b}_{s}"));
            }
        }
    }
    out
}

/// Names for the channel-averaged summary, e.g. `D1_MAV`.
pub fn summary_names(levels: usize) -> Vec<String> {
    band_names(levels)
        .iter()
        .flat_map(|b| STAT_NAMES.iter().map(move |s| format!("{b}_{s}")))
        .collect()
}

/// Statistics of every magnitude sub-band of one channel.
pub fn channel_features(x: &[f64], levels: usize, bank: &FilterBank) -> Result<Vec<f64>, DtcwtError> {
    let bands = dtcwt::forward(x, levels, bank)?.magnitudes();
    let last = bands.len() - 1;
    let mut out = Vec::with_capacity(bands.len() * N_STATS);
    for (i, band) in bands.iter().enumerate() {
        // The final band has no successor; pair it with the deepest detail band.
        let z = if i < last { &bands[i + 1] } else { &bands[last - 1] };
        out.extend_from_slice(&subband_stats(band, z));
    }
    Ok(out)
}

pub fn extract_features(seg: &SegmentTensor, levels: usize, bank: &FilterBank) -> Result<FeatureVector, DtcwtError> {
    let mut values = Vec::with_capacity(seg.n_channels() * per_channel(levels));
    for ch in 0..seg.n_channels() {
        let x: Vec<f64> = seg.channel(ch).iter().map(|&v| v as f64).collect();
        values.extend(channel_features(&x, levels, bank)?);
    }
    Ok(FeatureVector {
        values,
        label: seg.label,
        patient_id: seg.patient_id.clone(),
        provenance: Some((seg.event_id, seg.segment_index)),
    })
}

/// Extract features for many segments in parallel; output order matches input.
pub fn extract_all(segments: &[SegmentTensor], levels: usize) -> Result<Vec<FeatureVector>, DtcwtError> {
    let bank = FilterBank::default();
    segments.par_iter().map(|s| extract_features(s, levels, &bank)).collect()
}
