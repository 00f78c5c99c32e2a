//! Montage, resampling and segmentation.
//!
//! Operations run in that order: bipolar montage at the native rate, then
//! resampling to the target rate, then windowing of annotated events.

mod archive;
mod montage;
mod resample;
mod segment;

use thiserror::Error;

pub use archive::{decode_archive, encode_archive};
pub use montage::{apply_tcp_montage, channel_names, montage_electrodes, MontagedSignal, N_CHANNELS, TCP_PAIRS};
pub use resample::{rational_ratio, resample, Resampler, KAISER_BETA, TAPS_PER_PHASE};
pub use segment::{event_span, segment_events, SegmentTensor};

use crate::edf::{RawRecording, SeizureEvent};

pub const TARGET_RATE: f64 = 250.0;
/// Samples per window at the target rate (2 s).
pub const WINDOW: usize = 500;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PreprocessError {
    #[error("recording has no {0} electrode")]
    MissingElectrode(String),
    #[error("electrodes {first} ({first_rate} Hz) and {second} ({second_rate} Hz) are sampled at different rates")]
    RateMismatch {
        first: String,
        first_rate: f64,
        second: String,
        second_rate: f64,
    },
    #[error("event [{start}, {stop}) s extends past the end of the {signal_seconds} s signal")]
    EventOutOfRange { start: f64, stop: f64, signal_seconds: f64 },
    #[error("expected {N_CHANNELS} montage channels, found {0}")]
    ChannelCount(usize),
}

/// Resample every channel to `target` Hz.
pub fn resample_to(sig: &MontagedSignal, target: f64) -> MontagedSignal {
    if sig.sample_rate == target {
        return sig.clone();
    }
    let r = Resampler::new(sig.sample_rate, target);
    MontagedSignal {
        channels: sig.channels.iter().map(|c| r.process(c)).collect(),
        sample_rate: target,
    }
}

pub fn resample_250(sig: &MontagedSignal) -> MontagedSignal {
    resample_to(sig, TARGET_RATE)
}

/// Montage, resample to `target` Hz and cut `window`-sample segments.
pub fn preprocess_recording(
    rec: &RawRecording,
    events: &[SeizureEvent],
    target: f64,
    window: usize,
    first_event_id: u32,
) -> Result<Vec<SegmentTensor>, PreprocessError> {
    let montaged = apply_tcp_montage(rec)?;
    let resampled = resample_to(&montaged, target);
    segment_events(&resampled, events, window, first_event_id)
}
