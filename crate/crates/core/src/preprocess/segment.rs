use super::{MontagedSignal, PreprocessError, N_CHANNELS};
use crate::edf::SeizureEvent;
use crate::SeizureClass;

/// One fixed-length multichannel window cut from a seizure event.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentTensor {
    /// Channel-major samples: `data[ch * n_samples + i]`.
    pub data: Vec<f32>,
    pub n_samples: usize,
    pub label: SeizureClass,
    pub patient_id: String,
    pub event_id: u32,
    pub segment_index: u32,
}

impl SegmentTensor {
    pub fn n_channels(&self) -> usize {
        self.data.len() / self.n_samples.max(1)
    }

    pub fn channel(&self, ch: usize) -> &[f32] {
        &self.data[ch * self.n_samples..(ch + 1) * self.n_samples]
    }
}

/// Sample span `[first, end)` of an event at `rate` Hz.
pub fn event_span(event: &SeizureEvent, rate: f64) -> (usize, usize) {
    let first = (event.start * rate).round().max(0.0) as usize;
    let end = (event.stop * rate + 1e-9).floor().max(0.0) as usize;
    (first, end)
}

/// Cut each event into consecutive non-overlapping windows of `window`
/// samples starting at the event onset. Trailing partial windows are
/// dropped, as are windows that overlap an event with a different label.
/// Event `i` gets id `first_event_id + i`.
pub fn segment_events(
    sig: &MontagedSignal,
    events: &[SeizureEvent],
    window: usize,
    first_event_id: u32,
) -> Result<Vec<SegmentTensor>, PreprocessError> {
    assert!(window > 0);
    if sig.channels.len() != N_CHANNELS {
        return Err(PreprocessError::ChannelCount(sig.channels.len()));
    }
    let len = sig.len();
    let spans: Vec<(usize, usize)> = events.iter().map(|e| event_span(e, sig.sample_rate)).collect();
    for (e, &(_, end)) in events.iter().zip(&spans) {
        if end > len {
            return Err(PreprocessError::EventOutOfRange {
                start: e.start,
                stop: e.stop,
                signal_seconds: len as f64 / sig.sample_rate,
            });
        }
    }

    let mut out = Vec::new();
    for (i, (event, &(first, end))) in events.iter().zip(&spans).enumerate() {
        let mut index = 0u32;
        let mut a = first;
        while a + window <= end {
            let b = a + window;
            let ambiguous = events
                .iter()
                .zip(&spans)
                .any(|(other, &(s, e))| other.label != event.label && s < b && a < e);
            if !ambiguous {
                let mut data = Vec::with_capacity(N_CHANNELS * window);
                for ch in &sig.channels {
                    data.extend(ch[a..b].iter().map(|&v| v as f32));
                }
                out.push(SegmentTensor {
                    data,
                    n_samples: window,
                    label: event.label,
                    patient_id: event.patient_id.clone(),
                    event_id: first_event_id + i as u32,
                    segment_index: index,
                });
            }
            index += 1;
            a = b;
        }
    }
    Ok(out)
}
