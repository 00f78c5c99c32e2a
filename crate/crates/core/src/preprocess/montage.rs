use super::PreprocessError;
use crate::edf::RawRecording;

/// Bipolar pairs of the TCP montage, in canonical channel order.
pub const TCP_PAIRS: [(&str, &str); 20] = [
    ("FP1", "F7"),
    ("F7", "T3"),
    ("T3", "T5"),
    ("T5", "O1"),
    ("FP2", "F8"),
    ("F8", "T4"),
    ("T4", "T6"),
    ("T6", "O2"),
    ("T3", "C3"),
    ("C3", "CZ"),
    ("CZ", "C4"),
    ("C4", "T4"),
    ("FP1", "F3"),
    ("F3", "C3"),
    ("C3", "P3"),
    ("P3", "O1"),
    ("FP2", "F4"),
    ("F4", "C4"),
    ("C4", "P4"),
    ("P4", "O2"),
];

pub const N_CHANNELS: usize = TCP_PAIRS.len();

/// Montage channel names such as `"FP1-F7"`.
pub fn channel_names() -> Vec<String> {
    TCP_PAIRS.iter().map(|(a, b)| format!("{a}-{b}")).collect()
}

/// Distinct electrodes referenced by the montage, in first-use order.
pub fn montage_electrodes() -> Vec<&'static str> {
    let mut out: Vec<&str> = Vec::new();
    for (a, b) in TCP_PAIRS {
        for e in [a, b] {
            if !out.contains(&e) {
                out.push(e);
            }
        }
    }
    out
}

/// Twenty bipolar channels sharing one sample rate and length.
#[derive(Debug, Clone, PartialEq)]
pub struct MontagedSignal {
    pub channels: Vec<Vec<f64>>,
    pub sample_rate: f64,
}

impl MontagedSignal {
    pub fn len(&self) -> usize {
        self.channels.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Difference each TCP electrode pair at the recording's native rate.
pub fn apply_tcp_montage(rec: &RawRecording) -> Result<MontagedSignal, PreprocessError> {
    let find = |name: &str| {
        rec.channel(name)
            .ok_or_else(|| PreprocessError::MissingElectrode(name.to_string()))
    };
    let mut channels = Vec::with_capacity(N_CHANNELS);
    let mut rate: Option<(f64, &str)> = None;
    for (a, b) in TCP_PAIRS {
        let (ea, eb) = (find(a)?, find(b)?);
        if ea.sample_rate != eb.sample_rate {
            return Err(PreprocessError::RateMismatch {
                first: a.to_string(),
                first_rate: ea.sample_rate,
                second: b.to_string(),
                second_rate: eb.sample_rate,
            });
        }
        match rate {
            Some((r, name)) if r != ea.sample_rate => {
                return Err(PreprocessError::RateMismatch {
                    first: name.to_string(),
                    first_rate: r,
                    second: a.to_string(),
                    second_rate: ea.sample_rate,
                })
            }
            None => rate = Some((ea.sample_rate, a)),
            _ => {}
        }
        channels.push(ea.samples.iter().zip(&eb.samples).map(|(x, y)| x - y).collect::<Vec<f64>>());
    }
    let len = channels.iter().map(Vec::len).min().unwrap_or(0);
    for c in &mut channels {
        c.truncate(len);
    }
    Ok(MontagedSignal {
        channels,
        sample_rate: rate.map_or(0.0, |r| r.0),
    })
}
