//! Plain real DWT (Mallat cascade), kept as a shift-variance baseline.

use super::{lowlevel::sym, padded_length, DtcwtError};

/// An analysis filter pair for the baseline DWT.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavelet {
    pub lowpass: Vec<f64>,
    pub highpass: Vec<f64>,
}

impl Wavelet {
    pub fn haar() -> Self {
        let c = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            lowpass: vec![c, c],
            highpass: vec![c, -c],
        }
    }

    /// The level-1 pair of the default DTCWT filter bank.
    pub fn near_sym_a() -> Self {
        Self {
            lowpass: super::filters::H0O.to_vec(),
            highpass: super::filters::H1O.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DwtResult {
    /// Detail coefficients, finest level first.
    pub details: Vec<Vec<f64>>,
    pub approximation: Vec<f64>,
}

/// One analysis step: filter centred at `2i` and keep every second sample.
fn analyze(x: &[f64], h: &[f64]) -> Vec<f64> {
    let n = x.len();
    let half = (h.len() / 2) as isize;
    (0..n / 2)
        .map(|i| {
            let centre = 2 * i as isize + half;
            h.iter()
                .enumerate()
                .map(|(m, &c)| c * x[sym(centre - m as isize, n)])
                .sum()
        })
        .collect()
}

/// Multi-level DWT with symmetric extension. The input is padded at the end
/// to a multiple of `2^levels`.
pub fn dwt_forward(x: &[f64], levels: usize, wavelet: &Wavelet) -> Result<DwtResult, DtcwtError> {
    let padded = padded_length(x.len(), levels)?;
    let mut approx: Vec<f64> = (0..padded as isize).map(|i| x[sym(i, x.len())]).collect();
    let mut details = Vec::with_capacity(levels);
    for _ in 0..levels {
        details.push(analyze(&approx, &wavelet.highpass));
        approx = analyze(&approx, &wavelet.lowpass);
    }
    Ok(DwtResult {
        details,
        approximation: approx,
    })
}
