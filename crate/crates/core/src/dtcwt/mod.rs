//! One-dimensional dual-tree complex wavelet transform.
//!
//! Two real DWT cascades (trees A and B) run in parallel. Level 1 uses an
//! odd-length biorthogonal pair and separates the trees by even/odd sampling;
//! later levels use q-shift filters whose group delays differ by half a
//! sample between trees. Tree A gives the real part and tree B the imaginary
//! part of each complex detail coefficient, which makes coefficient
//! magnitudes far less sensitive to signal shifts than a plain DWT.

mod dwt;
mod filters;
pub mod lowlevel;

use thiserror::Error;

pub use dwt::{dwt_forward, DwtResult, Wavelet};
pub use filters::FilterBank;
use lowlevel::{coldfilt, colfilter, colifilt, sym};

/// Largest supported decomposition depth.
pub const MAX_LEVELS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DtcwtError {
    #[error("signal of length {len} is too short for {levels} levels (need at least {min})")]
    SignalTooShort { len: usize, levels: usize, min: usize },
    #[error("levels must be between 1 and {MAX_LEVELS}, got {0}")]
    InvalidLevels(usize),
    #[error("inconsistent sub-band lengths: {0}")]
    ShapeMismatch(String),
}

/// A complex sub-band stored as separate real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComplexBand {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl ComplexBand {
    pub fn len(&self) -> usize {
        self.re.len()
    }

    pub fn is_empty(&self) -> bool {
        self.re.is_empty()
    }

    pub fn magnitude(&self) -> Vec<f64> {
        self.re.iter().zip(&self.im).map(|(a, b)| a.hypot(*b)).collect()
    }

    pub fn energy(&self) -> f64 {
        self.re.iter().chain(&self.im).map(|v| v * v).sum()
    }

    fn from_interleaved(v: &[f64]) -> Self {
        Self {
            re: v.iter().step_by(2).copied().collect(),
            im: v.iter().skip(1).step_by(2).copied().collect(),
        }
    }

    fn interleaved(&self) -> Vec<f64> {
        self.re.iter().zip(&self.im).flat_map(|(&a, &b)| [a, b]).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    /// Complex detail sub-bands, finest level first.
    pub details: Vec<ComplexBand>,
    /// Final lowpass output of tree A.
    pub approx_a: Vec<f64>,
    /// Final lowpass output of tree B.
    pub approx_b: Vec<f64>,
    pub original_length: usize,
}

impl Decomposition {
    pub fn levels(&self) -> usize {
        self.details.len()
    }

    /// Five (for four levels) non-negative magnitude sub-bands: one per detail
    /// level, then the approximation as `sqrt(a^2 + b^2)` across trees.
    pub fn magnitudes(&self) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = self.details.iter().map(ComplexBand::magnitude).collect();
        out.push(self.approx_a.iter().zip(&self.approx_b).map(|(a, b)| a.hypot(*b)).collect());
        out
    }
}

/// Smallest multiple of `2^levels` that is `>= n`.
pub(crate) fn padded_length(n: usize, levels: usize) -> Result<usize, DtcwtError> {
    if levels == 0 || levels > MAX_LEVELS {
        return Err(DtcwtError::InvalidLevels(levels));
    }
    let block = 1usize << levels;
    if n < block {
        return Err(DtcwtError::SignalTooShort { len: n, levels, min: block });
    }
    Ok(n.div_ceil(block) * block)
}

/// Forward transform. The signal is symmetrically extended at the end to a
/// multiple of `2^levels` so every level sees an even length.
pub fn forward(x: &[f64], levels: usize, bank: &FilterBank) -> Result<Decomposition, DtcwtError> {
    let original_length = x.len();
    let padded = padded_length(original_length, levels)?;
    let x: Vec<f64> = (0..padded as isize).map(|i| x[sym(i, original_length)]).collect();

    let mut details = Vec::with_capacity(levels);
    let hi = colfilter(&x, &bank.h1o);
    let mut lo = colfilter(&x, &bank.h0o);
    details.push(ComplexBand::from_interleaved(&hi));
    for _ in 1..levels {
        let hi = coldfilt(&lo, &bank.h1b, &bank.h1a);
        lo = coldfilt(&lo, &bank.h0b, &bank.h0a);
        details.push(ComplexBand::from_interleaved(&hi));
    }
    let approx = ComplexBand::from_interleaved(&lo);
    Ok(Decomposition {
        details,
        approx_a: approx.re,
        approx_b: approx.im,
        original_length,
    })
}

/// Inverse transform, trimmed back to `original_length`.
pub fn inverse(d: &Decomposition, bank: &FilterBank) -> Result<Vec<f64>, DtcwtError> {
    let levels = d.levels();
    if levels == 0 {
        return Err(DtcwtError::ShapeMismatch("no detail levels".into()));
    }
    for (j, band) in d.details.iter().enumerate() {
        if band.re.len() != band.im.len() {
            return Err(DtcwtError::ShapeMismatch(format!("level {} real/imaginary lengths differ", j + 1)));
        }
        if j > 0 && 2 * band.len() != d.details[j - 1].len() {
            return Err(DtcwtError::ShapeMismatch(format!(
                "level {} has {} coefficients, expected {}",
                j + 1,
                band.len(),
                d.details[j - 1].len() / 2
            )));
        }
    }
    let deepest = d.details[levels - 1].len();
    if d.approx_a.len() != deepest || d.approx_b.len() != deepest {
        return Err(DtcwtError::ShapeMismatch(format!(
            "approximation lengths {}/{} do not match deepest detail length {deepest}",
            d.approx_a.len(),
            d.approx_b.len()
        )));
    }
    let padded = 2 * d.details[0].len();
    if d.original_length > padded || !padded.is_multiple_of(1 << levels) {
        return Err(DtcwtError::ShapeMismatch(format!(
            "original length {} is incompatible with padded length {padded}",
            d.original_length
        )));
    }

    let mut lo = ComplexBand {
        re: d.approx_a.clone(),
        im: d.approx_b.clone(),
    }
    .interleaved();
    for level in (1..levels).rev() {
        let hi = d.details[level].interleaved();
        let a = colifilt(&lo, &bank.g0b, &bank.g0a);
        let b = colifilt(&hi, &bank.g1b, &bank.g1a);
        lo = a.iter().zip(&b).map(|(x, y)| x + y).collect();
    }
    let hi = d.details[0].interleaved();
    let mut z: Vec<f64> = colfilter(&lo, &bank.g0o)
        .iter()
        .zip(colfilter(&hi, &bank.g1o))
        .map(|(a, b)| a + b)
        .collect();
    z.truncate(d.original_length);
    Ok(z)
}
