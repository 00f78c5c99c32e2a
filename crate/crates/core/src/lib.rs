//! Seizure-type classification from clinical scalp EEG.
//!
//! The pipeline runs in stages that can each be used on their own:
//!
//! 1. [`edf`] parses EDF recordings and seizure annotation files.
//! 2. [`preprocess`] applies the TCP bipolar montage, resamples to 250 Hz and
//!    cuts seizure events into non-overlapping 2 s windows.
//! 3. [`dtcwt`] decomposes every channel with a four-level dual-tree complex
//!    wavelet transform.
//! 4. [`features`] reduces each sub-band to six statistics, giving a
//!    600-value vector per window, and provides one-way ANOVA analysis.
//! 5. [`gbdt`] trains a multiclass histogram gradient-boosted tree model.
//! 6. [`evaluation`] runs seizure-wise and patient-wise cross-validation and
//!    computes weighted metrics.

pub mod class;
pub mod dtcwt;
pub mod edf;
pub mod evaluation;
pub mod features;
pub mod gbdt;
pub mod io;
pub mod preprocess;

pub use class::SeizureClass;
