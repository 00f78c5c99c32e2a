//! Synthetic EEG corpus with seizure events whose class is recoverable from
//! the signal.
//!
//! Every recording has 22 referential electrodes: the 17 used by the TCP
//! montage plus FZ, PZ, A1, A2 and T1. The background is independent pink
//! noise per electrode. During an event each electrode also carries a
//! sinusoid at the class's dominant frequency, shaped by a class-specific
//! slow amplitude modulation and tapered on and off, with a per-electrode
//! gain and phase.
//!
//! One EDF file is written per (class, patient) pair, together with a TUSZ
//! style `.csv` annotation file.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use seizure_core::edf::{write_edf, ChannelSignal, RawRecording};
use seizure_core::preprocess::montage_electrodes;
use seizure_core::SeizureClass;
use serde::Serialize;

use crate::error::CliError;

/// Sampling rates assigned to files in turn.
pub const RATES: [f64; 3] = [250.0, 256.0, 400.0];
const EXTRA_ELECTRODES: [&str; 5] = ["FZ", "PZ", "A1", "A2", "T1"];
const EVENT_AMPLITUDE: f64 = 40.0;
const NOISE_AMPLITUDE: f64 = 12.0;
/// Onset and offset taper, seconds.
const RAMP: f64 = 0.5;

pub fn dominant_frequency(class: SeizureClass) -> f64 {
    match class {
        SeizureClass::Fnsz => 2.5,
        SeizureClass::Gnsz => 5.5,
        SeizureClass::Spsz => 11.0,
        SeizureClass::Cpsz => 22.0,
        SeizureClass::Absz => 40.0,
        SeizureClass::Tnsz => 70.0,
        SeizureClass::Tcsz => 95.0,
    }
}

/// Rate of the slow amplitude modulation, Hz.
fn modulation_frequency(class: SeizureClass) -> f64 {
    0.25 + 0.15 * class.code() as f64
}

pub fn electrodes() -> Vec<&'static str> {
    let mut e = montage_electrodes();
    e.extend(EXTRA_ELECTRODES);
    e
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub classes: Vec<SeizureClass>,
    pub patients_per_class: usize,
    pub events_per_patient: usize,
    pub seed: u64,
    /// Spread of per-patient log-gain applied separately to the event signal
    /// and to the background; 0 disables it.
    pub confound: f64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            classes: seizure_core::evaluation::Problem::FiveClass.classes().to_vec(),
            patients_per_class: 4,
            events_per_patient: 3,
            seed: 0,
            confound: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthEvent {
    pub start: f64,
    pub stop: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthFile {
    pub edf: PathBuf,
    pub annotations: PathBuf,
    pub patient_id: String,
    pub label: SeizureClass,
    pub sample_rate: f64,
    pub duration: f64,
    pub events: Vec<SynthEvent>,
}

impl SynthFile {
    /// Two-second windows that fit inside the events.
    pub fn expected_segments(&self, segment_seconds: f64) -> usize {
        self.events.iter().map(|e| ((e.stop - e.start) / segment_seconds + 1e-9).floor() as usize).sum()
    }
}

/// Approximately 1/f noise from Paul Kellet's filter bank.
struct PinkNoise {
    b: [f64; 7],
}

impl PinkNoise {
    fn new() -> Self {
        Self { b: [0.0; 7] }
    }

    fn next(&mut self, white: f64) -> f64 {
        let b = &mut self.b;
        b[0] = 0.99886 * b[0] + white * 0.0555179;
        b[1] = 0.99332 * b[1] + white * 0.0750759;
        b[2] = 0.96900 * b[2] + white * 0.1538520;
        b[3] = 0.86650 * b[3] + white * 0.3104856;
        b[4] = 0.55000 * b[4] + white * 0.5329522;
        b[5] = -0.7616 * b[5] - white * 0.0168980;
        let out = b[0] + b[1] + b[2] + b[3] + b[4] + b[5] + b[6] + white * 0.5362;
        b[6] = white * 0.115926;
        out * 0.25
    }
}

/// Event times on a half-second grid: lead-in, events separated by gaps,
/// then a tail; total duration rounded up to whole seconds.
fn plan_events(n: usize, rng: &mut ChaCha8Rng) -> (Vec<SynthEvent>, f64) {
    let half = |rng: &mut ChaCha8Rng, lo: u32, hi: u32| rng.random_range(lo..=hi) as f64 * 0.5;
    let mut t = half(rng, 4, 10);
    let mut events = Vec::with_capacity(n);
    for _ in 0..n {
        let len = half(rng, 16, 28);
        events.push(SynthEvent { start: t, stop: t + len });
        t += len + half(rng, 8, 16);
    }
    (events, t.ceil())
}

fn synth_recording(
    label: SeizureClass,
    patient_id: &str,
    rate: f64,
    n_events: usize,
    confound: f64,
    rng: &mut ChaCha8Rng,
) -> (RawRecording, Vec<SynthEvent>) {
    let (events, duration) = plan_events(n_events, rng);
    let n = (duration * rate).round() as usize;
    let (signal_gain, noise_gain) = if confound > 0.0 {
        let a: f64 = StandardNormal.sample(rng);
        let b: f64 = StandardNormal.sample(rng);
        ((confound * a).exp(), (confound * b).exp())
    } else {
        (1.0, 1.0)
    };
    let f0 = dominant_frequency(label);
    let fm = modulation_frequency(label);
    let per_event_freq: Vec<f64> = events.iter().map(|_| f0 * rng.random_range(0.97..1.03)).collect();

    let names = electrodes();
    let mut channels = Vec::with_capacity(names.len());
    for name in names {
        let gain = rng.random_range(0.6..1.4);
        let phase = rng.random_range(0.0..std::f64::consts::TAU);
        let mut pink = PinkNoise::new();
        let mut samples = Vec::with_capacity(n);
        for i in 0..n {
            let white: f64 = StandardNormal.sample(rng);
            let t = i as f64 / rate;
            let mut v = NOISE_AMPLITUDE * noise_gain * pink.next(white);
            for (e, &f) in events.iter().zip(&per_event_freq) {
                if t >= e.start && t < e.stop {
                    let ramp = ((t - e.start).min(e.stop - t) / RAMP).min(1.0);
                    let taper = 0.5 - 0.5 * (std::f64::consts::PI * ramp).cos();
                    let envelope = 1.0 + 0.4 * (std::f64::consts::TAU * fm * (t - e.start)).sin();
                    v += EVENT_AMPLITUDE
                        * signal_gain
                        * gain
                        * taper
                        * envelope
                        * (std::f64::consts::TAU * f * (t - e.start) + phase).sin();
                }
            }
            samples.push(v);
        }
        channels.push(ChannelSignal {
            label: name.to_string(),
            sample_rate: rate,
            samples,
        });
    }
    let start_time = chrono::NaiveDate::from_ymd_opt(2001, 1, 1)
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .expect("valid date");
    let rec = RawRecording {
        patient_id: patient_id.to_string(),
        channels,
        start_time,
        duration,
    };
    (rec, events)
}

fn annotation_csv(name: &str, duration: f64, label: SeizureClass, events: &[SynthEvent]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# version = csv_v1.0.0");
    let _ = writeln!(s, "# bname = {name}");
    let _ = writeln!(s, "# duration = {duration:.4} secs");
    let _ = writeln!(s, "channel,start_time,stop_time,label,confidence");
    let mut t = 0.0;
    for e in events {
        if e.start > t {
            let _ = writeln!(s, "TERM,{t:.4},{:.4},bckg,1.0000", e.start);
        }
        let _ = writeln!(s, "TERM,{:.4},{:.4},{},1.0000", e.start, e.stop, label.as_str().to_ascii_lowercase());
        t = e.stop;
    }
    if t < duration {
        let _ = writeln!(s, "TERM,{t:.4},{duration:.4},bckg,1.0000");
    }
    s
}

/// Write the corpus under `out`, one directory per patient. File `i` (in
/// class-major order) uses rate `RATES[i % 3]` and its own random stream, so
/// output bytes depend only on `spec`.
pub fn generate(spec: &SynthSpec, out: &Path) -> Result<Vec<SynthFile>, CliError> {
    if spec.classes.is_empty() || spec.patients_per_class == 0 || spec.events_per_patient == 0 {
        return Err(CliError::Usage("synthetic corpus needs at least one class, patient and event".into()));
    }
    let jobs: Vec<(usize, SeizureClass, usize)> = spec
        .classes
        .iter()
        .flat_map(|&c| (0..spec.patients_per_class).map(move |p| (c, p)))
        .enumerate()
        .map(|(i, (c, p))| (i, c, p))
        .collect();

    jobs.par_iter()
        .map(|&(i, label, p)| {
            let patient_id = format!("syn{}{:03}", label.code(), p);
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(i as u64);
            let rate = RATES[i % RATES.len()];
            let (rec, events) = synth_recording(label, &patient_id, rate, spec.events_per_patient, spec.confound, &mut rng);

            let dir = out.join(&patient_id);
            std::fs::create_dir_all(&dir).map_err(CliError::io(&dir))?;
            let stem = format!("{patient_id}_s001_t000");
            let edf = dir.join(format!("{stem}.edf"));
            let annotations = dir.join(format!("{stem}.csv"));
            std::fs::write(&edf, write_edf(&rec)).map_err(CliError::io(&edf))?;
            std::fs::write(&annotations, annotation_csv(&stem, rec.duration, label, &events))
                .map_err(CliError::io(&annotations))?;
            Ok(SynthFile {
                edf,
                annotations,
                patient_id,
                label,
                sample_rate: rate,
                duration: rec.duration,
                events,
            })
        })
        .collect()
}
