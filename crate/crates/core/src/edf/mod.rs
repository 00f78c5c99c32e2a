//! EDF (European Data Format) recordings and seizure annotations.
//!
//! Only plain EDF and continuous EDF+ are accepted. EDF+ annotation
//! pseudo-signals are skipped; discontinuous (EDF+D) files are rejected.

mod annotations;

use std::path::{Path, PathBuf};

use chrono::{NaiveDate, NaiveDateTime, NaiveTime};
use thiserror::Error;

pub use annotations::{parse_annotations, parse_annotations_as, AnnotationError, AnnotationFormat};

use crate::SeizureClass;

const HEADER_LEN: usize = 256;
const SIGNAL_HEADER_LEN: usize = 256;
const ANNOTATION_LABEL: &str = "EDF Annotations";

#[derive(Debug, Error)]
pub enum EdfError {
    #[error("malformed EDF header: {0}")]
    MalformedHeader(String),
    #[error("data record count mismatch: header declares {declared}, file holds {actual}")]
    InconsistentRecordCount { declared: i64, actual: f64 },
    #[error("signal {label:?} has digital_min == digital_max ({value})")]
    CalibrationDegenerate { label: String, value: i32 },
    #[error("I/O error reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// One calibrated signal of a recording.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSignal {
    /// Normalised electrode name, e.g. `"FP1"` for `"EEG FP1-REF"`.
    pub label: String,
    pub sample_rate: f64,
    /// Physical units (microvolts for EEG).
    pub samples: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawRecording {
    pub patient_id: String,
    pub channels: Vec<ChannelSignal>,
    pub start_time: NaiveDateTime,
    /// Seconds.
    pub duration: f64,
}

impl RawRecording {
    pub fn channel(&self, label: &str) -> Option<&ChannelSignal> {
        self.channels.iter().find(|c| c.label == label)
    }
}

/// A labelled seizure interval, `[start, stop)` in seconds from recording start.
#[derive(Debug, Clone, PartialEq)]
pub struct SeizureEvent {
    pub patient_id: String,
    pub recording_ref: PathBuf,
    pub start: f64,
    pub stop: f64,
    pub label: SeizureClass,
}

impl SeizureEvent {
    pub fn duration(&self) -> f64 {
        self.stop - self.start
    }

    pub fn with_source(mut self, patient_id: &str, recording_ref: &Path) -> Self {
        self.patient_id = patient_id.to_string();
        self.recording_ref = recording_ref.to_path_buf();
        self
    }
}

/// Uppercase, drop the `EEG ` prefix and the `-REF` / `-LE` reference suffix.
pub fn normalize_label(raw: &str) -> String {
    let mut label = raw.trim().to_ascii_uppercase();
    if let Some(rest) = label.strip_prefix("EEG ") {
        label = rest.trim_start().to_string();
    }
    for suffix in ["-REF", "-LE"] {
        if let Some(rest) = label.strip_suffix(suffix) {
            label = rest.to_string();
            break;
        }
    }
    label
}

struct Fields<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Fields<'a> {
    fn text(&mut self, len: usize, what: &str) -> Result<&'a str, EdfError> {
        let raw = self
            .data
            .get(self.pos..self.pos + len)
            .ok_or_else(|| EdfError::MalformedHeader(format!("header truncated in field {what}")))?;
        self.pos += len;
        std::str::from_utf8(raw)
            .map(str::trim)
            .map_err(|_| EdfError::MalformedHeader(format!("field {what} is not ASCII")))
    }

    fn number<T: std::str::FromStr>(&mut self, len: usize, what: &str) -> Result<T, EdfError> {
        let text = self.text(len, what)?;
        text.parse()
            .map_err(|_| EdfError::MalformedHeader(format!("field {what} is not numeric: {text:?}")))
    }
}

struct SignalHeader {
    label: String,
    physical_min: f64,
    physical_max: f64,
    digital_min: i32,
    digital_max: i32,
    samples_per_record: usize,
}

fn parse_start_time(date: &str, time: &str) -> Result<NaiveDateTime, EdfError> {
    let bad = || EdfError::MalformedHeader(format!("bad start date/time {date:?} {time:?}"));
    let parts = |s: &str| -> Option<[u32; 3]> {
        let mut it = s.split('.').map(|p| p.trim().parse::<u32>().ok());
        let out = [it.next()??, it.next()??, it.next()??];
        it.next().is_none().then_some(out)
    };
    let [day, month, yy] = parts(date).ok_or_else(bad)?;
    let [h, m, s] = parts(time).ok_or_else(bad)?;
    // EDF clipping date: 85..99 are 1985..1999.
    let year = if yy >= 85 { 1900 + yy } else { 2000 + yy } as i32;
    let date = NaiveDate::from_ymd_opt(year, month, day).ok_or_else(bad)?;
    let time = NaiveTime::from_hms_opt(h, m, s).ok_or_else(bad)?;
    Ok(NaiveDateTime::new(date, time))
}

/// Parse an in-memory EDF file.
pub fn parse_edf(bytes: &[u8]) -> Result<RawRecording, EdfError> {
    if bytes.len() < HEADER_LEN {
        return Err(EdfError::MalformedHeader(format!(
            "file is {} bytes, shorter than the 256-byte header",
            bytes.len()
        )));
    }
    let mut f = Fields { data: bytes, pos: 0 };
    let version = f.text(8, "version")?;
    if version != "0" {
        return Err(EdfError::MalformedHeader(format!("version field is {version:?}, expected \"0\"")));
    }
    let patient = f.text(80, "patient")?;
    let _recording = f.text(80, "recording")?;
    let start_date = f.text(8, "startdate")?;
    let start_time = f.text(8, "starttime")?;
    let header_bytes: usize = f.number(8, "header bytes")?;
    let reserved = f.text(44, "reserved")?;
    let declared_records: i64 = f.number(8, "number of data records")?;
    let record_duration: f64 = f.number(8, "data record duration")?;
    let ns: usize = f.number(4, "number of signals")?;

    if reserved.starts_with("EDF+D") {
        return Err(EdfError::MalformedHeader("discontinuous EDF+ is not supported".into()));
    }
    if ns == 0 {
        return Err(EdfError::MalformedHeader("file declares zero signals".into()));
    }
    if header_bytes != HEADER_LEN + ns * SIGNAL_HEADER_LEN {
        return Err(EdfError::MalformedHeader(format!(
            "header size field {header_bytes} does not match {} signals",
            ns
        )));
    }
    if !(record_duration > 0.0 && record_duration.is_finite()) {
        return Err(EdfError::MalformedHeader(format!(
            "data record duration must be positive, got {record_duration}"
        )));
    }
    let start_time = parse_start_time(start_date, start_time)?;

    // Signal headers are stored field-major: all labels, then all transducers, ...
    let column = |f: &mut Fields, len: usize, what: &str| -> Result<Vec<String>, EdfError> {
        (0..ns).map(|_| f.text(len, what).map(str::to_string)).collect()
    };
    let labels = column(&mut f, 16, "label")?;
    let _transducer = column(&mut f, 80, "transducer")?;
    let _dimension = column(&mut f, 8, "physical dimension")?;
    let physical_min = column(&mut f, 8, "physical minimum")?;
    let physical_max = column(&mut f, 8, "physical maximum")?;
    let digital_min = column(&mut f, 8, "digital minimum")?;
    let digital_max = column(&mut f, 8, "digital maximum")?;
    let _prefilter = column(&mut f, 80, "prefiltering")?;
    let samples_per_record = column(&mut f, 8, "samples per record")?;
    let _reserved = column(&mut f, 32, "signal reserved")?;

    let num = |s: &str, what: &str| -> Result<f64, EdfError> {
        s.parse::<f64>()
            .map_err(|_| EdfError::MalformedHeader(format!("{what} is not numeric: {s:?}")))
    };
    let int = |s: &str, what: &str| -> Result<i64, EdfError> {
        s.parse::<i64>()
            .map_err(|_| EdfError::MalformedHeader(format!("{what} is not an integer: {s:?}")))
    };
    let mut signals = Vec::with_capacity(ns);
    for i in 0..ns {
        let spr = int(&samples_per_record[i], "samples per record")?;
        if spr <= 0 {
            return Err(EdfError::MalformedHeader(format!(
                "signal {:?} has {spr} samples per record",
                labels[i]
            )));
        }
        signals.push(SignalHeader {
            label: labels[i].clone(),
            physical_min: num(&physical_min[i], "physical minimum")?,
            physical_max: num(&physical_max[i], "physical maximum")?,
            digital_min: int(&digital_min[i], "digital minimum")? as i32,
            digital_max: int(&digital_max[i], "digital maximum")? as i32,
            samples_per_record: spr as usize,
        });
    }

    let record_samples: usize = signals.iter().map(|s| s.samples_per_record).sum();
    let record_bytes = record_samples * 2;
    let data = &bytes[header_bytes..];
    if !data.len().is_multiple_of(record_bytes) || (declared_records >= 0 && data.len() / record_bytes != declared_records as usize) {
        return Err(EdfError::InconsistentRecordCount {
            declared: declared_records,
            actual: data.len() as f64 / record_bytes as f64,
        });
    }
    // -1 means "unknown" (recording still in progress); trust the data length.
    let n_records = data.len() / record_bytes;
    if n_records == 0 {
        return Err(EdfError::InconsistentRecordCount { declared: declared_records, actual: 0.0 });
    }

    let mut channels = Vec::new();
    let mut offset_in_record = 0usize;
    for sig in &signals {
        let start = offset_in_record;
        offset_in_record += sig.samples_per_record * 2;
        if sig.label.trim() == ANNOTATION_LABEL {
            continue;
        }
        if sig.digital_min == sig.digital_max {
            return Err(EdfError::CalibrationDegenerate {
                label: sig.label.clone(),
                value: sig.digital_min,
            });
        }
        let gain = (sig.physical_max - sig.physical_min) / (sig.digital_max - sig.digital_min) as f64;
        let mut samples = Vec::with_capacity(n_records * sig.samples_per_record);
        for r in 0..n_records {
            let base = r * record_bytes + start;
            let block = &data[base..base + sig.samples_per_record * 2];
            samples.extend(block.chunks_exact(2).map(|b| {
                let d = i16::from_le_bytes([b[0], b[1]]) as f64;
                sig.physical_min + (d - sig.digital_min as f64) * gain
            }));
        }
        channels.push(ChannelSignal {
            label: normalize_label(&sig.label),
            sample_rate: sig.samples_per_record as f64 / record_duration,
            samples,
        });
    }
    if channels.is_empty() {
        return Err(EdfError::MalformedHeader("file contains only annotation signals".into()));
    }

    let patient_id = patient
        .split_whitespace()
        .next()
        .filter(|p| *p != "X")
        .unwrap_or("")
        .to_string();

    Ok(RawRecording {
        patient_id,
        channels,
        start_time,
        duration: n_records as f64 * record_duration,
    })
}

pub fn read_edf(path: &Path) -> Result<RawRecording, EdfError> {
    let bytes = std::fs::read(path).map_err(|source| EdfError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_edf(&bytes)
}

fn pad_field(out: &mut Vec<u8>, text: &str, len: usize) {
    let bytes = text.as_bytes();
    let n = bytes.len().min(len);
    out.extend_from_slice(&bytes[..n]);
    out.extend(std::iter::repeat_n(b' ', len - n));
}

/// Shortest decimal rendering of `v` that fits in an 8-character header field.
fn fit_number(v: f64) -> String {
    for precision in (0..=6).rev() {
        let s = format!("{v:.precision$}");
        let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
        if s.len() <= 8 {
            return s;
        }
    }
    format!("{}", v.round() as i64)
}

/// Encode a recording as EDF with 16-bit samples.
///
/// Each channel uses the full digital range over its own data range, so the
/// round trip is exact to within one quantisation step. The data record
/// length is 1 s when every channel has an integer rate and the duration is
/// a whole number of seconds; otherwise the whole recording is one record.
/// Labels are written in the `EEG <name>-REF` convention.
pub fn write_edf(rec: &RawRecording) -> Vec<u8> {
    let ns = rec.channels.len();
    let whole = |v: f64| (v - v.round()).abs() < 1e-9;
    let one_second = whole(rec.duration) && rec.channels.iter().all(|c| whole(c.sample_rate));
    let (record_duration, n_records) = if one_second {
        (1.0, rec.duration.round() as usize)
    } else {
        (rec.duration, 1)
    };

    const DMIN: i32 = -32768;
    const DMAX: i32 = 32767;
    struct Enc {
        pmin: f64,
        pmax: f64,
        spr: usize,
    }
    let enc: Vec<Enc> = rec
        .channels
        .iter()
        .map(|c| {
            let lo = c.samples.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = c.samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let (lo, hi) = if lo.is_finite() { (lo, hi) } else { (0.0, 0.0) };
            let pmin = header_bound(lo, false);
            let pmax = header_bound(hi, true);
            let spr = (c.sample_rate * record_duration).round() as usize;
            Enc { pmin, pmax, spr }
        })
        .collect();

    let mut out = Vec::with_capacity(HEADER_LEN * (ns + 1));
    pad_field(&mut out, "0", 8);
    let patient = if rec.patient_id.is_empty() { "X" } else { rec.patient_id.as_str() };
    pad_field(&mut out, &format!("{patient} X X X"), 80);
    pad_field(&mut out, "Startdate X X X X", 80);
    let yy = rec.start_time.format("%y").to_string();
    pad_field(&mut out, &rec.start_time.format(&format!("%d.%m.{yy}")).to_string(), 8);
    pad_field(&mut out, &rec.start_time.format("%H.%M.%S").to_string(), 8);
    pad_field(&mut out, &(HEADER_LEN + ns * SIGNAL_HEADER_LEN).to_string(), 8);
    pad_field(&mut out, "", 44);
    pad_field(&mut out, &n_records.to_string(), 8);
    pad_field(&mut out, &fit_number(record_duration), 8);
    pad_field(&mut out, &ns.to_string(), 4);

    for c in &rec.channels {
        pad_field(&mut out, &format!("EEG {}-REF", c.label), 16);
    }
    for _ in 0..ns {
        pad_field(&mut out, "", 80);
    }
    for _ in 0..ns {
        pad_field(&mut out, "uV", 8);
    }
    for e in &enc {
        pad_field(&mut out, &fit_number(e.pmin), 8);
    }
    for e in &enc {
        pad_field(&mut out, &fit_number(e.pmax), 8);
    }
    for _ in 0..ns {
        pad_field(&mut out, &DMIN.to_string(), 8);
    }
    for _ in 0..ns {
        pad_field(&mut out, &DMAX.to_string(), 8);
    }
    for _ in 0..ns {
        pad_field(&mut out, "", 80);
    }
    for e in &enc {
        pad_field(&mut out, &e.spr.to_string(), 8);
    }
    for _ in 0..ns {
        pad_field(&mut out, "", 32);
    }

    for r in 0..n_records {
        for (c, e) in rec.channels.iter().zip(&enc) {
            let span = e.pmax - e.pmin;
            for i in r * e.spr..(r + 1) * e.spr {
                let v = c.samples.get(i).copied().unwrap_or(0.0);
                let d = if span > 0.0 {
                    (DMIN as f64 + (v - e.pmin) / span * (DMAX - DMIN) as f64).round()
                } else {
                    0.0
                };
                let d = d.clamp(DMIN as f64, DMAX as f64) as i16;
                out.extend_from_slice(&d.to_le_bytes());
            }
        }
    }
    out
}

/// A value representable in an 8-character field that is `<= v` (or `>= v`
/// when `up`), so the physical range always covers the data.
fn header_bound(v: f64, up: bool) -> f64 {
    let mut s: f64 = fit_number(v).parse().unwrap_or(v);
    let covers = |s: f64| if up { s >= v } else { s <= v };
    if !covers(s) {
        let text = fit_number(v);
        let decimals = text.split_once('.').map_or(0, |(_, frac)| frac.len());
        let step = 10f64.powi(-(decimals as i32));
        let nudged = if up { s + step } else { s - step };
        s = fit_number(nudged).parse().unwrap_or(nudged);
        if !covers(s) {
            s = if up { s.ceil() + 1.0 } else { s.floor() - 1.0 };
        }
    }
    s
}
