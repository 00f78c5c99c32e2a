//! Seizure annotation files.
//!
//! Three layouts are accepted:
//!
//! * `start,stop,label` (the simple format written by the synthetic generator)
//! * `channel,start_time,stop_time,label,confidence` (TUSZ `.csv`, per channel
//!   or with a single `TERM` channel)
//! * whitespace-separated `start stop label confidence` (TUSZ `.tse`)
//!
//! Per-channel rows are reduced to recording-level events by taking the union
//! of intervals that share a label.

use std::path::PathBuf;

use thiserror::Error;

use super::SeizureEvent;
use crate::class::{TuszLabel, UnknownLabel};
use crate::SeizureClass;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnnotationFormat {
    Simple,
    TuszCsv,
    Tse,
}

#[derive(Debug, Error, PartialEq)]
pub enum AnnotationError {
    #[error("line {line}: {source}")]
    UnknownLabel {
        line: usize,
        #[source]
        source: UnknownLabel,
    },
    #[error("line {line}: stop {stop} is not after start {start}")]
    InvertedInterval { line: usize, start: f64, stop: f64 },
    #[error("line {line}: start {start} lies outside the recording (duration {duration} s)")]
    OutOfRange { line: usize, start: f64, duration: f64 },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

/// Parse annotations, detecting the layout from the first data row.
pub fn parse_annotations(text: &str, recording_duration: f64) -> Result<Vec<SeizureEvent>, AnnotationError> {
    let format = data_lines(text)
        .next()
        .map(|(_, fields)| match fields.len() {
            5 => AnnotationFormat::TuszCsv,
            4 => AnnotationFormat::Tse,
            _ => AnnotationFormat::Simple,
        })
        .unwrap_or(AnnotationFormat::Simple);
    parse_annotations_as(text, recording_duration, format)
}

pub fn parse_annotations_as(
    text: &str,
    recording_duration: f64,
    format: AnnotationFormat,
) -> Result<Vec<SeizureEvent>, AnnotationError> {
    let (start_col, stop_col, label_col, width) = match format {
        AnnotationFormat::Simple => (0, 1, 2, 3),
        AnnotationFormat::TuszCsv => (1, 2, 3, 5),
        AnnotationFormat::Tse => (0, 1, 2, 4),
    };

    let mut raw: Vec<(SeizureClass, f64, f64)> = Vec::new();
    let mut saw_data = false;
    for (line, fields) in data_lines(text) {
        if fields.len() != width {
            return Err(AnnotationError::Malformed {
                line,
                message: format!("expected {width} fields, found {}", fields.len()),
            });
        }
        let start = fields[start_col].parse::<f64>();
        let stop = fields[stop_col].parse::<f64>();
        let (start, stop) = match (start, stop) {
            (Ok(a), Ok(b)) => (a, b),
            _ if !saw_data => {
                // Optional header row, e.g. "start,stop,label".
                saw_data = true;
                continue;
            }
            _ => {
                return Err(AnnotationError::Malformed {
                    line,
                    message: "start/stop are not numbers".into(),
                })
            }
        };
        saw_data = true;
        if !start.is_finite() || !stop.is_finite() {
            return Err(AnnotationError::Malformed {
                line,
                message: "start/stop must be finite".into(),
            });
        }

        let label = fields[label_col];
        if label.eq_ignore_ascii_case("bckg") {
            continue;
        }
        let class = match label.parse::<TuszLabel>() {
            Ok(TuszLabel::Seizure(c)) => c,
            Ok(TuszLabel::Myoclonic) => {
                log::warn!("line {line}: dropping MYSZ event [{start}, {stop})");
                continue;
            }
            Err(source) => return Err(AnnotationError::UnknownLabel { line, source }),
        };
        if stop <= start {
            return Err(AnnotationError::InvertedInterval { line, start, stop });
        }
        if start < 0.0 || start >= recording_duration {
            return Err(AnnotationError::OutOfRange {
                line,
                start,
                duration: recording_duration,
            });
        }
        raw.push((class, start, stop.min(recording_duration)));
    }

    Ok(merge_intervals(raw)
        .into_iter()
        .map(|(label, start, stop)| SeizureEvent {
            patient_id: String::new(),
            recording_ref: PathBuf::new(),
            start,
            stop,
            label,
        })
        .collect())
}

/// Union overlapping or touching intervals that share a label. Output is
/// sorted by start time, then label.
fn merge_intervals(mut raw: Vec<(SeizureClass, f64, f64)>) -> Vec<(SeizureClass, f64, f64)> {
    raw.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut merged: Vec<(SeizureClass, f64, f64)> = Vec::with_capacity(raw.len());
    for (label, start, stop) in raw {
        match merged.last_mut() {
            Some(last) if last.0 == label && start <= last.2 => last.2 = last.2.max(stop),
            _ => merged.push((label, start, stop)),
        }
    }
    merged.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    merged
}

/// Non-empty, non-comment lines split into trimmed fields, with 1-based line numbers.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("version") {
            return None;
        }
        let fields: Vec<&str> = if line.contains(',') {
            line.split(',').map(str::trim).collect()
        } else {
            line.split_whitespace().collect()
        };
        Some((i + 1, fields))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spans(events: &[SeizureEvent]) -> Vec<(SeizureClass, f64, f64)> {
        events.iter().map(|e| (e.label, e.start, e.stop)).collect()
    }

    #[test]
    fn single_simple_row() {
        let ev = parse_annotations("0.0,36.8886,fnsz", 100.0).unwrap();
        assert_eq!(spans(&ev), vec![(SeizureClass::Fnsz, 0.0, 36.8886)]);
    }

    #[test]
    fn overlapping_same_label_rows_merge() {
        let ev = parse_annotations("10,20,gnsz\n15,25,gnsz\n", 100.0).unwrap();
        assert_eq!(spans(&ev), vec![(SeizureClass::Gnsz, 10.0, 25.0)]);
    }

    #[test]
    fn different_labels_stay_separate() {
        let ev = parse_annotations("10,20,gnsz\n15,25,absz\n", 100.0).unwrap();
        assert_eq!(
            spans(&ev),
            vec![(SeizureClass::Gnsz, 10.0, 20.0), (SeizureClass::Absz, 15.0, 25.0)]
        );
    }

    #[test]
    fn mysz_is_dropped() {
        assert!(parse_annotations("3,9,mysz", 100.0).unwrap().is_empty());
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_annotations("1,2,xyz", 10.0),
            Err(AnnotationError::UnknownLabel { line: 1, .. })
        ));
        assert!(matches!(
            parse_annotations("# c\n5,5,fnsz", 10.0),
            Err(AnnotationError::InvertedInterval { line: 2, .. })
        ));
        assert!(matches!(
            parse_annotations("12,15,fnsz", 10.0),
            Err(AnnotationError::OutOfRange { .. })
        ));
        assert!(matches!(
            parse_annotations("1,2,fnsz\nstart,stop,label", 10.0),
            Err(AnnotationError::Malformed { line: 2, .. })
        ));
    }

    #[test]
    fn tusz_csv_with_header_and_channels() {
        let text = "# version = csv_v1.0.0\n# duration = 60.00 secs\n\
                    channel,start_time,stop_time,label,confidence\n\
                    FP1-F7,10.0000,20.0000,cpsz,1.0000\n\
                    F7-T3,12.0000,22.0000,cpsz,1.0000\n\
                    T3-T5,0.0000,10.0000,bckg,1.0000\n";
        let ev = parse_annotations(text, 60.0).unwrap();
        assert_eq!(spans(&ev), vec![(SeizureClass::Cpsz, 10.0, 22.0)]);
    }

    #[test]
    fn tse_layout() {
        let text = "version = tse_v1.0.0\n\n0.0000 12.0000 bckg 1.0000\n12.0000 30.5000 tcsz 1.0000\n";
        let ev = parse_annotations(text, 40.0).unwrap();
        assert_eq!(spans(&ev), vec![(SeizureClass::Tcsz, 12.0, 30.5)]);
    }

    #[test]
    fn stop_past_end_is_clamped() {
        let ev = parse_annotations("5,12,spsz", 10.0).unwrap();
        assert_eq!(spans(&ev), vec![(SeizureClass::Spsz, 5.0, 10.0)]);
    }

    /// Brute-force union on a fine grid of half-second cells.
    fn grid_union(rows: &[(u8, u8, u8)]) -> Vec<(u8, f64, f64)> {
        let mut out = Vec::new();
        for label in 0..3u8 {
            let mut covered = [false; 200];
            for &(l, a, len) in rows {
                if l == label {
                    for c in covered.iter_mut().skip(a as usize).take(len as usize) {
                        *c = true;
                    }
                }
            }
            let mut i = 0;
            while i < covered.len() {
                if covered[i] {
                    let s = i;
                    while i < covered.len() && covered[i] {
                        i += 1;
                    }
                    out.push((label, s as f64 * 0.5, i as f64 * 0.5));
                } else {
                    i += 1;
                }
            }
        }
        out
    }

    proptest! {
        #[test]
        fn merge_matches_grid_union(rows in prop::collection::vec((0u8..3, 0u8..100, 1u8..40), 0..12)) {
            let labels = ["fnsz", "absz", "mysz"];
            let text: String = rows
                .iter()
                .map(|&(l, a, len)| format!("{},{},{}\n", a as f64 * 0.5, (a as f64 + len as f64) * 0.5, labels[l as usize]))
                .collect();
            let ev = parse_annotations(&text, 1000.0).unwrap();
            prop_assert!(ev.iter().all(|e| e.label == SeizureClass::Fnsz || e.label == SeizureClass::Absz));

            let mut expected: Vec<(SeizureClass, f64, f64)> = grid_union(&rows)
                .into_iter()
                .filter(|r| r.0 < 2)
                .map(|(l, a, b)| (if l == 0 { SeizureClass::Fnsz } else { SeizureClass::Absz }, a, b))
                .collect();
            expected.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
            prop_assert_eq!(spans(&ev), expected);
        }
    }
}
