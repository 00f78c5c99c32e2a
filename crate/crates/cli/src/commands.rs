//! Pipeline stages. Each reads its input files and writes its outputs, so
//! stages can be run and tested independently.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use seizure_core::dtcwt::FilterBank;
use seizure_core::edf::{parse_annotations, parse_annotations_as, read_edf, SeizureEvent};
use seizure_core::evaluation::{run_experiment_k, EvaluationReport};
use seizure_core::features::{
    anova_f_values, channel_average, decode_features, encode_features, extract_all, feature_names, per_channel,
    summary_names, write_csv, FeatureVector, N_STATS,
};
use seizure_core::gbdt::{self, decode_model, encode_model, ImportanceKind, SearchSpace, TrainedModel};
use seizure_core::preprocess::{decode_archive, encode_archive, preprocess_recording, SegmentTensor, N_CHANNELS};
use seizure_core::SeizureClass;
use serde::Serialize;
use walkdir::WalkDir;

use crate::config::Config;
use crate::error::CliError;
use crate::synth::{self, SynthFile, SynthSpec};

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(CliError::io(path))
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(CliError::io(parent))?;
    }
    std::fs::write(path, bytes).map_err(CliError::io(path))
}

fn to_json<T: Serialize>(v: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(v).map_err(|e| CliError::Internal(e.to_string()))
}

pub fn load_features(path: &Path) -> Result<Vec<FeatureVector>, CliError> {
    decode_features(&read(path)?).map_err(|source| CliError::Format {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_segments(path: &Path) -> Result<Vec<SegmentTensor>, CliError> {
    decode_archive(&read(path)?).map_err(|source| CliError::Format {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ClassCounts {
    pub events: usize,
    pub patients: BTreeSet<String>,
    /// Summed event duration in seconds.
    pub seconds: f64,
    pub segments: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PreprocessSummary {
    pub files: usize,
    pub failed: Vec<(PathBuf, String)>,
    pub per_class: BTreeMap<SeizureClass, ClassCounts>,
}

impl PreprocessSummary {
    pub fn total_segments(&self) -> usize {
        self.per_class.values().map(|c| c.segments).sum()
    }

    pub fn table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<6} {:>7} {:>9} {:>10} {:>9}", "class", "events", "patients", "seconds", "segments");
        for (class, c) in &self.per_class {
            let _ = writeln!(
                s,
                "{:<6} {:>7} {:>9} {:>10.1} {:>9}",
                class.as_str(),
                c.events,
                c.patients.len(),
                c.seconds,
                c.segments
            );
        }
        let _ = writeln!(s, "{} file(s), {} skipped, {} segment(s)", self.files, self.failed.len(), self.total_segments());
        s
    }
}

/// Annotation file next to `edf`: `.csv`, then `.tse`, then `.txt`.
fn annotation_path(edf: &Path) -> Option<PathBuf> {
    ["csv", "tse", "txt"].iter().map(|ext| edf.with_extension(ext)).find(|p| p.is_file())
}

/// Patient id from the EDF header, or the file-name prefix before the first
/// underscore when the header leaves it blank.
fn patient_of(header_id: &str, edf: &Path) -> String {
    if !header_id.is_empty() && header_id != "X" {
        return header_id.to_string();
    }
    let stem = edf.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    stem.split('_').next().unwrap_or_default().to_string()
}

struct FileResult {
    patient: String,
    events: Vec<SeizureEvent>,
    segments: Vec<SegmentTensor>,
}

fn process_file(cfg: &Config, edf: &Path) -> Result<FileResult, String> {
    let rec = read_edf(edf).map_err(|e| e.to_string())?;
    let ann = annotation_path(edf).ok_or("no annotation file (.csv, .tse or .txt) beside it")?;
    let text = std::fs::read_to_string(&ann).map_err(|e| format!("{}: {e}", ann.display()))?;
    let parsed = match cfg.pipeline.annotation_format.format() {
        Some(f) => parse_annotations_as(&text, rec.duration, f),
        None => parse_annotations(&text, rec.duration),
    }
    .map_err(|e| format!("{}: {e}", ann.display()))?;
    let patient = patient_of(&rec.patient_id, edf);
    let events: Vec<SeizureEvent> = parsed.into_iter().map(|e| e.with_source(&patient, edf)).collect();
    let segments = if events.is_empty() {
        Vec::new()
    } else {
        preprocess_recording(&rec, &events, cfg.pipeline.target_rate, cfg.window(), 0).map_err(|e| e.to_string())?
    };
    Ok(FileResult { patient, events, segments })
}

/// Every `.edf` under `root`, sorted by path.
pub fn find_recordings(root: &Path) -> Result<Vec<PathBuf>, CliError> {
    if !root.is_dir() {
        return Err(CliError::Data(format!("{} is not a directory", root.display())));
    }
    let mut files = Vec::new();
    for entry in WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(|e| CliError::Data(e.to_string()))?;
        let is_edf = entry.path().extension().is_some_and(|x| x.eq_ignore_ascii_case("edf"));
        if entry.file_type().is_file() && is_edf {
            files.push(entry.into_path());
        }
    }
    Ok(files)
}

/// Segment every recording under `root`. Files that fail are logged and
/// skipped. Event ids are assigned in file order.
pub fn preprocess_corpus(cfg: &Config, root: &Path) -> Result<(Vec<SegmentTensor>, PreprocessSummary), CliError> {
    let files = find_recordings(root)?;
    let results: Vec<Result<FileResult, String>> = files.par_iter().map(|f| process_file(cfg, f)).collect();

    let mut summary = PreprocessSummary {
        files: files.len(),
        ..Default::default()
    };
    let mut segments = Vec::new();
    let mut next_event = 0u32;
    for (path, result) in files.iter().zip(results) {
        let r = match result {
            Ok(r) => r,
            Err(message) => {
                log::warn!("skipping {}: {message}", path.display());
                summary.failed.push((path.clone(), message));
                continue;
            }
        };
        for e in &r.events {
            let c = summary.per_class.entry(e.label).or_default();
            c.events += 1;
            c.seconds += e.duration();
            c.patients.insert(r.patient.clone());
        }
        for mut s in r.segments {
            summary.per_class.entry(s.label).or_default().segments += 1;
            s.event_id += next_event;
            segments.push(s);
        }
        next_event += r.events.len() as u32;
    }
    if segments.is_empty() {
        return Err(CliError::NoSegmentsProduced(root.to_path_buf()));
    }
    Ok((segments, summary))
}

pub fn cmd_preprocess(cfg: &Config, root: &Path, out: &Path) -> Result<PreprocessSummary, CliError> {
    let (segments, summary) = preprocess_corpus(cfg, root)?;
    write(out, encode_archive(&segments, N_CHANNELS, cfg.window()))?;
    Ok(summary)
}

/// Decomposition depth implied by a feature row length.
fn levels_of(n_cols: usize) -> Result<usize, CliError> {
    let per = n_cols / N_CHANNELS;
    if n_cols == 0 || per * N_CHANNELS != n_cols || !per.is_multiple_of(N_STATS) || per / N_STATS < 2 {
        return Err(CliError::Data(format!("{n_cols} feature columns do not match {N_CHANNELS} channels")));
    }
    Ok(per / N_STATS - 1)
}

pub fn cmd_features(cfg: &Config, archive: &Path, out: &Path, csv: Option<&Path>) -> Result<usize, CliError> {
    let segments = load_segments(archive)?;
    let levels = cfg.pipeline.dtcwt_levels;
    let rows = extract_all(&segments, levels).map_err(|e| CliError::Data(format!("{}: {e}", archive.display())))?;
    write(out, encode_features(&rows))?;
    if let Some(csv) = csv {
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows, &feature_names(levels)).map_err(CliError::io(csv))?;
        write(csv, buf)?;
    }
    Ok(rows.len())
}

pub fn cmd_evaluate(cfg: &Config, features: &Path, out_dir: &Path) -> Result<EvaluationReport, CliError> {
    let rows = load_features(features)?;
    let p = &cfg.pipeline;
    let report = run_experiment_k(&rows, p.problem, p.scheme, cfg.folds(), &cfg.gbdt, p.seed)?;
    write(&out_dir.join("report.json"), report.to_json())?;
    write(&out_dir.join("report.txt"), report.to_text())?;
    write(&out_dir.join("per_class_f1.csv"), report.per_class_csv())?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedValue {
    pub name: String,
    pub value: f64,
}

fn named(names: &[String], values: &[f64]) -> Vec<NamedValue> {
    names.iter().zip(values).map(|(n, &v)| NamedValue { name: n.clone(), value: v }).collect()
}

/// ANOVA and model importance, per feature and averaged over channels.
/// Infinite F-values (no within-class spread) appear as `null` in JSON.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Analysis {
    pub classes: Vec<SeizureClass>,
    pub n_rows: usize,
    pub f_values: Vec<NamedValue>,
    pub f_summary: Vec<NamedValue>,
    pub split_importance: Vec<NamedValue>,
    pub split_summary: Vec<NamedValue>,
    pub gain_importance: Vec<NamedValue>,
    pub gain_summary: Vec<NamedValue>,
}

impl Analysis {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} rows, classes {:?}", self.n_rows, self.classes.iter().map(|c| c.as_str()).collect::<Vec<_>>());
        let _ = writeln!(s, "{:<10} {:>12} {:>10} {:>12}", "feature", "mean F", "splits", "gain");
        for i in 0..self.f_summary.len() {
            let _ = writeln!(
                s,
                "{:<10} {:>12.3} {:>10.2} {:>12.3}",
                self.f_summary[i].name, self.f_summary[i].value, self.split_summary[i].value, self.gain_summary[i].value
            );
        }
        s
    }
}

fn problem_rows(cfg: &Config, rows: Vec<FeatureVector>) -> Vec<FeatureVector> {
    let wanted = cfg.pipeline.problem.classes();
    rows.into_iter().filter(|r| wanted.contains(&r.label)).collect()
}

pub fn cmd_analyze(cfg: &Config, features: &Path, out: &Path) -> Result<Analysis, CliError> {
    let rows = problem_rows(cfg, load_features(features)?);
    let n_cols = rows.first().map_or(0, |r| r.values.len());
    let levels = levels_of(n_cols)?;
    let x: Vec<&[f64]> = rows.iter().map(|r| r.values.as_slice()).collect();
    let labels: Vec<SeizureClass> = rows.iter().map(|r| r.label).collect();
    let f = anova_f_values(&x, &labels)?;

    let y: Vec<usize> = labels.iter().map(|c| c.code() as usize).collect();
    let model = gbdt::fit(&x, &y, &cfg.gbdt)?;
    let split = model.feature_importance(ImportanceKind::Split);
    let gain = model.feature_importance(ImportanceKind::Gain);

    let names = feature_names(levels);
    let summary = summary_names(levels);
    let per = per_channel(levels);
    let classes: BTreeSet<SeizureClass> = labels.iter().copied().collect();
    let analysis = Analysis {
        classes: classes.into_iter().collect(),
        n_rows: rows.len(),
        f_summary: named(&summary, &channel_average(&f, per)),
        f_values: named(&names, &f),
        split_summary: named(&summary, &channel_average(&split, per)),
        split_importance: named(&names, &split),
        gain_summary: named(&summary, &channel_average(&gain, per)),
        gain_importance: named(&names, &gain),
    };
    write(out, to_json(&analysis)?)?;
    Ok(analysis)
}

pub fn cmd_train(
    cfg: &Config,
    features: &Path,
    out: &Path,
    search_budget: usize,
    json: Option<&Path>,
) -> Result<TrainedModel, CliError> {
    let rows = problem_rows(cfg, load_features(features)?);
    let x: Vec<&[f64]> = rows.iter().map(|r| r.values.as_slice()).collect();
    let y: Vec<usize> = rows.iter().map(|r| r.label.code() as usize).collect();
    let mut gbdt_cfg = cfg.gbdt.clone();
    if search_budget > 0 {
        let space = SearchSpace::default();
        let result = gbdt::random_search(&x, &y, &gbdt_cfg, &space, search_budget, 0.2, cfg.pipeline.seed)?;
        log::info!("search: best validation weighted F1 {:.4}", result.best_f1);
        gbdt_cfg = result.best;
    }
    let model = gbdt::fit(&x, &y, &gbdt_cfg)?;
    write(out, encode_model(&model))?;
    if let Some(json) = json {
        write(json, model.to_json())?;
    }
    Ok(model)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictSummary {
    pub rows: usize,
    /// Rows whose true label is one of the model's classes.
    pub scored: usize,
    pub correct: usize,
}

pub fn cmd_predict(model: &Path, features: &Path, out: &Path) -> Result<PredictSummary, CliError> {
    let model = decode_model(&read(model)?).map_err(|source| CliError::Format {
        path: model.to_path_buf(),
        source,
    })?;
    let class_of = |code: usize| {
        u8::try_from(code)
            .ok()
            .and_then(SeizureClass::from_code)
            .ok_or_else(|| CliError::Data(format!("model class {code} is not a seizure class")))
    };
    let classes = model.classes.iter().map(|&c| class_of(c)).collect::<Result<Vec<_>, _>>()?;
    let rows = load_features(features)?;

    let mut csv = String::from("row,patient_id,label,predicted");
    for c in &classes {
        let _ = write!(csv, ",p_{}", c.as_str());
    }
    csv.push('\n');
    let mut summary = PredictSummary { rows: rows.len(), scored: 0, correct: 0 };
    for (i, r) in rows.iter().enumerate() {
        let p = model.predict_proba(&r.values)?;
        let predicted = class_of(model.predict(&r.values)?)?;
        if classes.contains(&r.label) {
            summary.scored += 1;
            summary.correct += usize::from(predicted == r.label);
        }
        let _ = write!(csv, "{i},{},{},{}", r.patient_id, r.label, predicted);
        for v in p {
            let _ = write!(csv, ",{v}");
        }
        csv.push('\n');
    }
    write(out, csv)?;
    Ok(summary)
}

pub fn cmd_gen_synthetic(spec: &SynthSpec, out: &Path) -> Result<Vec<SynthFile>, CliError> {
    let files = synth::generate(spec, out)?;
    write(&out.join("manifest.json"), to_json(&files)?)?;
    Ok(files)
}

pub fn parse_classes(s: &str) -> Result<Vec<SeizureClass>, CliError> {
    if let Ok(p) = s.parse::<seizure_core::evaluation::Problem>() {
        return Ok(p.classes().to_vec());
    }
    s.split(',')
        .map(|c| c.trim().parse::<SeizureClass>().map_err(|e| CliError::Usage(e.to_string())))
        .collect()
}

pub fn filter_json() -> Result<String, CliError> {
    let bank = FilterBank::default();
    let map: BTreeMap<&str, &[f64]> = bank.named().into_iter().collect();
    to_json(&map)
}
