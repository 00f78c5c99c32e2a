use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::OnceLock;

use seizure_cli::commands::load_features;
use seizure_core::features::{encode_features, feature_index};
use seizure_core::preprocess::{encode_archive, SegmentTensor};
use seizure_core::SeizureClass;
use tempfile::TempDir;

fn seizure(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seizure")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = seizure(args);
    assert!(out.status.success(), "seizure {args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    seizure(args).status.code().expect("exit code")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const QUICK: &str = "[gbdt]\nnum_rounds = 20\nlearning_rate = 0.2\nmin_samples_leaf = 5\n";

/// Small seven-class corpus (2 patients, 2 events each) taken through
/// preprocess and features once for the whole file.
struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let f = Fixture { dir: tempfile::tempdir().unwrap() };
        std::fs::write(f.path("quick.toml"), QUICK).unwrap();
        ok(&["--seed", "3", "--out", s(&f.path("corpus")), "gen-synthetic", "--classes", "7class", "--patients", "2", "--events", "2"]);
        ok(&["--out", s(&f.path("segments.segt")), "preprocess", s(&f.path("corpus"))]);
        ok(&["--out", s(&f.path("features.feat")), "features", s(&f.path("segments.segt"))]);
        f
    })
}

fn manifest_segments(corpus: &Path) -> usize {
    let text = std::fs::read_to_string(corpus.join("manifest.json")).unwrap();
    let files: serde_json::Value = serde_json::from_str(&text).unwrap();
    files
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|f| f["events"].as_array().unwrap())
        .map(|e| ((e["stop"].as_f64().unwrap() - e["start"].as_f64().unwrap()) / 2.0 + 1e-9).floor() as usize)
        .sum()
}

#[test]
fn gen_synthetic_counts_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let stdout = ok(&["--seed", "1", "--out", s(&a), "gen-synthetic"]);
    assert!(stdout.contains("wrote 20 recording(s) with 60 event(s)"), "{stdout}");
    ok(&["--seed", "1", "--out", s(&b), "gen-synthetic"]);
    let files: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(a.join("manifest.json")).unwrap()).unwrap();
    let files = files.as_array().unwrap();
    assert_eq!(files.len(), 20);
    for f in files {
        let edf = PathBuf::from(f["edf"].as_str().unwrap());
        let twin = b.join(edf.strip_prefix(&a).unwrap());
        assert_eq!(std::fs::read(&edf).unwrap(), std::fs::read(&twin).unwrap(), "{}", edf.display());
    }
    assert_eq!(code(&["--out", s(&a), "gen-synthetic", "--classes", "XXSZ"]), 1);
    assert_eq!(code(&["--out", s(&a), "gen-synthetic", "--confound", "-1"]), 1);
}

#[test]
fn preprocess_matches_generated_events() {
    let f = fixture();
    let expected = manifest_segments(&f.path("corpus"));
    let bytes = std::fs::read(f.path("segments.segt")).unwrap();
    let segments = seizure_core::preprocess::decode_archive(&bytes).unwrap();
    assert_eq!(segments.len(), expected);
    assert!(segments.iter().all(|s| s.n_samples == 500 && s.n_channels() == 20));
}

#[test]
fn preprocess_skips_bad_files_and_dropped_labels() {
    let f = fixture();
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let text = std::fs::read_to_string(f.path("corpus/manifest.json")).unwrap();
    let files: serde_json::Value = serde_json::from_str(&text).unwrap();
    let first = &files[0];
    let edf = PathBuf::from(first["edf"].as_str().unwrap());
    let csv = PathBuf::from(first["annotations"].as_str().unwrap());
    let label = first["label"].as_str().unwrap().to_ascii_lowercase();

    std::fs::copy(&edf, root.join("a_s001_t000.edf")).unwrap();
    std::fs::copy(&csv, root.join("a_s001_t000.csv")).unwrap();
    std::fs::copy(&edf, root.join("b_s001_t000.edf")).unwrap();
    let relabelled = std::fs::read_to_string(&csv).unwrap().replace(&format!(",{label},"), ",mysz,");
    std::fs::write(root.join("b_s001_t000.csv"), relabelled).unwrap();
    std::fs::write(root.join("c_s001_t000.edf"), b"not an edf file").unwrap();
    std::fs::write(root.join("c_s001_t000.csv"), "0,4,fnsz\n").unwrap();

    let out = root.join("out.segt");
    let stdout = ok(&["--out", s(&out), "preprocess", s(root)]);
    assert!(stdout.contains("3 file(s), 1 skipped"), "{stdout}");
    let segments = seizure_core::preprocess::decode_archive(&std::fs::read(&out).unwrap()).unwrap();
    let wanted: usize = first["events"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| ((e["stop"].as_f64().unwrap() - e["start"].as_f64().unwrap()) / 2.0 + 1e-9).floor() as usize)
        .sum();
    assert_eq!(segments.len(), wanted);
    assert!(segments.iter().all(|s| s.patient_id == first["patient_id"].as_str().unwrap()));
}

#[test]
fn preprocess_without_segments_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.segt");
    assert_eq!(code(&["--out", s(&out), "preprocess", s(dir.path())]), 2);
    assert_eq!(code(&["--out", s(&out), "preprocess", s(&dir.path().join("missing"))]), 2);
    assert_eq!(code(&["preprocess"]), 1);
}

#[test]
fn features_are_reproducible_and_complete() {
    let f = fixture();
    let dir = tempfile::tempdir().unwrap();
    let again = dir.path().join("again.feat");
    let csv = dir.path().join("features.csv");
    ok(&["--out", s(&again), "features", s(&f.path("segments.segt")), "--csv", s(&csv)]);
    assert_eq!(std::fs::read(&again).unwrap(), std::fs::read(f.path("features.feat")).unwrap());

    let rows = load_features(&again).unwrap();
    let n_segments = seizure_core::preprocess::decode_archive(&std::fs::read(f.path("segments.segt")).unwrap())
        .unwrap()
        .len();
    assert_eq!(rows.len(), n_segments);
    assert!(rows.iter().all(|r| r.values.len() == 600 && r.values.iter().all(|v| v.is_finite())));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), rows.len() + 1);
    assert!(text.lines().next().unwrap().contains("FP1-F7_D1_MAV"));
}

#[test]
fn zero_segment_gives_zero_row() {
    let dir = tempfile::tempdir().unwrap();
    let archive = dir.path().join("zero.segt");
    let seg = SegmentTensor {
        data: vec![0.0; 20 * 500],
        n_samples: 500,
        label: SeizureClass::Gnsz,
        patient_id: "z".into(),
        event_id: 0,
        segment_index: 0,
    };
    std::fs::write(&archive, encode_archive(&[seg], 20, 500)).unwrap();
    let out = dir.path().join("zero.feat");
    ok(&["--out", s(&out), "features", s(&archive)]);
    let rows = load_features(&out).unwrap();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].values.iter().all(|&v| v == 0.0));
}

#[test]
fn corrupt_archive_reports_offset() {
    let f = fixture();
    let dir = tempfile::tempdir().unwrap();
    let bytes = std::fs::read(f.path("segments.segt")).unwrap();
    let cut = dir.path().join("cut.segt");
    std::fs::write(&cut, &bytes[..bytes.len() - 7]).unwrap();
    let out = seizure(&["--out", s(&dir.path().join("x.feat")), "features", s(&cut)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("corrupt file at byte"));

    let garbage = dir.path().join("garbage.segt");
    std::fs::write(&garbage, b"NOPE").unwrap();
    assert_eq!(code(&["--out", s(&dir.path().join("y.feat")), "features", s(&garbage)]), 2);
}

fn report(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn evaluate_writes_deterministic_reports() {
    let f = fixture();
    let dir = tempfile::tempdir().unwrap();
    let cfg = f.path("quick.toml");
    let feat = f.path("features.feat");
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        ok(&["--config", s(&cfg), "--problem", "5class", "--out", s(out), "evaluate", s(&feat)]);
    }
    assert_eq!(std::fs::read(a.join("report.json")).unwrap(), std::fs::read(b.join("report.json")).unwrap());
    let r = report(&a);
    assert_eq!(r["folds"].as_array().unwrap().len(), 5);
    assert!(r["mean"]["weighted_f1"].as_f64().unwrap() >= 0.9);
    let text = std::fs::read_to_string(a.join("report.txt")).unwrap();
    assert!(text.contains("SPSZ") && !text.contains("FNSZ"));
    let csv = std::fs::read_to_string(a.join("per_class_f1.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6);

    // Two patients per class cannot fill three patient folds.
    let c = dir.path().join("c");
    let out = seizure(&["--config", s(&cfg), "--problem", "5class", "--scheme", "patient", "--out", s(&c), "evaluate", s(&feat)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("patient"));
}

#[test]
fn config_file_and_flag_overrides() {
    let f = fixture();
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, format!("[pipeline]\nseed = 5\nfolds = 4\nproblem = \"5class\"\n{QUICK}")).unwrap();
    let out = dir.path().join("r");
    ok(&["--config", s(&cfg), "--seed", "9", "--out", s(&out), "evaluate", s(&f.path("features.feat"))]);
    let r = report(&out);
    assert_eq!(r["seed"], 9);
    assert_eq!(r["folds"].as_array().unwrap().len(), 4);
    let out = dir.path().join("r3");
    ok(&["--config", s(&cfg), "--out", s(&out), "evaluate", s(&f.path("features.feat")), "--folds", "3"]);
    assert_eq!(report(&out)["folds"].as_array().unwrap().len(), 3);
    assert_eq!(report(&out)["seed"], 5);
}

#[test]
fn analyze_reports_every_feature() {
    let f = fixture();
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("analysis.json");
    ok(&["--config", s(&f.path("quick.toml")), "--problem", "5class", "--out", s(&out), "analyze", s(&f.path("features.feat"))]);
    let a: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(a["f_values"].as_array().unwrap().len(), 600);
    assert_eq!(a["f_summary"].as_array().unwrap().len(), 30);
    assert_eq!(a["gain_importance"].as_array().unwrap().len(), 600);

    let rows = load_features(&f.path("features.feat")).unwrap();
    let single: Vec<_> = rows.into_iter().filter(|r| r.label == SeizureClass::Cpsz).collect();
    let one = dir.path().join("one.feat");
    std::fs::write(&one, encode_features(&single)).unwrap();
    assert_eq!(code(&["--config", s(&f.path("quick.toml")), "--out", s(&out), "analyze", s(&one)]), 2);
}

#[test]
fn train_then_predict() {
    let f = fixture();
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.gbdt");
    let json = dir.path().join("m.json");
    let feat = f.path("features.feat");
    ok(&["--config", s(&f.path("quick.toml")), "--problem", "5class", "--out", s(&model), "train", s(&feat), "--json", s(&json)]);
    let dump: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(dump["classes"].as_array().unwrap().len(), 5);

    let preds = dir.path().join("p.csv");
    let stdout = ok(&["--out", s(&preds), "predict", s(&model), s(&feat)]);
    let n = load_features(&feat).unwrap().len();
    let text = std::fs::read_to_string(&preds).unwrap();
    assert_eq!(text.lines().count(), n + 1);
    assert_eq!(text.lines().next().unwrap(), "row,patient_id,label,predicted,p_SPSZ,p_CPSZ,p_ABSZ,p_TNSZ,p_TCSZ");
    // Only the five problem classes are scored.
    let words: Vec<&str> = stdout.split_whitespace().collect();
    assert_eq!(words[0], n.to_string());
    let (correct, scored): (usize, usize) = (words[2].parse().unwrap(), words[4].parse().unwrap());
    assert!(scored < n && correct as f64 >= 0.95 * scored as f64, "{stdout}");

    let broken = dir.path().join("broken.gbdt");
    let bytes = std::fs::read(&model).unwrap();
    std::fs::write(&broken, &bytes[..bytes.len() / 2]).unwrap();
    assert_eq!(code(&["--out", s(&preds), "predict", s(&broken), s(&feat)]), 2);
}

#[test]
fn dump_filters_lists_both_stages() {
    let stdout = ok(&["dump-filters"]);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    let h0o: Vec<f64> = v["h0o"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(h0o, vec![-0.05, 0.25, 0.6, 0.25, -0.05]);
    assert_eq!(v["h0a"].as_array().unwrap().len(), 10);
    assert_eq!(v.as_object().unwrap().len(), 12);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&[]), 1);
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["--version"]), 0);
    assert_eq!(code(&["evaluate", "--bogus", "x"]), 1);
    assert_eq!(code(&["--problem", "9class", "dump-filters"]), 1);
    assert_eq!(code(&["--jobs", "0", "dump-filters"]), 1);

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[pipeline]\nunknown = 1\n").unwrap();
    assert_eq!(code(&["--config", s(&bad), "dump-filters"]), 1);
    std::fs::write(&bad, "[pipeline]\nfolds = 1\n").unwrap();
    assert_eq!(code(&["--config", s(&bad), "dump-filters"]), 1);
    std::fs::write(&bad, "[gbdt]\nlearning_rate = -1.0\n").unwrap();
    assert_eq!(code(&["--config", s(&bad), "dump-filters"]), 1);
    assert_eq!(code(&["--config", s(&dir.path().join("none.toml")), "dump-filters"]), 2);

    assert_eq!(code(&["--out", s(&dir.path().join("r")), "evaluate", s(&dir.path().join("missing.feat"))]), 2);
}

/// Welch's t between two groups.
fn welch_t(a: &[f64], b: &[f64]) -> f64 {
    let mean = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
    let var = |x: &[f64], m: f64| x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (x.len() - 1) as f64;
    let (ma, mb) = (mean(a), mean(b));
    (ma - mb) / (var(a, ma) / a.len() as f64 + var(b, mb) / b.len() as f64).sqrt()
}

#[test]
fn band_energy_separates_neighbouring_classes() {
    // SPSZ sits at 11 Hz (level 4, 7.8 to 15.6 Hz at 250 Hz), CPSZ at 22 Hz
    // (level 3).
    let rows = load_features(&fixture().path("features.feat")).unwrap();
    let band4 = |class: SeizureClass| -> Vec<f64> {
        rows.iter()
            .filter(|r| r.label == class)
            .map(|r| (0..20).map(|ch| r.values[feature_index(ch, 3, 1, 4)]).sum::<f64>() / 20.0)
            .collect()
    };
    let t = welch_t(&band4(SeizureClass::Spsz), &band4(SeizureClass::Cpsz));
    assert!(t > 2.0, "welch t {t}");
}
