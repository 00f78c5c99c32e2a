#![allow(clippy::needless_range_loop)]

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use seizure_core::dtcwt::{self, FilterBank};
use seizure_core::features::{
    anova_f_values, channel_average, decode_features, encode_features, extract_all, extract_features, feature_index,
    feature_names, subband_stats, summary_names, write_csv, FeatureVector,
};
use seizure_core::preprocess::SegmentTensor;
use seizure_core::SeizureClass;

/// Straight-line textbook formulas, kept deliberately separate from the
/// library code.
fn naive_stats(y: &[f64], z: &[f64]) -> [f64; 6] {
    let m = y.len() as f64;
    let mut abs_sum = 0.0;
    let mut sq_sum = 0.0;
    let mut sum = 0.0;
    for i in 0..y.len() {
        abs_sum += y[i].abs();
        sq_sum += y[i] * y[i];
        sum += y[i];
    }
    let mu = abs_sum / m;
    let lambda = (sq_sum / m).sqrt();
    let mean = sum / m;
    let mut var = 0.0;
    for i in 0..y.len() {
        var += (y[i] - mean) * (y[i] - mean);
    }
    var /= m;
    let sigma = var.sqrt();
    let mut skew = 0.0;
    let mut kurt = 0.0;
    for i in 0..y.len() {
        skew += ((y[i] - mean) / sigma).powi(3);
        kurt += ((y[i] - mean) / sigma).powi(4);
    }
    skew /= m;
    kurt /= m;
    let mut z_abs = 0.0;
    for i in 0..z.len() {
        z_abs += z[i].abs();
    }
    [mu, lambda, sigma, abs_sum / z_abs, skew, kurt]
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

#[test]
fn statistics_match_naive_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..100 {
        let n = rng.random_range(2..300);
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..50.0)).collect();
        let z: Vec<f64> = (0..n / 2 + 1).map(|_| rng.random_range(0.0..50.0)).collect();
        let got = subband_stats(&y, &z);
        let want = naive_stats(&y, &z);
        for k in 0..6 {
            // Skewness of a symmetric sample is 0 in exact arithmetic; both
            // sides then hold rounding residue, compared with an absolute floor.
            let ok = rel_close(got[k], want[k], 1e-12) || (got[k] - want[k]).abs() < 1e-14;
            assert!(ok, "stat {k}: {} vs {}", got[k], want[k]);
        }
    }
}

#[test]
fn degenerate_conventions() {
    let s = subband_stats(&[3.7; 33], &[1.0; 4]);
    assert_eq!((s[2], s[4], s[5]), (0.0, 0.0, 0.0));
    let s = subband_stats(&[1.0, 2.0, 5.0], &[0.0; 4]);
    assert_eq!(s[3], 0.0);
}

#[test]
fn gaussian_moments() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let y: Vec<f64> = (0..100_000).map(|_| StandardNormal.sample(&mut rng)).collect();
    let s = subband_stats(&y, &y);
    assert!(s[4].abs() < 0.05, "skew {}", s[4]);
    assert!((s[5] - 3.0).abs() < 0.1, "kurt {}", s[5]);
    assert_eq!(s[3], 1.0);
}

fn segment(mut f: impl FnMut(usize, usize) -> f32) -> SegmentTensor {
    SegmentTensor {
        data: (0..20).flat_map(|c| (0..500).map(move |i| (c, i))).map(|(c, i)| f(c, i)).collect(),
        n_samples: 500,
        label: SeizureClass::Absz,
        patient_id: "p7".into(),
        event_id: 4,
        segment_index: 2,
    }
}

#[test]
fn zero_segment_has_zero_features() {
    let fv = extract_features(&segment(|_, _| 0.0), 4, &FilterBank::default()).unwrap();
    assert_eq!(fv.values, vec![0.0; 600]);
    assert_eq!(fv.provenance, Some((4, 2)));
}

#[test]
fn slow_sine_lands_in_the_deepest_bands() {
    let sine = |c: usize, i: usize| if c == 0 { (2.0 * std::f64::consts::PI * 4.0 * i as f64 / 250.0).sin() as f32 } else { 0.0 };
    let fv = extract_features(&segment(sine), 4, &FilterBank::default()).unwrap();
    assert!(fv.values[30..].iter().all(|&v| v == 0.0));
    for band in 0..5 {
        assert!(fv.values[feature_index(0, band, 0, 4)] > 0.0, "band {band}");
    }
    let lambda_sq: Vec<f64> = (0..5).map(|b| fv.values[feature_index(0, b, 1, 4)].powi(2)).collect();
    let low = lambda_sq[3] + lambda_sq[4];
    assert!(low / lambda_sq.iter().sum::<f64>() > 0.9, "{lambda_sq:?}");
}

#[test]
fn index_formula_places_every_statistic() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let seg = segment(|_, _| rng.random_range(-50.0f32..50.0));
    let bank = FilterBank::default();
    let fv = extract_features(&seg, 4, &bank).unwrap();
    assert_eq!(fv.values.len(), 600);
    assert!(fv.values.iter().all(|v| v.is_finite()));
    for ch in 0..20 {
        let x: Vec<f64> = seg.channel(ch).iter().map(|&v| v as f64).collect();
        let bands = dtcwt::forward(&x, 4, &bank).unwrap().magnitudes();
        for band in 0..5 {
            let z = if band < 4 { &bands[band + 1] } else { &bands[3] };
            let s = subband_stats(&bands[band], z);
            for stat in 0..6 {
                assert_eq!(fv.values[ch * 30 + band * 6 + stat], s[stat]);
                assert_eq!(feature_index(ch, band, stat, 4), ch * 30 + band * 6 + stat);
            }
        }
    }
    let names = feature_names(4);
    assert_eq!(names.len(), 600);
    assert_eq!(names[0], "FP1-F7_D1_MAV");
    assert_eq!(names[30 + 4 * 6 + 3], "F7-T3_A4_RMAV");
    assert_eq!(summary_names(4).len(), 30);
}

#[test]
fn parallel_extraction_keeps_order() {
    let segs: Vec<SegmentTensor> = (0..12)
        .map(|k| {
            let mut s = segment(move |c, i| ((i * (k + 1) + c) % 17) as f32);
            s.segment_index = k as u32;
            s
        })
        .collect();
    let all = extract_all(&segs, 4).unwrap();
    let bank = FilterBank::default();
    for (s, f) in segs.iter().zip(&all) {
        assert_eq!(f, &extract_features(s, 4, &bank).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn scale_equivariance(c in prop::sample::select(vec![-8.0f32, -0.5, 0.25, 2.0, 16.0]), seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base: Vec<f32> = (0..20 * 500).map(|_| rng.random_range(-10.0f32..10.0)).collect();
        let bank = FilterBank::default();
        let a = extract_features(&segment(|ch, i| base[ch * 500 + i]), 4, &bank).unwrap();
        let b = extract_features(&segment(|ch, i| base[ch * 500 + i] * c), 4, &bank).unwrap();
        for (idx, (x, y)) in a.values.iter().zip(&b.values).enumerate() {
            let expected = if idx % 6 < 3 { x * c.abs() as f64 } else { *x };
            prop_assert!(rel_close(*y, expected, 1e-9), "idx {}: {} vs {}", idx, y, expected);
        }
    }

    #[test]
    fn finite_for_any_finite_input(vals in prop::collection::vec(-1e6f32..1e6, 500), flat in any::<bool>()) {
        let seg = segment(|c, i| if flat && c % 2 == 0 { 3.0 } else { vals[i] * (c as f32 - 9.5) });
        let fv = extract_features(&seg, 4, &FilterBank::default()).unwrap();
        prop_assert_eq!(fv.values.len(), 600);
        prop_assert!(fv.values.iter().all(|v| v.is_finite()));
        for ch in 0..20 {
            for band in 0..5 {
                let base = ch * 30 + band * 6;
                prop_assert!(fv.values[base] >= 0.0 && fv.values[base + 1] >= 0.0 && fv.values[base + 2] >= 0.0);
            }
        }
    }

    #[test]
    fn anova_ignores_row_order(seed in 0u64..500) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 30;
        let labels: Vec<u8> = (0..n).map(|i| (i % 3) as u8).collect();
        let data: Vec<Vec<f64>> = labels.iter().map(|&l| (0..4).map(|_| rng.random_range(0.0..1.0) + l as f64 * 0.2).collect()).collect();
        let rows: Vec<&[f64]> = data.iter().map(Vec::as_slice).collect();
        let f = anova_f_values(&rows, &labels).unwrap();

        let mut order: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            order.swap(i, rng.random_range(0..=i));
        }
        let rows2: Vec<&[f64]> = order.iter().map(|&i| data[i].as_slice()).collect();
        let labels2: Vec<u8> = order.iter().map(|&i| labels[i]).collect();
        let f2 = anova_f_values(&rows2, &labels2).unwrap();
        for (a, b) in f.iter().zip(&f2) {
            prop_assert!(rel_close(*a, *b, 1e-10));
        }

        // Oracle: F from total and within sums of squares.
        for j in 0..4 {
            let grand = data.iter().map(|r| r[j]).sum::<f64>() / n as f64;
            let sst: f64 = data.iter().map(|r| (r[j] - grand).powi(2)).sum();
            let mut ssw = 0.0;
            for g in 0..3u8 {
                let members: Vec<f64> = data.iter().zip(&labels).filter(|(_, &l)| l == g).map(|(r, _)| r[j]).collect();
                let m = members.iter().sum::<f64>() / members.len() as f64;
                ssw += members.iter().map(|v| (v - m).powi(2)).sum::<f64>();
            }
            let expected = ((sst - ssw) / 2.0) / (ssw / (n as f64 - 3.0));
            prop_assert!(rel_close(f[j], expected, 1e-8));
        }
    }
}

#[test]
fn summary_averages_channels() {
    let values: Vec<f64> = (0..600).map(|i| (i % 30) as f64 + (i / 30) as f64).collect();
    let avg = channel_average(&values, 30);
    assert_eq!(avg.len(), 30);
    assert_eq!(avg[0], 9.5);
    assert_eq!(avg[29], 38.5);
}

#[test]
fn feature_file_round_trip() {
    let rows: Vec<FeatureVector> = (0..3)
        .map(|k| FeatureVector {
            values: (0..600).map(|i| (i * (k + 1)) as f64 * 0.125).collect(),
            label: SeizureClass::ALL[k],
            patient_id: format!("pat{k}"),
            provenance: None,
        })
        .collect();
    let bytes = encode_features(&rows);
    assert_eq!(&bytes[..4], b"FEAT");
    assert_eq!(bytes.len(), 4 + 2 + 8 + 4 + 3 * (1 + 2 + 4 + 600 * 8));
    assert_eq!(decode_features(&bytes).unwrap(), rows);
    assert!(decode_features(&bytes[..bytes.len() - 1]).is_err());

    let mut csv = Vec::new();
    write_csv(&mut csv, &rows, &feature_names(4)).unwrap();
    let text = String::from_utf8(csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("label,patient_id,FP1-F7_D1_MAV,"));
    assert!(lines[2].starts_with("GNSZ,pat1,0,0.25,"));
}
