/// Statistic names in vector order.
pub const STAT_NAMES: [&str; 6] = ["MAV", "AVP", "SD", "RMAV", "SKEW", "KURT"];
pub const N_STATS: usize = STAT_NAMES.len();

/// Six descriptors of one sub-band `y`, using `z_next` for the ratio:
///
/// * MAV: mean of `|y|`
/// * AVP: root of the mean of `y^2`
/// * SD: population standard deviation
/// * RMAV: `sum |y| / sum |z_next|`, 0 when the denominator is 0
/// * SKEW, KURT: third and fourth standardised central moments, both 0 when
///   the standard deviation vanishes
///
/// A standard deviation below `1e-12 * max |y|` is treated as 0, so
/// constant arrays are flat regardless of rounding in the mean.
pub fn subband_stats(y: &[f64], z_next: &[f64]) -> [f64; 6] {
    assert!(!y.is_empty(), "empty sub-band");
    let n = y.len() as f64;
    let abs_sum: f64 = y.iter().map(|v| v.abs()).sum();
    let mav = abs_sum / n;
    let avp = (y.iter().map(|v| v * v).sum::<f64>() / n).sqrt();

    let mean = y.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in y {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let (m2, m3, m4) = (m2 / n, m3 / n, m4 / n);
    let mut sd = m2.sqrt();
    let peak = y.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let (skew, kurt) = if sd <= 1e-12 * peak || sd == 0.0 {
        sd = 0.0;
        (0.0, 0.0)
    } else {
        (m3 / (m2 * sd), m4 / (m2 * m2))
    };

    let denom: f64 = z_next.iter().map(|v| v.abs()).sum();
    let rmav = if denom == 0.0 { 0.0 } else { abs_sum / denom };
    [mav, avp, sd, rmav, skew, kurt]
}
