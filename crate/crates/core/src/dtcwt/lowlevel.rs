//! Filtering primitives with half-sample symmetric extension.
//!
//! `coldfilt` and `colifilt` run both trees at once: their output
//! interleaves tree-A and tree-B samples.

/// Half-sample symmetric reflection of index `i` into `0..n`
/// (`..., x1, x0 | x0, x1, ..., x(n-1) | x(n-1), x(n-2), ...`).
pub fn sym(i: isize, n: usize) -> usize {
    let n = n as isize;
    let m = i.rem_euclid(2 * n);
    (if m < n { m } else { 2 * n - 1 - m }) as usize
}

/// `x` extended symmetrically by `left` samples before and `right` after.
pub(crate) fn extend(x: &[f64], left: usize, right: usize) -> Vec<f64> {
    let n = x.len();
    (-(left as isize)..(n + right) as isize).map(|j| x[sym(j, n)]).collect()
}

/// `valid`-mode convolution of `f` over the samples of `ext` at `idx`.
#[inline]
fn conv_at(ext: &[f64], idx: &[usize], f: &[f64], i: usize) -> f64 {
    let last = f.len() - 1;
    f.iter().enumerate().map(|(k, &h)| h * ext[idx[i + last - k]]).sum()
}

/// Filter with an odd-length filter, no decimation. Output length equals
/// input length; the filter is centred on each sample.
pub fn colfilter(x: &[f64], h: &[f64]) -> Vec<f64> {
    debug_assert!(h.len() % 2 == 1);
    let n = x.len();
    let half = (h.len() / 2) as isize;
    (0..n as isize)
        .map(|i| {
            h.iter()
                .enumerate()
                .map(|(k, &c)| c * x[sym(i + half - k as isize, n)])
                .sum()
        })
        .collect()
}

fn phases(h: &[f64]) -> (Vec<f64>, Vec<f64>) {
    (h.iter().step_by(2).copied().collect(), h.iter().skip(1).step_by(2).copied().collect())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Filter with the even-length q-shift pair and decimate by 2.
///
/// Requires `x.len() % 4 == 0`; the output has `x.len() / 2` samples.
pub fn coldfilt(x: &[f64], ha: &[f64], hb: &[f64]) -> Vec<f64> {
    let r = x.len();
    let m = ha.len();
    assert!(r.is_multiple_of(4), "coldfilt needs a length divisible by 4, got {r}");
    assert!(m.is_multiple_of(2) && hb.len() == m);

    let xe = extend(x, m, m);
    let (hao, hae) = phases(ha);
    let (hbo, hbe) = phases(hb);
    let t: Vec<usize> = (5..r + 2 * m - 2).step_by(4).collect();
    let shifted = |d: usize| t.iter().map(|&v| v - d).collect::<Vec<_>>();
    let (t1, t2, t3) = (shifted(1), shifted(2), shifted(3));

    let r2 = r / 2;
    let mut y = vec![0.0; r2];
    let a_first = dot(ha, hb) > 0.0;
    for q in 0..r2 / 2 {
        let a = conv_at(&xe, &t1, &hao, q) + conv_at(&xe, &t3, &hae, q);
        let b = conv_at(&xe, &t, &hbo, q) + conv_at(&xe, &t2, &hbe, q);
        let (even, odd) = if a_first { (a, b) } else { (b, a) };
        y[2 * q] = even;
        y[2 * q + 1] = odd;
    }
    y
}

/// Interpolate by 2 with the even-length q-shift pair.
///
/// Requires an even input length; the output has twice as many samples.
pub fn colifilt(x: &[f64], ha: &[f64], hb: &[f64]) -> Vec<f64> {
    let r = x.len();
    let m = ha.len();
    assert!(r.is_multiple_of(2), "colifilt needs an even length, got {r}");
    assert!(m.is_multiple_of(2) && hb.len() == m);

    let mut y = vec![0.0; 2 * r];
    if x.iter().all(|&v| v == 0.0) {
        return y;
    }
    let m2 = m / 2;
    let xe = extend(x, m2, m2);
    let (hao, hae) = phases(ha);
    let (hbo, hbe) = phases(hb);
    let a_first = dot(ha, hb) > 0.0;
    let pick = |t: &[usize], d: usize| -> (Vec<usize>, Vec<usize>) {
        let ta: Vec<usize> = t.iter().map(|&v| if a_first { v } else { v - 1 } - d).collect();
        let tb: Vec<usize> = t.iter().map(|&v| if a_first { v - 1 } else { v } - d).collect();
        (ta, tb)
    };

    if m2.is_multiple_of(2) {
        let t: Vec<usize> = (3..r + m).step_by(2).collect();
        let (ta, tb) = pick(&t, 0);
        let (ta2, tb2) = pick(&t, 2);
        for (q, s) in (0..2 * r).step_by(4).enumerate() {
            y[s] = conv_at(&xe, &tb2, &hae, q);
            y[s + 1] = conv_at(&xe, &ta2, &hbe, q);
            y[s + 2] = conv_at(&xe, &tb, &hao, q);
            y[s + 3] = conv_at(&xe, &ta, &hbo, q);
        }
    } else {
        let t: Vec<usize> = (2..r + m - 1).step_by(2).collect();
        let (ta, tb) = pick(&t, 0);
        for (q, s) in (0..2 * r).step_by(4).enumerate() {
            y[s] = conv_at(&xe, &tb, &hao, q);
            y[s + 1] = conv_at(&xe, &ta, &hbo, q);
            y[s + 2] = conv_at(&xe, &tb, &hae, q);
            y[s + 3] = conv_at(&xe, &ta, &hbe, q);
        }
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_reflection() {
        let idx: Vec<usize> = (-4..8).map(|i| sym(i, 4)).collect();
        assert_eq!(idx, vec![3, 2, 1, 0, 0, 1, 2, 3, 3, 2, 1, 0]);
        assert_eq!(sym(-9, 4), 0);
    }

    #[test]
    fn colfilter_matches_direct_convolution_in_the_interior() {
        let x: Vec<f64> = (0..16).map(|i| ((i * 7) % 5) as f64 - 2.0).collect();
        let h = [0.5, -1.0, 2.0];
        let y = colfilter(&x, &h);
        for i in 1..15 {
            let direct = h[0] * x[i + 1] + h[1] * x[i] + h[2] * x[i - 1];
            assert!((y[i] - direct).abs() < 1e-15);
        }
        // Left edge reflects x[-1] onto x[0].
        assert!((y[0] - (h[0] * x[1] + h[1] * x[0] + h[2] * x[0])).abs() < 1e-15);
    }

    #[test]
    fn output_lengths() {
        let x = vec![1.0; 32];
        let h = vec![0.1; 10];
        let hb: Vec<f64> = h.iter().rev().copied().collect();
        assert_eq!(coldfilt(&x, &h, &hb).len(), 16);
        assert_eq!(colifilt(&x, &h, &hb).len(), 64);
        assert!(colifilt(&[0.0; 8], &h, &hb).iter().all(|&v| v == 0.0));
    }
}
