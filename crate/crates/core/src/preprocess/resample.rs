//! Rational-ratio polyphase resampling with a Kaiser-windowed sinc lowpass.

use crate::dtcwt::lowlevel::sym;

/// Kaiser window shape parameter.
pub const KAISER_BETA: f64 = 8.6;
/// Prototype taps per unit of `max(L, M)`.
pub const TAPS_PER_PHASE: usize = 64;

/// Modified Bessel function of the first kind, order 0 (power series).
fn bessel_i0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..500 {
        term *= q / (k * k) as f64;
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `(up, down)` with `target / native = up / down` in lowest terms. Rates
/// are matched to a millihertz.
pub fn rational_ratio(native: f64, target: f64) -> (usize, usize) {
    let (mut n, mut t) = (native.round() as u64, target.round() as u64);
    if (native - n as f64).abs() > 1e-9 || (target - t as f64).abs() > 1e-9 {
        n = (native * 1000.0).round() as u64;
        t = (target * 1000.0).round() as u64;
    }
    let g = gcd(n, t);
    ((t / g) as usize, (n / g) as usize)
}

/// A polyphase resampler for one rate pair, reusable across channels.
#[derive(Debug, Clone)]
pub struct Resampler {
    up: usize,
    down: usize,
    native: f64,
    target: f64,
    /// `branches[phase]` holds taps for input offsets `first[phase] ..`.
    branches: Vec<Vec<f64>>,
    first: Vec<isize>,
}

impl Resampler {
    pub fn new(native: f64, target: f64) -> Self {
        assert!(native > 0.0 && target > 0.0, "sample rates must be positive");
        let (up, down) = rational_ratio(native, target);
        let n = TAPS_PER_PHASE * up.max(down) + 1;
        let half = (n / 2) as isize;

        // Prototype designed at the upsampled rate. The transition band
        // ends at the lower Nyquist frequency.
        let fs = native * up as f64;
        let atten = KAISER_BETA / 0.1102 + 8.7;
        let transition = (atten - 7.95) / (2.285 * (n - 1) as f64) / (2.0 * std::f64::consts::PI) * fs;
        let stop = native.min(target) / 2.0;
        let cutoff = (stop - transition / 2.0).max(stop * 0.5) / fs;
        let i0_beta = bessel_i0(KAISER_BETA);
        let proto: Vec<f64> = (0..n)
            .map(|j| {
                let t = j as f64 - half as f64;
                let arg = 2.0 * cutoff * t;
                let sinc = if t == 0.0 {
                    1.0
                } else {
                    (std::f64::consts::PI * arg).sin() / (std::f64::consts::PI * arg)
                };
                let r = 2.0 * j as f64 / (n - 1) as f64 - 1.0;
                let window = bessel_i0(KAISER_BETA * (1.0 - r * r).max(0.0).sqrt()) / i0_beta;
                2.0 * cutoff * sinc * window
            })
            .collect();

        // y[m] = sum_d h[half + phase + d*up] * x[q - d], with m*down = q*up + phase.
        let mut branches = Vec::with_capacity(up);
        let mut first = Vec::with_capacity(up);
        for phase in 0..up as isize {
            let lo = (-(half + phase)).div_euclid(up as isize)
                + if (-(half + phase)).rem_euclid(up as isize) == 0 { 0 } else { 1 };
            let mut taps = Vec::new();
            let mut d = lo;
            while half + phase + d * (up as isize) < n as isize {
                taps.push(proto[(half + phase + d * up as isize) as usize]);
                d += 1;
            }
            let sum: f64 = taps.iter().sum();
            for t in &mut taps {
                *t /= sum;
            }
            branches.push(taps);
            first.push(lo);
        }
        Self {
            up,
            down,
            native,
            target,
            branches,
            first,
        }
    }

    pub fn ratio(&self) -> (usize, usize) {
        (self.up, self.down)
    }

    pub fn output_len(&self, input_len: usize) -> usize {
        (input_len as f64 * self.target / self.native).round() as usize
    }

    pub fn process(&self, x: &[f64]) -> Vec<f64> {
        if self.up == self.down {
            return x.to_vec();
        }
        let n = x.len();
        if n == 0 {
            return Vec::new();
        }
        (0..self.output_len(n))
            .map(|m| {
                let t = m * self.down;
                let q = (t / self.up) as isize;
                let phase = t % self.up;
                let d0 = self.first[phase];
                self.branches[phase]
                    .iter()
                    .enumerate()
                    .map(|(k, &h)| h * x[sym(q - d0 - k as isize, n)])
                    .sum()
            })
            .collect()
    }
}

/// Resample one signal from `native` Hz to `target` Hz.
pub fn resample(x: &[f64], native: f64, target: f64) -> Vec<f64> {
    if native == target {
        return x.to_vec();
    }
    Resampler::new(native, target).process(x)
}
