//! Kingsbury filter tables.
//!
//! Level 1 uses the near-symmetric 5/7-tap biorthogonal pair ("near_sym_a"),
//! levels 2 and up use the 10-tap quarter-shift pair ("qshift_a").

/// Level-1 analysis lowpass (5 taps).
pub const H0O: [f64; 5] = [-0.05, 0.25, 0.6, 0.25, -0.05];

/// Level-1 analysis highpass (7 taps).
pub const H1O: [f64; 7] = [
    0.010714285714285713,
    -0.05357142857142857,
    -0.26071428571428573,
    0.6071428571428571,
    -0.26071428571428573,
    -0.05357142857142857,
    0.010714285714285713,
];

/// Level-1 synthesis lowpass (7 taps).
pub const G0O: [f64; 7] = [
    -0.010714285714285713,
    -0.05357142857142857,
    0.26071428571428573,
    0.6071428571428571,
    0.26071428571428573,
    -0.05357142857142857,
    -0.010714285714285713,
];

/// Level-1 synthesis highpass (5 taps).
pub const G1O: [f64; 5] = [-0.05, -0.25, 0.6, -0.25, -0.05];

/// Tree-A q-shift analysis lowpass.
pub const H0A: [f64; 10] = [
    0.051130405283831656,
    -0.013975370246888838,
    -0.10983605166597087,
    0.26383956105893763,
    0.7666284677930372,
    0.5636557101270515,
    0.0008736226952170968,
    -0.1002312195074762,
    -0.0016896812725281543,
    -0.006181881892116438,
];

/// Tree-A q-shift analysis highpass.
pub const H1A: [f64; 10] = [
    -0.006181881892116438,
    0.0016896812725281543,
    -0.1002312195074762,
    -0.0008736226952170968,
    0.5636557101270515,
    -0.7666284677930372,
    0.26383956105893763,
    0.10983605166597087,
    -0.013975370246888838,
    -0.051130405283831656,
];

fn reversed(h: &[f64]) -> Vec<f64> {
    h.iter().rev().copied().collect()
}

/// Analysis and synthesis filters for both trees.
///
/// Tree B's q-shift filters are the time reverse of tree A's, and each
/// tree's synthesis filters are the other tree's analysis filters.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    pub h0o: Vec<f64>,
    pub h1o: Vec<f64>,
    pub g0o: Vec<f64>,
    pub g1o: Vec<f64>,
    pub h0a: Vec<f64>,
    pub h0b: Vec<f64>,
    pub h1a: Vec<f64>,
    pub h1b: Vec<f64>,
    pub g0a: Vec<f64>,
    pub g0b: Vec<f64>,
    pub g1a: Vec<f64>,
    pub g1b: Vec<f64>,
}

impl Default for FilterBank {
    fn default() -> Self {
        let h0b = reversed(&H0A);
        let h1b = reversed(&H1A);
        Self {
            h0o: H0O.to_vec(),
            h1o: H1O.to_vec(),
            g0o: G0O.to_vec(),
            g1o: G1O.to_vec(),
            g0a: h0b.clone(),
            g0b: H0A.to_vec(),
            g1a: h1b.clone(),
            g1b: H1A.to_vec(),
            h0a: H0A.to_vec(),
            h0b,
            h1a: H1A.to_vec(),
            h1b,
        }
    }
}

impl FilterBank {
    /// Named filters in a fixed order, for printing.
    pub fn named(&self) -> Vec<(&'static str, &[f64])> {
        vec![
            ("h0o", &self.h0o),
            ("h1o", &self.h1o),
            ("g0o", &self.g0o),
            ("g1o", &self.g1o),
            ("h0a", &self.h0a),
            ("h0b", &self.h0b),
            ("h1a", &self.h1a),
            ("h1b", &self.h1b),
            ("g0a", &self.g0a),
            ("g0b", &self.g0b),
            ("g1a", &self.g1a),
            ("g1b", &self.g1b),
        ]
    }
}
