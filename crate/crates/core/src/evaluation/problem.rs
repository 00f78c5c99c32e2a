use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::SeizureClass;

/// Which label set is classified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Problem {
    #[serde(rename = "7class")]
    SevenClass,
    /// Drops the broad focal/generalised labels FNSZ and GNSZ.
    #[serde(rename = "5class")]
    FiveClass,
}

impl Problem {
    pub fn classes(self) -> &'static [SeizureClass] {
        use SeizureClass::*;
        match self {
            Problem::SevenClass => &[Fnsz, Gnsz, Spsz, Cpsz, Absz, Tnsz, Tcsz],
            Problem::FiveClass => &[Spsz, Cpsz, Absz, Tnsz, Tcsz],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Problem::SevenClass => "7-class",
            Problem::FiveClass => "5-class",
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Problem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "7class" | "7-class" => Ok(Problem::SevenClass),
            "5class" | "5-class" => Ok(Problem::FiveClass),
            _ => Err(format!("unknown problem {s:?}; expected 7class or 5class")),
        }
    }
}

/// Cross-validation grouping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Stratified over segments regardless of patient.
    Seizure,
    /// Each patient confined to one fold.
    Patient,
}

impl Scheme {
    pub fn default_folds(self) -> usize {
        match self {
            Scheme::Seizure => 5,
            Scheme::Patient => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Seizure => "seizure",
            Scheme::Patient => "patient",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "seizure" => Ok(Scheme::Seizure),
            "patient" => Ok(Scheme::Patient),
            _ => Err(format!("unknown scheme {s:?}; expected seizure or patient")),
        }
    }
}
