use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Seizure types kept for classification.
///
/// The corpus also labels myoclonic seizures (MYSZ); those are recognised by
/// [`TuszLabel`] but never become a `SeizureClass`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SeizureClass {
    Fnsz,
    Gnsz,
    Spsz,
    Cpsz,
    Absz,
    Tnsz,
    Tcsz,
}

impl SeizureClass {
    pub const ALL: [SeizureClass; 7] = [
        SeizureClass::Fnsz,
        SeizureClass::Gnsz,
        SeizureClass::Spsz,
        SeizureClass::Cpsz,
        SeizureClass::Absz,
        SeizureClass::Tnsz,
        SeizureClass::Tcsz,
    ];

    /// Stable on-disk code, used by the SEGT and FEAT containers.
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.get(code as usize).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SeizureClass::Fnsz => "FNSZ",
            SeizureClass::Gnsz => "GNSZ",
            SeizureClass::Spsz => "SPSZ",
            SeizureClass::Cpsz => "CPSZ",
            SeizureClass::Absz => "ABSZ",
            SeizureClass::Tnsz => "TNSZ",
            SeizureClass::Tcsz => "TCSZ",
        }
    }
}

impl fmt::Display for SeizureClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown seizure label {0:?}")]
pub struct UnknownLabel(pub String);

impl FromStr for SeizureClass {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.parse::<TuszLabel>()? {
            TuszLabel::Seizure(c) => Ok(c),
            TuszLabel::Myoclonic => Err(UnknownLabel(s.to_string())),
        }
    }
}

/// Any of the eight seizure labels used by the TUH seizure corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TuszLabel {
    Seizure(SeizureClass),
    /// MYSZ: recorded from too few patients and excluded from every problem.
    Myoclonic,
}

impl FromStr for TuszLabel {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let label = match s.trim().to_ascii_lowercase().as_str() {
            "fnsz" => TuszLabel::Seizure(SeizureClass::Fnsz),
            "gnsz" => TuszLabel::Seizure(SeizureClass::Gnsz),
            "spsz" => TuszLabel::Seizure(SeizureClass::Spsz),
            "cpsz" => TuszLabel::Seizure(SeizureClass::Cpsz),
            "absz" => TuszLabel::Seizure(SeizureClass::Absz),
            "tnsz" => TuszLabel::Seizure(SeizureClass::Tnsz),
            "tcsz" => TuszLabel::Seizure(SeizureClass::Tcsz),
            "mysz" => TuszLabel::Myoclonic,
            _ => return Err(UnknownLabel(s.to_string())),
        };
        Ok(label)
    }
}
