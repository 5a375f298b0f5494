use serde::{Deserialize, Serialize};

use super::forward::Observable;
use crate::error::{Error, Result};
use crate::states::PointerKind;

pub const DST_RECORD_SCHEMA: u32 = 1;

/// Empirical statistics of one simulated DST experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DstCountsRecord {
    pub schema_version: u32,
    pub d: usize,
    pub phi: f64,
    pub pointer: PointerKind,
    pub pure_mode: bool,
    /// Complementary-basis index used for post-selection in pure mode.
    #[serde(default)]
    pub postselect: usize,
    pub copies: u64,
    /// One entry per (coupled index `n`, observable), ordered `n`-major.
    pub settings: Vec<SettingCounts>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettingCounts {
    pub n: usize,
    pub observable: Observable,
    pub shots: u64,
    /// Indexed by system outcome `j`.
    pub branches: Vec<BranchCounts>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchCounts {
    pub occurrences: u64,
    pub tally: PointerTally,
}

/// Pointer outcomes collected within one branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PointerTally {
    Signs { plus: u64, minus: u64 },
    Continuous { sum: f64, sum_sq: f64 },
}

impl PointerTally {
    pub fn empty(pointer: PointerKind) -> Self {
        match pointer {
            PointerKind::Gaussian => PointerTally::Continuous { sum: 0.0, sum_sq: 0.0 },
            _ => PointerTally::Signs { plus: 0, minus: 0 },
        }
    }

    pub fn push(&mut self, value: f64) {
        match self {
            PointerTally::Signs { plus, minus } => {
                if value > 0.0 {
                    *plus += 1
                } else {
                    *minus += 1
                }
            }
            PointerTally::Continuous { sum, sum_sq } => {
                *sum += value;
                *sum_sq += value * value;
            }
        }
    }

    /// Sum of all pointer outcomes in the branch.
    pub fn total(&self) -> f64 {
        match *self {
            PointerTally::Signs { plus, minus } => plus as f64 - minus as f64,
            PointerTally::Continuous { sum, .. } => sum,
        }
    }
}

impl DstCountsRecord {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let rec: Self = serde_json::from_str(s)?;
        rec.validate()?;
        Ok(rec)
    }

    pub fn setting(&self, n: usize, obs_index: usize) -> &SettingCounts {
        &self.settings[2 * n + obs_index]
    }

    /// Checks the bookkeeping invariants of the record.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(format!("counts record: {msg}")));
        if self.schema_version != DST_RECORD_SCHEMA {
            return bad(format!("unsupported schema version {}", self.schema_version));
        }
        if self.d < 2 || self.settings.len() != 2 * self.d {
            return bad(format!("{} settings for d = {}", self.settings.len(), self.d));
        }
        if self.postselect >= self.d {
            return Err(Error::IndexOutOfRange {
                index: self.postselect,
                dim: self.d,
            });
        }
        let pair = Observable::pair(self.pointer);
        let mut total = 0u64;
        for (idx, s) in self.settings.iter().enumerate() {
            if s.n != idx / 2 || s.observable != pair[idx % 2] {
                return bad(format!("setting {idx} out of order"));
            }
            if s.branches.len() != self.d {
                return bad(format!("setting {idx} has {} branches", s.branches.len()));
            }
            let seen: u64 = s.branches.iter().map(|b| b.occurrences).sum();
            if seen != s.shots {
                return bad(format!("setting {idx}: {seen} outcomes for {} shots", s.shots));
            }
            for b in &s.branches {
                if let PointerTally::Signs { plus, minus } = b.tally {
                    if plus + minus != b.occurrences {
                        return bad(format!("setting {idx}: sign counts do not match occurrences"));
                    }
                }
            }
            total += s.shots;
        }
        if total != self.copies {
            return bad(format!("{total} shots recorded for {} copies", self.copies));
        }
        Ok(())
    }
}
