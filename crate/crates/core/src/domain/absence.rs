//! Unknown-absence probabilities.
//!
//! Two variants are carried side by side: a preference-aware matrix
//! `q_pref[e][j]` where an employee's rate on a day reflects how poorly
//! their assigned-pattern ranking treats that weekday, and a uniform
//! per-day vector `q_uniform[j]` (historical weekday means) that ignores
//! who is working.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AbsenceVariant {
    PreferenceAware,
    Uniform,
}

/// Absence probabilities for every employee and day, in both variants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbsenceModel {
    /// Which variant the instance was generated around (both are usable).
    pub variant: AbsenceVariant,
    /// `q_pref[e][j]`: probability employee `e` is absent on day `j` given
    /// their preference ranking, in [0, 1).
    pub q_pref: Vec<Vec<f64>>,
    /// `q_uniform[j]`: employee-independent absence probability per day.
    pub q_uniform: Vec<f64>,
}

impl AbsenceModel {
    /// Rate for (employee, day) under the preference-aware variant.
    pub fn pref_rate(&self, employee: usize, day: usize) -> f64 {
        self.q_pref[employee][day]
    }

    /// Rate for a day under the uniform variant.
    pub fn uniform_rate(&self, day: usize) -> f64 {
        self.q_uniform[day]
    }
}
