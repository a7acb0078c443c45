//! The full problem instance, its validation and JSON round trip.

use super::absence::{AbsenceModel, AbsenceVariant};
use super::duty::{duty_cost, Duty};
use super::horizon::Horizon;
use super::money::Cost;
use super::pattern::{DaysOffPattern, NUM_PATTERNS};
use super::preference::PreferenceProfile;
use super::scenario::DailyScenario;
use crate::datagen::GenConfig;
use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Version tag written into every serialized instance.
pub const SCHEMA_VERSION: u32 = 1;

/// Cost coefficients of the objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostCoefficients {
    /// Penalty per cancelled cover hour (c1).
    pub cancellation: Cost,
    /// Weight of one granted preference score point (c3).
    pub welfare_weight: Cost,
    /// Slack of the duty-count lower bound; any value in (0, 1) makes the
    /// bound pair pin the integer duty total to the ceiling identity.
    pub epsilon: f64,
}

impl Default for CostCoefficients {
    fn default() -> CostCoefficients {
        CostCoefficients {
            cancellation: Cost::from_units(10),
            welfare_weight: Cost::from_quarters(3),
            epsilon: 1e-15,
        }
    }
}

/// Where an instance came from: generator seed and a hash of the full
/// generation config, embedded in artifacts for reproducibility.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub config_hash: String,
}

/// A complete scheduling instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub schema_version: u32,
    pub horizon: Horizon,
    pub patterns: Vec<DaysOffPattern>,
    pub duties: Vec<Duty>,
    pub num_employees: usize,
    /// Known absences to cover per day (o), already expressed as whole
    /// reserve duties.
    pub known_demand: Vec<i64>,
    /// Demand scenarios per day: `scenarios[j]` lists day j's scenarios.
    pub scenarios: Vec<Vec<DailyScenario>>,
    pub preferences: PreferenceProfile,
    pub absence: AbsenceModel,
    pub costs: CostCoefficients,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
    /// Generation config, kept so evaluation can draw held-out scenarios
    /// from the same distributions on a disjoint stream.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gen_config: Option<GenConfig>,
}

impl Instance {
    pub fn num_days(&self) -> usize {
        self.horizon.num_days
    }

    pub fn num_periods(&self) -> usize {
        self.horizon.periods_per_day
    }

    pub fn num_scenarios(&self, day: usize) -> usize {
        self.scenarios[day].len()
    }

    /// Absence probability of (employee, day) under a variant.
    pub fn absence_rate(&self, employee: usize, day: usize, variant: AbsenceVariant) -> f64 {
        match variant {
            AbsenceVariant::PreferenceAware => self.absence.q_pref[employee][day],
            AbsenceVariant::Uniform => self.absence.q_uniform[day],
        }
    }

    /// How many assigned employees have `day` off.
    pub fn off_count(&self, assignment: &[usize], day: usize) -> i64 {
        assignment
            .iter()
            .map(|&p| self.patterns[p].off[day] as i64)
            .sum()
    }

    /// Expected number of unknown absentees among employees working `day`,
    /// summed in employee order so every caller sees identical floats.
    pub fn expected_absent(&self, assignment: &[usize], day: usize, variant: AbsenceVariant) -> f64 {
        let mut acc = 0.0;
        for (e, &p) in assignment.iter().enumerate() {
            if self.patterns[p].works_on(day) {
                acc += self.absence_rate(e, day, variant);
            }
        }
        acc
    }

    /// Reserve duties dispatchable on `day` under an assignment: employees
    /// minus known demand, minus scheduled offs, minus the rounded-up
    /// expected unknown absentees. Negative means the assignment cannot
    /// staff the day.
    pub fn duty_capacity(&self, assignment: &[usize], day: usize, variant: AbsenceVariant) -> i64 {
        let offs = self.off_count(assignment, day);
        let absent = self.expected_absent(assignment, day, variant).ceil() as i64;
        self.num_employees as i64 - self.known_demand[day] - offs - absent
    }

    /// Left side of the known-demand constraint: expected employees both
    /// working and present on `day`.
    pub fn expected_present(&self, assignment: &[usize], day: usize, variant: AbsenceVariant) -> f64 {
        let mut acc = 0.0;
        for (e, &p) in assignment.iter().enumerate() {
            if self.patterns[p].works_on(day) {
                acc += 1.0 - self.absence_rate(e, day, variant);
            }
        }
        acc
    }

    /// Best possible expected presence on `day`: every employee working.
    pub fn max_expected_present(&self, day: usize, variant: AbsenceVariant) -> f64 {
        (0..self.num_employees)
            .map(|e| 1.0 - self.absence_rate(e, day, variant))
            .sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Instance, InstanceIoError> {
        #[derive(Deserialize)]
        struct VersionProbe {
            schema_version: u32,
        }
        let probe: VersionProbe = serde_json::from_str(text)?;
        if probe.schema_version != SCHEMA_VERSION {
            return Err(InstanceIoError::UnsupportedSchema(probe.schema_version));
        }
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Debug, Error)]
pub enum InstanceIoError {
    #[error("instance JSON does not parse: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported instance schema version {0}")]
    UnsupportedSchema(u32),
}

/// One failed validation check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Dotted path of the offending field, e.g. `scenarios[3][1].probability`.
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

fn violation(out: &mut Vec<Violation>, path: impl Into<String>, message: impl Into<String>) {
    out.push(Violation { path: path.into(), message: message.into() });
}

/// Check every structural invariant of an instance. An empty result means
/// the instance is well formed; solvers assume a validated instance.
pub fn validate_instance(inst: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();
    let days = inst.horizon.num_days;
    let periods = inst.horizon.periods_per_day;

    if inst.schema_version != SCHEMA_VERSION {
        violation(&mut out, "schema_version", format!("expected {SCHEMA_VERSION}"));
    }
    if days == 0 || days % 7 != 0 {
        violation(&mut out, "horizon.num_days", "must be a positive multiple of 7");
    }
    if periods == 0 {
        violation(&mut out, "horizon.periods_per_day", "must be at least 1");
    }
    if inst.num_employees == 0 {
        violation(&mut out, "num_employees", "must be at least 1");
    }

    validate_patterns(inst, &mut out);
    validate_duties(inst, &mut out);

    if inst.known_demand.len() != days {
        violation(&mut out, "known_demand", format!("expected {days} entries"));
    }
    for (j, &o) in inst.known_demand.iter().enumerate() {
        if o < 0 {
            violation(&mut out, format!("known_demand[{j}]"), "negative");
        }
    }

    validate_scenarios(inst, &mut out);
    validate_preferences(inst, &mut out);
    validate_absence(inst, &mut out);

    if inst.costs.cancellation.quarters() <= 0 {
        violation(&mut out, "costs.cancellation", "must be positive");
    }
    if inst.costs.welfare_weight.is_negative() {
        violation(&mut out, "costs.welfare_weight", "must be non-negative");
    }
    if !(inst.costs.epsilon > 0.0 && inst.costs.epsilon < 1.0) {
        violation(&mut out, "costs.epsilon", "must lie strictly between 0 and 1");
    }
    out
}

fn validate_patterns(inst: &Instance, out: &mut Vec<Violation>) {
    let days = inst.horizon.num_days;
    if inst.patterns.len() != NUM_PATTERNS {
        violation(out, "patterns", format!("expected exactly {NUM_PATTERNS} patterns"));
        return;
    }
    for (p, pat) in inst.patterns.iter().enumerate() {
        let path = format!("patterns[{p}]");
        if pat.id != p {
            violation(out, format!("{path}.id"), "must equal its index");
        }
        let (first, second) = pat.off_pair;
        if !(1..=7).contains(&first) {
            violation(out, format!("{path}.off_pair"), "weekday out of 1..=7");
            continue;
        }
        if second != first % 7 + 1 {
            violation(out, format!("{path}.off_pair"), "off days must be consecutive");
        }
        if pat.work.len() != days || pat.off.len() != days {
            violation(out, format!("{path}.work"), format!("expected {days} entries"));
            continue;
        }
        for d in 0..days {
            if pat.work[d] > 1 || pat.off[d] > 1 || pat.work[d] + pat.off[d] != 1 {
                violation(out, format!("{path}.work[{d}]"), "work and off must be complementary 0/1");
            }
            let w = inst.horizon.day_of_week(d);
            let expect_off = u8::from(pat.weekday_off(w));
            if pat.off[d] != expect_off {
                violation(
                    out,
                    format!("{path}.off[{d}]"),
                    "must match the weekly off pair on every matching weekday",
                );
            }
        }
    }
}

fn validate_duties(inst: &Instance, out: &mut Vec<Violation>) {
    let periods = inst.horizon.periods_per_day;
    if inst.duties.is_empty() {
        violation(out, "duties", "catalog is empty");
    }
    for (w, duty) in inst.duties.iter().enumerate() {
        let path = format!("duties[{w}]");
        if duty.id != w {
            violation(out, format!("{path}.id"), "must equal its index");
        }
        if !(8..=10).contains(&duty.work_hours) {
            violation(out, format!("{path}.work_hours"), "must lie in 8..=10");
        }
        if duty.pause_hours > 3 {
            violation(out, format!("{path}.pause_hours"), "must lie in 0..=3");
        }
        if duty.coverage.len() != periods {
            violation(out, format!("{path}.coverage"), format!("expected {periods} entries"));
            continue;
        }
        if duty.coverage.iter().any(|&a| a > 1) {
            violation(out, format!("{path}.coverage"), "entries must be 0/1");
        }
        // With hourly periods the coverage must account for every worked
        // hour; coarser toy grids only keep the cost bookkeeping.
        if periods == 24 {
            let covered: u32 = duty.coverage.iter().map(|&a| a as u32).sum();
            if covered != duty.work_hours {
                violation(
                    out,
                    format!("{path}.coverage"),
                    format!("covers {covered} periods but works {} hours", duty.work_hours),
                );
            }
        }
        if duty.cost != duty_cost(duty.work_hours, duty.pause_hours) {
            violation(out, format!("{path}.cost"), "does not match the duty cost formula");
        }
        if duty.cost < Cost::from_units(8) || duty.cost > Cost::from_units(11) {
            violation(out, format!("{path}.cost"), "must lie in [8, 11]");
        }
    }
}

fn validate_scenarios(inst: &Instance, out: &mut Vec<Violation>) {
    let days = inst.horizon.num_days;
    let periods = inst.horizon.periods_per_day;
    if inst.scenarios.len() != days {
        violation(out, "scenarios", format!("expected one scenario list per day ({days})"));
        return;
    }
    for (j, list) in inst.scenarios.iter().enumerate() {
        if list.is_empty() {
            violation(out, format!("scenarios[{j}]"), "each day needs at least one scenario");
            continue;
        }
        let mut total = Rational64::zero();
        for (s, sc) in list.iter().enumerate() {
            let path = format!("scenarios[{j}][{s}]");
            if sc.day != j {
                violation(out, format!("{path}.day"), format!("expected day {j}"));
            }
            if sc.demand.len() != periods {
                violation(out, format!("{path}.demand"), format!("expected {periods} entries"));
            }
            if sc.demand.iter().any(|&d| d < 0) {
                violation(out, format!("{path}.demand"), "negative demand");
            }
            if sc.probability <= Rational64::zero() || sc.probability > Rational64::one() {
                violation(out, format!("{path}.probability"), "must lie in (0, 1]");
            }
            total += sc.probability;
        }
        if total != Rational64::one() {
            violation(out, format!("scenarios[{j}]"), format!("probabilities sum to {total}, not 1"));
        }
    }
}

fn validate_preferences(inst: &Instance, out: &mut Vec<Violation>) {
    if inst.preferences.scores.len() != inst.num_employees {
        violation(out, "preferences.scores", format!("expected {} rows", inst.num_employees));
        return;
    }
    for (e, row) in inst.preferences.scores.iter().enumerate() {
        let path = format!("preferences.scores[{e}]");
        if row.len() != NUM_PATTERNS {
            violation(out, path, format!("expected {NUM_PATTERNS} scores"));
            continue;
        }
        let mut seen = [false; NUM_PATTERNS + 1];
        let mut ok = true;
        for &s in row {
            if !(1..=NUM_PATTERNS as u8).contains(&s) || seen[s as usize] {
                ok = false;
                break;
            }
            seen[s as usize] = true;
        }
        if !ok {
            violation(out, path, "must be a permutation of 1..=7");
        }
    }
}

fn validate_absence(inst: &Instance, out: &mut Vec<Violation>) {
    let days = inst.horizon.num_days;
    if inst.absence.q_pref.len() != inst.num_employees {
        violation(out, "absence.q_pref", format!("expected {} rows", inst.num_employees));
    }
    for (e, row) in inst.absence.q_pref.iter().enumerate() {
        if row.len() != days {
            violation(out, format!("absence.q_pref[{e}]"), format!("expected {days} entries"));
            continue;
        }
        for (j, &q) in row.iter().enumerate() {
            if !(0.0..1.0).contains(&q) {
                violation(out, format!("absence.q_pref[{e}][{j}]"), "must lie in [0, 1)");
            }
        }
    }
    if inst.absence.q_uniform.len() != days {
        violation(out, "absence.q_uniform", format!("expected {days} entries"));
    }
    for (j, &q) in inst.absence.q_uniform.iter().enumerate() {
        if !(0.0..1.0).contains(&q) {
            violation(out, format!("absence.q_uniform[{j}]"), "must lie in [0, 1)");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{build_duty_catalog, build_pattern_catalog, DutyConfig};

    pub fn tiny_valid_instance() -> Instance {
        let horizon = Horizon::new(7, 24);
        let patterns = build_pattern_catalog(&horizon);
        let duties = build_duty_catalog(24, &DutyConfig::default()).unwrap();
        let scenarios: Vec<Vec<DailyScenario>> = (0..7)
            .map(|j| {
                vec![
                    DailyScenario {
                        day: j,
                        demand: vec![1; 24],
                        probability: Rational64::new(1, 2),
                    },
                    DailyScenario {
                        day: j,
                        demand: vec![2; 24],
                        probability: Rational64::new(1, 2),
                    },
                ]
            })
            .collect();
        Instance {
            schema_version: SCHEMA_VERSION,
            horizon,
            patterns,
            duties,
            num_employees: 2,
            known_demand: vec![0; 7],
            scenarios,
            preferences: PreferenceProfile {
                scores: vec![vec![6, 1, 2, 3, 4, 5, 7], vec![1, 2, 3, 4, 5, 6, 7]],
            },
            absence: AbsenceModel {
                variant: AbsenceVariant::PreferenceAware,
                q_pref: vec![vec![0.1; 7], vec![0.2; 7]],
                q_uniform: vec![0.15; 7],
            },
            costs: CostCoefficients::default(),
            provenance: None,
            gen_config: None,
        }
    }

    #[test]
    fn valid_instance_passes() {
        let inst = tiny_valid_instance();
        let violations = validate_instance(&inst);
        assert!(violations.is_empty(), "{violations:?}");
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let inst = tiny_valid_instance();
        let json = inst.to_json();
        let back = Instance::from_json(&json).unwrap();
        assert_eq!(back, inst);
        // And byte-identical on re-serialization.
        assert_eq!(back.to_json(), json);
    }

    #[test]
    fn schema_version_is_checked() {
        let inst = tiny_valid_instance();
        let json = inst.to_json().replace("\"schema_version\": 1", "\"schema_version\": 99");
        match Instance::from_json(&json) {
            Err(InstanceIoError::UnsupportedSchema(99)) => {}
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn each_field_mutation_is_caught() {
        let base = tiny_valid_instance();

        let mut bad = base.clone();
        bad.horizon.num_days = 10;
        assert!(!validate_instance(&bad).is_empty());

        let mut bad = base.clone();
        bad.patterns[2].off[0] = 1 - bad.patterns[2].off[0];
        assert!(validate_instance(&bad).iter().any(|v| v.path.starts_with("patterns[2]")));

        let mut bad = base.clone();
        bad.duties[5].cost = Cost::from_units(20);
        assert!(validate_instance(&bad).iter().any(|v| v.path.starts_with("duties[5]")));

        let mut bad = base.clone();
        bad.known_demand[3] = -1;
        assert!(validate_instance(&bad).iter().any(|v| v.path == "known_demand[3]"));

        let mut bad = base.clone();
        bad.scenarios[1][0].probability = Rational64::new(2, 3);
        assert!(validate_instance(&bad).iter().any(|v| v.path.starts_with("scenarios[1]")));

        let mut bad = base.clone();
        bad.preferences.scores[0][0] = 1; // duplicate score
        assert!(validate_instance(&bad).iter().any(|v| v.path.starts_with("preferences")));

        let mut bad = base.clone();
        bad.absence.q_pref[1][4] = 1.0;
        assert!(validate_instance(&bad).iter().any(|v| v.path.starts_with("absence.q_pref[1]")));

        let mut bad = base.clone();
        bad.costs.epsilon = 0.0;
        assert!(validate_instance(&bad).iter().any(|v| v.path == "costs.epsilon"));

        let mut bad = base;
        bad.costs.cancellation = Cost::ZERO;
        assert!(validate_instance(&bad).iter().any(|v| v.path == "costs.cancellation"));
    }

    #[test]
    fn capacity_helpers_agree_with_hand_counts() {
        let mut inst = tiny_valid_instance();
        inst.known_demand = vec![1; 7];
        // Employee 0 off Sat-Sun (pattern 6), employee 1 off Sun-Mon (pattern 0).
        let assignment = vec![6, 0];
        // Day 0 is Sunday: both employees are off.
        assert_eq!(inst.off_count(&assignment, 0), 2);
        assert_eq!(inst.expected_absent(&assignment, 0, AbsenceVariant::PreferenceAware), 0.0);
        assert_eq!(inst.duty_capacity(&assignment, 0, AbsenceVariant::PreferenceAware), -1);
        // Day 2 (Tuesday): both work, expected absent 0.1 + 0.2 -> ceil 1.
        assert_eq!(inst.off_count(&assignment, 2), 0);
        let q = inst.expected_absent(&assignment, 2, AbsenceVariant::PreferenceAware);
        assert!((q - 0.3).abs() < 1e-12);
        assert_eq!(inst.duty_capacity(&assignment, 2, AbsenceVariant::PreferenceAware), 0);
        // Uniform variant uses the per-day rate for everyone.
        let q = inst.expected_absent(&assignment, 2, AbsenceVariant::Uniform);
        assert!((q - 0.3).abs() < 1e-12);
        assert!((inst.max_expected_present(2, AbsenceVariant::PreferenceAware) - 1.7).abs() < 1e-12);
    }
}
