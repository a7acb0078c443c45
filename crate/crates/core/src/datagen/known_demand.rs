//! Known daily demand for reserve duties.
//!
//! Absences announced in advance (vacation, training, long sick leave)
//! are known when the roster is built, so each day carries a fixed count
//! of reserve duties that must be staffed in expectation. Counts are
//! Poisson in the employee count, capped so that a balanced days-off
//! assignment can always meet the expected-presence constraint even on
//! the worst weekday of either absence variant.

use super::stream::substream;
use super::GenError;
use crate::domain::{AbsenceModel, Horizon};
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

/// Knobs of the known-demand sampler: Poisson means as fractions of the
/// employee count, per weekday (Sunday first).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnownDemandConfig {
    pub weekday_fraction: Vec<f64>,
}

impl Default for KnownDemandConfig {
    fn default() -> KnownDemandConfig {
        KnownDemandConfig {
            weekday_fraction: vec![0.12, 0.17, 0.18, 0.18, 0.18, 0.17, 0.14],
        }
    }
}

/// Largest known demand a day can carry and still be coverable: a
/// balanced assignment keeps at least `E - 2 * ceil(E / 7)` employees
/// working any day, each present with probability at least `1 - q_max`,
/// and one unit of slack absorbs the rounding in the expected-absence
/// ceiling.
pub fn demand_cap(num_employees: usize, q_max: f64) -> i64 {
    let e = num_employees as i64;
    let working_floor = e - 2 * ((e + 6) / 7);
    if working_floor <= 0 {
        return 0;
    }
    (((working_floor as f64) * (1.0 - q_max)).floor() as i64 - 1).max(0)
}

/// Draw one known demand per day on the `("known-demand", [day])`
/// substreams of `seed`, truncated to the feasibility cap of the day's
/// worst-case absence rate across both variants.
pub fn sample_known_demand(
    config: &KnownDemandConfig,
    num_employees: usize,
    absence: &AbsenceModel,
    horizon: &Horizon,
    seed: u64,
) -> Result<Vec<i64>, GenError> {
    if config.weekday_fraction.len() != 7 {
        return Err(GenError::BadConfig("known demand needs one fraction per weekday".into()));
    }
    for &f in &config.weekday_fraction {
        if !f.is_finite() || !(0.0..1.0).contains(&f) {
            return Err(GenError::BadConfig(format!("weekday fraction {f} outside [0, 1)")));
        }
    }
    let mut out = Vec::with_capacity(horizon.num_days);
    for day in horizon.days() {
        let weekday = horizon.day_of_week(day);
        let q_max = (0..num_employees)
            .map(|e| absence.q_pref[e][day])
            .fold(absence.q_uniform[day], f64::max);
        let cap = demand_cap(num_employees, q_max);
        let mean = config.weekday_fraction[weekday as usize - 1] * num_employees as f64;
        let draw = if mean > 0.0 {
            let poisson = Poisson::new(mean)
                .map_err(|e| GenError::BadConfig(format!("poisson: {e}")))?;
            let mut rng = substream(seed, "known-demand", &[day as u64]);
            poisson.sample(&mut rng) as i64
        } else {
            0
        };
        out.push(draw.min(cap));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::AbsenceVariant;

    fn fixture(num_employees: usize, days: usize, q: f64) -> (AbsenceModel, Horizon) {
        let absence = AbsenceModel {
            variant: AbsenceVariant::PreferenceAware,
            q_pref: vec![vec![q; days]; num_employees],
            q_uniform: vec![q; days],
        };
        (absence, Horizon::new(days, 24))
    }

    #[test]
    fn cap_formula_frozen_values() {
        // 50 employees: at least 50 - 2 * 8 = 34 working; at q_max 0.171
        // that is floor(34 * 0.829) = 28 expected present, minus slack.
        assert_eq!(demand_cap(50, 0.171), 27);
        assert_eq!(demand_cap(7, 0.0), 4);
        assert_eq!(demand_cap(2, 0.1), 0);
        assert_eq!(demand_cap(1, 0.0), 0);
        assert_eq!(demand_cap(98, 0.2), 55);
    }

    #[test]
    fn draws_are_deterministic_and_capped() {
        let (absence, horizon) = fixture(50, 14, 0.15);
        let config = KnownDemandConfig::default();
        let a = sample_known_demand(&config, 50, &absence, &horizon, 3).unwrap();
        let b = sample_known_demand(&config, 50, &absence, &horizon, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 14);
        let cap = demand_cap(50, 0.15);
        assert!(a.iter().all(|&o| (0..=cap).contains(&o)));
        assert!(a.iter().any(|&o| o > 0));
        assert_ne!(a, sample_known_demand(&config, 50, &absence, &horizon, 4).unwrap());
    }

    #[test]
    fn tight_caps_bind() {
        let (absence, horizon) = fixture(8, 7, 0.3);
        let config = KnownDemandConfig {
            weekday_fraction: vec![0.9; 7],
        };
        let demand = sample_known_demand(&config, 8, &absence, &horizon, 1).unwrap();
        let cap = demand_cap(8, 0.3);
        assert!(cap <= 3);
        assert!(demand.iter().all(|&o| o <= cap));
    }

    #[test]
    fn zero_fraction_means_zero_demand() {
        let (absence, horizon) = fixture(10, 7, 0.1);
        let config = KnownDemandConfig { weekday_fraction: vec![0.0; 7] };
        let demand = sample_known_demand(&config, 10, &absence, &horizon, 1).unwrap();
        assert_eq!(demand, vec![0; 7]);
    }

    #[test]
    fn bad_fractions_are_rejected() {
        let (absence, horizon) = fixture(10, 7, 0.1);
        let config = KnownDemandConfig { weekday_fraction: vec![1.2; 7] };
        assert!(sample_known_demand(&config, 10, &absence, &horizon, 1).is_err());
        let config = KnownDemandConfig { weekday_fraction: vec![0.1; 6] };
        assert!(sample_known_demand(&config, 10, &absence, &horizon, 1).is_err());
    }
}
