//! Top-level instance generation.

use super::duration::{sample_durations, DurationModel};
use super::grid::{
    assign_absence_probabilities, build_absence_grid, grid_from_whiskers, synth_history,
    AbsenceGenConfig,
};
use super::known_demand::{sample_known_demand, KnownDemandConfig};
use super::preferences::{ranking_ball, sample_preferences, PreferenceGenConfig};
use super::scenarios::assemble_scenarios;
use super::shapes::{build_shape_library, ShapeGenConfig};
use super::stream::substream;
use super::GenError;
use crate::domain::{
    build_duty_catalog, build_pattern_catalog, duty_cost, validate_instance, AbsenceModel,
    AbsenceVariant, CostCoefficients, DailyScenario, Duty, DutyConfig, Horizon, Instance,
    PreferenceProfile, Provenance, SCHEMA_VERSION,
};
use num_rational::Rational64;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Everything the generator needs. Serializes with defaults filled in, so
/// configs can override single knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenConfig {
    pub seed: u64,
    pub num_days: usize,
    pub periods_per_day: usize,
    pub num_employees: usize,
    /// Duration draws per day (the duration axis of the scenario grid).
    pub durations_per_day: usize,
    /// Shape draws per day (the shape axis of the scenario grid).
    pub shapes_per_day: usize,
    /// Which absence model solves run under by default.
    pub variant: AbsenceVariant,
    pub duration: DurationModel,
    pub shapes: ShapeGenConfig,
    pub preferences: PreferenceGenConfig,
    pub absence: AbsenceGenConfig,
    pub known_demand: KnownDemandConfig,
    pub duties: DutyConfig,
    pub costs: CostCoefficients,
}

impl Default for GenConfig {
    fn default() -> GenConfig {
        GenConfig {
            seed: 1,
            num_days: 14,
            periods_per_day: 24,
            num_employees: 50,
            durations_per_day: 10,
            shapes_per_day: 10,
            variant: AbsenceVariant::PreferenceAware,
            duration: DurationModel::default(),
            shapes: ShapeGenConfig::default(),
            preferences: PreferenceGenConfig::default(),
            absence: AbsenceGenConfig::default(),
            known_demand: KnownDemandConfig::default(),
            duties: DutyConfig::default(),
            costs: CostCoefficients::default(),
        }
    }
}

/// Generate a full instance from a config. Deterministic in the config;
/// the provenance records the seed and leaves the config hash for the
/// caller, which knows how the config file was spelled.
pub fn generate_instance(config: &GenConfig) -> Result<Instance, GenError> {
    if config.num_days == 0 || config.num_days % 7 != 0 {
        return Err(GenError::BadConfig("num_days must be a positive multiple of 7".into()));
    }
    if config.num_employees == 0 {
        return Err(GenError::BadConfig("need at least one employee".into()));
    }
    if config.durations_per_day == 0 || config.shapes_per_day == 0 {
        return Err(GenError::BadConfig("need at least one duration and one shape per day".into()));
    }
    let horizon = Horizon::new(config.num_days, config.periods_per_day);
    let patterns = build_pattern_catalog(&horizon);
    let duties = build_duty_catalog(config.periods_per_day, &config.duties)?;

    let ball = ranking_ball(
        &config.preferences.modal_ranking,
        config.preferences.max_distance,
        config.preferences.dispersion,
    )?;
    let preferences = sample_preferences(
        &ball,
        config.num_employees,
        &mut substream(config.seed, "preferences", &[]),
    )?;

    let history = synth_history(&config.absence, config.seed)?;
    let grid = build_absence_grid(&history)?;
    let q_pref = assign_absence_probabilities(&grid, &preferences, &horizon);
    let q_uniform: Vec<f64> = horizon
        .days()
        .map(|day| grid.mean[horizon.day_of_week(day) as usize - 1])
        .collect();
    let absence = AbsenceModel { variant: config.variant, q_pref, q_uniform };

    let known_demand =
        sample_known_demand(&config.known_demand, config.num_employees, &absence, &horizon, config.seed)?;

    let library = build_shape_library(
        &config.shapes,
        config.periods_per_day,
        config.shapes_per_day,
        config.seed,
    )?;
    let mut scenarios = Vec::with_capacity(config.num_days);
    for day in horizon.days() {
        let weekday = horizon.day_of_week(day);
        let durations = sample_durations(
            &config.duration,
            weekday,
            config.durations_per_day,
            &mut substream(config.seed, "duration", &[day as u64]),
        )?;
        scenarios.push(assemble_scenarios(day, &durations, &library.by_weekday[weekday as usize - 1])?);
    }

    let instance = Instance {
        schema_version: SCHEMA_VERSION,
        horizon,
        patterns,
        duties,
        num_employees: config.num_employees,
        known_demand,
        scenarios,
        preferences,
        absence,
        costs: config.costs.clone(),
        provenance: Some(Provenance { seed: config.seed, config_hash: String::new() }),
        gen_config: Some(config.clone()),
    };
    let violations = validate_instance(&instance);
    if !violations.is_empty() {
        let text = violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ");
        return Err(GenError::InvalidInstance(text));
    }
    Ok(instance)
}

/// Draw a deliberately small random instance for oracle comparisons:
/// few employees, coarse periods, handmade duties, one week. Demands and
/// known demand are small enough for exhaustive solvers but otherwise
/// unconstrained, so some draws are infeasible on purpose. Panics only if
/// the sampler itself produces an invalid instance, which would be a bug.
pub fn sample_tiny_instance(seed: u64, index: u64) -> Instance {
    let mut rng = substream(seed, "tiny", &[index]);
    let num_days = 7;
    let periods = rng.gen_range(3..=6usize);
    let num_employees = rng.gen_range(2..=4usize);
    let num_duties = rng.gen_range(2..=5usize);
    let horizon = Horizon::new(num_days, periods);
    let patterns = build_pattern_catalog(&horizon);

    let mut duties = Vec::with_capacity(num_duties);
    for id in 0..num_duties {
        let work_hours: u32 = rng.gen_range(8..=10);
        let pause_hours: u32 = if work_hours == 10 { 0 } else { rng.gen_range(0..=3) };
        let len = rng.gen_range(1..=periods);
        let start = rng.gen_range(0..=periods - len);
        let mut coverage = vec![0u8; periods];
        for slot in coverage.iter_mut().skip(start).take(len) {
            *slot = 1;
        }
        duties.push(Duty {
            id,
            start,
            work_hours,
            pause_hours,
            coverage,
            cost: duty_cost(work_hours, pause_hours),
        });
    }

    let mut ranking: Vec<u8> = (1..=7).collect();
    let scores: Vec<Vec<u8>> = (0..num_employees)
        .map(|_| {
            ranking.shuffle(&mut rng);
            ranking.clone()
        })
        .collect();
    let preferences = PreferenceProfile { scores };

    let (low, high): (Vec<f64>, Vec<f64>) = (0..7)
        .map(|_| {
            let low = 0.01 + rng.gen::<f64>() * 0.05;
            let high = low + 0.03 + rng.gen::<f64>() * 0.15;
            (low, high)
        })
        .unzip();
    let grid = grid_from_whiskers(&low, &high).expect("tiny whiskers are in range");
    let q_pref = assign_absence_probabilities(&grid, &preferences, &horizon);
    let q_uniform: Vec<f64> = horizon
        .days()
        .map(|day| grid.mean[horizon.day_of_week(day) as usize - 1])
        .collect();
    let variant = if index % 2 == 0 { AbsenceVariant::PreferenceAware } else { AbsenceVariant::Uniform };

    let known_demand: Vec<i64> = (0..num_days)
        .map(|_| {
            let roll = rng.gen_range(0..10);
            let o = if roll < 6 { 0 } else if roll < 9 { 1 } else { 2 };
            o.min(num_employees as i64 - 2).max(0)
        })
        .collect();

    let scenarios: Vec<Vec<DailyScenario>> = (0..num_days)
        .map(|day| {
            let count = rng.gen_range(1..=2usize);
            let probabilities: Vec<Rational64> = if count == 1 {
                vec![Rational64::new(1, 1)]
            } else {
                match rng.gen_range(0..3) {
                    0 => vec![Rational64::new(1, 2), Rational64::new(1, 2)],
                    1 => vec![Rational64::new(1, 3), Rational64::new(2, 3)],
                    _ => vec![Rational64::new(1, 4), Rational64::new(3, 4)],
                }
            };
            probabilities
                .into_iter()
                .map(|probability| DailyScenario {
                    day,
                    demand: (0..periods).map(|_| rng.gen_range(0..=3)).collect(),
                    probability,
                })
                .collect()
        })
        .collect();

    let instance = Instance {
        schema_version: SCHEMA_VERSION,
        horizon,
        patterns,
        duties,
        num_employees,
        known_demand,
        scenarios,
        preferences,
        absence: AbsenceModel { variant, q_pref, q_uniform },
        costs: CostCoefficients::default(),
        provenance: None,
        gen_config: None,
    };
    let violations = validate_instance(&instance);
    assert!(violations.is_empty(), "tiny sampler bug: {violations:?}");
    instance
}

/// Draw a mid-sized random instance: eight to twelve employees, ten
/// equally likely demand scenarios per day, coarse periods, one week.
/// Weekday whiskers keep a spread of at least 0.1, so the gap between an
/// employee's best and worst day off stays visible in the absence rates.
/// Known demand is small relative to the board, which keeps draws
/// feasible. Panics only on a sampler bug.
pub fn sample_desk_instance(seed: u64, index: u64) -> Instance {
    let mut rng = substream(seed, "desk", &[index]);
    let num_days = 7;
    let periods = rng.gen_range(4..=6usize);
    let num_employees = rng.gen_range(8..=12usize);
    let num_duties = rng.gen_range(3..=5usize);
    let horizon = Horizon::new(num_days, periods);
    let patterns = build_pattern_catalog(&horizon);

    let mut duties = Vec::with_capacity(num_duties);
    for id in 0..num_duties {
        let work_hours: u32 = rng.gen_range(8..=10);
        let pause_hours: u32 = if work_hours == 10 { 0 } else { rng.gen_range(0..=3) };
        let len = rng.gen_range(1..=periods);
        let start = rng.gen_range(0..=periods - len);
        let mut coverage = vec![0u8; periods];
        for slot in coverage.iter_mut().skip(start).take(len) {
            *slot = 1;
        }
        duties.push(Duty {
            id,
            start,
            work_hours,
            pause_hours,
            coverage,
            cost: duty_cost(work_hours, pause_hours),
        });
    }

    let mut ranking: Vec<u8> = (1..=7).collect();
    let scores: Vec<Vec<u8>> = (0..num_employees)
        .map(|_| {
            ranking.shuffle(&mut rng);
            ranking.clone()
        })
        .collect();
    let preferences = PreferenceProfile { scores };

    let (low, high): (Vec<f64>, Vec<f64>) = (0..7)
        .map(|_| {
            let low = 0.02 + rng.gen::<f64>() * 0.04;
            let spread = 0.1 + rng.gen::<f64>() * 0.08;
            (low, low + spread)
        })
        .unzip();
    let grid = grid_from_whiskers(&low, &high).expect("desk whiskers are in range");
    let q_pref = assign_absence_probabilities(&grid, &preferences, &horizon);
    let q_uniform: Vec<f64> = horizon
        .days()
        .map(|day| grid.mean[horizon.day_of_week(day) as usize - 1])
        .collect();

    let known_demand: Vec<i64> = (0..num_days).map(|_| rng.gen_range(0..=2)).collect();

    let scenarios: Vec<Vec<DailyScenario>> = (0..num_days)
        .map(|day| {
            (0..10)
                .map(|_| DailyScenario {
                    day,
                    demand: (0..periods).map(|_| rng.gen_range(0..=6)).collect(),
                    probability: Rational64::new(1, 10),
                })
                .collect()
        })
        .collect();

    let instance = Instance {
        schema_version: SCHEMA_VERSION,
        horizon,
        patterns,
        duties,
        num_employees,
        known_demand,
        scenarios,
        preferences,
        absence: AbsenceModel { variant: AbsenceVariant::PreferenceAware, q_pref, q_uniform },
        costs: CostCoefficients::default(),
        provenance: None,
        gen_config: None,
    };
    let violations = validate_instance(&instance);
    assert!(violations.is_empty(), "desk sampler bug: {violations:?}");
    instance
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_generates_a_valid_instance() {
        let config = GenConfig::default();
        let instance = generate_instance(&config).unwrap();
        assert_eq!(instance.num_days(), 14);
        assert_eq!(instance.num_periods(), 24);
        assert_eq!(instance.num_employees, 50);
        assert_eq!(instance.duties.len(), 216);
        for day in 0..14 {
            assert_eq!(instance.num_scenarios(day), 100);
        }
        assert!(validate_instance(&instance).is_empty());
        assert_eq!(instance.gen_config.as_ref(), Some(&config));
        assert_eq!(instance.provenance.as_ref().unwrap().seed, 1);
    }

    #[test]
    fn generation_is_deterministic_in_the_config() {
        let mut config = GenConfig::default();
        config.num_employees = 8;
        config.durations_per_day = 2;
        config.shapes_per_day = 2;
        let a = generate_instance(&config).unwrap();
        let b = generate_instance(&config).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        config.seed = 2;
        let c = generate_instance(&config).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn growing_the_scenario_grid_extends_earlier_draws() {
        let mut small_config = GenConfig::default();
        small_config.num_employees = 5;
        small_config.durations_per_day = 2;
        small_config.shapes_per_day = 2;
        let mut big_config = small_config.clone();
        big_config.durations_per_day = 3;
        big_config.shapes_per_day = 3;
        let small = generate_instance(&small_config).unwrap();
        let big = generate_instance(&big_config).unwrap();
        for day in 0..14 {
            for di in 0..2 {
                for si in 0..2 {
                    let a = &small.scenarios[day][di * 2 + si];
                    let b = &big.scenarios[day][di * 3 + si];
                    assert_eq!(a.demand, b.demand, "day {day} pair ({di}, {si})");
                }
            }
        }
        // Everything that does not depend on the grid is untouched.
        assert_eq!(small.preferences, big.preferences);
        assert_eq!(small.absence, big.absence);
        assert_eq!(small.known_demand, big.known_demand);
    }

    #[test]
    fn a_balanced_assignment_can_cover_the_known_demand() {
        let mut config = GenConfig::default();
        config.num_employees = 21;
        config.durations_per_day = 2;
        config.shapes_per_day = 2;
        for seed in [1, 7, 2024] {
            config.seed = seed;
            let instance = generate_instance(&config).unwrap();
            let balanced: Vec<usize> = (0..21).map(|e| e % 7).collect();
            for day in 0..instance.num_days() {
                for variant in [AbsenceVariant::PreferenceAware, AbsenceVariant::Uniform] {
                    let present = instance.expected_present(&balanced, day, variant);
                    assert!(
                        present >= instance.known_demand[day] as f64,
                        "seed {seed} day {day}: {present} < {}",
                        instance.known_demand[day]
                    );
                }
            }
        }
    }

    #[test]
    fn preference_rates_follow_the_weekday_ranks() {
        let mut config = GenConfig::default();
        config.num_employees = 6;
        config.durations_per_day = 1;
        config.shapes_per_day = 1;
        let instance = generate_instance(&config).unwrap();
        // Within one employee, a day they rank higher for time off never
        // has a lower absence rate than a day they rank lower.
        for e in 0..6 {
            let ranking = &instance.preferences.scores[e];
            let ranks =
                crate::datagen::rank_weekdays(&crate::datagen::day_of_week_scores(ranking));
            for day_a in 0..7usize {
                for day_b in 0..7usize {
                    let (qa, qb) = (instance.absence.q_pref[e][day_a], instance.absence.q_pref[e][day_b]);
                    if ranks[day_a] > ranks[day_b] {
                        assert!(
                            qa >= qb,
                            "employee {e}: rank {} rate {qa} vs rank {} rate {qb}",
                            ranks[day_a],
                            ranks[day_b]
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn bad_configs_are_rejected() {
        let mut config = GenConfig::default();
        config.num_days = 10;
        assert!(generate_instance(&config).is_err());
        let mut config = GenConfig::default();
        config.periods_per_day = 12;
        assert!(matches!(generate_instance(&config), Err(GenError::Duty(_))));
        let mut config = GenConfig::default();
        config.num_employees = 0;
        assert!(generate_instance(&config).is_err());
    }

    #[test]
    fn config_round_trips_through_json_with_defaults() {
        let config = GenConfig::default();
        let json = serde_json::to_string(&config).unwrap();
        let back: GenConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, config);
        let sparse: GenConfig = serde_json::from_str(r#"{"seed": 9, "num_employees": 12}"#).unwrap();
        assert_eq!(sparse.seed, 9);
        assert_eq!(sparse.num_employees, 12);
        assert_eq!(sparse.shapes, ShapeGenConfig::default());
    }

    #[test]
    fn tiny_instances_validate_and_vary() {
        let mut saw_uniform = false;
        let mut saw_pref = false;
        let mut saw_demand = false;
        let mut saw_two_scenarios = false;
        for index in 0..40 {
            let instance = sample_tiny_instance(99, index);
            assert!(validate_instance(&instance).is_empty());
            assert_eq!(instance.num_days(), 7);
            assert!(instance.num_periods() >= 3 && instance.num_periods() <= 6);
            assert!(instance.num_employees >= 2 && instance.num_employees <= 4);
            match instance.absence.variant {
                AbsenceVariant::Uniform => saw_uniform = true,
                AbsenceVariant::PreferenceAware => saw_pref = true,
            }
            saw_demand |= instance.known_demand.iter().any(|&o| o > 0);
            saw_two_scenarios |= (0..7).any(|j| instance.num_scenarios(j) == 2);
            // Same key, same instance.
            assert_eq!(instance, sample_tiny_instance(99, index));
        }
        assert!(saw_uniform && saw_pref && saw_demand && saw_two_scenarios);
    }
}
