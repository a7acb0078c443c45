//! Preference-dependent absence probabilities.
//!
//! For each weekday, historical daily absence rates are summarized by
//! their whiskers (the extreme observations within 1.5 interquartile
//! ranges of the quartiles). The grid spans seven equally spaced rates
//! from the lower whisker to the upper one. An employee working a weekday
//! they rank n-th in days-off desire (1 = least desired off) is absent
//! with probability equal to the weekday's n-th grid point: the more they
//! wanted the day off, the likelier the absence. The uniform variant
//! ignores preferences and uses the weekday's mean rate for everyone.

use super::preferences::{day_of_week_scores, rank_weekdays};
use super::stream::substream;
use super::GenError;
use crate::domain::{Horizon, PreferenceProfile};
use crate::numeric::tukey_whiskers;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Per-weekday absence rates by days-off desire rank.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbsenceRateGrid {
    /// Lower whisker per weekday, Sunday first.
    pub low: Vec<f64>,
    /// Upper whisker per weekday.
    pub high: Vec<f64>,
    /// Mean rate per weekday, used by the uniform variant.
    pub mean: Vec<f64>,
    /// `values[weekday - 1][rank - 1]`, seven equally spaced points from
    /// the lower to the upper whisker.
    pub values: Vec<Vec<f64>>,
}

impl AbsenceRateGrid {
    /// Rate for a weekday (1 = Sunday) and desire rank (1 = least desired
    /// day off, 7 = most desired).
    pub fn rate(&self, weekday: u8, rank: u8) -> f64 {
        assert!((1..=7).contains(&weekday) && (1..=7).contains(&rank));
        self.values[weekday as usize - 1][rank as usize - 1]
    }
}

fn check_whiskers(low: &[f64], high: &[f64]) -> Result<(), GenError> {
    if low.len() != 7 || high.len() != 7 {
        return Err(GenError::BadConfig("whiskers need one (low, high) pair per weekday".into()));
    }
    for i in 0..7 {
        if !low[i].is_finite() || !high[i].is_finite() {
            return Err(GenError::BadConfig("whiskers must be finite".into()));
        }
        if !(0.0 <= low[i] && low[i] <= high[i] && high[i] < 1.0) {
            return Err(GenError::BadConfig(format!(
                "weekday {} whiskers ({}, {}) must satisfy 0 <= low <= high < 1",
                i + 1,
                low[i],
                high[i]
            )));
        }
    }
    Ok(())
}

/// Span a grid directly from per-weekday whiskers. The mean defaults to
/// the midpoint, which is also the average of the seven grid points.
pub fn grid_from_whiskers(low: &[f64], high: &[f64]) -> Result<AbsenceRateGrid, GenError> {
    check_whiskers(low, high)?;
    let values = (0..7)
        .map(|i| {
            (0..7)
                .map(|n| {
                    if n == 6 {
                        high[i]
                    } else {
                        low[i] + (high[i] - low[i]) * n as f64 / 6.0
                    }
                })
                .collect()
        })
        .collect();
    Ok(AbsenceRateGrid {
        low: low.to_vec(),
        high: high.to_vec(),
        mean: (0..7).map(|i| (low[i] + high[i]) / 2.0).collect(),
        values,
    })
}

/// Build a grid from historical daily rates, one sample list per weekday
/// (Sunday first). Whiskers need at least four observations to say
/// anything about quartiles.
pub fn build_absence_grid(history: &[Vec<f64>]) -> Result<AbsenceRateGrid, GenError> {
    if history.len() != 7 {
        return Err(GenError::BadConfig("history needs one sample list per weekday".into()));
    }
    let mut low = Vec::with_capacity(7);
    let mut high = Vec::with_capacity(7);
    let mut mean = Vec::with_capacity(7);
    for (i, samples) in history.iter().enumerate() {
        let weekday = i as u8 + 1;
        if samples.len() < 4 {
            return Err(GenError::TooFewSamples { weekday, got: samples.len() });
        }
        if samples.iter().any(|&r| !r.is_finite() || !(0.0..1.0).contains(&r)) {
            return Err(GenError::BadConfig(format!(
                "weekday {weekday} has a rate outside [0, 1)"
            )));
        }
        let (lo, hi) = tukey_whiskers(samples);
        low.push(lo);
        high.push(hi);
        mean.push(samples.iter().sum::<f64>() / samples.len() as f64);
    }
    let mut grid = grid_from_whiskers(&low, &high)?;
    grid.mean = mean;
    Ok(grid)
}

/// Synthetic history knobs: independent uniform draws between the
/// configured per-weekday bounds stand in for a year of daily rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbsenceGenConfig {
    pub history_samples: usize,
    pub weekday_low: Vec<f64>,
    pub weekday_high: Vec<f64>,
}

impl Default for AbsenceGenConfig {
    fn default() -> AbsenceGenConfig {
        AbsenceGenConfig {
            history_samples: 52,
            weekday_low: vec![0.022, 0.030, 0.034, 0.038, 0.036, 0.031, 0.026],
            weekday_high: vec![0.154, 0.158, 0.166, 0.171, 0.168, 0.160, 0.150],
        }
    }
}

/// Draw the synthetic rate history on the `("absence-history", [weekday])`
/// substreams of `seed`.
pub fn synth_history(config: &AbsenceGenConfig, seed: u64) -> Result<Vec<Vec<f64>>, GenError> {
    check_whiskers(&config.weekday_low, &config.weekday_high)?;
    if config.history_samples < 4 {
        return Err(GenError::BadConfig("need at least 4 history samples per weekday".into()));
    }
    Ok((0..7)
        .map(|i| {
            let mut rng = substream(seed, "absence-history", &[i as u64 + 1]);
            (0..config.history_samples)
                .map(|_| rng.gen_range(config.weekday_low[i]..=config.weekday_high[i]))
                .collect()
        })
        .collect())
}

/// Absence probability per employee and day: each employee's weekday
/// desire ranks select rows of the grid along the horizon.
pub fn assign_absence_probabilities(
    grid: &AbsenceRateGrid,
    preferences: &PreferenceProfile,
    horizon: &Horizon,
) -> Vec<Vec<f64>> {
    preferences
        .scores
        .iter()
        .map(|ranking| {
            let ranks = rank_weekdays(&day_of_week_scores(ranking));
            horizon
                .days()
                .map(|day| {
                    let weekday = horizon.day_of_week(day);
                    grid.rate(weekday, ranks[weekday as usize - 1])
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn reference_whiskers() -> (Vec<f64>, Vec<f64>) {
        let config = AbsenceGenConfig::default();
        (config.weekday_low, config.weekday_high)
    }

    #[test]
    fn grid_points_are_equally_spaced_whisker_to_whisker() {
        let (low, high) = reference_whiskers();
        let grid = grid_from_whiskers(&low, &high).unwrap();
        for i in 0..7 {
            let row = &grid.values[i];
            assert_eq!(row[0], low[i]);
            assert_eq!(row[6], high[i]);
            let step = (high[i] - low[i]) / 6.0;
            for n in 1..7 {
                assert_abs_diff_eq!(row[n] - row[n - 1], step, epsilon = 1e-12);
            }
            assert_abs_diff_eq!(grid.mean[i], (low[i] + high[i]) / 2.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn wednesday_second_rank_and_sunday_top_rank() {
        // Wednesday whiskers (0.038, 0.171): the second grid point is
        // 0.038 + (0.171 - 0.038) / 6, about 0.060. Sunday whiskers
        // (0.022, 0.154): the top grid point is the upper whisker itself.
        let (low, high) = reference_whiskers();
        let grid = grid_from_whiskers(&low, &high).unwrap();
        assert_abs_diff_eq!(grid.rate(4, 2), 0.06016666666666667, epsilon = 1e-12);
        assert_eq!(grid.rate(1, 7), 0.154);
    }

    #[test]
    fn modal_employee_rates_along_a_fortnight() {
        let (low, high) = reference_whiskers();
        let grid = grid_from_whiskers(&low, &high).unwrap();
        let prefs = PreferenceProfile { scores: vec![vec![6, 1, 2, 3, 4, 5, 7]] };
        let horizon = Horizon::new(14, 24);
        let q = assign_absence_probabilities(&grid, &prefs, &horizon);
        assert_eq!(q.len(), 1);
        assert_eq!(q[0].len(), 14);
        // Days 3 and 10 are Wednesdays (rank 2), days 0 and 7 Sundays (rank 7).
        assert_abs_diff_eq!(q[0][3], 0.06016666666666667, epsilon = 1e-12);
        assert_eq!(q[0][3], q[0][10]);
        assert_eq!(q[0][0], 0.154);
        assert_eq!(q[0][0], q[0][7]);
        // Tuesday is the least desired day off, so it gets the lower whisker.
        assert_eq!(q[0][2], grid.low[2]);
    }

    #[test]
    fn history_grid_stays_inside_the_configured_bounds() {
        let config = AbsenceGenConfig::default();
        let history = synth_history(&config, 77).unwrap();
        let grid = build_absence_grid(&history).unwrap();
        for i in 0..7 {
            assert!(grid.low[i] >= config.weekday_low[i]);
            assert!(grid.high[i] <= config.weekday_high[i]);
            assert!(grid.low[i] < grid.high[i]);
            assert!(grid.mean[i] > grid.low[i] && grid.mean[i] < grid.high[i]);
        }
        // Deterministic in the seed.
        assert_eq!(history, synth_history(&config, 77).unwrap());
        assert_ne!(history, synth_history(&config, 78).unwrap());
    }

    #[test]
    fn degenerate_history_collapses_the_grid() {
        let history: Vec<Vec<f64>> = (0..7).map(|_| vec![0.1; 10]).collect();
        let grid = build_absence_grid(&history).unwrap();
        assert!(grid.values.iter().flatten().all(|&v| v == 0.1));
    }

    #[test]
    fn bad_inputs_are_rejected() {
        let mut history: Vec<Vec<f64>> = (0..7).map(|_| vec![0.1; 10]).collect();
        history[2] = vec![0.1; 3];
        assert!(matches!(
            build_absence_grid(&history),
            Err(GenError::TooFewSamples { weekday: 3, got: 3 })
        ));
        assert!(grid_from_whiskers(&[0.1; 7], &[0.05; 7]).is_err());
        assert!(grid_from_whiskers(&[0.1; 7], &[1.0; 7]).is_err());
        assert!(grid_from_whiskers(&[0.1; 6], &[0.2; 6]).is_err());
    }
}
