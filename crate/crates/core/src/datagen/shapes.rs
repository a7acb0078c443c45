//! Within-day demand shapes.
//!
//! A shape splits one day's total duration across periods: a non-negative
//! vector summing to 1. Weekday templates put two Gaussian bumps at the
//! morning and evening rushes over a uniform floor; weekend templates are
//! blended toward flat. Sampled shapes are Dirichlet draws concentrated
//! around the template.

use super::{stream::substream, GenError};
use rand_distr::{Dirichlet, Distribution};
use serde::{Deserialize, Serialize};

/// Knobs of the shape sampler. Peak positions are hours on a 24h clock
/// regardless of how many periods the day has.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeGenConfig {
    /// Dirichlet tightness; larger values keep draws closer to the template.
    pub concentration: f64,
    pub morning_peak: f64,
    pub evening_peak: f64,
    /// Gaussian width of both peaks, in hours.
    pub peak_width: f64,
    /// Share of the day's demand spread evenly across all periods.
    pub uniform_floor: f64,
    /// How far Saturday and Sunday templates are pulled toward flat (0..=1).
    pub weekend_flatten: f64,
}

impl Default for ShapeGenConfig {
    fn default() -> ShapeGenConfig {
        ShapeGenConfig {
            concentration: 60.0,
            morning_peak: 8.0,
            evening_peak: 17.0,
            peak_width: 2.5,
            uniform_floor: 0.25,
            weekend_flatten: 0.6,
        }
    }
}

fn check_config(config: &ShapeGenConfig) -> Result<(), GenError> {
    let fields = [
        ("concentration", config.concentration),
        ("morning_peak", config.morning_peak),
        ("evening_peak", config.evening_peak),
        ("peak_width", config.peak_width),
        ("uniform_floor", config.uniform_floor),
        ("weekend_flatten", config.weekend_flatten),
    ];
    for (name, value) in fields {
        if !value.is_finite() {
            return Err(GenError::BadConfig(format!("shape {name} must be finite")));
        }
    }
    if config.concentration <= 0.0 || config.peak_width <= 0.0 {
        return Err(GenError::BadConfig("shape concentration and peak width must be positive".into()));
    }
    if !(0.0..=1.0).contains(&config.uniform_floor) || !(0.0..=1.0).contains(&config.weekend_flatten) {
        return Err(GenError::BadConfig("shape floor and flatten must lie in [0, 1]".into()));
    }
    Ok(())
}

fn circular_hours(a: f64, b: f64) -> f64 {
    let d = (a - b).abs() % 24.0;
    d.min(24.0 - d)
}

/// Expected demand share per period for one weekday (1 = Sunday).
pub fn weekday_template(config: &ShapeGenConfig, weekday: u8, periods: usize) -> Vec<f64> {
    assert!(periods > 0, "a day needs at least one period");
    assert!((1..=7).contains(&weekday), "weekday {weekday} outside 1..=7");
    let flat = 1.0 / periods as f64;
    let peaks: Vec<f64> = (0..periods)
        .map(|t| {
            let hour = (t as f64 + 0.5) * 24.0 / periods as f64;
            let m = circular_hours(hour, config.morning_peak) / config.peak_width;
            let e = circular_hours(hour, config.evening_peak) / config.peak_width;
            (-0.5 * m * m).exp() + (-0.5 * e * e).exp()
        })
        .collect();
    let peak_sum: f64 = peaks.iter().sum();
    let mut template: Vec<f64> = if peak_sum > 0.0 {
        peaks
            .iter()
            .map(|&p| config.uniform_floor * flat + (1.0 - config.uniform_floor) * p / peak_sum)
            .collect()
    } else {
        vec![flat; periods]
    };
    if weekday == crate::domain::SUNDAY || weekday == crate::domain::SATURDAY {
        for value in &mut template {
            *value = config.weekend_flatten * flat + (1.0 - config.weekend_flatten) * *value;
        }
    }
    let total: f64 = template.iter().sum();
    for value in &mut template {
        *value /= total;
    }
    template
}

/// Sampled demand shapes, `by_weekday[weekday - 1][draw][period]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeLibrary {
    pub by_weekday: Vec<Vec<Vec<f64>>>,
}

/// Draw `shapes_per_day` shapes per weekday on the `("shape", [weekday])`
/// substreams of `seed`.
pub fn build_shape_library(
    config: &ShapeGenConfig,
    periods: usize,
    shapes_per_day: usize,
    seed: u64,
) -> Result<ShapeLibrary, GenError> {
    check_config(config)?;
    if periods == 0 {
        return Err(GenError::BadConfig("a day needs at least one period".into()));
    }
    if shapes_per_day == 0 {
        return Err(GenError::BadConfig("need at least one shape per day".into()));
    }
    let mut by_weekday = Vec::with_capacity(7);
    for weekday in 1..=7u8 {
        let mut rng = substream(seed, "shape", &[weekday as u64]);
        by_weekday.push(sample_shapes(config, weekday, periods, shapes_per_day, &mut rng)?);
    }
    Ok(ShapeLibrary { by_weekday })
}

/// Draw `count` shapes for one weekday from the given stream.
pub fn sample_shapes(
    config: &ShapeGenConfig,
    weekday: u8,
    periods: usize,
    count: usize,
    rng: &mut impl rand::Rng,
) -> Result<Vec<Vec<f64>>, GenError> {
    check_config(config)?;
    if periods == 0 {
        return Err(GenError::BadConfig("a day needs at least one period".into()));
    }
    if periods == 1 {
        return Ok(vec![vec![1.0]; count]);
    }
    let template = weekday_template(config, weekday, periods);
    let alpha: Vec<f64> = template
        .iter()
        .map(|&t| (config.concentration * periods as f64 * t).max(1e-3))
        .collect();
    let dirichlet =
        Dirichlet::new(&alpha).map_err(|e| GenError::BadConfig(format!("dirichlet: {e}")))?;
    Ok((0..count).map(|_| dirichlet.sample(rng)).collect())
}
