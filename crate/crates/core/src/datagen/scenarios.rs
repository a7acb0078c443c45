//! Combining duration draws and shape draws into daily demand scenarios.

use super::GenError;
use crate::domain::DailyScenario;
use crate::numeric::largest_remainder;
use num_rational::Rational64;

/// Build one day's scenario set as the cross product of duration draws
/// and shape draws, duration-major. Each scenario's demand vector is the
/// shape scaled to the duration and rounded by largest remainder, so the
/// integer demand sums exactly to the rounded duration. All scenarios of
/// a day are equally likely.
pub fn assemble_scenarios(
    day: usize,
    durations: &[f64],
    shapes: &[Vec<f64>],
) -> Result<Vec<DailyScenario>, GenError> {
    if durations.is_empty() || shapes.is_empty() {
        return Err(GenError::BadConfig("need at least one duration and one shape".into()));
    }
    let periods = shapes[0].len();
    if periods == 0 {
        return Err(GenError::BadConfig("shapes must have at least one period".into()));
    }
    for (i, shape) in shapes.iter().enumerate() {
        if shape.len() != periods {
            return Err(GenError::BadConfig(format!(
                "shape {i} has {} periods, expected {periods}",
                shape.len()
            )));
        }
        if shape.iter().any(|&v| !v.is_finite() || v < 0.0) {
            return Err(GenError::BadConfig(format!("shape {i} has a negative or non-finite entry")));
        }
        let total: f64 = shape.iter().sum();
        if (total - 1.0).abs() > 1e-6 {
            return Err(GenError::BadConfig(format!("shape {i} sums to {total}, not 1")));
        }
    }
    for (i, &d) in durations.iter().enumerate() {
        if !d.is_finite() || d < 0.0 {
            return Err(GenError::BadConfig(format!("duration {i} is negative or non-finite")));
        }
    }

    let count = durations.len() * shapes.len();
    let probability = Rational64::new(1, count as i64);
    let mut out = Vec::with_capacity(count);
    for &duration in durations {
        let total = duration.round() as i64;
        for shape in shapes {
            let targets: Vec<f64> = shape.iter().map(|&share| share * duration).collect();
            out.push(DailyScenario {
                day,
                demand: largest_remainder(&targets, total),
                probability,
            });
        }
    }
    Ok(out)
}
