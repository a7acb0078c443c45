//! Per-weekday models of the total service duration left uncovered by
//! unknown absences on one day, in hours.

use super::GenError;
use rand::Rng;
use rand_distr::{Distribution, Gamma, LogNormal, Normal};
use serde::{Deserialize, Serialize};

/// Distribution family shared by all weekdays of a duration model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DurationFamily {
    LogNormal,
    Gamma,
    TruncatedNormal,
    PointMass,
}

/// Two-parameter summary of one weekday's duration distribution. What the
/// fields mean depends on the family:
///
/// * `LogNormal`: `center` is the median, `spread` the log-space sigma.
/// * `Gamma`: `center` is the mean, `spread` the standard deviation.
/// * `TruncatedNormal`: mean and standard deviation before truncation at 0.
/// * `PointMass`: every draw equals `center`; `spread` is ignored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeekdayDuration {
    pub center: f64,
    pub spread: f64,
}

/// Duration distribution for all seven weekdays, indexed Sunday first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DurationModel {
    pub family: DurationFamily,
    pub by_weekday: Vec<WeekdayDuration>,
}

impl Default for DurationModel {
    fn default() -> DurationModel {
        let centers = [110.0, 150.0, 158.0, 160.0, 158.0, 152.0, 120.0];
        DurationModel {
            family: DurationFamily::LogNormal,
            by_weekday: centers
                .iter()
                .map(|&center| WeekdayDuration { center, spread: 0.25 })
                .collect(),
        }
    }
}

fn check_params(family: DurationFamily, p: WeekdayDuration) -> Result<(), GenError> {
    if !p.center.is_finite() || !p.spread.is_finite() {
        return Err(GenError::BadConfig("duration parameters must be finite".into()));
    }
    match family {
        DurationFamily::LogNormal | DurationFamily::Gamma => {
            if p.center <= 0.0 || p.spread <= 0.0 {
                return Err(GenError::BadConfig(format!(
                    "duration center {} and spread {} must be positive",
                    p.center, p.spread
                )));
            }
        }
        DurationFamily::TruncatedNormal => {
            if p.spread <= 0.0 {
                return Err(GenError::BadConfig("duration spread must be positive".into()));
            }
        }
        DurationFamily::PointMass => {
            if p.center < 0.0 {
                return Err(GenError::BadConfig("point-mass duration must be non-negative".into()));
            }
        }
    }
    Ok(())
}

/// Draw `count` day totals for `weekday` (1 = Sunday .. 7 = Saturday).
/// Draws are sequential on the given stream, so a longer run extends a
/// shorter one instead of replacing it.
pub fn sample_durations(
    model: &DurationModel,
    weekday: u8,
    count: usize,
    rng: &mut impl Rng,
) -> Result<Vec<f64>, GenError> {
    if !(1..=7).contains(&weekday) {
        return Err(GenError::BadConfig(format!("weekday {weekday} outside 1..=7")));
    }
    if model.by_weekday.len() != 7 {
        return Err(GenError::BadConfig(format!(
            "duration model has {} weekday entries, need 7",
            model.by_weekday.len()
        )));
    }
    let p = model.by_weekday[weekday as usize - 1];
    check_params(model.family, p)?;
    let mut out = Vec::with_capacity(count);
    match model.family {
        DurationFamily::LogNormal => {
            let dist = LogNormal::new(p.center.ln(), p.spread)
                .map_err(|e| GenError::BadConfig(format!("log-normal: {e}")))?;
            for _ in 0..count {
                out.push(dist.sample(rng));
            }
        }
        DurationFamily::Gamma => {
            let shape = (p.center / p.spread).powi(2);
            let scale = p.spread * p.spread / p.center;
            let dist = Gamma::new(shape, scale)
                .map_err(|e| GenError::BadConfig(format!("gamma: {e}")))?;
            for _ in 0..count {
                out.push(dist.sample(rng));
            }
        }
        DurationFamily::TruncatedNormal => {
            let dist = Normal::new(p.center, p.spread)
                .map_err(|e| GenError::BadConfig(format!("normal: {e}")))?;
            for _ in 0..count {
                let mut value = dist.sample(rng);
                let mut tries = 0;
                while value < 0.0 && tries < 100 {
                    value = dist.sample(rng);
                    tries += 1;
                }
                out.push(value.max(0.0));
            }
        }
        DurationFamily::PointMass => {
            out.resize(count, p.center);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::substream;

    fn flat(family: DurationFamily, center: f64, spread: f64) -> DurationModel {
        DurationModel {
            family,
            by_weekday: vec![WeekdayDuration { center, spread }; 7],
        }
    }

    #[test]
    fn log_normal_median_matches_center() {
        let model = flat(DurationFamily::LogNormal, 150.0, 0.25);
        let mut rng = substream(11, "duration", &[0]);
        let mut draws = sample_durations(&model, 4, 100_000, &mut rng).unwrap();
        draws.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = draws[draws.len() / 2];
        assert!((median - 150.0).abs() < 150.0 * 0.03, "median {median}");
        assert!(draws.iter().all(|&d| d > 0.0));
    }

    #[test]
    fn gamma_moments_match() {
        let model = flat(DurationFamily::Gamma, 120.0, 30.0);
        let mut rng = substream(11, "duration", &[1]);
        let draws = sample_durations(&model, 2, 100_000, &mut rng).unwrap();
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / draws.len() as f64;
        assert!((mean - 120.0).abs() < 1.0, "mean {mean}");
        assert!((var.sqrt() - 30.0).abs() < 1.0, "sd {}", var.sqrt());
    }

    #[test]
    fn truncated_normal_never_negative() {
        let model = flat(DurationFamily::TruncatedNormal, 5.0, 40.0);
        let mut rng = substream(11, "duration", &[2]);
        let draws = sample_durations(&model, 6, 10_000, &mut rng).unwrap();
        assert!(draws.iter().all(|&d| d >= 0.0));
    }

    #[test]
    fn point_mass_is_exact() {
        let model = flat(DurationFamily::PointMass, 240.0, 0.0);
        let mut rng = substream(11, "duration", &[3]);
        let draws = sample_durations(&model, 1, 5, &mut rng).unwrap();
        assert_eq!(draws, vec![240.0; 5]);
    }

    #[test]
    fn longer_run_extends_shorter_one() {
        let model = DurationModel::default();
        let short = sample_durations(&model, 3, 5, &mut substream(9, "duration", &[4])).unwrap();
        let long = sample_durations(&model, 3, 10, &mut substream(9, "duration", &[4])).unwrap();
        assert_eq!(short, long[..5]);
    }

    #[test]
    fn bad_params_are_rejected() {
        let model = flat(DurationFamily::LogNormal, -1.0, 0.25);
        let mut rng = substream(11, "duration", &[5]);
        assert!(sample_durations(&model, 1, 1, &mut rng).is_err());
        let model = flat(DurationFamily::Gamma, 100.0, 0.0);
        assert!(sample_durations(&model, 1, 1, &mut rng).is_err());
        assert!(sample_durations(&DurationModel::default(), 0, 1, &mut rng).is_err());
    }
}
