//! Duty catalog.
//!
//! A duty is a within-day work shape: a start hour, 8 to 10 worked hours
//! and an optional centered pause of up to 3 hours splitting the work into
//! two blocks. Cost is 8 regular hours at rate 1, overtime hours at 1.5
//! and pause hours at 0.5, so every duty costs between 8 and 11 units.

use super::money::Cost;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One duty the dispatcher can assign on a day.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Duty {
    pub id: usize,
    /// Start period (hour) of the first work block.
    pub start: usize,
    pub work_hours: u32,
    pub pause_hours: u32,
    /// Coverage indicator per period (a): 1 during worked hours only.
    pub coverage: Vec<u8>,
    pub cost: Cost,
}

impl Duty {
    pub fn span_hours(&self) -> u32 {
        self.work_hours + self.pause_hours
    }

    pub fn overtime_hours(&self) -> u32 {
        self.work_hours.saturating_sub(8)
    }

    pub fn covers(&self, period: usize) -> bool {
        self.coverage[period] == 1
    }
}

/// Cost of a duty with the given worked and pause hours: 8 regular hours
/// at rate 1, overtime at 1.5, pause at 0.5. Exact in quarter units.
pub fn duty_cost(work_hours: u32, pause_hours: u32) -> Cost {
    let overtime = work_hours as i64 - 8;
    Cost::from_quarters(32 + 6 * overtime + 2 * pause_hours as i64)
}

/// Catalog generation parameters. The default enumerates every hourly
/// start with work 8..=10h and centered pauses 0..=3h, keeps spans of at
/// most 12h and costs within [8, 11], and wraps past midnight; that yields
/// 216 duties.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DutyConfig {
    pub start_hours: Vec<usize>,
    pub work_hours: Vec<u32>,
    pub pause_hours: Vec<u32>,
    pub max_span_hours: u32,
    pub min_cost: Cost,
    pub max_cost: Cost,
    /// Allow duties to wrap past the end of the day.
    pub wrap: bool,
}

impl Default for DutyConfig {
    fn default() -> DutyConfig {
        DutyConfig {
            start_hours: (0..24).collect(),
            work_hours: vec![8, 9, 10],
            pause_hours: vec![0, 1, 2, 3],
            max_span_hours: 12,
            min_cost: Cost::from_units(8),
            max_cost: Cost::from_units(11),
            wrap: true,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DutyConfigError {
    #[error("duty catalog needs hourly periods, got {0} periods per day")]
    NotHourly(usize),
    #[error("duty config produced an empty catalog")]
    Empty,
    #[error("start hour {0} is outside the day")]
    BadStart(usize),
    #[error("work hours {0} outside the 8..=10 range")]
    BadWork(u32),
    #[error("pause hours {0} outside the 0..=3 range")]
    BadPause(u32),
}

/// Enumerate the duty catalog for hourly periods.
///
/// Combinations violating the span or cost limits are skipped, not
/// errors; the pause is centered, with the longer work block first when
/// the worked hours are odd.
pub fn build_duty_catalog(
    periods_per_day: usize,
    config: &DutyConfig,
) -> Result<Vec<Duty>, DutyConfigError> {
    if periods_per_day != 24 {
        return Err(DutyConfigError::NotHourly(periods_per_day));
    }
    for &s in &config.start_hours {
        if s >= periods_per_day {
            return Err(DutyConfigError::BadStart(s));
        }
    }
    for &w in &config.work_hours {
        if !(8..=10).contains(&w) {
            return Err(DutyConfigError::BadWork(w));
        }
    }
    for &p in &config.pause_hours {
        if p > 3 {
            return Err(DutyConfigError::BadPause(p));
        }
    }

    let mut duties = Vec::new();
    for &start in &config.start_hours {
        for &work in &config.work_hours {
            for &pause in &config.pause_hours {
                let span = work + pause;
                if span > config.max_span_hours {
                    continue;
                }
                if !config.wrap && start + span as usize > periods_per_day {
                    continue;
                }
                let cost = duty_cost(work, pause);
                if cost < config.min_cost || cost > config.max_cost {
                    continue;
                }
                let mut coverage = vec![0u8; periods_per_day];
                let first_block = work - work / 2;
                for h in 0..span {
                    let in_pause = h >= first_block && h < first_block + pause;
                    if !in_pause {
                        coverage[(start + h as usize) % periods_per_day] = 1;
                    }
                }
                duties.push(Duty {
                    id: duties.len(),
                    start,
                    work_hours: work,
                    pause_hours: pause,
                    coverage,
                    cost,
                });
            }
        }
    }
    if duties.is_empty() {
        return Err(DutyConfigError::Empty);
    }
    Ok(duties)
}
