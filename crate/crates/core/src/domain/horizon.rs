//! Planning horizon and weekday bookkeeping.

use serde::{Deserialize, Serialize};

/// Weekday codes run 1..=7 with day 1 of the horizon being a Sunday.
pub const SUNDAY: u8 = 1;
pub const SATURDAY: u8 = 7;

static WEEKDAY_NAMES: [&str; 7] = ["Sun", "Mon", "Tue", "Wed", "Thu", "Fri", "Sat"];

/// Short English name for a weekday code in 1..=7.
pub fn weekday_name(weekday: u8) -> &'static str {
    WEEKDAY_NAMES[(weekday as usize - 1) % 7]
}

/// The planning horizon: whole weeks of days, each split into equal
/// periods (hours in every shipped configuration).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Horizon {
    pub num_days: usize,
    pub periods_per_day: usize,
}

impl Horizon {
    pub fn new(num_days: usize, periods_per_day: usize) -> Horizon {
        Horizon { num_days, periods_per_day }
    }

    /// Weekday code (1..=7, 1 = Sunday) of a 0-based day index.
    pub fn day_of_week(&self, day: usize) -> u8 {
        (day % 7) as u8 + 1
    }

    pub fn num_weeks(&self) -> usize {
        self.num_days / 7
    }

    pub fn days(&self) -> std::ops::Range<usize> {
        0..self.num_days
    }

    pub fn periods(&self) -> std::ops::Range<usize> {
        0..self.periods_per_day
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weekdays_start_on_sunday_and_wrap() {
        let h = Horizon::new(14, 24);
        assert_eq!(h.day_of_week(0), SUNDAY);
        assert_eq!(h.day_of_week(6), SATURDAY);
        assert_eq!(h.day_of_week(7), SUNDAY);
        // Days 4 and 11 in 1-based counting are Wednesdays.
        assert_eq!(h.day_of_week(3), 4);
        assert_eq!(h.day_of_week(10), 4);
        assert_eq!(weekday_name(4), "Wed");
        assert_eq!(h.num_weeks(), 2);
    }
}
