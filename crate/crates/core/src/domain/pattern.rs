//! Weekly days-off patterns.
//!
//! Exactly seven patterns exist: two consecutive weekly days off, one
//! pattern per starting weekday, repeated every week of the horizon.
//! Pattern ids follow the week: 0 = Sun-Mon, 1 = Mon-Tue, .., 6 = Sat-Sun.

use super::horizon::{weekday_name, Horizon};
use serde::{Deserialize, Serialize};

pub const NUM_PATTERNS: usize = 7;

/// One weekly days-off pattern expanded over the horizon.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DaysOffPattern {
    pub id: usize,
    /// The two weekly off days as weekday codes, consecutive mod 7.
    pub off_pair: (u8, u8),
    /// Work indicator per horizon day (r): 1 when the employee works.
    pub work: Vec<u8>,
    /// Off indicator per horizon day (b = 1 - r).
    pub off: Vec<u8>,
}

impl DaysOffPattern {
    pub fn works_on(&self, day: usize) -> bool {
        self.work[day] == 1
    }

    pub fn off_on(&self, day: usize) -> bool {
        self.off[day] == 1
    }

    /// Does the weekly pattern keep this weekday (1..=7) off?
    pub fn weekday_off(&self, weekday: u8) -> bool {
        self.off_pair.0 == weekday || self.off_pair.1 == weekday
    }

    /// "Sat-Sun" style display name.
    pub fn name(&self) -> String {
        format!("{}-{}", weekday_name(self.off_pair.0), weekday_name(self.off_pair.1))
    }
}

/// Build the seven-pattern catalog for a horizon of whole weeks.
pub fn build_pattern_catalog(horizon: &Horizon) -> Vec<DaysOffPattern> {
    (0..NUM_PATTERNS)
        .map(|p| {
            let first = p as u8 + 1;
            let second = (p as u8 + 1) % 7 + 1;
            let off: Vec<u8> = horizon
                .days()
                .map(|d| {
                    let w = horizon.day_of_week(d);
                    u8::from(w == first || w == second)
                })
                .collect();
            let work: Vec<u8> = off.iter().map(|&b| 1 - b).collect();
            DaysOffPattern { id: p, off_pair: (first, second), work, off }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seven_patterns_cover_consecutive_pairs() {
        let h = Horizon::new(14, 24);
        let cat = build_pattern_catalog(&h);
        assert_eq!(cat.len(), 7);
        assert_eq!(cat[0].off_pair, (1, 2)); // Sun-Mon
        assert_eq!(cat[6].off_pair, (7, 1)); // Sat-Sun wraps
        assert_eq!(cat[6].name(), "Sat-Sun");
        for p in &cat {
            let second = p.off_pair.0 % 7 + 1;
            assert_eq!(p.off_pair.1, second);
        }
    }

    #[test]
    fn off_days_expand_to_every_matching_weekday() {
        let h = Horizon::new(14, 24);
        let cat = build_pattern_catalog(&h);
        // Mon-Tue is off exactly on days 2,3,9,10 in 1-based counting.
        let mon_tue = &cat[1];
        let off_days: Vec<usize> = h.days().filter(|&d| mon_tue.off_on(d)).map(|d| d + 1).collect();
        assert_eq!(off_days, vec![2, 3, 9, 10]);
        // Sat-Sun wraps across the week boundary: days 1,7,8,14.
        let sat_sun = &cat[6];
        let off_days: Vec<usize> = h.days().filter(|&d| sat_sun.off_on(d)).map(|d| d + 1).collect();
        assert_eq!(off_days, vec![1, 7, 8, 14]);
    }

    #[test]
    fn complementarity_and_weekly_totals() {
        let h = Horizon::new(28, 24);
        for p in build_pattern_catalog(&h) {
            for d in h.days() {
                assert_eq!(p.work[d] + p.off[d], 1);
            }
            let total_off: u32 = p.off.iter().map(|&b| b as u32).sum();
            assert_eq!(total_off, 2 * h.num_weeks() as u32);
            // Weekly repetition.
            for d in 7..h.num_days {
                assert_eq!(p.off[d], p.off[d - 7]);
            }
        }
    }
}
