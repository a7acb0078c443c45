//! Daily demand scenarios.

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

/// One demand scenario for one day: required cover per period, with the
/// scenario's probability as an exact rational so per-day probabilities
/// sum to exactly one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DailyScenario {
    /// 0-based day index within the horizon.
    pub day: usize,
    /// Demanded cover hours per period, non-negative.
    pub demand: Vec<i64>,
    /// Probability of this scenario among the day's scenarios.
    pub probability: Rational64,
}

impl DailyScenario {
    pub fn total_demand(&self) -> i64 {
        self.demand.iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    #[test]
    fn probability_serializes_as_exact_ratio() {
        let s = DailyScenario {
            day: 3,
            demand: vec![2, 0, 5],
            probability: Rational64::new(1, 9),
        };
        let json = serde_json::to_string(&s).unwrap();
        let back: DailyScenario = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.probability, Rational64::new(1, 9));
        assert_eq!(s.total_demand(), 7);
    }
}
