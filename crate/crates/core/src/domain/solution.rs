//! Solution containers.

use serde::{Deserialize, Serialize};

/// First-stage decision: one days-off pattern per employee.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FirstStageSolution {
    /// `assignment[e]` is the pattern id given to employee `e`.
    pub assignment: Vec<usize>,
}

impl FirstStageSolution {
    pub fn new(assignment: Vec<usize>) -> FirstStageSolution {
        FirstStageSolution { assignment }
    }
}

/// Second-stage decisions for every (day, scenario) block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecondStageSolution {
    /// `duty_counts[j][s][w]`: copies of duty `w` dispatched (v).
    pub duty_counts: Vec<Vec<Vec<i64>>>,
    /// `cancelled[j][s][t]`: cancelled cover hours per period (y).
    pub cancelled: Vec<Vec<Vec<i64>>>,
    /// `overstaffed[j][s][t]`: surplus cover hours per period (z).
    pub overstaffed: Vec<Vec<Vec<i64>>>,
}

impl SecondStageSolution {
    /// Total duties dispatched in one (day, scenario) block.
    pub fn duty_total(&self, day: usize, scenario: usize) -> i64 {
        self.duty_counts[day][scenario].iter().sum()
    }
}
