//! Employee preferences over days-off patterns.

use serde::{Deserialize, Serialize};

/// Per-employee preference scores over the seven patterns.
///
/// Row `e` is a permutation of 1..=7: `scores[e][p]` is the score employee
/// `e` gives pattern `p`, 7 meaning most preferred. Granting an employee
/// their pattern contributes that score to the social welfare term.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreferenceProfile {
    pub scores: Vec<Vec<u8>>,
}

impl PreferenceProfile {
    pub fn num_employees(&self) -> usize {
        self.scores.len()
    }

    /// Score employee `e` gives pattern `p`.
    pub fn score(&self, employee: usize, pattern: usize) -> u8 {
        self.scores[employee][pattern]
    }

    /// Total welfare of an assignment (sum of granted scores).
    pub fn welfare_sum(&self, assignment: &[usize]) -> i64 {
        assignment
            .iter()
            .enumerate()
            .map(|(e, &p)| self.scores[e][p] as i64)
            .sum()
    }

    /// Mean granted score per employee.
    pub fn mean_welfare(&self, assignment: &[usize]) -> f64 {
        if assignment.is_empty() {
            return 0.0;
        }
        self.welfare_sum(assignment) as f64 / assignment.len() as f64
    }
}
