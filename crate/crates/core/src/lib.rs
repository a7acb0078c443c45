//! Days-off scheduling for reserve ("extra-board") staff pools under
//! uncertain absences.
//!
//! A pool of reserve employees covers for absent colleagues. Each employee
//! is assigned one weekly days-off pattern for the whole horizon (the first
//! stage); every day, after absences and that day's cover demand become
//! known, the remaining employees are dispatched onto duties, with
//! uncovered hours cancelled at a penalty (the second stage). Employees
//! rank the days-off patterns, and the probability that an employee calls
//! in absent on a day depends on how desirable their assigned pattern left
//! that weekday, which couples the first-stage assignment to the absence
//! distribution.
//!
//! The crate is organised as:
//!
//! * [`domain`] - instance data model: patterns, duties, scenarios,
//!   preferences, absence probabilities, exact money arithmetic.
//! * [`datagen`] - seeded synthetic instance generation.
//! * [`milp`] - a self-contained LP/MILP solver (bounded-variable primal
//!   simplex plus branch and bound) and an LP-format writer.
//! * [`formulation`] - builds the extensive-form MILP and its variants.
//! * [`recourse`] - exact single-day dispatch solves and a brute-force
//!   first-stage enumerator for cross-checking.
//! * [`evaluation`] - out-of-sample evaluation, value of the stochastic
//!   solution, expected value of perfect information, report emitters.

pub mod datagen;
pub mod domain;
pub mod evaluation;
pub mod formulation;
pub mod milp;
pub mod numeric;
pub mod recourse;
