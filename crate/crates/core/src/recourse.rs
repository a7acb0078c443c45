//! Second-stage dispatch: given a day's realized demand and the number of
//! reserve duties that must run, pick duty counts minimizing cancellation
//! plus duty cost.
//!
//! The dispatch problem per (day, scenario) is small: integer duty counts
//! that sum to the day's capacity, continuous understaffing picking up
//! whatever demand the chosen coverage misses. Overstaffing is free in
//! the objective and recovered after the fact from the coverage balance.
//! A tiny deterministic perturbation on duty ids picks one optimum when
//! several duty mixes cost the same, so repeated solves and different
//! machines agree; reported costs are computed from the unperturbed
//! coefficients and are exact in quarter units.
//!
//! On top of the per-scenario solver sits a brute-force evaluator of
//! whole first-stage assignments. It scores an assignment by exact
//! expected recourse cost minus the welfare term and can enumerate every
//! pattern assignment of a small instance, which gives the extensive-form
//! solver an independent optimum to be checked against.

use crate::domain::{AbsenceVariant, Cost, Duty, Instance};
use crate::milp::{solve_milp, MilpError, MilpModel, Relation, SolveParams};
use std::collections::HashMap;

/// Deterministic tie-break: duty w costs an extra `w * PERTURBATION`
/// inside the solver only. Distinct true costs differ by at least a
/// quarter unit, far above the largest possible total perturbation.
const PERTURBATION: f64 = 1e-6;

#[derive(Debug, thiserror::Error)]
pub enum RecourseError {
    #[error("duty capacity {0} is negative")]
    NegativeCapacity(i64),
    #[error("no duties in the catalog but {0} must be dispatched")]
    NoDuties(i64),
    #[error("demand has {got} periods but duties cover {want}")]
    PeriodMismatch { got: usize, want: usize },
    #[error("day {day}: expected presence cannot meet the known demand")]
    InfeasibleFirstStage { day: usize },
    #[error("{patterns}^{employees} assignments exceed the enumeration budget")]
    TooManyAssignments { patterns: usize, employees: usize },
    #[error(transparent)]
    Milp(#[from] MilpError),
}

/// An optimal dispatch of one day and scenario.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecourseResult {
    /// How many reserves run each duty (v).
    pub duty_counts: Vec<i64>,
    /// Demand left uncovered per period (y).
    pub understaffing: Vec<i64>,
    /// Coverage beyond demand per period (z).
    pub overstaffing: Vec<i64>,
    /// Cancellation plus duty cost, exact.
    pub cost: Cost,
}

impl RecourseResult {
    pub fn cancelled_hours(&self) -> i64 {
        self.understaffing.iter().sum()
    }

    pub fn overstaffed_hours(&self) -> i64 {
        self.overstaffing.iter().sum()
    }
}

/// Solve one dispatch exactly: `capacity` duties must run, demand is the
/// realized per-period vector, cancellation is the per-hour penalty.
pub fn solve_recourse_exact(
    duties: &[Duty],
    demand: &[i64],
    capacity: i64,
    cancellation: Cost,
    params: &SolveParams,
) -> Result<RecourseResult, RecourseError> {
    if capacity < 0 {
        return Err(RecourseError::NegativeCapacity(capacity));
    }
    if duties.is_empty() && capacity > 0 {
        return Err(RecourseError::NoDuties(capacity));
    }
    let periods = demand.len();
    for duty in duties {
        if duty.coverage.len() != periods {
            return Err(RecourseError::PeriodMismatch {
                got: periods,
                want: duty.coverage.len(),
            });
        }
    }

    let mut model = MilpModel::new();
    let duty_vars: Vec<usize> = duties
        .iter()
        .map(|duty| {
            let objective = duty.cost.as_f64() + PERTURBATION * duty.id as f64;
            model.add_var(format!("v{}", duty.id), 0.0, capacity as f64, true, objective)
        })
        .collect();
    let under_vars: Vec<usize> = (0..periods)
        .map(|t| model.add_var(format!("y{t}"), 0.0, f64::INFINITY, false, cancellation.as_f64()))
        .collect();
    for t in 0..periods {
        let mut terms: Vec<(usize, f64)> = duties
            .iter()
            .enumerate()
            .filter(|(_, duty)| duty.covers(t))
            .map(|(w, _)| (duty_vars[w], 1.0))
            .collect();
        terms.push((under_vars[t], 1.0));
        model.add_row(format!("cover{t}"), terms, Relation::Ge, demand[t] as f64);
    }
    model.add_row(
        "capacity",
        duty_vars.iter().map(|&v| (v, 1.0)).collect(),
        Relation::Eq,
        capacity as f64,
    );

    let exact = SolveParams { gap_tol: 0.0, ..params.clone() };
    let solution = solve_milp(&model, &exact)?;
    let values = solution
        .values
        .ok_or_else(|| MilpError::Numerical("dispatch solve returned no point".into()))?;

    let duty_counts: Vec<i64> = duty_vars.iter().map(|&v| values[v].round() as i64).collect();
    let mut understaffing = Vec::with_capacity(periods);
    let mut overstaffing = Vec::with_capacity(periods);
    for t in 0..periods {
        let coverage: i64 = duties
            .iter()
            .enumerate()
            .filter(|(_, duty)| duty.covers(t))
            .map(|(w, _)| duty_counts[w])
            .sum();
        understaffing.push((demand[t] - coverage).max(0));
        overstaffing.push((coverage - demand[t]).max(0));
    }
    let mut quarters = cancellation.quarters() * understaffing.iter().sum::<i64>();
    for (w, duty) in duties.iter().enumerate() {
        quarters += duty.cost.quarters() * duty_counts[w];
    }
    Ok(RecourseResult {
        duty_counts,
        understaffing,
        overstaffing,
        cost: Cost::from_quarters(quarters),
    })
}

/// Memo of dispatch costs keyed by (day, scenario, capacity); capacities
/// repeat heavily across assignments, so enumeration reuses most solves.
pub type RecourseMemo = HashMap<(usize, usize, i64), f64>;

fn expected_recourse_cost(
    instance: &Instance,
    assignment: &[usize],
    params: &SolveParams,
    memo: &mut RecourseMemo,
) -> Result<f64, RecourseError> {
    let variant = instance.absence.variant;
    let mut total = 0.0;
    for day in 0..instance.num_days() {
        let present = instance.expected_present(assignment, day, variant);
        if present < instance.known_demand[day] as f64 - 1e-6 {
            return Err(RecourseError::InfeasibleFirstStage { day });
        }
        let capacity = instance.duty_capacity(assignment, day, variant);
        if capacity < 0 {
            return Err(RecourseError::InfeasibleFirstStage { day });
        }
        for (s, scenario) in instance.scenarios[day].iter().enumerate() {
            let cost = match memo.entry((day, s, capacity)) {
                std::collections::hash_map::Entry::Occupied(hit) => *hit.get(),
                std::collections::hash_map::Entry::Vacant(slot) => *slot.insert(
                    solve_recourse_exact(
                        &instance.duties,
                        &scenario.demand,
                        capacity,
                        instance.costs.cancellation,
                        params,
                    )?
                    .cost
                    .as_f64(),
                ),
            };
            let weight = *scenario.probability.numer() as f64 / *scenario.probability.denom() as f64;
            total += weight * cost;
        }
    }
    Ok(total)
}

/// Full objective of one first-stage assignment under the instance's own
/// absence variant: exact expected dispatch cost, minus the welfare bonus
/// when the variant is preference-aware.
pub fn assignment_objective(
    instance: &Instance,
    assignment: &[usize],
    params: &SolveParams,
    memo: &mut RecourseMemo,
) -> Result<f64, RecourseError> {
    let mut objective = expected_recourse_cost(instance, assignment, params, memo)?;
    if instance.absence.variant == AbsenceVariant::PreferenceAware {
        objective -=
            instance.costs.welfare_weight.as_f64() * instance.preferences.welfare_sum(assignment) as f64;
    }
    Ok(objective)
}

/// Outcome of exhaustive first-stage enumeration.
#[derive(Debug, Clone)]
pub struct EnumerationResult {
    /// Best assignment and its objective, if any assignment was feasible.
    pub best: Option<(Vec<usize>, f64)>,
    /// Assignments whose expected presence met every day's known demand.
    pub feasible: u64,
    /// Assignments rejected by some day's presence or capacity check.
    pub infeasible: u64,
}

/// Score every pattern assignment of a small instance and keep the best.
/// The first assignment in lexicographic order wins ties, so the result
/// is deterministic. Refuses instances with more than a million
/// assignments.
pub fn enumerate_first_stage(
    instance: &Instance,
    params: &SolveParams,
) -> Result<EnumerationResult, RecourseError> {
    let patterns = instance.patterns.len();
    let employees = instance.num_employees;
    let total = (patterns as f64).powi(employees as i32);
    if total > 1e6 {
        return Err(RecourseError::TooManyAssignments { patterns, employees });
    }

    let mut memo = RecourseMemo::new();
    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut feasible = 0;
    let mut infeasible = 0;
    let mut assignment = vec![0usize; employees];
    loop {
        match assignment_objective(instance, &assignment, params, &mut memo) {
            Ok(objective) => {
                feasible += 1;
                let better = match &best {
                    None => true,
                    Some((_, incumbent)) => objective < *incumbent,
                };
                if better {
                    best = Some((assignment.clone(), objective));
                }
            }
            Err(RecourseError::InfeasibleFirstStage { .. }) => infeasible += 1,
            Err(other) => return Err(other),
        }
        // Advance the odometer, last employee fastest.
        let mut pos = employees;
        loop {
            if pos == 0 {
                return Ok(EnumerationResult { best, feasible, infeasible });
            }
            pos -= 1;
            assignment[pos] += 1;
            if assignment[pos] < patterns {
                break;
            }
            assignment[pos] = 0;
        }
    }
}
