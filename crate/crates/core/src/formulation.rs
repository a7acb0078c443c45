//! Extensive-form MILP of the two-stage days-off scheduling problem.
//!
//! The first stage assigns every employee one weekly days-off pattern
//! (binary x, one per employee and pattern). The second stage carries one
//! block per day and scenario: integer duty counts v per duty shape, and
//! integer understaffing y and overstaffing z per period. Rows:
//!
//! * one convexity row per employee (each picks exactly one pattern),
//! * one expected-presence row per day (employees working and expected
//!   present must cover the known demand),
//! * per (day, scenario), a pair of bounds pinning the dispatched duty
//!   total to employees minus known demand, scheduled offs and expected
//!   unknown absentees; with integer duty counts the pair is equivalent
//!   to rounding the expected absentees up,
//! * per (day, scenario, period), a balance row matching coverage plus
//!   understaffing minus overstaffing to realized demand.
//!
//! The objective charges each scenario its probability-weighted
//! cancellation and duty cost, minus the welfare bonus for granted
//! preference scores when the preference-aware variant is on. The
//! without-preferences variant uses the uniform weekday absence rates
//! and drops the welfare term entirely, so its model is byte-identical
//! under any permutation of the preference data.

use crate::domain::{
    validate_instance, AbsenceVariant, DailyScenario, FirstStageSolution, Instance,
    SecondStageSolution,
};
use crate::milp::{MilpModel, Relation, SolveParams, WarmStart};
use crate::numeric::largest_remainder;
use crate::recourse::solve_recourse_exact;
use num_rational::Rational64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormulationError {
    #[error(
        "day {day}: even with everyone working, expected presence {presence:.3} cannot meet the known demand {demand}"
    )]
    KnownDemandInfeasible { day: usize, presence: f64, demand: i64 },
    #[error("bad scenario choice: {0}")]
    BadScenarioChoice(String),
    #[error("bad assignment: {0}")]
    BadAssignment(String),
    #[error("day {day}: the assignment leaves a negative duty capacity {capacity}")]
    NegativeCapacity { day: usize, capacity: i64 },
    #[error("instance failed validation: {0}")]
    InvalidInstance(String),
    #[error(transparent)]
    Recourse(#[from] crate::recourse::RecourseError),
}

/// Which scenarios the model sees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScenarioMode {
    /// Every scenario of every day, at its own probability.
    Full,
    /// One synthetic scenario per day at the probability-weighted mean
    /// demand, rounded to integers by largest remainder.
    ExpectedValue,
    /// One given scenario per day, taken as certain: the wait-and-see
    /// model for a fully observed demand realization.
    Single(Vec<DailyScenario>),
}

/// Build the wait-and-see mode for in-sample realizations, picking one
/// existing scenario index per day.
pub fn single_mode_from_indices(
    instance: &Instance,
    picks: &[usize],
) -> Result<ScenarioMode, FormulationError> {
    if picks.len() != instance.num_days() {
        return Err(FormulationError::BadScenarioChoice(format!(
            "{} picks for {} days",
            picks.len(),
            instance.num_days()
        )));
    }
    let mut chosen = Vec::with_capacity(picks.len());
    for (day, &pick) in picks.iter().enumerate() {
        let list = &instance.scenarios[day];
        if pick >= list.len() {
            return Err(FormulationError::BadScenarioChoice(format!(
                "day {day} has {} scenarios, index {pick} does not exist",
                list.len()
            )));
        }
        chosen.push(list[pick].clone());
    }
    Ok(ScenarioMode::Single(chosen))
}

/// How a model is built from an instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormulationConfig {
    /// Which absence rates apply; the preference-aware variant also turns
    /// on the welfare term.
    pub variant: AbsenceVariant,
    pub scenario_mode: ScenarioMode,
}

impl FormulationConfig {
    /// The instance's own variant with the full scenario set.
    pub fn for_instance(instance: &Instance) -> FormulationConfig {
        FormulationConfig { variant: instance.absence.variant, scenario_mode: ScenarioMode::Full }
    }
}

/// Column layout of the extensive form: first-stage x columns, then one
/// (y, z, v) block per day and scenario, days outer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableIndex {
    pub num_employees: usize,
    pub num_patterns: usize,
    pub periods: usize,
    pub num_duties: usize,
    pub scenario_counts: Vec<usize>,
    day_offsets: Vec<usize>,
    columns: usize,
}

impl VariableIndex {
    pub fn new(
        num_employees: usize,
        num_patterns: usize,
        periods: usize,
        num_duties: usize,
        scenario_counts: Vec<usize>,
    ) -> VariableIndex {
        let block = 2 * periods + num_duties;
        let mut day_offsets = Vec::with_capacity(scenario_counts.len());
        let mut at = num_employees * num_patterns;
        for &count in &scenario_counts {
            day_offsets.push(at);
            at += count * block;
        }
        VariableIndex {
            num_employees,
            num_patterns,
            periods,
            num_duties,
            scenario_counts,
            day_offsets,
            columns: at,
        }
    }

    fn block(&self, day: usize, scenario: usize) -> usize {
        debug_assert!(scenario < self.scenario_counts[day]);
        self.day_offsets[day] + scenario * (2 * self.periods + self.num_duties)
    }

    /// Assignment column of (employee, pattern).
    pub fn x(&self, employee: usize, pattern: usize) -> usize {
        debug_assert!(employee < self.num_employees && pattern < self.num_patterns);
        employee * self.num_patterns + pattern
    }

    /// Understaffing column of (day, scenario, period).
    pub fn y(&self, day: usize, scenario: usize, period: usize) -> usize {
        debug_assert!(period < self.periods);
        self.block(day, scenario) + period
    }

    /// Overstaffing column of (day, scenario, period).
    pub fn z(&self, day: usize, scenario: usize, period: usize) -> usize {
        debug_assert!(period < self.periods);
        self.block(day, scenario) + self.periods + period
    }

    /// Duty-count column of (day, scenario, duty).
    pub fn v(&self, day: usize, scenario: usize, duty: usize) -> usize {
        debug_assert!(duty < self.num_duties);
        self.block(day, scenario) + 2 * self.periods + duty
    }

    pub fn num_columns(&self) -> usize {
        self.columns
    }

    pub fn first_stage_columns(&self) -> usize {
        self.num_employees * self.num_patterns
    }

    /// Row count the builder will produce for this layout.
    pub fn num_rows(&self) -> usize {
        let blocks: usize = self.scenario_counts.iter().sum();
        self.num_employees + self.scenario_counts.len() + blocks * (2 + self.periods)
    }
}

fn probability_weight(p: Rational64) -> f64 {
    *p.numer() as f64 / *p.denom() as f64
}

/// Materialize the scenario lists a mode exposes to the model.
pub fn effective_scenarios(
    instance: &Instance,
    mode: &ScenarioMode,
) -> Result<Vec<Vec<DailyScenario>>, FormulationError> {
    match mode {
        ScenarioMode::Full => Ok(instance.scenarios.clone()),
        ScenarioMode::ExpectedValue => Ok(instance
            .scenarios
            .iter()
            .enumerate()
            .map(|(day, list)| {
                let periods = instance.num_periods();
                let mut mean = vec![0.0; periods];
                let mut mean_total = 0.0;
                for scenario in list {
                    let weight = probability_weight(scenario.probability);
                    for t in 0..periods {
                        mean[t] += weight * scenario.demand[t] as f64;
                    }
                    mean_total += weight * scenario.total_demand() as f64;
                }
                let demand = largest_remainder(&mean, mean_total.round() as i64);
                vec![DailyScenario { day, demand, probability: Rational64::new(1, 1) }]
            })
            .collect()),
        ScenarioMode::Single(given) => {
            if given.len() != instance.num_days() {
                return Err(FormulationError::BadScenarioChoice(format!(
                    "{} given scenarios for {} days",
                    given.len(),
                    instance.num_days()
                )));
            }
            let periods = instance.num_periods();
            let mut out = Vec::with_capacity(given.len());
            for (day, scenario) in given.iter().enumerate() {
                if scenario.demand.len() != periods {
                    return Err(FormulationError::BadScenarioChoice(format!(
                        "day {day}: given scenario has {} periods, instance has {periods}",
                        scenario.demand.len()
                    )));
                }
                if scenario.demand.iter().any(|&d| d < 0) {
                    return Err(FormulationError::BadScenarioChoice(format!(
                        "day {day}: given scenario has negative demand"
                    )));
                }
                let mut certain = scenario.clone();
                certain.day = day;
                certain.probability = Rational64::new(1, 1);
                out.push(vec![certain]);
            }
            Ok(out)
        }
    }
}

/// Build the extensive form. Fails early when a day's known demand
/// exceeds what even full attendance could cover in expectation; other
/// infeasibilities are left for the solver to report.
pub fn build_extensive_form(
    instance: &Instance,
    config: &FormulationConfig,
) -> Result<(MilpModel, VariableIndex), FormulationError> {
    let violations = validate_instance(instance);
    if !violations.is_empty() {
        let text = violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ");
        return Err(FormulationError::InvalidInstance(text));
    }
    let variant = config.variant;
    for day in 0..instance.num_days() {
        let presence = instance.max_expected_present(day, variant);
        if presence < instance.known_demand[day] as f64 - 1e-9 {
            return Err(FormulationError::KnownDemandInfeasible {
                day,
                presence,
                demand: instance.known_demand[day],
            });
        }
    }
    let scenarios = effective_scenarios(instance, &config.scenario_mode)?;

    let employees = instance.num_employees;
    let patterns = instance.patterns.len();
    let periods = instance.num_periods();
    let duties = instance.duties.len();
    let index = VariableIndex::new(
        employees,
        patterns,
        periods,
        duties,
        scenarios.iter().map(|list| list.len()).collect(),
    );

    let mut model = MilpModel::new();
    let welfare_weight = if variant == AbsenceVariant::PreferenceAware {
        instance.costs.welfare_weight.as_f64()
    } else {
        0.0
    };
    for e in 0..employees {
        for p in 0..patterns {
            let objective = -welfare_weight * f64::from(instance.preferences.score(e, p));
            let col = model.add_var(format!("x_e{e}_p{p}"), 0.0, 1.0, true, objective);
            debug_assert_eq!(col, index.x(e, p));
            // Fixing the assignments first lets the duty blocks settle on
            // their own; their relaxations come out integral once x is.
            model.set_branch_priority(col, 2);
        }
    }
    let cancellation = instance.costs.cancellation.as_f64();
    for (day, list) in scenarios.iter().enumerate() {
        for (s, scenario) in list.iter().enumerate() {
            let weight = probability_weight(scenario.probability);
            for t in 0..periods {
                let col = model.add_var(
                    format!("y_j{day}_s{s}_t{t}"),
                    0.0,
                    scenario.demand[t] as f64,
                    true,
                    weight * cancellation,
                );
                debug_assert_eq!(col, index.y(day, s, t));
            }
            for t in 0..periods {
                let col =
                    model.add_var(format!("z_j{day}_s{s}_t{t}"), 0.0, f64::INFINITY, true, 0.0);
                debug_assert_eq!(col, index.z(day, s, t));
            }
            for (w, duty) in instance.duties.iter().enumerate() {
                let col = model.add_var(
                    format!("v_j{day}_s{s}_w{w}"),
                    0.0,
                    employees as f64,
                    true,
                    weight * duty.cost.as_f64(),
                );
                debug_assert_eq!(col, index.v(day, s, w));
                model.set_branch_priority(col, 1);
            }
        }
    }

    for e in 0..employees {
        let terms = (0..patterns).map(|p| (index.x(e, p), 1.0)).collect();
        model.add_row(format!("assign_e{e}"), terms, Relation::Eq, 1.0);
    }
    for day in 0..instance.num_days() {
        let mut terms = Vec::new();
        for e in 0..employees {
            let presence = 1.0 - instance.absence_rate(e, day, variant);
            for (p, pattern) in instance.patterns.iter().enumerate() {
                if pattern.works_on(day) && presence > 0.0 {
                    terms.push((index.x(e, p), presence));
                }
            }
        }
        model.add_row(
            format!("present_j{day}"),
            terms,
            Relation::Ge,
            instance.known_demand[day] as f64,
        );
    }
    for (day, list) in scenarios.iter().enumerate() {
        // Coefficient of x in the duty-count bounds: 1 when the pattern
        // schedules the day off, else the absence probability.
        let mut usage = Vec::with_capacity(employees * patterns);
        for e in 0..employees {
            let rate = instance.absence_rate(e, day, variant);
            for (p, pattern) in instance.patterns.iter().enumerate() {
                let coefficient = if pattern.off_on(day) { 1.0 } else { rate };
                if coefficient > 0.0 {
                    usage.push((index.x(e, p), coefficient));
                }
            }
        }
        let available = (employees as i64 - instance.known_demand[day]) as f64;
        for (s, scenario) in list.iter().enumerate() {
            let mut upper: Vec<(usize, f64)> =
                (0..duties).map(|w| (index.v(day, s, w), 1.0)).collect();
            upper.extend(usage.iter().copied());
            let lower = upper.clone();
            model.add_row(format!("cap_hi_j{day}_s{s}"), upper, Relation::Le, available);
            model.add_row(
                format!("cap_lo_j{day}_s{s}"),
                lower,
                Relation::Ge,
                available - (1.0 - instance.costs.epsilon),
            );
            for t in 0..periods {
                let mut terms: Vec<(usize, f64)> = instance
                    .duties
                    .iter()
                    .enumerate()
                    .filter(|(_, duty)| duty.covers(t))
                    .map(|(w, _)| (index.v(day, s, w), 1.0))
                    .collect();
                terms.push((index.y(day, s, t), 1.0));
                terms.push((index.z(day, s, t), -1.0));
                model.add_row(
                    format!("bal_j{day}_s{s}_t{t}"),
                    terms,
                    Relation::Eq,
                    scenario.demand[t] as f64,
                );
            }
        }
    }
    debug_assert_eq!(model.num_vars(), index.num_columns());
    debug_assert_eq!(model.num_rows(), index.num_rows());
    Ok((model, index))
}

fn check_assignment(instance: &Instance, assignment: &[usize]) -> Result<(), FormulationError> {
    if assignment.len() != instance.num_employees {
        return Err(FormulationError::BadAssignment(format!(
            "{} entries for {} employees",
            assignment.len(),
            instance.num_employees
        )));
    }
    if let Some(&p) = assignment.iter().find(|&&p| p >= instance.patterns.len()) {
        return Err(FormulationError::BadAssignment(format!(
            "pattern id {p} outside the catalog of {}",
            instance.patterns.len()
        )));
    }
    Ok(())
}

/// Build one second-stage block with the first stage fixed: duty counts,
/// understaffing and overstaffing for a single (day, scenario), with the
/// dispatched total pinned to the capacity left by the assignment. The
/// welfare term is a first-stage constant and is not part of this model.
/// The returned index maps columns via `y(0, 0, t)`, `z(0, 0, t)` and
/// `v(0, 0, w)`.
pub fn build_second_stage(
    instance: &Instance,
    assignment: &[usize],
    day: usize,
    scenario: &DailyScenario,
) -> Result<(MilpModel, VariableIndex), FormulationError> {
    check_assignment(instance, assignment)?;
    let periods = instance.num_periods();
    if scenario.demand.len() != periods {
        return Err(FormulationError::BadScenarioChoice(format!(
            "scenario has {} periods, instance has {periods}",
            scenario.demand.len()
        )));
    }
    let capacity = instance.duty_capacity(assignment, day, instance.absence.variant);
    if capacity < 0 {
        return Err(FormulationError::NegativeCapacity { day, capacity });
    }
    let duties = instance.duties.len();
    let index = VariableIndex::new(0, instance.patterns.len(), periods, duties, vec![1]);
    let mut model = MilpModel::new();
    let cancellation = instance.costs.cancellation.as_f64();
    for t in 0..periods {
        let col =
            model.add_var(format!("y_t{t}"), 0.0, scenario.demand[t] as f64, true, cancellation);
        debug_assert_eq!(col, index.y(0, 0, t));
    }
    for t in 0..periods {
        let col = model.add_var(format!("z_t{t}"), 0.0, f64::INFINITY, true, 0.0);
        debug_assert_eq!(col, index.z(0, 0, t));
    }
    for (w, duty) in instance.duties.iter().enumerate() {
        let col = model.add_var(
            format!("v_w{w}"),
            0.0,
            capacity as f64,
            true,
            duty.cost.as_f64(),
        );
        debug_assert_eq!(col, index.v(0, 0, w));
    }
    let totals = (0..duties).map(|w| (index.v(0, 0, w), 1.0)).collect();
    model.add_row("capacity", totals, Relation::Eq, capacity as f64);
    for t in 0..periods {
        let mut terms: Vec<(usize, f64)> = instance
            .duties
            .iter()
            .enumerate()
            .filter(|(_, duty)| duty.covers(t))
            .map(|(w, _)| (index.v(0, 0, w), 1.0))
            .collect();
        terms.push((index.y(0, 0, t), 1.0));
        terms.push((index.z(0, 0, t), -1.0));
        model.add_row(format!("bal_t{t}"), terms, Relation::Eq, scenario.demand[t] as f64);
    }
    Ok((model, index))
}

/// Check that every (day, scenario) block dispatches exactly the capacity
/// the assignment leaves: employees minus known demand, scheduled offs
/// and rounded-up expected absences. Solver-returned feasible solutions
/// satisfy this integer identity exactly.
pub fn ceiling_identity_check(
    instance: &Instance,
    assignment: &[usize],
    second: &SecondStageSolution,
    variant: AbsenceVariant,
) -> bool {
    if check_assignment(instance, assignment).is_err() {
        return false;
    }
    if second.duty_counts.len() != instance.num_days() {
        return false;
    }
    (0..instance.num_days()).all(|day| {
        let capacity = instance.duty_capacity(assignment, day, variant);
        (0..second.duty_counts[day].len()).all(|s| second.duty_total(day, s) == capacity)
    })
}

/// An extensive form plus solver-side reinforcements, ready to solve.
///
/// The reinforced copy carries one extra integer column per day holding
/// the dispatched duty count, tied by equality to every scenario's duty
/// total. The extra columns appear after all original ones, so a value
/// vector for the reinforced model starts with a value vector for the
/// original layout.
pub struct StrengthenedForm {
    pub model: MilpModel,
    /// (day, column) of each added duty-count column, in column order.
    pub count_columns: Vec<(usize, usize)>,
}

impl StrengthenedForm {
    /// Grow a warm-start vector built for the original layout with
    /// matching values for the added duty-count columns.
    pub fn extend_warm(&self, index: &VariableIndex, values: &mut Vec<f64>) {
        for &(day, col) in &self.count_columns {
            let count: f64 =
                (0..index.num_duties).map(|w| values[index.v(day, 0, w)]).sum();
            debug_assert_eq!(values.len(), col);
            values.push(count);
        }
    }
}

/// Reinforce a copy of an extensive form so its relaxation stops leaking.
///
/// Two additions, neither touching any integer point. First, an integer
/// duty-count column per day, linked by equality to each scenario's duty
/// total: the counts agree across scenarios anyway, and an explicit
/// integer column lets the search settle the capacity split across days
/// first, which is where plain relaxations cheat by smearing days off
/// fractionally over the week. Second, per (day, scenario) rows keeping
/// the block's cancellation-plus-duty cost on or above the lower convex
/// hull of the exact dispatch cost at each reachable count, so once a
/// count is pinned the relaxation prices the block exactly. The model
/// built by [`build_extensive_form`] keeps its documented shape; solve
/// paths hand this reinforced copy to the solver instead.
pub fn strengthen_extensive_form(
    instance: &Instance,
    config: &FormulationConfig,
    model: &MilpModel,
    index: &VariableIndex,
    params: &SolveParams,
) -> Result<StrengthenedForm, FormulationError> {
    let scenarios = effective_scenarios(instance, &config.scenario_mode)?;
    let variant = config.variant;
    let employees = instance.num_employees;
    let patterns = instance.patterns.len();
    let cancellation = instance.costs.cancellation;

    let mut out = model.clone();
    let mut count_columns = Vec::with_capacity(instance.num_days());
    for (day, list) in scenarios.iter().enumerate() {
        // The duty-count bounds pin the dispatched total between the
        // extremes of `employees - known - offs - expected absentees` over
        // all pattern choices; scan just that capacity window.
        let available = employees as f64 - instance.known_demand[day] as f64;
        let mut usage_min = 0.0f64;
        let mut usage_max = 0.0f64;
        for e in 0..employees {
            let rate = instance.absence_rate(e, day, variant);
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for p in 0..patterns {
                let coefficient = if instance.patterns[p].off_on(day) { 1.0 } else { rate };
                lo = lo.min(coefficient);
                hi = hi.max(coefficient);
            }
            usage_min += lo;
            usage_max += hi;
        }
        let cap_hi = (available - usage_min + 1e-9).floor() as i64;
        let cap_lo = ((available - usage_max - 1.0 - 1e-9).ceil() as i64).max(0);
        if cap_hi < cap_lo {
            continue;
        }
        let count_col =
            out.add_var(format!("count_j{day}"), cap_lo as f64, cap_hi as f64, true, 0.0);
        out.set_branch_priority(count_col, 3);
        count_columns.push((day, count_col));
        for (s, scenario) in list.iter().enumerate() {
            let weight = probability_weight(scenario.probability);
            let mut link: Vec<(usize, f64)> = Vec::with_capacity(1 + index.num_duties);
            link.push((count_col, 1.0));
            for w in 0..index.num_duties {
                link.push((index.v(day, s, w), -1.0));
            }
            out.add_row(format!("countlink_j{day}_s{s}"), link, Relation::Eq, 0.0);
            // Exact dispatch cost at every reachable duty count. The lower
            // convex hull of these points gives linear rows the block cost
            // can never undercut, and at hull capacities the relaxation
            // becomes exact instead of resting on a single flat minimum.
            let mut points: Vec<(f64, f64)> = Vec::new();
            for cap in cap_lo..=cap_hi {
                if instance.duties.is_empty() && cap > 0 {
                    break;
                }
                let result = solve_recourse_exact(
                    &instance.duties,
                    &scenario.demand,
                    cap,
                    cancellation,
                    params,
                )?;
                points.push((cap as f64, result.cost.as_f64()));
            }
            if points.is_empty() {
                continue;
            }
            let hull = lower_hull(&points);
            let y_cost = weight * cancellation.as_f64();
            let base_terms: Vec<(usize, f64)> = (0..index.periods)
                .map(|t| (index.y(day, s, t), y_cost))
                .collect();
            let mut segments: Vec<(f64, f64)> = Vec::new();
            if hull.len() == 1 {
                segments.push((0.0, hull[0].1));
            }
            for pair in hull.windows(2) {
                let (c1, f1) = pair[0];
                let (c2, f2) = pair[1];
                let slope = (f2 - f1) / (c2 - c1);
                segments.push((slope, f1 - slope * c1));
            }
            for (seg, (slope, intercept)) in segments.into_iter().enumerate() {
                let rhs = weight * intercept;
                let mut terms = base_terms.clone();
                terms.reserve(index.num_duties + 1);
                for (w, duty) in instance.duties.iter().enumerate() {
                    terms.push((index.v(day, s, w), weight * duty.cost.as_f64()));
                }
                if slope != 0.0 {
                    terms.push((count_col, -weight * slope));
                }
                out.add_row(
                    format!("blockcut_j{day}_s{s}_k{seg}"),
                    terms,
                    Relation::Ge,
                    rhs - 1e-7 * (1.0 + rhs.abs()),
                );
            }
        }
    }
    Ok(StrengthenedForm { model: out, count_columns })
}

/// Lower convex hull of points already sorted by ascending first
/// coordinate, via the monotone chain scan.
fn lower_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    for &(x, y) in points {
        while hull.len() >= 2 {
            let (x0, y0) = hull[hull.len() - 2];
            let (x1, y1) = hull[hull.len() - 1];
            let cross = (x1 - x0) * (y - y0) - (y1 - y0) * (x - x0);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((x, y));
    }
    hull
}

/// Deterministic starting assignment: pattern counts stay balanced (no
/// pattern exceeds its share of the employee count rounded up), and
/// within that each employee takes their highest-scored open pattern.
/// The uniform variant ignores scores and deals patterns round robin.
pub fn greedy_first_stage(instance: &Instance, variant: AbsenceVariant) -> FirstStageSolution {
    let employees = instance.num_employees;
    let patterns = instance.patterns.len();
    let cap = (employees + patterns - 1) / patterns;
    let mut counts = vec![0usize; patterns];
    let mut assignment = Vec::with_capacity(employees);
    for e in 0..employees {
        let mut best = usize::MAX;
        for p in 0..patterns {
            if counts[p] >= cap {
                continue;
            }
            let better = if best == usize::MAX {
                true
            } else {
                match variant {
                    AbsenceVariant::PreferenceAware => {
                        instance.preferences.score(e, p) > instance.preferences.score(e, best)
                    }
                    AbsenceVariant::Uniform => counts[p] < counts[best],
                }
            };
            if better {
                best = p;
            }
        }
        counts[best] += 1;
        assignment.push(best);
    }
    FirstStageSolution::new(assignment)
}

/// Turn a feasible assignment into a full warm-start point by solving the
/// dispatch of every (day, scenario) exactly. Returns None when the
/// assignment cannot meet some day's known demand or capacity, or when a
/// dispatch solve fails; warm starts are opportunistic.
pub fn warm_start_values(
    instance: &Instance,
    config: &FormulationConfig,
    index: &VariableIndex,
    assignment: &[usize],
    params: &SolveParams,
) -> Option<WarmStart> {
    let variant = config.variant;
    if assignment.len() != instance.num_employees {
        return None;
    }
    let scenarios = effective_scenarios(instance, &config.scenario_mode).ok()?;
    let mut values = vec![0.0; index.num_columns()];
    for (e, &p) in assignment.iter().enumerate() {
        if p >= index.num_patterns {
            return None;
        }
        values[index.x(e, p)] = 1.0;
    }
    for day in 0..instance.num_days() {
        let present = instance.expected_present(assignment, day, variant);
        if present < instance.known_demand[day] as f64 {
            return None;
        }
        let capacity = instance.duty_capacity(assignment, day, variant);
        if capacity < 0 {
            return None;
        }
        for (s, scenario) in scenarios[day].iter().enumerate() {
            let dispatch = solve_recourse_exact(
                &instance.duties,
                &scenario.demand,
                capacity,
                instance.costs.cancellation,
                params,
            )
            .ok()?;
            for (w, &count) in dispatch.duty_counts.iter().enumerate() {
                values[index.v(day, s, w)] = count as f64;
            }
            for t in 0..instance.num_periods() {
                values[index.y(day, s, t)] = dispatch.understaffing[t] as f64;
                values[index.z(day, s, t)] = dispatch.overstaffing[t] as f64;
            }
        }
    }
    Some(WarmStart { values })
}

/// Read a solved point back into domain terms. Values are snapped to the
/// nearest integer; the first stage takes each employee's largest x.
pub fn extract_solution(
    index: &VariableIndex,
    values: &[f64],
) -> (FirstStageSolution, SecondStageSolution) {
    assert!(
        values.len() >= index.num_columns(),
        "value vector does not cover the layout"
    );
    let assignment = (0..index.num_employees)
        .map(|e| {
            (0..index.num_patterns)
                .max_by(|&a, &b| {
                    values[index.x(e, a)]
                        .partial_cmp(&values[index.x(e, b)])
                        .unwrap()
                        .then(b.cmp(&a))
                })
                .unwrap()
        })
        .collect();
    let days = index.scenario_counts.len();
    let mut duty_counts = Vec::with_capacity(days);
    let mut cancelled = Vec::with_capacity(days);
    let mut overstaffed = Vec::with_capacity(days);
    for day in 0..days {
        let blocks = index.scenario_counts[day];
        let mut day_counts = Vec::with_capacity(blocks);
        let mut day_cancelled = Vec::with_capacity(blocks);
        let mut day_over = Vec::with_capacity(blocks);
        for s in 0..blocks {
            day_counts.push(
                (0..index.num_duties).map(|w| values[index.v(day, s, w)].round() as i64).collect(),
            );
            day_cancelled.push(
                (0..index.periods).map(|t| values[index.y(day, s, t)].round() as i64).collect(),
            );
            day_over.push(
                (0..index.periods).map(|t| values[index.z(day, s, t)].round() as i64).collect(),
            );
        }
        duty_counts.push(day_counts);
        cancelled.push(day_cancelled);
        overstaffed.push(day_over);
    }
    (
        FirstStageSolution::new(assignment),
        SecondStageSolution { duty_counts, cancelled, overstaffed },
    )
}
