//! Out-of-sample evaluation of first-stage assignments, plus the two
//! classic stochastic-programming yardsticks and the scenario-count
//! stabilization study.
//!
//! Evaluating an assignment replays it against a scenario set: each day's
//! duty capacity follows from the assignment and the absence rates, and
//! every (day, scenario) dispatch is solved exactly. [`evaluate_first_stage`]
//! always scores against the preference-dependent rates, whichever model
//! produced the assignment; that is the common yardstick the two model
//! variants are compared on. [`evaluate_with_variant`] keeps the scoring
//! inside a chosen model's own accounting, which is what the value of the
//! stochastic solution and the expected value of perfect information need
//! for their sign guarantees.
//!
//! Reports carry expected costs in cost units, hour tallies, welfare and
//! utilization. They never include wall-clock timings, so artifacts are
//! byte-stable across machines.

use crate::datagen::{sample_durations, sample_shapes, substream, GenError};
use crate::domain::{AbsenceVariant, DailyScenario, FirstStageSolution, Instance};
use crate::formulation::{
    build_extensive_form, effective_scenarios, extract_solution, greedy_first_stage,
    strengthen_extensive_form,
    warm_start_values, FormulationConfig, FormulationError, ScenarioMode,
};
use crate::milp::{solve_milp, solve_milp_warm, MilpError, MilpSolution, MilpStatus, SolveParams};
use crate::recourse::{solve_recourse_exact, RecourseError};
use num_rational::Rational64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvaluationError {
    #[error("assignment has {got} entries for {want} employees")]
    BadAssignment { got: usize, want: usize },
    #[error("evaluation needs one scenario list per day: got {got} for {want} days")]
    BadScenarios { got: usize, want: usize },
    #[error("day {day}: scenario weights sum to {sum}, not 1")]
    BadWeights { day: usize, sum: f64 },
    #[error("assignment infeasible under the evaluation rates on days {days:?}: {detail}")]
    InfeasibleFirstStage { days: Vec<usize>, detail: String },
    #[error("solver stopped at {0:?} where an optimum was required")]
    NotOptimal(MilpStatus),
    #[error(transparent)]
    Recourse(#[from] RecourseError),
    #[error(transparent)]
    Formulation(#[from] FormulationError),
    #[error(transparent)]
    Milp(#[from] MilpError),
    #[error(transparent)]
    Generation(#[from] GenError),
}

/// One day of an evaluation, all expectations over that day's scenarios.
#[derive(Debug, Clone, Serialize)]
pub struct DayEvaluation {
    pub day: usize,
    /// Reserves available for duties after offs, known demand and the
    /// rounded-up expected absences.
    pub capacity: i64,
    pub scheduled_off: i64,
    pub expected_absent_ceil: i64,
    pub expected_cost: f64,
    pub cancelled_hours: f64,
    pub overstaffed_hours: f64,
    pub served_hours: f64,
    pub dispatched_hours: f64,
    pub overtime_hours: f64,
    /// Expected paid hours: eight per known-demand duty plus the work
    /// hours of every dispatched duty. Pause hours are unpaid.
    pub paid_hours: f64,
    pub scenarios: usize,
}

/// Horizon-level evaluation of one assignment.
#[derive(Debug, Clone, Serialize)]
pub struct EvaluationReport {
    pub days: Vec<DayEvaluation>,
    /// Expected cancellation plus duty cost over the horizon, cost units.
    pub expected_cost: f64,
    pub cancelled_service_hours: f64,
    pub overstaffing_hours: f64,
    pub overtime_hours: f64,
    /// Expected hours spent covering unknown absences over expected paid
    /// work hours; zero when nothing is paid.
    pub utilization_rate: f64,
    /// Granted preference score, total and mean per employee.
    pub welfare_total: i64,
    pub social_welfare: f64,
    /// Rounded-up expected reserve absences summed over days.
    pub xb_absences: i64,
    /// `expected_cost` minus the welfare bonus, in cost units.
    pub objective_with_welfare: f64,
    pub scenarios_evaluated: usize,
    pub recourse_solved: usize,
}

fn weight_of(probability: Rational64) -> f64 {
    *probability.numer() as f64 / *probability.denom() as f64
}

/// Score an assignment against a scenario set under the preference-aware
/// absence rates, the yardstick both model variants are compared on.
pub fn evaluate_first_stage(
    instance: &Instance,
    assignment: &[usize],
    scenarios: &[Vec<DailyScenario>],
    params: &SolveParams,
) -> Result<EvaluationReport, EvaluationError> {
    evaluate_with_variant(instance, assignment, scenarios, params, AbsenceVariant::PreferenceAware)
}

/// Score an assignment inside one variant's own accounting. The welfare
/// bonus enters `objective_with_welfare` only for the preference-aware
/// variant, mirroring the solver objective.
pub fn evaluate_with_variant(
    instance: &Instance,
    assignment: &[usize],
    scenarios: &[Vec<DailyScenario>],
    params: &SolveParams,
    variant: AbsenceVariant,
) -> Result<EvaluationReport, EvaluationError> {
    let employees = instance.num_employees;
    if assignment.len() != employees {
        return Err(EvaluationError::BadAssignment { got: assignment.len(), want: employees });
    }
    let days = instance.num_days();
    if scenarios.len() != days {
        return Err(EvaluationError::BadScenarios { got: scenarios.len(), want: days });
    }
    let mut capacities = Vec::with_capacity(days);
    let mut bad_days = Vec::new();
    let mut diagnosis = Vec::new();
    for day in 0..days {
        if scenarios[day].is_empty() {
            return Err(EvaluationError::BadScenarios { got: 0, want: 1 });
        }
        let sum: f64 = scenarios[day].iter().map(|s| weight_of(s.probability)).sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(EvaluationError::BadWeights { day, sum });
        }
        let presence = instance.expected_present(assignment, day, variant);
        let demand = instance.known_demand[day];
        let capacity = instance.duty_capacity(assignment, day, variant);
        if presence < demand as f64 {
            bad_days.push(day);
            diagnosis.push(format!("day {day}: presence {presence:.3} < known demand {demand}"));
        } else if capacity < 0 {
            bad_days.push(day);
            diagnosis.push(format!("day {day}: duty capacity {capacity}"));
        }
        capacities.push(capacity);
    }
    if !bad_days.is_empty() {
        return Err(EvaluationError::InfeasibleFirstStage {
            days: bad_days,
            detail: diagnosis.join("; "),
        });
    }

    struct Outcome {
        cost: f64,
        cancelled: i64,
        overstaffed: i64,
        served: i64,
        overtime: i64,
        paid: i64,
    }
    let jobs: Vec<(usize, usize)> =
        (0..days).flat_map(|day| (0..scenarios[day].len()).map(move |s| (day, s))).collect();
    let outcomes: Vec<Outcome> = jobs
        .par_iter()
        .map(|&(day, s)| {
            let scenario = &scenarios[day][s];
            let result = solve_recourse_exact(
                &instance.duties,
                &scenario.demand,
                capacities[day],
                instance.costs.cancellation,
                params,
            )?;
            let cancelled: i64 = result.understaffing.iter().sum();
            let overstaffed: i64 = result.overstaffing.iter().sum();
            let served = scenario.total_demand() - cancelled;
            let mut overtime = 0i64;
            let mut paid = 0i64;
            for (&count, duty) in result.duty_counts.iter().zip(&instance.duties) {
                overtime += count * duty.overtime_hours() as i64;
                paid += count * duty.work_hours as i64;
            }
            Ok(Outcome { cost: result.cost.as_f64(), cancelled, overstaffed, served, overtime, paid })
        })
        .collect::<Result<Vec<_>, RecourseError>>()?;

    let mut day_rows = Vec::with_capacity(days);
    let mut at = 0usize;
    for day in 0..days {
        let count = scenarios[day].len();
        let mut row = DayEvaluation {
            day,
            capacity: capacities[day],
            scheduled_off: instance.off_count(assignment, day),
            expected_absent_ceil: instance.expected_absent(assignment, day, variant).ceil() as i64,
            expected_cost: 0.0,
            cancelled_hours: 0.0,
            overstaffed_hours: 0.0,
            served_hours: 0.0,
            dispatched_hours: 0.0,
            overtime_hours: 0.0,
            paid_hours: 8.0 * instance.known_demand[day] as f64,
            scenarios: count,
        };
        for s in 0..count {
            let weight = weight_of(scenarios[day][s].probability);
            let outcome = &outcomes[at + s];
            row.expected_cost += weight * outcome.cost;
            row.cancelled_hours += weight * outcome.cancelled as f64;
            row.overstaffed_hours += weight * outcome.overstaffed as f64;
            row.served_hours += weight * outcome.served as f64;
            row.dispatched_hours += weight * (outcome.served + outcome.overstaffed) as f64;
            row.overtime_hours += weight * outcome.overtime as f64;
            row.paid_hours += weight * outcome.paid as f64;
        }
        at += count;
        day_rows.push(row);
    }

    let expected_cost: f64 = day_rows.iter().map(|r| r.expected_cost).sum();
    let served: f64 = day_rows.iter().map(|r| r.served_hours).sum();
    let paid: f64 = day_rows.iter().map(|r| r.paid_hours).sum();
    let welfare_total = instance.preferences.welfare_sum(assignment);
    let welfare_coeff = match variant {
        AbsenceVariant::PreferenceAware => instance.costs.welfare_weight.as_f64(),
        AbsenceVariant::Uniform => 0.0,
    };
    Ok(EvaluationReport {
        expected_cost,
        cancelled_service_hours: day_rows.iter().map(|r| r.cancelled_hours).sum(),
        overstaffing_hours: day_rows.iter().map(|r| r.overstaffed_hours).sum(),
        overtime_hours: day_rows.iter().map(|r| r.overtime_hours).sum(),
        utilization_rate: if paid > 0.0 { served / paid } else { 0.0 },
        welfare_total,
        social_welfare: instance.preferences.mean_welfare(assignment),
        xb_absences: day_rows.iter().map(|r| r.expected_absent_ceil).sum(),
        objective_with_welfare: expected_cost - welfare_coeff * welfare_total as f64,
        scenarios_evaluated: day_rows.iter().map(|r| r.scenarios).sum(),
        recourse_solved: outcomes.len(),
        days: day_rows,
    })
}

/// Draw a held-out scenario set, `per_day` equally weighted scenarios per
/// day, from the `("eval", [day])` substreams of `seed`.
///
/// Instances that carry their generator configuration get fresh paired
/// draws from the true demand distribution (one duration and one shape
/// per scenario). Hand-built instances fall back to resampling their own
/// scenario lists by probability.
pub fn generate_eval_scenarios(
    instance: &Instance,
    per_day: usize,
    seed: u64,
) -> Result<Vec<Vec<DailyScenario>>, EvaluationError> {
    if per_day == 0 {
        return Err(EvaluationError::BadScenarios { got: 0, want: 1 });
    }
    let days = instance.num_days();
    let periods = instance.num_periods();
    let mut out = Vec::with_capacity(days);
    for day in 0..days {
        let weekday = instance.horizon.day_of_week(day);
        let mut rng = substream(seed, "eval", &[day as u64]);
        let mut list = Vec::with_capacity(per_day);
        match &instance.gen_config {
            Some(config) => {
                let durations = sample_durations(&config.duration, weekday, per_day, &mut rng)?;
                let shapes = sample_shapes(&config.shapes, weekday, periods, per_day, &mut rng)?;
                for (duration, shape) in durations.iter().zip(&shapes) {
                    let total = duration.round() as i64;
                    let targets: Vec<f64> = shape.iter().map(|share| share * duration).collect();
                    let demand = crate::numeric::largest_remainder(&targets, total);
                    list.push(DailyScenario {
                        day,
                        demand,
                        probability: Rational64::new(1, per_day as i64),
                    });
                }
            }
            None => {
                let weights: Vec<f64> =
                    instance.scenarios[day].iter().map(|s| weight_of(s.probability)).collect();
                for _ in 0..per_day {
                    let mut pick = rng.gen_range(0.0..1.0);
                    let mut chosen = weights.len() - 1;
                    for (i, &w) in weights.iter().enumerate() {
                        if pick < w {
                            chosen = i;
                            break;
                        }
                        pick -= w;
                    }
                    list.push(DailyScenario {
                        day,
                        demand: instance.scenarios[day][chosen].demand.clone(),
                        probability: Rational64::new(1, per_day as i64),
                    });
                }
            }
        }
        out.push(list);
    }
    Ok(out)
}

fn require_optimal(solution: &MilpSolution) -> Result<(), EvaluationError> {
    if solution.status != MilpStatus::Optimal {
        return Err(EvaluationError::NotOptimal(solution.status));
    }
    Ok(())
}

/// Solve an instance end to end: warm-started extensive form, extracted
/// assignment. Returns the solution alongside the solver output.
pub fn solve_assignment(
    instance: &Instance,
    config: &FormulationConfig,
    params: &SolveParams,
) -> Result<(FirstStageSolution, MilpSolution), EvaluationError> {
    let (model, index) = build_extensive_form(instance, config)?;
    let strong = strengthen_extensive_form(instance, config, &model, &index, params)?;
    let greedy = greedy_first_stage(instance, config.variant);
    let warm =
        warm_start_values(instance, config, &index, &greedy.assignment, params).map(|mut w| {
            strong.extend_warm(&index, &mut w.values);
            w
        });
    let solution = match &warm {
        Some(start) => match solve_milp_warm(&strong.model, params, start) {
            Err(MilpError::WarmStartRejected(_)) => solve_milp(&strong.model, params)?,
            other => other?,
        },
        None => solve_milp(&strong.model, params)?,
    };
    require_optimal(&solution)?;
    let values = solution.values.as_ref().expect("optimal solve carries values");
    let (first, _) = extract_solution(&index, values);
    Ok((first, solution))
}

/// Percentage improvements of a candidate over a baseline: positive means
/// the candidate is better (cheaper, fewer cancelled hours, more welfare).
/// A field is `None` when its baseline is too close to zero to divide by.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MetricDeltas {
    pub cost_pct: Option<f64>,
    pub cancelled_pct: Option<f64>,
    pub social_welfare_pct: Option<f64>,
}

/// Improvement percentages between two matched report suites, one report
/// per instance, scored on identical evaluation sets.
///
/// Cost and social welfare average the per-instance ratios; cancelled
/// service takes the ratio of the suite means instead, so instances with
/// zero cancelled hours stay well defined. Mismatched or empty suites
/// yield all `None`.
pub fn percentage_deltas(
    baseline: &[EvaluationReport],
    candidate: &[EvaluationReport],
) -> MetricDeltas {
    let undefined = MetricDeltas { cost_pct: None, cancelled_pct: None, social_welfare_pct: None };
    if baseline.is_empty() || baseline.len() != candidate.len() {
        return undefined;
    }
    let mean_of_ratios = |pick: fn(&EvaluationReport) -> f64, better_low: bool| -> Option<f64> {
        let mut total = 0.0;
        for (base, cand) in baseline.iter().zip(candidate) {
            let change = if better_low {
                percent_change(pick(base), pick(cand)).map(|p| -p)
            } else {
                percent_change(pick(base), pick(cand))
            };
            total += change?;
        }
        Some(total / baseline.len() as f64)
    };
    let mean = |reports: &[EvaluationReport], pick: fn(&EvaluationReport) -> f64| -> f64 {
        reports.iter().map(pick).sum::<f64>() / reports.len() as f64
    };
    MetricDeltas {
        cost_pct: mean_of_ratios(|r| r.expected_cost, true),
        cancelled_pct: percent_change(
            mean(baseline, |r| r.cancelled_service_hours),
            mean(candidate, |r| r.cancelled_service_hours),
        )
        .map(|p| -p),
        social_welfare_pct: mean_of_ratios(|r| r.social_welfare, false),
    }
}

/// Knobs for held-out evaluation runs.
#[derive(Debug, Clone, Serialize, serde::Deserialize)]
#[serde(default)]
pub struct EvaluationConfig {
    /// Held-out scenarios drawn per day.
    pub num_eval_scenarios: usize,
    /// Seed of the held-out draw. Kept apart from the instance seed so the
    /// training tree never leaks into the test set.
    pub eval_seed: u64,
    /// Also score uniform-variant assignments under the preference-aware
    /// rates, the common yardstick for cross-model comparisons.
    pub cross_eval: bool,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        Self { num_eval_scenarios: 1000, eval_seed: 1009, cross_eval: true }
    }
}

impl EvaluationConfig {
    pub fn validate(&self) -> Result<(), EvaluationError> {
        if self.num_eval_scenarios == 0 {
            return Err(EvaluationError::BadScenarios { got: 0, want: 1 });
        }
        Ok(())
    }
}

/// The value of the stochastic solution: how much the full scenario model
/// saves over committing to the expected-value model's assignment. Both
/// assignments are scored on the same evaluation set inside the instance's
/// own variant. When that set is the training tree itself, the value
/// cannot be negative beyond solver tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct VssReport {
    pub sp_assignment: FirstStageSolution,
    pub ev_assignment: FirstStageSolution,
    /// Evaluation objective of the stochastic assignment.
    pub sp_objective: f64,
    /// Evaluation objective of the expected-value assignment.
    pub eev_objective: f64,
    pub vss: f64,
    /// `vss` relative to the expected-value objective, in percent.
    pub vss_pct: Option<f64>,
    pub deltas: MetricDeltas,
    pub sp_report: EvaluationReport,
    pub ev_report: EvaluationReport,
}

pub fn compute_vss(
    instance: &Instance,
    eval_scenarios: &[Vec<DailyScenario>],
    params: &SolveParams,
) -> Result<VssReport, EvaluationError> {
    let variant = instance.absence.variant;
    let full = FormulationConfig { variant, scenario_mode: ScenarioMode::Full };
    let ev = FormulationConfig { variant, scenario_mode: ScenarioMode::ExpectedValue };
    let (sp_first, _) = solve_assignment(instance, &full, params)?;
    let (ev_first, _) = solve_assignment(instance, &ev, params)?;
    let sp_report =
        evaluate_with_variant(instance, &sp_first.assignment, eval_scenarios, params, variant)?;
    let ev_report =
        evaluate_with_variant(instance, &ev_first.assignment, eval_scenarios, params, variant)?;
    let vss = ev_report.objective_with_welfare - sp_report.objective_with_welfare;
    Ok(VssReport {
        sp_objective: sp_report.objective_with_welfare,
        eev_objective: ev_report.objective_with_welfare,
        vss,
        vss_pct: if ev_report.objective_with_welfare.abs() > 1e-9 {
            Some(100.0 * vss / ev_report.objective_with_welfare.abs())
        } else {
            None
        },
        deltas: percentage_deltas(
            std::slice::from_ref(&ev_report),
            std::slice::from_ref(&sp_report),
        ),
        sp_assignment: sp_first,
        ev_assignment: ev_first,
        sp_report,
        ev_report,
    })
}

/// Mean replay metrics over a set of demand realizations.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ReplaySummary {
    pub objective: f64,
    pub expected_cost: f64,
    pub cancelled_service_hours: f64,
    pub social_welfare: f64,
}

fn summarize(reports: &[EvaluationReport]) -> ReplaySummary {
    let n = reports.len().max(1) as f64;
    ReplaySummary {
        objective: reports.iter().map(|r| r.objective_with_welfare).sum::<f64>() / n,
        expected_cost: reports.iter().map(|r| r.expected_cost).sum::<f64>() / n,
        cancelled_service_hours: reports.iter().map(|r| r.cancelled_service_hours).sum::<f64>()
            / n,
        social_welfare: reports.iter().map(|r| r.social_welfare).sum::<f64>() / n,
    }
}

/// The expected value of perfect information over a held-out set of full
/// demand realizations. Realization `i` couples scenario `i` of every day;
/// the stochastic assignment is replayed against it and compared with that
/// realization's wait-and-see optimum, which re-solves both stages with
/// the demand known. Inside one variant every difference is non-negative
/// up to solver tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct EvpiReport {
    pub realizations: usize,
    pub sp_assignment: FirstStageSolution,
    /// Mean replay metrics of the fixed stochastic assignment.
    pub sp: ReplaySummary,
    /// Mean metrics of the per-realization wait-and-see optima.
    pub ws: ReplaySummary,
    pub evpi: f64,
    /// `evpi` relative to the stochastic replay objective, in percent.
    pub evpi_pct: Option<f64>,
    pub deltas: MetricDeltas,
    pub delta_min: f64,
    pub delta_max: f64,
    /// Realizations where perfect information changes the assignment.
    pub assignment_flips: usize,
    /// Realizations where the wait-and-see objective came out worse, which
    /// only happens when training and scoring accounting differ.
    pub negative_deltas: usize,
}

pub fn compute_evpi(
    instance: &Instance,
    eval_scenarios: &[Vec<DailyScenario>],
    params: &SolveParams,
) -> Result<EvpiReport, EvaluationError> {
    if eval_scenarios.len() != instance.num_days() {
        return Err(EvaluationError::BadScenarios {
            got: eval_scenarios.len(),
            want: instance.num_days(),
        });
    }
    let realizations = eval_scenarios.first().map_or(0, Vec::len);
    if realizations == 0 || eval_scenarios.iter().any(|list| list.len() != realizations) {
        return Err(EvaluationError::BadScenarios {
            got: eval_scenarios.iter().map(Vec::len).min().unwrap_or(0),
            want: realizations.max(1),
        });
    }
    let variant = instance.absence.variant;
    let full = FormulationConfig { variant, scenario_mode: ScenarioMode::Full };
    let (sp_first, _) = solve_assignment(instance, &full, params)?;

    let mut sp_reports = Vec::with_capacity(realizations);
    let mut ws_reports = Vec::with_capacity(realizations);
    let mut delta_min = f64::INFINITY;
    let mut delta_max = f64::NEG_INFINITY;
    let mut flips = 0usize;
    let mut negatives = 0usize;
    for i in 0..realizations {
        let column: Vec<DailyScenario> =
            eval_scenarios.iter().map(|list| list[i].clone()).collect();
        let config = FormulationConfig { variant, scenario_mode: ScenarioMode::Single(column) };
        let realized = effective_scenarios(instance, &config.scenario_mode)?;
        let sp_replay =
            evaluate_with_variant(instance, &sp_first.assignment, &realized, params, variant)?;

        let (model, index) = build_extensive_form(instance, &config)?;
        let strong = strengthen_extensive_form(instance, &config, &model, &index, params)?;
        let warm = warm_start_values(instance, &config, &index, &sp_first.assignment, params)
            .map(|mut w| {
                strong.extend_warm(&index, &mut w.values);
                w
            });
        let ws_solution = match &warm {
            Some(start) => match solve_milp_warm(&strong.model, params, start) {
                Err(MilpError::WarmStartRejected(_)) => solve_milp(&strong.model, params)?,
                other => other?,
            },
            None => solve_milp(&strong.model, params)?,
        };
        require_optimal(&ws_solution)?;
        let values = ws_solution.values.as_ref().expect("optimal solve carries values");
        let (ws_first, _) = extract_solution(&index, values);
        let ws_report =
            evaluate_with_variant(instance, &ws_first.assignment, &realized, params, variant)?;

        let delta = sp_replay.objective_with_welfare - ws_report.objective_with_welfare;
        delta_min = delta_min.min(delta);
        delta_max = delta_max.max(delta);
        if ws_first.assignment != sp_first.assignment {
            flips += 1;
        }
        if delta < -1e-9 {
            negatives += 1;
        }
        sp_reports.push(sp_replay);
        ws_reports.push(ws_report);
    }
    let sp = summarize(&sp_reports);
    let ws = summarize(&ws_reports);
    let evpi = sp.objective - ws.objective;
    Ok(EvpiReport {
        realizations,
        sp_assignment: sp_first,
        evpi,
        evpi_pct: if sp.objective.abs() > 1e-9 {
            Some(100.0 * evpi / sp.objective.abs())
        } else {
            None
        },
        deltas: percentage_deltas(&sp_reports, &ws_reports),
        sp,
        ws,
        delta_min,
        delta_max,
        assignment_flips: flips,
        negative_deltas: negatives,
    })
}

/// One scenario-count setting of the stabilization study.
#[derive(Debug, Clone, Serialize)]
pub struct StudyRow {
    pub durations_per_day: usize,
    pub shapes_per_day: usize,
    pub scenarios_per_day: usize,
    pub model_columns: usize,
    /// Solver objective on the instance's own scenario tree.
    pub in_sample_objective: f64,
    /// Objective on the common held-out evaluation set.
    pub eval_objective: f64,
    pub eval_cost: f64,
    /// Change in `eval_objective` against the previous row.
    pub delta_from_prev: Option<f64>,
}

/// Solve the same population at growing scenario counts and score every
/// assignment on one common held-out set. The generator's nested streams
/// make each setting's scenario tree a prefix extension of the last, so
/// rows differ only by how much of the demand distribution the solver saw.
pub fn scenario_count_study(
    base: &crate::datagen::GenConfig,
    sizes: &[(usize, usize)],
    eval_per_day: usize,
    eval_seed: u64,
    params: &SolveParams,
) -> Result<Vec<StudyRow>, EvaluationError> {
    if sizes.is_empty() {
        return Err(EvaluationError::BadScenarios { got: 0, want: 1 });
    }
    let mut rows: Vec<StudyRow> = Vec::with_capacity(sizes.len());
    let mut eval_set: Option<Vec<Vec<DailyScenario>>> = None;
    for &(durations, shapes) in sizes {
        let mut config = base.clone();
        config.durations_per_day = durations;
        config.shapes_per_day = shapes;
        let instance = crate::datagen::generate_instance(&config)?;
        let eval = match &eval_set {
            Some(set) => set,
            None => {
                eval_set = Some(generate_eval_scenarios(&instance, eval_per_day, eval_seed)?);
                eval_set.as_ref().unwrap()
            }
        };
        let formulation = FormulationConfig::for_instance(&instance);
        let (model, _) = build_extensive_form(&instance, &formulation)?;
        let (first, solution) = solve_assignment(&instance, &formulation, params)?;
        let report = evaluate_with_variant(
            &instance,
            &first.assignment,
            eval,
            params,
            instance.absence.variant,
        )?;
        let delta = rows.last().map(|prev| report.objective_with_welfare - prev.eval_objective);
        rows.push(StudyRow {
            durations_per_day: durations,
            shapes_per_day: shapes,
            scenarios_per_day: durations * shapes,
            model_columns: model.num_vars(),
            in_sample_objective: solution.objective.unwrap_or(f64::NAN),
            eval_objective: report.objective_with_welfare,
            eval_cost: report.expected_cost,
            delta_from_prev: delta,
        });
    }
    Ok(rows)
}

/// Relative change from `baseline` to `value` in percent; None when the
/// baseline is too close to zero to divide by.
pub fn percent_change(baseline: f64, value: f64) -> Option<f64> {
    if baseline.abs() < 1e-9 {
        return None;
    }
    Some(100.0 * (value - baseline) / baseline)
}

fn fmt(value: f64) -> String {
    format!("{value:.6}")
}

/// Per-day CSV of one evaluation.
pub fn per_day_csv(report: &EvaluationReport) -> String {
    let mut out = String::from(
        "day,capacity,scheduled_off,expected_absent_ceil,expected_cost,cancelled_hours,\
         overstaffed_hours,served_hours,dispatched_hours,overtime_hours,paid_hours,scenarios\n",
    );
    for row in &report.days {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            row.day,
            row.capacity,
            row.scheduled_off,
            row.expected_absent_ceil,
            fmt(row.expected_cost),
            fmt(row.cancelled_hours),
            fmt(row.overstaffed_hours),
            fmt(row.served_hours),
            fmt(row.dispatched_hours),
            fmt(row.overtime_hours),
            fmt(row.paid_hours),
            row.scenarios,
        ));
    }
    out
}

/// One labeled summary row per report.
pub fn summary_csv(rows: &[(&str, &EvaluationReport)]) -> String {
    let mut out = String::from(
        "label,expected_cost,cancelled_service_hours,overstaffing_hours,overtime_hours,\
         utilization_rate,welfare_total,social_welfare,xb_absences,objective_with_welfare,\
         scenarios_evaluated\n",
    );
    for (label, report) in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            label,
            fmt(report.expected_cost),
            fmt(report.cancelled_service_hours),
            fmt(report.overstaffing_hours),
            fmt(report.overtime_hours),
            fmt(report.utilization_rate),
            report.welfare_total,
            fmt(report.social_welfare),
            report.xb_absences,
            fmt(report.objective_with_welfare),
            report.scenarios_evaluated,
        ));
    }
    out
}

/// CSV of a scenario-count study.
pub fn study_csv(rows: &[StudyRow]) -> String {
    let mut out = String::from(
        "durations_per_day,shapes_per_day,scenarios_per_day,model_columns,\
         in_sample_objective,eval_objective,eval_cost,delta_from_prev\n",
    );
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            row.durations_per_day,
            row.shapes_per_day,
            row.scenarios_per_day,
            row.model_columns,
            fmt(row.in_sample_objective),
            fmt(row.eval_objective),
            fmt(row.eval_cost),
            row.delta_from_prev.map(fmt).unwrap_or_default(),
        ));
    }
    out
}

/// Markdown comparison of the preference-aware model against the uniform
/// one, both scored on the common preference-aware yardstick.
pub fn comparison_markdown(with: &EvaluationReport, without: &EvaluationReport) -> String {
    let mut out = String::new();
    out.push_str("| metric | with preferences | without preferences | change |\n");
    out.push_str("| --- | ---: | ---: | ---: |\n");
    let pct = |baseline: f64, value: f64| match percent_change(baseline, value) {
        Some(p) => format!("{p:+.1}%"),
        None => String::from("n/a"),
    };
    out.push_str(&format!(
        "| expected cost | {} | {} | {} |\n",
        fmt(with.expected_cost),
        fmt(without.expected_cost),
        pct(without.expected_cost, with.expected_cost),
    ));
    out.push_str(&format!(
        "| cancelled service hours | {} | {} | {} |\n",
        fmt(with.cancelled_service_hours),
        fmt(without.cancelled_service_hours),
        pct(without.cancelled_service_hours, with.cancelled_service_hours),
    ));
    out.push_str(&format!(
        "| social welfare | {} | {} | {} |\n",
        fmt(with.social_welfare),
        fmt(without.social_welfare),
        pct(without.social_welfare, with.social_welfare),
    ));
    out.push_str(&format!(
        "| reserve absences | {} | {} | {} |\n",
        with.xb_absences,
        without.xb_absences,
        pct(without.xb_absences as f64, with.xb_absences as f64),
    ));
    out.push_str(&format!(
        "| utilization | {} | {} | {} |\n",
        fmt(with.utilization_rate),
        fmt(without.utilization_rate),
        pct(without.utilization_rate, with.utilization_rate),
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{sample_tiny_instance, GenConfig};
    use crate::recourse::{assignment_objective, RecourseMemo};

    fn params() -> SolveParams {
        SolveParams { gap_tol: 0.0, ..SolveParams::default() }
    }

    fn feasible_tiny(master: u64) -> (Instance, Vec<usize>) {
        for idx in 0..40u64 {
            let instance = sample_tiny_instance(master, idx);
            if instance.num_employees > 3 {
                continue;
            }
            let greedy = greedy_first_stage(&instance, instance.absence.variant);
            let variant = instance.absence.variant;
            let ok = (0..instance.num_days()).all(|day| {
                instance.expected_present(&greedy.assignment, day, variant)
                    >= instance.known_demand[day] as f64
                    && instance.duty_capacity(&greedy.assignment, day, variant) >= 0
            });
            if ok {
                return (instance, greedy.assignment);
            }
        }
        panic!("no feasible tiny instance under master {master}");
    }

    #[test]
    fn in_sample_evaluation_matches_the_recourse_objective() {
        let (instance, assignment) = feasible_tiny(321);
        let p = params();
        let report = evaluate_with_variant(
            &instance,
            &assignment,
            &instance.scenarios,
            &p,
            instance.absence.variant,
        )
        .unwrap();
        let mut memo = RecourseMemo::new();
        let oracle = assignment_objective(&instance, &assignment, &p, &mut memo).unwrap();
        assert!(
            (report.objective_with_welfare - oracle).abs() < 1e-9,
            "evaluation {} vs recourse {oracle}",
            report.objective_with_welfare
        );
        assert_eq!(report.scenarios_evaluated, report.recourse_solved);
        assert!(report.utilization_rate >= 0.0 && report.utilization_rate <= 1.0);
    }

    #[test]
    fn served_plus_cancelled_covers_expected_demand_exactly() {
        let (mut instance, assignment) = feasible_tiny(77);
        instance.known_demand = vec![0; instance.num_days()];
        let p = params();
        let report = evaluate_first_stage(&instance, &assignment, &instance.scenarios, &p).unwrap();
        for (day, row) in report.days.iter().enumerate() {
            let expected_demand: f64 = instance.scenarios[day]
                .iter()
                .map(|s| weight_of(s.probability) * s.total_demand() as f64)
                .sum();
            assert!(
                (row.served_hours + row.cancelled_hours - expected_demand).abs() < 1e-9,
                "day {day}: {} + {} vs {expected_demand}",
                row.served_hours,
                row.cancelled_hours
            );
        }
    }

    #[test]
    fn evaluation_rejects_bad_inputs() {
        let (instance, assignment) = feasible_tiny(5);
        let p = params();
        assert!(matches!(
            evaluate_first_stage(&instance, &assignment[..1], &instance.scenarios, &p),
            Err(EvaluationError::BadAssignment { .. })
        ));
        assert!(matches!(
            evaluate_first_stage(&instance, &assignment, &instance.scenarios[..3], &p),
            Err(EvaluationError::BadScenarios { .. })
        ));
        let mut broken = instance.scenarios.clone();
        broken[0][0].probability = Rational64::new(2, 1);
        assert!(matches!(
            evaluate_first_stage(&instance, &assignment, &broken, &p),
            Err(EvaluationError::BadWeights { day: 0, .. })
        ));
    }

    #[test]
    fn held_out_sets_are_deterministic_and_weighted_evenly() {
        let (instance, _) = feasible_tiny(13);
        let a = generate_eval_scenarios(&instance, 6, 99).unwrap();
        let b = generate_eval_scenarios(&instance, 6, 99).unwrap();
        assert_eq!(a, b);
        let c = generate_eval_scenarios(&instance, 6, 100).unwrap();
        assert_ne!(a, c);
        for (day, list) in a.iter().enumerate() {
            assert_eq!(list.len(), 6);
            for scenario in list {
                assert_eq!(scenario.probability, Rational64::new(1, 6));
                assert_eq!(scenario.day, day);
                // Bootstrap resampling only replays existing demands.
                assert!(instance.scenarios[day].iter().any(|s| s.demand == scenario.demand));
            }
        }
    }

    #[test]
    fn generated_instances_get_fresh_eval_draws() {
        let mut config = GenConfig::default();
        config.num_employees = 4;
        config.durations_per_day = 2;
        config.shapes_per_day = 1;
        let instance = crate::datagen::generate_instance(&config).unwrap();
        let eval = generate_eval_scenarios(&instance, 5, 7).unwrap();
        let mut novel = 0;
        for (day, list) in eval.iter().enumerate() {
            assert_eq!(list.len(), 5);
            for scenario in list {
                assert!(scenario.demand.iter().all(|&d| d >= 0));
                if !instance.scenarios[day].iter().any(|s| s.demand == scenario.demand) {
                    novel += 1;
                }
            }
        }
        assert!(novel > 0, "held-out draws never left the in-sample set");
    }

    #[test]
    fn vss_is_nonnegative_in_sample() {
        let p = params();
        let mut seen = 0;
        for idx in 0..30u64 {
            let instance = sample_tiny_instance(88, idx);
            if instance.num_employees > 3 {
                continue;
            }
            let report = match compute_vss(&instance, &instance.scenarios, &p) {
                Ok(r) => r,
                Err(
                    EvaluationError::Formulation(FormulationError::KnownDemandInfeasible {
                        ..
                    })
                    | EvaluationError::NotOptimal(MilpStatus::Infeasible),
                ) => continue,
                Err(other) => panic!("index {idx}: {other}"),
            };
            assert!(report.vss >= -1e-9, "index {idx}: vss {}", report.vss);
            assert!(
                (report.vss - (report.eev_objective - report.sp_objective)).abs() < 1e-12,
                "index {idx}"
            );
            if let Some(cost_pct) = report.deltas.cost_pct {
                assert!(cost_pct.is_finite(), "index {idx}");
            }
            seen += 1;
            if seen >= 3 {
                return;
            }
        }
        panic!("fewer than 3 tiny instances admitted a vss computation");
    }

    #[test]
    fn evpi_deltas_are_nonnegative_per_realization() {
        let p = params();
        for idx in 0..30u64 {
            let instance = sample_tiny_instance(99, idx);
            if instance.num_employees > 2 {
                continue;
            }
            let eval = generate_eval_scenarios(&instance, 3, 42).unwrap();
            let report = match compute_evpi(&instance, &eval, &p) {
                Ok(r) => r,
                Err(
                    EvaluationError::Formulation(FormulationError::KnownDemandInfeasible {
                        ..
                    })
                    | EvaluationError::NotOptimal(MilpStatus::Infeasible),
                ) => continue,
                Err(other) => panic!("index {idx}: {other}"),
            };
            assert_eq!(report.realizations, 3, "index {idx}");
            assert!(report.delta_min >= -1e-9, "index {idx}: delta {}", report.delta_min);
            assert!(report.evpi >= -1e-9, "index {idx}: evpi {}", report.evpi);
            assert_eq!(report.negative_deltas, 0, "index {idx}");
            assert!(
                (report.evpi - (report.sp.objective - report.ws.objective)).abs() < 1e-9,
                "index {idx}"
            );

            let mut ragged = eval;
            ragged[0].pop();
            assert!(matches!(
                compute_evpi(&instance, &ragged, &p),
                Err(EvaluationError::BadScenarios { .. })
            ));
            return;
        }
        panic!("no tiny instance admitted an evpi computation");
    }

    #[test]
    fn suite_deltas_split_the_averaging_by_metric() {
        let (instance, assignment) = feasible_tiny(29);
        let p = params();
        let base = evaluate_first_stage(&instance, &assignment, &instance.scenarios, &p).unwrap();

        let shaped = |cost: f64, cancelled: f64, welfare: f64| {
            let mut report = base.clone();
            report.expected_cost = cost;
            report.cancelled_service_hours = cancelled;
            report.social_welfare = welfare;
            report
        };
        let baseline_a = shaped(100.0, 38.6, 4.0);
        let baseline_b = shaped(100.0, 38.6, 4.0);
        let cheap = shaped(50.0, 30.5, 4.8);
        let cheap_b = shaped(100.0, 30.5, 4.0);

        let deltas = percentage_deltas(
            &[baseline_a.clone(), baseline_b.clone()],
            &[cheap.clone(), cheap_b.clone()],
        );
        // Cost and welfare average the two per-instance ratios.
        assert!((deltas.cost_pct.unwrap() - 25.0).abs() < 1e-9);
        assert!((deltas.social_welfare_pct.unwrap() - 10.0).abs() < 1e-9);
        // Cancelled service compares the means: both pairs are 38.6 -> 30.5.
        assert!((deltas.cancelled_pct.unwrap() - 100.0 * (38.6 - 30.5) / 38.6).abs() < 1e-9);

        let mut zero_cs = baseline_a.clone();
        zero_cs.cancelled_service_hours = 0.0;
        let mut zero_cs_b = baseline_b.clone();
        zero_cs_b.cancelled_service_hours = 0.0;
        let undefined = percentage_deltas(&[zero_cs, zero_cs_b], &[cheap, cheap_b]);
        assert!(undefined.cancelled_pct.is_none());
        assert!(undefined.cost_pct.is_some());

        let empty = percentage_deltas(&[], &[]);
        assert!(empty.cost_pct.is_none() && empty.social_welfare_pct.is_none());
        let mismatched = percentage_deltas(&[baseline_a], &[]);
        assert!(mismatched.cancelled_pct.is_none());
    }

    #[test]
    fn study_rows_share_one_held_out_set_and_grow_monotonically_in_size() {
        let p = SolveParams::default();
        let mut base = GenConfig::default();
        base.num_days = 7;
        base.num_employees = 2;
        base.duties = crate::domain::DutyConfig {
            start_hours: vec![6, 12],
            work_hours: vec![8],
            pause_hours: vec![0],
            ..crate::domain::DutyConfig::default()
        };
        let rows =
            scenario_count_study(&base, &[(1, 1), (2, 1), (2, 2)], 4, 11, &p).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows[0].delta_from_prev.is_none());
        assert!(rows[1].delta_from_prev.is_some());
        for pair in rows.windows(2) {
            assert!(pair[1].scenarios_per_day > pair[0].scenarios_per_day);
            assert!(pair[1].model_columns > pair[0].model_columns);
        }
        for row in &rows {
            assert!(row.eval_objective.is_finite());
            assert!(row.in_sample_objective.is_finite());
        }
    }

    #[test]
    fn emitters_cover_every_row_without_stray_nans() {
        let (instance, assignment) = feasible_tiny(17);
        let p = params();
        let report = evaluate_first_stage(&instance, &assignment, &instance.scenarios, &p).unwrap();
        let per_day = per_day_csv(&report);
        assert_eq!(per_day.lines().count(), 1 + instance.num_days());
        assert!(!per_day.contains("NaN"));
        let summary = summary_csv(&[("with", &report), ("without", &report)]);
        assert_eq!(summary.lines().count(), 3);
        let markdown = comparison_markdown(&report, &report);
        assert!(markdown.contains("| expected cost |"));
        assert!(markdown.contains("+0.0%"));
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"expected_cost\""));
    }

    #[test]
    fn percent_change_guards_small_baselines() {
        assert_eq!(percent_change(0.0, 5.0), None);
        assert!((percent_change(4.0, 5.0).unwrap() - 25.0).abs() < 1e-12);
        assert!((percent_change(5.0, 4.0).unwrap() + 20.0).abs() < 1e-12);
    }
}
