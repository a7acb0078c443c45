//! Best-bound branch and bound on top of the simplex core.
//!
//! Nodes live in a max-heap keyed by (lower bound, insertion order), so the
//! open node with the smallest bound is explored next and ties resolve
//! first-in-first-out. Branching picks the most fractional integer column,
//! ties to the lowest index, and pushes the floor child before the ceiling
//! child. Every choice is deterministic, so repeated runs on the same model
//! walk the same tree.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use super::model::MilpModel;
use super::simplex::{
    auto_iteration_limit, prepare, solve_bounded, solve_bounded_keep, solve_bounded_warm,
    LpStatus, Prepared,
};
use super::{MilpError, MilpSolution, MilpStatus, SolveParams};

/// A candidate integer-feasible point used to seed the incumbent.
#[derive(Debug, Clone)]
pub struct WarmStart {
    /// One value per model variable, in variable order.
    pub values: Vec<f64>,
}

struct Node {
    bound: f64,
    seq: u64,
    /// Bound overrides along the path from the root: (column, lb, ub).
    /// Later entries for the same column supersede earlier ones.
    diffs: Vec<(u32, f64, f64)>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Node) -> bool {
        self.seq == other.seq
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Node) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    fn cmp(&self, other: &Node) -> Ordering {
        // BinaryHeap pops the maximum, so "greater" means smaller bound,
        // then smaller sequence number.
        other
            .bound
            .partial_cmp(&self.bound)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

fn rel_gap(incumbent: f64, bound: f64) -> f64 {
    (incumbent - bound).max(0.0) / incumbent.abs().max(1e-10)
}

fn effective_bounds(p: &Prepared, diffs: &[(u32, f64, f64)], j: usize) -> (f64, f64) {
    let mut lo = p.lb[j];
    let mut hi = p.ub[j];
    for &(c, l, h) in diffs {
        if c as usize == j {
            lo = l;
            hi = h;
        }
    }
    (lo, hi)
}

/// Solve a mixed-integer model to the configured relative gap.
pub fn solve_milp(model: &MilpModel, params: &SolveParams) -> Result<MilpSolution, MilpError> {
    solve_inner(model, params, None)
}

/// Like [`solve_milp`], seeded with a known feasible point. The point is
/// checked against bounds, integrality, and rows before being trusted.
pub fn solve_milp_warm(
    model: &MilpModel,
    params: &SolveParams,
    warm: &WarmStart,
) -> Result<MilpSolution, MilpError> {
    let seeded = validate_warm(model, params, warm)?;
    solve_inner(model, params, Some(seeded))
}

fn validate_warm(
    model: &MilpModel,
    params: &SolveParams,
    warm: &WarmStart,
) -> Result<(Vec<f64>, f64), MilpError> {
    if warm.values.len() != model.num_vars() {
        return Err(MilpError::WarmStartRejected(format!(
            "{} values for {} variables",
            warm.values.len(),
            model.num_vars()
        )));
    }
    let mut snapped = warm.values.clone();
    for (j, v) in model.variables.iter().enumerate() {
        let x = snapped[j];
        if !x.is_finite() {
            return Err(MilpError::WarmStartRejected(format!("{} is not finite", v.name)));
        }
        if v.integer {
            let r = x.round();
            if (x - r).abs() > params.integrality_tol {
                return Err(MilpError::WarmStartRejected(format!(
                    "{} = {x} is not integral",
                    v.name
                )));
            }
            snapped[j] = r;
        }
        if snapped[j] < v.lb - params.feasibility_tol
            || snapped[j] > v.ub + params.feasibility_tol
        {
            return Err(MilpError::WarmStartRejected(format!(
                "{} = {} leaves its bounds",
                v.name, snapped[j]
            )));
        }
        snapped[j] = snapped[j].clamp(v.lb, v.ub);
    }
    if let Some((name, viol)) = model.worst_row(&snapped) {
        if viol > params.feasibility_tol {
            return Err(MilpError::WarmStartRejected(format!(
                "row {name} violated by {viol:.3e}"
            )));
        }
    }
    let objective = model.objective_value(&snapped);
    Ok((snapped, objective))
}

fn solve_inner(
    model: &MilpModel,
    params: &SolveParams,
    warm: Option<(Vec<f64>, f64)>,
) -> Result<MilpSolution, MilpError> {
    let start = Instant::now();
    let p = prepare(model, params)?;
    let iter_limit = if params.lp_iteration_limit > 0 {
        params.lp_iteration_limit
    } else {
        auto_iteration_limit(&p)
    };

    let mut log: Vec<String> = Vec::new();
    let mut nodes: u64 = 1;
    let mut lp_iterations: u64 = 0;

    let (root, root_basis) = solve_bounded_keep(&p, &p.lb, &p.ub, iter_limit)?;
    lp_iterations += root.iterations as u64;
    match root.status {
        LpStatus::Infeasible => {
            log.push("root relaxation infeasible".into());
            return Ok(finished(
                MilpStatus::Infeasible,
                None,
                f64::INFINITY,
                None,
                nodes,
                lp_iterations,
                start,
                log,
            ));
        }
        LpStatus::Unbounded => {
            log.push("root relaxation unbounded".into());
            return Ok(finished(
                MilpStatus::Unbounded,
                None,
                f64::NEG_INFINITY,
                None,
                nodes,
                lp_iterations,
                start,
                log,
            ));
        }
        LpStatus::Optimal => {}
    }
    log.push(format!("root relaxation {:.6}", root.objective));

    if model.num_integers() == 0 {
        let values = root.x[..p.n_struct].to_vec();
        let obj = root.objective;
        return Ok(finished(
            MilpStatus::Optimal,
            Some((values, obj)),
            obj,
            Some(0.0),
            nodes,
            lp_iterations,
            start,
            log,
        ));
    }

    let mut incumbent: Option<(Vec<f64>, f64)> = warm;
    if let Some((_, obj)) = &incumbent {
        log.push(format!("warm start accepted, objective {obj:.6}"));
    }

    let top_rank = (0..p.n_struct)
        .filter(|&j| p.integer[j])
        .map(|j| model.variables[j].branch_priority)
        .max()
        .unwrap_or(0);

    let mut heap: BinaryHeap<Node> = BinaryHeap::new();
    let mut seq: u64 = 0;
    heap.push(Node { bound: root.objective, seq, diffs: Vec::new() });
    let mut cached_root = Some(root);
    // Bounds proven for subtrees discarded by the incumbent cutoff; the
    // final bound may not claim more than the weakest of them.
    let mut pruned_min = f64::INFINITY;

    let mut node_lb = p.lb.clone();
    let mut node_ub = p.ub.clone();

    while let Some(node) = heap.pop() {
        let bound = node.bound;
        if let Some((_, inc_obj)) = &incumbent {
            if rel_gap(*inc_obj, bound) <= params.gap_tol {
                let (values, obj) = incumbent.unwrap();
                let gap = rel_gap(obj, bound);
                log.push(format!("gap {gap:.3e} within tolerance at node {nodes}"));
                return Ok(finished(
                    MilpStatus::Optimal,
                    Some((values, obj)),
                    bound,
                    Some(gap),
                    nodes,
                    lp_iterations,
                    start,
                    log,
                ));
            }
        }
        let hit_nodes = nodes >= params.max_nodes;
        let hit_time = params
            .time_limit
            .map_or(false, |t| start.elapsed().as_secs_f64() > t);
        if hit_nodes || hit_time {
            let what = if hit_nodes { "node limit" } else { "time limit" };
            log.push(format!("{what} reached at node {nodes}, bound {bound:.6}"));
            let (status, gap) = match &incumbent {
                Some((_, obj)) => (MilpStatus::Feasible, Some(rel_gap(*obj, bound))),
                None => (MilpStatus::LimitNoIncumbent, None),
            };
            return Ok(finished(
                status,
                incumbent,
                bound,
                gap,
                nodes,
                lp_iterations,
                start,
                log,
            ));
        }

        let out = match cached_root.take() {
            Some(r) if node.seq == 0 => r,
            other => {
                cached_root = other;
                nodes += 1;
                node_lb.copy_from_slice(&p.lb);
                node_ub.copy_from_slice(&p.ub);
                for &(c, l, h) in &node.diffs {
                    node_lb[c as usize] = l;
                    node_ub[c as usize] = h;
                }
                // Re-optimize from the root basis; only bounds moved, so
                // dual pivots get there in a few steps. Fall back to a
                // cold solve if the warm path runs into trouble.
                let warm_out = root_basis.as_ref().map(|basis| {
                    solve_bounded_warm(&p, &node_lb, &node_ub, iter_limit, basis)
                });
                let out = match warm_out {
                    Some(Ok(out)) => out,
                    Some(Err(MilpError::IterationLimit(_))) | Some(Err(MilpError::Numerical(_))) | None => {
                        solve_bounded(&p, &node_lb, &node_ub, iter_limit)?
                    }
                    Some(Err(other)) => return Err(other),
                };
                lp_iterations += out.iterations as u64;
                out
            }
        };

        if nodes % 1024 == 0 {
            let inc_str = incumbent
                .as_ref()
                .map_or("none".to_string(), |(_, o)| format!("{o:.6}"));
            log.push(format!("node {nodes}: bound {bound:.6}, incumbent {inc_str}"));
        }

        match out.status {
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => {
                return Err(MilpError::Numerical(
                    "node relaxation unbounded under a bounded root".into(),
                ))
            }
            LpStatus::Optimal => {}
        }
        let obj = out.objective;
        if let Some((_, inc_obj)) = &incumbent {
            if rel_gap(*inc_obj, obj) <= params.gap_tol {
                pruned_min = pruned_min.min(obj);
                continue;
            }
        }

        // Highest branch priority first, then the most fractional column,
        // ties to the lowest index.
        let mut frac: Option<(usize, f64, i32)> = None;
        for j in 0..p.n_struct {
            if !p.integer[j] {
                continue;
            }
            let v = out.x[j];
            let dist = (v - v.round()).abs();
            if dist <= params.integrality_tol {
                continue;
            }
            let rank = model.variables[j].branch_priority;
            if frac.map_or(true, |(_, d, r)| rank > r || (rank == r && dist > d)) {
                frac = Some((j, dist, rank));
            }
        }

        // When only lower-priority columns are fractional while some
        // higher-priority column is not pinned yet, split that column's
        // domain instead. Without this the unfixed columns re-blend in
        // every subtree and the bound never tightens; with it the search
        // settles the high-priority combinatorics first, exactly what the
        // priorities promise. Lowest index breaks ties, and halving the
        // domain keeps both children strictly smaller.
        if let Some((_, _, rank)) = frac.filter(|&(_, _, r)| r < top_rank) {
            let mut pinned: Option<(usize, i32)> = None;
            for j in 0..p.n_struct {
                if !p.integer[j] || model.variables[j].branch_priority <= rank {
                    continue;
                }
                let pr = model.variables[j].branch_priority;
                let (lo, hi) = effective_bounds(&p, &node.diffs, j);
                if hi - lo < 0.5 {
                    continue;
                }
                if pinned.map_or(true, |(_, best)| pr > best) {
                    pinned = Some((j, pr));
                }
            }
            if let Some((j, _)) = pinned {
                let (lo, hi) = effective_bounds(&p, &node.diffs, j);
                // Split beside the relaxation value so one child pins it
                // and dives; clamp keeps both children nonempty.
                let mid = out.x[j].floor().clamp(lo, (hi - 1.0).max(lo));
                let mut diffs = node.diffs.clone();
                diffs.push((j as u32, lo, mid));
                seq += 1;
                heap.push(Node { bound: obj, seq, diffs });
                let mut diffs = node.diffs.clone();
                diffs.push((j as u32, mid + 1.0, hi));
                seq += 1;
                heap.push(Node { bound: obj, seq, diffs });
                continue;
            }
        }

        let branch_on = match frac {
            Some((j, _, _)) => Some((j, out.x[j])),
            None => {
                // Integral within tolerance: snap and re-check the rows at
                // the snapped point before trusting it as an incumbent.
                let mut snapped = out.x[..p.n_struct].to_vec();
                for j in 0..p.n_struct {
                    if p.integer[j] {
                        snapped[j] = snapped[j].round();
                    }
                }
                let viol = model.max_violation(&snapped);
                if viol <= params.feasibility_tol {
                    let cand = model.objective_value(&snapped);
                    if incumbent.as_ref().map_or(true, |(_, o)| cand < o - 1e-12) {
                        log.push(format!("node {nodes}: incumbent {cand:.6}"));
                        incumbent = Some((snapped, cand));
                    }
                    continue;
                }
                // Snapping broke a row, so some integer column carries real
                // rounding slack; branch on the one with the most.
                let mut worst: Option<(usize, f64)> = None;
                for j in 0..p.n_struct {
                    if !p.integer[j] {
                        continue;
                    }
                    let d = (out.x[j] - out.x[j].round()).abs();
                    if d > 1e-15 && worst.map_or(true, |(_, w)| d > w) {
                        worst = Some((j, d));
                    }
                }
                match worst {
                    Some((j, _)) => Some((j, out.x[j])),
                    None => {
                        return Err(MilpError::Numerical(format!(
                            "integral relaxation point violates a row by {viol:.3e}"
                        )))
                    }
                }
            }
        };

        if let Some((j, xj)) = branch_on {
            let (lo, hi) = effective_bounds(&p, &node.diffs, j);
            let f = xj.floor();
            // Floor child first so it wins first-in-first-out ties.
            if f >= lo - 1e-9 {
                let mut diffs = node.diffs.clone();
                diffs.push((j as u32, lo, f.min(hi)));
                seq += 1;
                heap.push(Node { bound: obj, seq, diffs });
            }
            if f + 1.0 <= hi + 1e-9 {
                let mut diffs = node.diffs.clone();
                diffs.push((j as u32, (f + 1.0).max(lo), hi));
                seq += 1;
                heap.push(Node { bound: obj, seq, diffs });
            }
        }
    }

    // Tree exhausted.
    match incumbent {
        Some((values, obj)) => {
            let bound = pruned_min.min(obj);
            let gap = rel_gap(obj, bound);
            log.push(format!("tree exhausted at node {nodes}, objective {obj:.6}"));
            Ok(finished(
                MilpStatus::Optimal,
                Some((values, obj)),
                bound,
                Some(gap),
                nodes,
                lp_iterations,
                start,
                log,
            ))
        }
        None => {
            log.push(format!("tree exhausted at node {nodes}: no integer point"));
            Ok(finished(
                MilpStatus::Infeasible,
                None,
                f64::INFINITY,
                None,
                nodes,
                lp_iterations,
                start,
                log,
            ))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn finished(
    status: MilpStatus,
    incumbent: Option<(Vec<f64>, f64)>,
    best_bound: f64,
    gap: Option<f64>,
    nodes: u64,
    lp_iterations: u64,
    start: Instant,
    log: Vec<String>,
) -> MilpSolution {
    let (values, objective) = match incumbent {
        Some((v, o)) => (Some(v), Some(o)),
        None => (None, None),
    };
    MilpSolution {
        status,
        values,
        objective,
        best_bound,
        gap,
        nodes,
        lp_iterations,
        wall_time: start.elapsed().as_secs_f64(),
        log,
    }
}
