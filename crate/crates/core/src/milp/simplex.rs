//! Bounded-variable simplex over a dense basis inverse.
//!
//! One slack column is appended per row, turning every constraint into an
//! equality with bounds on the slack. Phase 1 starts from a crash basis
//! (slacks, plus unit structural singletons on equality rows) and prices
//! the classic piecewise-linear infeasibility sum: basics outside their
//! bounds cost -1 or +1 and block the ratio test only at the bound they
//! are healing toward. Phase 2 is textbook Dantzig pricing with bound
//! flips; a streak of degenerate pivots switches both entering and leaving
//! choices to Bland's least-index rule until progress resumes.
//!
//! Re-solves after bound changes go through the dual method instead: an
//! optimal basis stays dual feasible when only bounds move, so the search
//! restores primal feasibility in a handful of pivots rather than
//! grinding through both primal phases again. Tree searches keep the root
//! basis and re-optimize every node from it.

use super::model::{MilpModel, Relation};
use super::{MilpError, SolveParams};

const FTOL: f64 = 1e-9; // bound violation regarded as real
const DTOL: f64 = 1e-9; // reduced cost significance
const PTOL: f64 = 1e-9; // smallest usable ratio-test pivot
const TIE: f64 = 1e-12; // ratio-test tie window
const DEGEN_EPS: f64 = 1e-10;
const BLAND_AFTER: usize = 40;
const REFRESH_EVERY: usize = 256;
const RESIDUAL_LIMIT: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// LP solve result. `values` has one entry per structural variable.
#[derive(Debug, Clone)]
pub struct LpOutcome {
    pub status: LpStatus,
    pub values: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    /// Largest equality residual after the final refresh.
    pub residual: f64,
}

/// Model translated to computational form, reusable across node solves.
pub(crate) struct Prepared {
    pub m: usize,
    pub n_struct: usize,
    pub n_total: usize,
    pub cols: Vec<Vec<(u32, f64)>>,
    pub cost: Vec<f64>,
    pub rhs: Vec<f64>,
    pub lb: Vec<f64>,
    pub ub: Vec<f64>,
    pub integer: Vec<bool>,
}

pub(crate) fn prepare(model: &MilpModel, params: &SolveParams) -> Result<Prepared, MilpError> {
    let m = model.num_rows();
    let n = model.num_vars();
    if m > params.max_dense_rows {
        return Err(MilpError::TooLarge { rows: m, limit: params.max_dense_rows });
    }
    let mut cols: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n + m];
    let mut cost = vec![0.0; n + m];
    let mut lb = vec![0.0; n + m];
    let mut ub = vec![0.0; n + m];
    let mut integer = vec![false; n];

    for (j, v) in model.variables.iter().enumerate() {
        if !v.objective.is_finite() {
            return Err(MilpError::BadModel(format!("objective of {} is not finite", v.name)));
        }
        if v.lb.is_nan() || v.ub.is_nan() || v.lb > v.ub {
            return Err(MilpError::BadModel(format!("bounds of {} are inconsistent", v.name)));
        }
        cost[j] = v.objective;
        lb[j] = v.lb;
        ub[j] = v.ub;
        integer[j] = v.integer;
    }
    for (i, row) in model.rows.iter().enumerate() {
        if !row.rhs.is_finite() {
            return Err(MilpError::BadModel(format!("rhs of {} is not finite", row.name)));
        }
        let mut seen: Vec<(usize, f64)> = Vec::with_capacity(row.terms.len());
        for &(j, a) in &row.terms {
            if j >= n {
                return Err(MilpError::BadModel(format!("row {} references column {j}", row.name)));
            }
            if !a.is_finite() {
                return Err(MilpError::BadModel(format!("coefficient in {} is not finite", row.name)));
            }
            match seen.iter_mut().find(|(c, _)| *c == j) {
                Some((_, acc)) => *acc += a,
                None => seen.push((j, a)),
            }
        }
        for (j, a) in seen {
            if a != 0.0 {
                cols[j].push((i as u32, a));
            }
        }
        // Slack column: row activity + slack = rhs.
        let s = n + i;
        cols[s].push((i as u32, 1.0));
        let (slb, sub) = match row.relation {
            Relation::Le => (0.0, f64::INFINITY),
            Relation::Ge => (f64::NEG_INFINITY, 0.0),
            Relation::Eq => (0.0, 0.0),
        };
        lb[s] = slb;
        ub[s] = sub;
    }
    let rhs = model.rows.iter().map(|r| r.rhs).collect();
    Ok(Prepared { m, n_struct: n, n_total: n + m, cols, cost, rhs, lb, ub, integer })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VState {
    Basic(u32),
    AtLower,
    AtUpper,
    Free,
}

enum PhaseEnd {
    Done,
    Infeasible,
    Unbounded,
}

enum DualEnd {
    Feasible,
    Infeasible,
}

enum Blocker {
    None,
    Flip,
    Row { pos: usize, to_upper: bool },
}

pub(crate) struct SimplexOutcome {
    pub status: LpStatus,
    /// Values of every column including slacks.
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub residual: f64,
}

struct Simplex<'a> {
    p: &'a Prepared,
    lb: &'a [f64],
    ub: &'a [f64],
    binv: Vec<f64>,
    basis: Vec<u32>,
    state: Vec<VState>,
    x: Vec<f64>,
    y: Vec<f64>,
    w: Vec<f64>,
    cb: Vec<f64>,
    iterations: usize,
    limit: usize,
    bland: bool,
    degen_streak: usize,
}

/// Optimal basis kept for later re-optimization under moved bounds.
pub(crate) struct WarmBasis {
    basis: Vec<u32>,
    state: Vec<VState>,
    binv: Vec<f64>,
}

/// Solve one LP given per-column bounds (branch-and-bound overrides the
/// structural bounds; slack bounds always come from the row relations).
pub(crate) fn solve_bounded(
    p: &Prepared,
    lb: &[f64],
    ub: &[f64],
    iteration_limit: usize,
) -> Result<SimplexOutcome, MilpError> {
    Simplex::new(p, lb, ub, iteration_limit).drive()
}

/// Like [`solve_bounded`], but on an optimal finish also hands back the
/// final basis so later solves under moved bounds can start from it.
pub(crate) fn solve_bounded_keep(
    p: &Prepared,
    lb: &[f64],
    ub: &[f64],
    iteration_limit: usize,
) -> Result<(SimplexOutcome, Option<WarmBasis>), MilpError> {
    let mut s = Simplex::new(p, lb, ub, iteration_limit);
    let out = s.drive()?;
    let warm = (out.status == LpStatus::Optimal).then(|| WarmBasis {
        basis: s.basis.clone(),
        state: s.state.clone(),
        binv: s.binv.clone(),
    });
    Ok((out, warm))
}

/// Re-optimize from a kept basis after bound changes. The cost row never
/// moved, so the basis is still dual feasible; dual pivots restore primal
/// feasibility and a primal sweep mops up any numerical leftovers.
pub(crate) fn solve_bounded_warm(
    p: &Prepared,
    lb: &[f64],
    ub: &[f64],
    iteration_limit: usize,
    warm: &WarmBasis,
) -> Result<SimplexOutcome, MilpError> {
    let mut s = Simplex::reseat(p, lb, ub, iteration_limit, warm);
    match s.run_dual()? {
        DualEnd::Infeasible => {
            return Ok(SimplexOutcome {
                status: LpStatus::Infeasible,
                x: s.x.clone(),
                objective: f64::NAN,
                iterations: s.iterations,
                residual: 0.0,
            })
        }
        DualEnd::Feasible => {}
    }
    match s.run_phase(false)? {
        PhaseEnd::Unbounded => Ok(SimplexOutcome {
            status: LpStatus::Unbounded,
            x: s.x.clone(),
            objective: f64::NEG_INFINITY,
            iterations: s.iterations,
            residual: 0.0,
        }),
        PhaseEnd::Infeasible => unreachable!("phase 2 cannot report infeasible"),
        PhaseEnd::Done => s.outcome_optimal(),
    }
}

impl<'a> Simplex<'a> {
    fn new(p: &'a Prepared, lb: &'a [f64], ub: &'a [f64], limit: usize) -> Simplex<'a> {
        let m = p.m;
        let mut basis: Vec<u32> = (0..m).map(|i| (p.n_struct + i) as u32).collect();
        let mut taken = vec![false; p.n_struct];

        // Crash: on equality rows (fixed slacks make poor basics) adopt a
        // structural singleton unit column instead, when one exists.
        let mut crashed = vec![false; m];
        for j in 0..p.n_struct {
            if p.cols[j].len() != 1 || taken[j] || lb[j] == ub[j] {
                continue;
            }
            let (row, a) = p.cols[j][0];
            let i = row as usize;
            let is_eq = p.lb[p.n_struct + i] == 0.0 && p.ub[p.n_struct + i] == 0.0;
            if is_eq && !crashed[i] && a.abs() == 1.0 {
                basis[i] = j as u32;
                crashed[i] = true;
                taken[j] = true;
            }
        }

        let mut state = vec![VState::AtLower; p.n_total];
        let mut x = vec![0.0; p.n_total];
        for j in 0..p.n_total {
            state[j] = if lb[j].is_finite() {
                VState::AtLower
            } else if ub[j].is_finite() {
                VState::AtUpper
            } else {
                VState::Free
            };
            x[j] = match state[j] {
                VState::AtLower => lb[j],
                VState::AtUpper => ub[j],
                _ => 0.0,
            };
        }
        let mut binv = vec![0.0; m * m];
        for (i, &b) in basis.iter().enumerate() {
            let (row, a) = p.cols[b as usize][0];
            debug_assert_eq!(row as usize, i);
            state[b as usize] = VState::Basic(i as u32);
            binv[i * m + i] = 1.0 / a;
        }

        let mut s = Simplex {
            p,
            lb,
            ub,
            binv,
            basis,
            state,
            x,
            y: vec![0.0; m],
            w: vec![0.0; m],
            cb: vec![0.0; m],
            iterations: 0,
            limit,
            bland: false,
            degen_streak: 0,
        };
        s.refresh_basics();
        s
    }

    /// Start from a kept basis: nonbasics move onto the possibly-moved
    /// bounds, basics are recomputed from the kept inverse.
    fn reseat(
        p: &'a Prepared,
        lb: &'a [f64],
        ub: &'a [f64],
        limit: usize,
        warm: &WarmBasis,
    ) -> Simplex<'a> {
        let mut state = warm.state.clone();
        let mut x = vec![0.0; p.n_total];
        for j in 0..p.n_total {
            match state[j] {
                VState::Basic(_) => {}
                VState::AtLower => {
                    if lb[j].is_finite() {
                        x[j] = lb[j];
                    } else if ub[j].is_finite() {
                        state[j] = VState::AtUpper;
                        x[j] = ub[j];
                    } else {
                        state[j] = VState::Free;
                    }
                }
                VState::AtUpper => {
                    if ub[j].is_finite() {
                        x[j] = ub[j];
                    } else if lb[j].is_finite() {
                        state[j] = VState::AtLower;
                        x[j] = lb[j];
                    } else {
                        state[j] = VState::Free;
                    }
                }
                VState::Free => {}
            }
        }
        let mut s = Simplex {
            p,
            lb,
            ub,
            binv: warm.binv.clone(),
            basis: warm.basis.clone(),
            state,
            x,
            y: vec![0.0; p.m],
            w: vec![0.0; p.m],
            cb: vec![0.0; p.m],
            iterations: 0,
            limit,
            bland: false,
            degen_streak: 0,
        };
        s.refresh_basics();
        s
    }

    /// Both primal phases, then the polished optimal outcome.
    fn drive(&mut self) -> Result<SimplexOutcome, MilpError> {
        match self.run_phase(true)? {
            PhaseEnd::Infeasible => {
                return Ok(SimplexOutcome {
                    status: LpStatus::Infeasible,
                    x: self.x.clone(),
                    objective: f64::NAN,
                    iterations: self.iterations,
                    residual: 0.0,
                })
            }
            PhaseEnd::Unbounded => {
                return Err(MilpError::Numerical("phase 1 reported an unbounded ray".into()))
            }
            PhaseEnd::Done => {}
        }
        match self.run_phase(false)? {
            PhaseEnd::Unbounded => Ok(SimplexOutcome {
                status: LpStatus::Unbounded,
                x: self.x.clone(),
                objective: f64::NEG_INFINITY,
                iterations: self.iterations,
                residual: 0.0,
            }),
            PhaseEnd::Infeasible => unreachable!("phase 2 cannot report infeasible"),
            PhaseEnd::Done => self.outcome_optimal(),
        }
    }

    /// Refresh, polish, and package an optimal point.
    fn outcome_optimal(&mut self) -> Result<SimplexOutcome, MilpError> {
        self.refresh_basics();
        let mut residual = self.polish();
        if residual > RESIDUAL_LIMIT {
            self.refactor()?;
            self.refresh_basics();
            residual = self.polish();
            if residual > RESIDUAL_LIMIT {
                return Err(MilpError::Numerical(format!(
                    "residual {residual:.3e} after refactorization"
                )));
            }
        }
        let objective = (0..self.p.n_struct).map(|j| self.p.cost[j] * self.x[j]).sum();
        Ok(SimplexOutcome {
            status: LpStatus::Optimal,
            x: self.x.clone(),
            objective,
            iterations: self.iterations,
            residual,
        })
    }

    /// Recompute basic values from the current inverse: x_B = B^-1 (b - N x_N).
    fn refresh_basics(&mut self) {
        let m = self.p.m;
        let mut r = self.p.rhs.clone();
        for j in 0..self.p.n_total {
            if matches!(self.state[j], VState::Basic(_)) {
                continue;
            }
            let xj = self.x[j];
            if xj != 0.0 {
                for &(row, a) in &self.p.cols[j] {
                    r[row as usize] -= a * xj;
                }
            }
        }
        for k in 0..m {
            let row = &self.binv[k * m..(k + 1) * m];
            let mut acc = 0.0;
            for i in 0..m {
                acc += row[i] * r[i];
            }
            self.x[self.basis[k] as usize] = acc;
        }
    }

    /// One refinement pass; returns the remaining worst equality residual.
    fn polish(&mut self) -> f64 {
        let m = self.p.m;
        let mut r = self.p.rhs.clone();
        for j in 0..self.p.n_total {
            let xj = self.x[j];
            if xj != 0.0 {
                for &(row, a) in &self.p.cols[j] {
                    r[row as usize] -= a * xj;
                }
            }
        }
        for k in 0..m {
            let row = &self.binv[k * m..(k + 1) * m];
            let mut acc = 0.0;
            for i in 0..m {
                acc += row[i] * r[i];
            }
            self.x[self.basis[k] as usize] += acc;
        }
        let mut worst = 0.0f64;
        let mut r = self.p.rhs.clone();
        for j in 0..self.p.n_total {
            let xj = self.x[j];
            if xj != 0.0 {
                for &(row, a) in &self.p.cols[j] {
                    r[row as usize] -= a * xj;
                }
            }
        }
        for i in 0..m {
            worst = worst.max(r[i].abs());
        }
        worst
    }

    /// Rebuild the inverse from scratch by Gauss-Jordan elimination.
    fn refactor(&mut self) -> Result<(), MilpError> {
        let m = self.p.m;
        let mut b = vec![0.0; m * m];
        for (k, &col) in self.basis.iter().enumerate() {
            for &(row, a) in &self.p.cols[col as usize] {
                b[row as usize * m + k] = a;
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for k in 0..m {
            let mut piv_row = k;
            let mut piv_val = b[k * m + k].abs();
            for i in (k + 1)..m {
                let v = b[i * m + k].abs();
                if v > piv_val {
                    piv_val = v;
                    piv_row = i;
                }
            }
            if piv_val < 1e-11 {
                return Err(MilpError::Numerical("singular basis during refactorization".into()));
            }
            if piv_row != k {
                for c in 0..m {
                    b.swap(piv_row * m + c, k * m + c);
                    inv.swap(piv_row * m + c, k * m + c);
                }
            }
            let piv = b[k * m + k];
            for c in 0..m {
                b[k * m + c] /= piv;
                inv[k * m + c] /= piv;
            }
            for i in 0..m {
                if i == k {
                    continue;
                }
                let f = b[i * m + k];
                if f != 0.0 {
                    for c in 0..m {
                        b[i * m + c] -= f * b[k * m + c];
                        inv[i * m + c] -= f * inv[k * m + c];
                    }
                }
            }
        }
        // binv rows are indexed by basis position: position k corresponds
        // to column k of B, i.e. row k of B^-1.
        self.binv = inv;
        Ok(())
    }

    fn phase_cost(&self, phase1: bool, j: usize) -> f64 {
        if phase1 {
            0.0
        } else {
            self.p.cost[j]
        }
    }

    fn run_phase(&mut self, phase1: bool) -> Result<PhaseEnd, MilpError> {
        let m = self.p.m;
        self.bland = false;
        self.degen_streak = 0;
        loop {
            self.iterations += 1;
            if self.iterations > self.limit {
                return Err(MilpError::IterationLimit(self.limit));
            }
            if self.iterations % REFRESH_EVERY == 0 {
                self.refresh_basics();
            }

            // Objective row for this phase.
            let mut infeasible = 0usize;
            let mut worst_violation = 0.0f64;
            for k in 0..m {
                let j = self.basis[k] as usize;
                let xj = self.x[j];
                self.cb[k] = if phase1 {
                    if xj < self.lb[j] - FTOL {
                        worst_violation = worst_violation.max(self.lb[j] - xj);
                        infeasible += 1;
                        -1.0
                    } else if xj > self.ub[j] + FTOL {
                        worst_violation = worst_violation.max(xj - self.ub[j]);
                        infeasible += 1;
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    self.p.cost[j]
                };
            }
            if phase1 && infeasible == 0 {
                return Ok(PhaseEnd::Done);
            }

            // y = B^-T c_B.
            self.y.fill(0.0);
            for k in 0..m {
                let ck = self.cb[k];
                if ck != 0.0 {
                    let row = &self.binv[k * m..(k + 1) * m];
                    for i in 0..m {
                        self.y[i] += ck * row[i];
                    }
                }
            }

            // Pricing.
            let mut entering: Option<(usize, f64, f64)> = None; // (col, score, sigma)
            for j in 0..self.p.n_total {
                let st = self.state[j];
                if matches!(st, VState::Basic(_)) || self.lb[j] == self.ub[j] {
                    continue;
                }
                let mut d = self.phase_cost(phase1, j);
                for &(row, a) in &self.p.cols[j] {
                    d -= a * self.y[row as usize];
                }
                let cand = match st {
                    VState::AtLower => (d < -DTOL).then_some((-d, 1.0)),
                    VState::AtUpper => (d > DTOL).then_some((d, -1.0)),
                    VState::Free => (d.abs() > DTOL).then_some((d.abs(), -d.signum())),
                    VState::Basic(_) => None,
                };
                if let Some((score, sigma)) = cand {
                    if self.bland {
                        entering = Some((j, score, sigma));
                        break;
                    }
                    if entering.map_or(true, |(_, s, _)| score > s) {
                        entering = Some((j, score, sigma));
                    }
                }
            }
            let Some((j, _, sigma)) = entering else {
                return Ok(if phase1 {
                    if worst_violation > RESIDUAL_LIMIT {
                        PhaseEnd::Infeasible
                    } else {
                        // Violations below the residual limit are noise.
                        PhaseEnd::Done
                    }
                } else {
                    PhaseEnd::Done
                });
            };

            // w = B^-1 a_j.
            for k in 0..m {
                let row = &self.binv[k * m..(k + 1) * m];
                let mut acc = 0.0;
                for &(r, a) in &self.p.cols[j] {
                    acc += row[r as usize] * a;
                }
                self.w[k] = acc;
            }

            // Ratio test.
            let mut theta = f64::INFINITY;
            let mut blocker = Blocker::None;
            let mut block_pivot = 0.0f64; // |w_k| of the current blocker
            if self.lb[j].is_finite() && self.ub[j].is_finite() {
                theta = self.ub[j] - self.lb[j];
                blocker = Blocker::Flip;
                block_pivot = f64::INFINITY; // a flip never loses a stability tie
            }
            for k in 0..m {
                let wk = self.w[k];
                if wk.abs() <= PTOL {
                    continue;
                }
                let rate = -sigma * wk;
                let bj = self.basis[k] as usize;
                let xb = self.x[bj];
                let below = phase1 && xb < self.lb[bj] - FTOL;
                let above = phase1 && xb > self.ub[bj] + FTOL;
                let hit = if below {
                    // Healing block only when rising toward the lower bound.
                    (rate > 0.0).then(|| ((self.lb[bj] - xb) / rate, false))
                } else if above {
                    (rate < 0.0).then(|| ((xb - self.ub[bj]) / -rate, true))
                } else if rate > 0.0 {
                    self.ub[bj].is_finite().then(|| ((self.ub[bj] - xb) / rate, true))
                } else {
                    self.lb[bj].is_finite().then(|| ((xb - self.lb[bj]) / -rate, false))
                };
                let Some((tk, to_upper)) = hit else { continue };
                let tk = tk.max(0.0);
                let take = if tk < theta - TIE {
                    true
                } else if tk < theta + TIE {
                    if self.bland {
                        match blocker {
                            Blocker::Row { pos, .. } => self.basis[k] < self.basis[pos],
                            _ => true,
                        }
                    } else {
                        wk.abs() > block_pivot
                    }
                } else {
                    false
                };
                if take {
                    theta = theta.min(tk);
                    blocker = Blocker::Row { pos: k, to_upper };
                    block_pivot = wk.abs();
                }
            }

            if theta.is_infinite() {
                return Ok(if phase1 {
                    // The infeasibility sum is bounded below, so an
                    // unbounded phase-1 ray means numerical trouble.
                    PhaseEnd::Unbounded
                } else {
                    PhaseEnd::Unbounded
                });
            }

            if theta > DEGEN_EPS {
                self.degen_streak = 0;
                self.bland = false;
            } else {
                self.degen_streak += 1;
                if self.degen_streak > BLAND_AFTER {
                    self.bland = true;
                }
            }

            // Move values.
            if theta > 0.0 {
                self.x[j] += sigma * theta;
                for k in 0..m {
                    let wk = self.w[k];
                    if wk != 0.0 {
                        self.x[self.basis[k] as usize] -= sigma * theta * wk;
                    }
                }
            }

            match blocker {
                Blocker::None => unreachable!(),
                Blocker::Flip => {
                    let to = match self.state[j] {
                        VState::AtLower => VState::AtUpper,
                        VState::AtUpper => VState::AtLower,
                        other => other,
                    };
                    self.x[j] = match to {
                        VState::AtUpper => self.ub[j],
                        _ => self.lb[j],
                    };
                    self.state[j] = to;
                }
                Blocker::Row { pos, to_upper } => {
                    let leaving = self.basis[pos] as usize;
                    self.x[leaving] = if to_upper { self.ub[leaving] } else { self.lb[leaving] };
                    self.state[leaving] = if to_upper { VState::AtUpper } else { VState::AtLower };
                    self.pivot_in(pos, j);
                }
            }
        }
    }

    /// Pivot column `j` into basis position `pos`. `w` must hold the
    /// entering column's image B^-1 a_j; updates the inverse in place.
    fn pivot_in(&mut self, pos: usize, j: usize) {
        let m = self.p.m;
        let piv = self.w[pos];
        let (before, rest) = self.binv.split_at_mut(pos * m);
        let (prow, after) = rest.split_at_mut(m);
        for v in prow.iter_mut() {
            *v /= piv;
        }
        for (i, chunk) in before.chunks_exact_mut(m).enumerate() {
            let f = self.w[i];
            if f != 0.0 {
                for (c, pv) in chunk.iter_mut().zip(prow.iter()) {
                    *c -= f * pv;
                }
            }
        }
        for (off, chunk) in after.chunks_exact_mut(m).enumerate() {
            let f = self.w[pos + 1 + off];
            if f != 0.0 {
                for (c, pv) in chunk.iter_mut().zip(prow.iter()) {
                    *c -= f * pv;
                }
            }
        }
        self.basis[pos] = j as u32;
        self.state[j] = VState::Basic(pos as u32);
    }

    /// Dual pivots until every basic sits within its bounds. The method
    /// assumes the current basis prices out (reduced costs respect the
    /// nonbasic states), which holds for a kept optimal basis because
    /// bound moves never touch the cost row. A violated row with no
    /// eligible entering column certifies infeasibility.
    fn run_dual(&mut self) -> Result<DualEnd, MilpError> {
        let m = self.p.m;
        self.bland = false;
        self.degen_streak = 0;
        loop {
            self.iterations += 1;
            if self.iterations > self.limit {
                return Err(MilpError::IterationLimit(self.limit));
            }
            if self.iterations % REFRESH_EVERY == 0 {
                self.refresh_basics();
            }

            // Most-violated basic leaves; Bland mode takes the lowest
            // column index instead to break degenerate loops.
            let mut leave: Option<(usize, f64, bool)> = None;
            for k in 0..m {
                let j = self.basis[k] as usize;
                let xj = self.x[j];
                let (viol, above) = if xj < self.lb[j] - FTOL {
                    (self.lb[j] - xj, false)
                } else if xj > self.ub[j] + FTOL {
                    (xj - self.ub[j], true)
                } else {
                    continue;
                };
                let better = match leave {
                    None => true,
                    Some((pos, worst, _)) => {
                        if self.bland {
                            self.basis[k] < self.basis[pos]
                        } else {
                            viol > worst
                        }
                    }
                };
                if better {
                    leave = Some((k, viol, above));
                }
            }
            let Some((r, _, above)) = leave else { return Ok(DualEnd::Feasible) };

            // Prices for the ratio test: y = B^-T c_B, d_j = c_j - y a_j.
            for k in 0..m {
                self.cb[k] = self.p.cost[self.basis[k] as usize];
            }
            self.y.fill(0.0);
            for k in 0..m {
                let ck = self.cb[k];
                if ck != 0.0 {
                    let row = &self.binv[k * m..(k + 1) * m];
                    for i in 0..m {
                        self.y[i] += ck * row[i];
                    }
                }
            }

            // Entering column: smallest |d/alpha| over columns that can
            // push the leaving basic back toward its bound, ties to the
            // largest pivot for stability (lowest index under Bland).
            let brow = &self.binv[r * m..(r + 1) * m];
            let mut enter: Option<(usize, f64, f64)> = None;
            for j in 0..self.p.n_total {
                let st = self.state[j];
                if matches!(st, VState::Basic(_)) || self.lb[j] == self.ub[j] {
                    continue;
                }
                let mut alpha = 0.0;
                for &(row, a) in &self.p.cols[j] {
                    alpha += brow[row as usize] * a;
                }
                if alpha.abs() <= PTOL {
                    continue;
                }
                // x_r moves by -alpha per unit of x_j; an AtLower column
                // can only rise, an AtUpper column only fall.
                let eligible = match st {
                    VState::AtLower => {
                        if above {
                            alpha > 0.0
                        } else {
                            alpha < 0.0
                        }
                    }
                    VState::AtUpper => {
                        if above {
                            alpha < 0.0
                        } else {
                            alpha > 0.0
                        }
                    }
                    VState::Free => true,
                    VState::Basic(_) => false,
                };
                if !eligible {
                    continue;
                }
                let mut d = self.p.cost[j];
                for &(row, a) in &self.p.cols[j] {
                    d -= a * self.y[row as usize];
                }
                let ratio = (d / alpha).abs();
                let take = match enter {
                    None => true,
                    Some((bj, best, balpha)) => {
                        if self.bland {
                            ratio < best - TIE || (ratio < best + TIE && j < bj)
                        } else {
                            ratio < best - TIE || (ratio < best + TIE && alpha.abs() > balpha)
                        }
                    }
                };
                if take {
                    enter = Some((j, ratio, alpha.abs()));
                }
            }
            let Some((j, theta, _)) = enter else { return Ok(DualEnd::Infeasible) };

            // The dual objective climbs by theta times the violation, so
            // a streak of zero-theta pivots is the cycling risk here.
            if theta > DEGEN_EPS {
                self.degen_streak = 0;
                self.bland = false;
            } else {
                self.degen_streak += 1;
                if self.degen_streak > BLAND_AFTER {
                    self.bland = true;
                }
            }

            // w = B^-1 a_j.
            for k in 0..m {
                let row = &self.binv[k * m..(k + 1) * m];
                let mut acc = 0.0;
                for &(rr, a) in &self.p.cols[j] {
                    acc += row[rr as usize] * a;
                }
                self.w[k] = acc;
            }
            let leaving = self.basis[r] as usize;
            let target = if above { self.ub[leaving] } else { self.lb[leaving] };
            let step = (self.x[leaving] - target) / self.w[r];

            if step != 0.0 {
                self.x[j] += step;
                for k in 0..m {
                    let wk = self.w[k];
                    if wk != 0.0 {
                        self.x[self.basis[k] as usize] -= step * wk;
                    }
                }
            }
            self.x[leaving] = target;
            self.state[leaving] = if above { VState::AtUpper } else { VState::AtLower };
            self.pivot_in(r, j);
        }
    }
}

/// Solve the LP relaxation of a model (integrality dropped).
pub fn solve_lp(model: &MilpModel, params: &SolveParams) -> Result<LpOutcome, MilpError> {
    let p = prepare(model, params)?;
    let limit = if params.lp_iteration_limit > 0 {
        params.lp_iteration_limit
    } else {
        auto_iteration_limit(&p)
    };
    let out = solve_bounded(&p, &p.lb, &p.ub, limit)?;
    Ok(LpOutcome {
        status: out.status,
        values: out.x[..p.n_struct].to_vec(),
        objective: out.objective,
        iterations: out.iterations,
        residual: out.residual,
    })
}

pub(crate) fn auto_iteration_limit(p: &Prepared) -> usize {
    (30 * (p.m + p.n_total)).max(20_000)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::model::MilpModel;
    use crate::milp::Relation::*;

    fn params() -> SolveParams {
        SolveParams::default()
    }

    #[test]
    fn two_var_textbook_lp() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36.
        let mut m = MilpModel::new();
        let x = m.add_var("x", 0.0, f64::INFINITY, false, -3.0);
        let y = m.add_var("y", 0.0, f64::INFINITY, false, -5.0);
        m.add_row("r1", vec![(x, 1.0)], Le, 4.0);
        m.add_row("r2", vec![(y, 2.0)], Le, 12.0);
        m.add_row("r3", vec![(x, 3.0), (y, 2.0)], Le, 18.0);
        let out = solve_lp(&m, &params()).unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert!((out.objective - (-36.0)).abs() < 1e-9);
        assert!((out.values[0] - 2.0).abs() < 1e-9);
        assert!((out.values[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn equality_and_ge_rows() {
        // min x + y s.t. x + y = 10, x - y >= 2, 0 <= x, y.
        let mut m = MilpModel::new();
        let x = m.add_var("x", 0.0, f64::INFINITY, false, 1.0);
        let y = m.add_var("y", 0.0, f64::INFINITY, false, 1.0);
        m.add_row("sum", vec![(x, 1.0), (y, 1.0)], Eq, 10.0);
        m.add_row("gap", vec![(x, 1.0), (y, -1.0)], Ge, 2.0);
        let out = solve_lp(&m, &params()).unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert!((out.objective - 10.0).abs() < 1e-9);
        assert!(out.values[0] >= out.values[1] + 2.0 - 1e-9);
    }

    #[test]
    fn respects_upper_bounds_via_flips() {
        // min -x - 2y with 0 <= x <= 3, 0 <= y <= 4, x + y <= 5.
        let mut m = MilpModel::new();
        let x = m.add_var("x", 0.0, 3.0, false, -1.0);
        let y = m.add_var("y", 0.0, 4.0, false, -2.0);
        m.add_row("cap", vec![(x, 1.0), (y, 1.0)], Le, 5.0);
        let out = solve_lp(&m, &params()).unwrap();
        assert!((out.objective - (-9.0)).abs() < 1e-9); // x=1, y=4
        assert!((out.values[1] - 4.0).abs() < 1e-9);
    }

    #[test]
    fn detects_infeasible() {
        let mut m = MilpModel::new();
        let x = m.add_var("x", 0.0, 1.0, false, 1.0);
        m.add_row("lo", vec![(x, 1.0)], Ge, 2.0);
        let out = solve_lp(&m, &params()).unwrap();
        assert_eq!(out.status, LpStatus::Infeasible);
    }

    #[test]
    fn detects_unbounded() {
        let mut m = MilpModel::new();
        let x = m.add_var("x", 0.0, f64::INFINITY, false, -1.0);
        let y = m.add_var("y", 0.0, f64::INFINITY, false, 0.0);
        m.add_row("r", vec![(x, 1.0), (y, -1.0)], Le, 1.0);
        let out = solve_lp(&m, &params()).unwrap();
        assert_eq!(out.status, LpStatus::Unbounded);
    }

    #[test]
    fn negative_lower_bounds_and_free_vars() {
        // min x + y, x >= -5, y free, x + y >= -3, y - x <= 4.
        let mut m = MilpModel::new();
        let x = m.add_var("x", -5.0, f64::INFINITY, false, 1.0);
        let y = m.add_var("y", f64::NEG_INFINITY, f64::INFINITY, false, 1.0);
        m.add_row("r1", vec![(x, 1.0), (y, 1.0)], Ge, -3.0);
        m.add_row("r2", vec![(y, 1.0), (x, -1.0)], Le, 4.0);
        let out = solve_lp(&m, &params()).unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert!((out.objective - (-3.0)).abs() < 1e-9);
    }

    #[test]
    fn fixed_variables_are_respected() {
        let mut m = MilpModel::new();
        let x = m.add_var("x", 2.0, 2.0, false, 5.0);
        let y = m.add_var("y", 0.0, f64::INFINITY, false, 1.0);
        m.add_row("r", vec![(x, 1.0), (y, 1.0)], Ge, 6.0);
        let out = solve_lp(&m, &params()).unwrap();
        assert!((out.values[0] - 2.0).abs() < 1e-12);
        assert!((out.objective - 14.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_lp_terminates() {
        // Many redundant rows through the origin force degenerate pivots.
        let mut m = MilpModel::new();
        let x = m.add_var("x", 0.0, f64::INFINITY, false, -1.0);
        let y = m.add_var("y", 0.0, f64::INFINITY, false, -1.0);
        for k in 0..12 {
            let a = 1.0 + k as f64 * 0.1;
            m.add_row(format!("r{k}"), vec![(x, a), (y, 1.0)], Le, 0.0);
        }
        m.add_row("cap", vec![(x, 1.0), (y, 1.0)], Le, 10.0);
        let out = solve_lp(&m, &params()).unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert!((out.objective - 0.0).abs() < 1e-9);
    }
}
