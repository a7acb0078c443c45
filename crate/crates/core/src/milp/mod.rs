//! Self-contained LP/MILP solving.
//!
//! The LP core is a bounded-variable primal simplex over a dense basis
//! inverse: phase 1 drives bound violations of the crash basis to zero,
//! phase 2 prices with Dantzig's rule and falls back to Bland's rule under
//! degeneracy. Branch and bound explores nodes best-bound-first (FIFO on
//! ties), branching on the most fractional integer variable (ties to the
//! lowest index). Everything is deterministic for fixed inputs; rational
//! cost inputs are converted to floating point exactly once, when the
//! model is built.
//!
//! The solver targets desk-scale models (thousands of rows); it refuses
//! models beyond [`SolveParams::max_dense_rows`] rather than thrash, while
//! model *construction* and LP export stay available at any size.

mod branch;
mod lp_format;
mod model;
mod simplex;

pub use branch::{solve_milp, solve_milp_warm, WarmStart};
pub use lp_format::write_lp;
pub use model::{MilpModel, Relation, Variable};
pub use simplex::{solve_lp, LpOutcome, LpStatus};

use thiserror::Error;

/// Solver parameters. Defaults match the documented tolerances: relative
/// gap 1e-4, integrality 1e-6, row feasibility 1e-6.
#[derive(Debug, Clone)]
pub struct SolveParams {
    /// Relative optimality gap at which branch and bound stops.
    pub gap_tol: f64,
    /// How far from an integer an LP value may sit and still count integral.
    pub integrality_tol: f64,
    /// Allowed row violation when accepting incumbents and warm starts.
    pub feasibility_tol: f64,
    pub max_nodes: u64,
    /// Wall-clock limit in seconds. Runs with a limit set are not
    /// replay-deterministic; leave `None` for reproducible trajectories.
    pub time_limit: Option<f64>,
    /// 0 means an automatic limit derived from the model size.
    pub lp_iteration_limit: usize,
    /// Reserved for randomized branching tie-breaks; the default rule is
    /// deterministic (lowest index), so the seed does not alter results.
    pub branching_seed: u64,
    /// Largest row count the dense LP core accepts.
    pub max_dense_rows: usize,
}

impl Default for SolveParams {
    fn default() -> SolveParams {
        SolveParams {
            gap_tol: 1e-4,
            integrality_tol: 1e-6,
            feasibility_tol: 1e-6,
            max_nodes: 10_000_000,
            time_limit: None,
            lp_iteration_limit: 0,
            branching_seed: 0,
            max_dense_rows: 8_000,
        }
    }
}

#[derive(Debug, Error)]
pub enum MilpError {
    #[error("model is malformed: {0}")]
    BadModel(String),
    #[error("model has {rows} rows, beyond the dense solver limit {limit}")]
    TooLarge { rows: usize, limit: usize },
    #[error("simplex iteration limit {0} exhausted (possible cycling)")]
    IterationLimit(usize),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("warm start rejected: {0}")]
    WarmStartRejected(String),
}

/// Final state of a MILP solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MilpStatus {
    /// Gap closed within tolerance (or tree exhausted).
    Optimal,
    /// A limit stopped the search with an incumbent in hand.
    Feasible,
    Infeasible,
    Unbounded,
    /// A limit stopped the search before any incumbent was found.
    LimitNoIncumbent,
}

/// Result of a MILP solve. `values` holds one entry per model variable,
/// with integer variables exactly integral.
#[derive(Debug, Clone)]
pub struct MilpSolution {
    pub status: MilpStatus,
    pub values: Option<Vec<f64>>,
    pub objective: Option<f64>,
    pub best_bound: f64,
    /// Relative gap between incumbent and bound, when an incumbent exists.
    pub gap: Option<f64>,
    pub nodes: u64,
    pub lp_iterations: u64,
    /// Seconds of wall time; diagnostic only, never written to artifacts.
    pub wall_time: f64,
    /// Line-oriented search log: node, bound, incumbent, gap.
    pub log: Vec<String>,
}

impl MilpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == MilpStatus::Optimal
    }
}
