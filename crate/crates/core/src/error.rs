//! Structured errors shared by every module.

use thiserror::Error;

/// Library-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {context} expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        got: String,
    },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian: max |S - S^H| = {deviation:.3e}")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:.3e}")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("trace {trace:.6} exceeds power budget {budget:.6}")]
    PowerBudgetExceeded { trace: f64, budget: f64 },

    #[error("harvest target {q_bar:.6} is infeasible (maximum achievable {q_max:.6})")]
    InfeasibleHarvest { q_bar: f64, q_max: f64 },

    #[error(
        "dual point (lambda={lambda:.6e}, mu={mu:.6e}) outside the feasible cone mu > lambda*g1 (g1={g1:.6e})"
    )]
    DualInfeasible { lambda: f64, mu: f64, g1: f64 },

    #[error("solver did not converge within {iterations} iterations")]
    NotConverged { iterations: usize },

    #[error("no feasible point on the search grid")]
    EmptyFeasibleGrid,

    #[error("boundaries cover disjoint energy ranges [{a_min:.6}, {a_max:.6}] vs [{b_min:.6}, {b_max:.6}]")]
    DisjointEnergyRanges {
        a_min: f64,
        a_max: f64,
        b_min: f64,
        b_max: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
