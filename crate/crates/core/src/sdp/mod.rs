//! The covering SDP behind each descent direction: the inner-minimum
//! objective, its maximization, the conversions to and from the covering
//! problem, the bisection over the covering scale, and the per-step driver.

mod covering;
pub mod eigen;
mod forms;
mod master;
mod search;
mod solve;
mod solver;

pub use covering::{
    alg_rho, covering_to_dual, dual_to_covering, restart_count, AlgRho, CoveringSolution,
    RestartPolicy, SolverOptions,
};
pub use eigen::{top_eigenvector, DenseSymmetric, FactorSum, SymmetricOperator, TopEigen};
pub use forms::{capped_weights, h_objective, CenteredForms, DualSolution, Factor};
pub use search::{binary_search, SearchResult};
pub use solve::{bisection_budget, solve_sdp, SdpOutcome};
pub use solver::{max_h, max_h_with, MaxHOptions, MaxHResult, StepRule};
