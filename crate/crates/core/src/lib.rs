//! Robust estimation of a mean vector from heavy-tailed or corrupted samples.
//!
//! The sample is split into `K` random blocks. Starting from the
//! coordinate-wise median of the block means, each step solves a small
//! covering SDP whose solution certifies a direction towards the bulk of the
//! block means, and moves along it by the median projection. The
//! [`lepski`] module chooses `K` adaptively when the covariance trace and
//! operator norm are known.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the aliases below
//! fix `f64`.

pub mod blocks;
pub mod constants;
pub mod data;
pub mod descent;
mod error;
pub mod lepski;
pub mod linalg;
pub mod rate;
mod rng;
mod scalar;
pub mod sdp;
pub mod stats;

pub use blocks::{
    block_means, coordwise_median, halve_means, median_distance, partition, BlockMeans,
    BlockPartition,
};
pub use constants::{ConstantsLedger, LEDGER};
pub use data::DataMatrix;
pub use descent::{
    descend, estimate, estimate_with, max_steps, step_size, DescentOptions, DescentTrace,
    OutcomeKind, TerminatedBy, DESCENT_SOLVER_ITERS, DESCENT_SOLVER_TOL,
};
pub use error::{Error, Result};
pub use lepski::{
    adaptive_estimate, adaptive_estimate_with, r_star, LepskiConfig, LepskiResult, LevelEstimate,
    Schedule,
};
pub use rate::{rate_r, RateParams};
pub use rng::derive_seed;
pub use scalar::Scalar;
pub use stats::{median_scalar, quantile_upper};

pub type Data = DataMatrix<f64>;
pub type Means = BlockMeans<f64>;
pub type Forms = sdp::CenteredForms<f64>;
pub type Dual = sdp::DualSolution<f64>;
pub type Covering = sdp::CoveringSolution<f64>;
pub type Trace = DescentTrace<f64>;
pub type Lepski = LepskiResult<f64>;
