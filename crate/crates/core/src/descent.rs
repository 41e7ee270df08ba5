//! The estimator: start at the coordinate-wise median of means and step along
//! the top eigenvector of each certified SDP solution, with a median step size.

use crate::blocks::{block_means, coordwise_median, partition, BlockMeans};
use crate::constants::LEDGER;
use crate::data::DataMatrix;
use crate::error::{invalid, Error, Result};
use crate::linalg::{axpy, dot, sub};
use crate::rng::derive_seed;
use crate::scalar::Scalar;
use crate::sdp::{solve_sdp, top_eigenvector, FactorSum, RestartPolicy, SdpOutcome, SolverOptions};
use crate::stats::median_in_place;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "snake_case")
)]
pub enum OutcomeKind {
    Direction,
    Fallback,
    CurrentIsGood,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "snake_case")
)]
pub enum TerminatedBy {
    IterationCap,
    FallbackMu0,
    CurrentIsGood,
}

impl TerminatedBy {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::IterationCap => "iteration_cap",
            Self::FallbackMu0 => "fallback_mu0",
            Self::CurrentIsGood => "current_is_good",
        }
    }
}

/// One entry per SDP solve: the point it was solved at, the outcome, and the
/// step taken from it (zero when the outcome ended the descent).
#[derive(Debug, Clone, PartialEq)]
pub struct DescentTrace<T> {
    pub iterates: Vec<Vec<T>>,
    pub step_sizes: Vec<T>,
    pub outcome_kinds: Vec<OutcomeKind>,
    pub terminated_by: TerminatedBy,
}

impl<T> DescentTrace<T> {
    pub fn iterations(&self) -> usize {
        self.outcome_kinds.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentOptions<T> {
    pub solver: SolverOptions<T>,
    /// Replaces the default step cap when set.
    pub max_steps: Option<usize>,
}

/// Solver budget per descent step. A step only needs a covering pair whose
/// objective falls in the bisection window; the lower bound of the
/// fully-corrective solver settles within a few iterations, while certifying
/// the upper bound at large `K` costs orders of magnitude more.
pub const DESCENT_SOLVER_ITERS: usize = 5;
pub const DESCENT_SOLVER_TOL: f64 = 1e-2;

impl<T: Scalar> Default for DescentOptions<T> {
    fn default() -> Self {
        let solver = SolverOptions {
            max_iters: DESCENT_SOLVER_ITERS,
            tol: T::lit(DESCENT_SOLVER_TOL),
            policy: RestartPolicy::Once,
            ..SolverOptions::default()
        };
        Self {
            solver,
            max_steps: None,
        }
    }
}

/// `ceil(log(8 sqrt(d)) / log(1 / sqrt(0.81)))`, at least one.
pub fn max_steps(d: usize) -> usize {
    let num = (LEDGER.start_mult * (d as f64).sqrt()).ln();
    let den = (1.0 / LEDGER.decay_sq.sqrt()).ln();
    ((num / den).ceil() as usize).max(1)
}

/// Negative median of the projections `<mean_k - x_c, v1>`.
pub fn step_size<T: Scalar>(means: &BlockMeans<T>, x_c: &[T], v1: &[T]) -> Result<T> {
    if x_c.len() != means.d() || v1.len() != means.d() {
        return Err(Error::DimensionMismatch {
            expected: means.d(),
            got: x_c.len().min(v1.len()),
        });
    }
    let base = dot(x_c, v1);
    let mut proj: Vec<T> = means.iter().map(|m| dot(m, v1) - base).collect();
    Ok(-median_in_place(&mut proj))
}

/// Estimates the mean from `k` random blocks with default solver settings.
pub fn estimate<T: Scalar>(
    data: &DataMatrix<T>,
    k: usize,
    u: usize,
    seed: u64,
) -> Result<(Vec<T>, DescentTrace<T>)> {
    estimate_with(data, k, u, seed, &DescentOptions::default())
}

pub fn estimate_with<T: Scalar>(
    data: &DataMatrix<T>,
    k: usize,
    u: usize,
    seed: u64,
    opts: &DescentOptions<T>,
) -> Result<(Vec<T>, DescentTrace<T>)> {
    if k < LEDGER.min_blocks || k > data.n() {
        return Err(invalid(format!(
            "need {} <= k <= n, got k={k} n={}",
            LEDGER.min_blocks,
            data.n()
        )));
    }
    let part = partition(data.n(), k, derive_seed(seed, 0))?;
    let means = block_means(data, &part)?;
    let start = coordwise_median(&means);
    descend(&means, start, u, seed, opts)
}

/// Runs the descent on precomputed block means from an arbitrary start.
pub fn descend<T: Scalar>(
    means: &BlockMeans<T>,
    start: Vec<T>,
    u: usize,
    seed: u64,
    opts: &DescentOptions<T>,
) -> Result<(Vec<T>, DescentTrace<T>)> {
    let d = means.d();
    if start.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: start.len(),
        });
    }
    let cap = opts.max_steps.unwrap_or_else(|| max_steps(d));
    let mut trace = DescentTrace {
        iterates: Vec::new(),
        step_sizes: Vec::new(),
        outcome_kinds: Vec::new(),
        terminated_by: TerminatedBy::IterationCap,
    };
    let mut x = start;
    for t in 0..cap {
        let step_seed = derive_seed(seed, t as u64 + 1);
        trace.iterates.push(x.clone());
        match solve_sdp(means, &x, u, step_seed, &opts.solver)? {
            SdpOutcome::Direction(m) => {
                let op = FactorSum {
                    dim: d,
                    factors: &m.factors,
                };
                let v1 = top_eigenvector(&op, 1000, derive_seed(step_seed, u64::MAX)).vector;
                let theta = step_size(means, &x, &v1)?;
                axpy(-theta, &v1, &mut x);
                trace.step_sizes.push(theta);
                trace.outcome_kinds.push(OutcomeKind::Direction);
            }
            SdpOutcome::Fallback(p) => {
                trace.step_sizes.push(T::zero());
                trace.outcome_kinds.push(OutcomeKind::Fallback);
                trace.terminated_by = TerminatedBy::FallbackMu0;
                return Ok((p, trace));
            }
            SdpOutcome::CurrentIsGood => {
                trace.step_sizes.push(T::zero());
                trace.outcome_kinds.push(OutcomeKind::CurrentIsGood);
                trace.terminated_by = TerminatedBy::CurrentIsGood;
                return Ok((x, trace));
            }
        }
    }
    Ok((x, trace))
}

/// Distance moved by each step of a trace ending at `estimate`.
pub fn step_lengths<T: Scalar>(trace: &DescentTrace<T>, estimate: &[T]) -> Vec<T> {
    let mut pts: Vec<&[T]> = trace.iterates.iter().map(Vec::as_slice).collect();
    pts.push(estimate);
    pts.windows(2)
        .map(|w| crate::linalg::norm(&sub(w[1], w[0])))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn means_1d(vals: &[f64]) -> BlockMeans<f64> {
        BlockMeans::from_rows(&vals.iter().map(|&v| vec![v]).collect::<Vec<_>>(), 1).unwrap()
    }

    #[test]
    fn step_size_examples() {
        assert_eq!(
            step_size(&means_1d(&[1.0, 2.0, 10.0]), &[0.0], &[1.0]).unwrap(),
            -2.0
        );

        let mu = [1.0f64, -2.0];
        let means = BlockMeans::from_rows(&vec![mu.to_vec(); 5], 1).unwrap();
        let x = [4.0f64, 3.0];
        let v = [0.6f64, 0.8];
        let theta = step_size(&means, &x, &v).unwrap();
        assert!((theta - dot(&sub(&x, &mu), &v)).abs() < 1e-12);
        let next = [x[0] - theta * v[0], x[1] - theta * v[1]];
        assert!((dot(&sub(&next, &mu), &v)).abs() < 1e-12);

        let sym = BlockMeans::from_rows(
            &[
                vec![1.0, 5.0],
                vec![-1.0, 2.0],
                vec![3.0, 0.0],
                vec![-3.0, 1.0],
            ],
            1,
        )
        .unwrap();
        assert_eq!(step_size(&sym, &[0.0, 7.0], &[1.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn step_is_sign_invariant() {
        let means = BlockMeans::from_rows(
            &[
                vec![1.0, 5.0],
                vec![-1.0, 2.0],
                vec![3.0, 0.5],
                vec![2.0, 1.0],
            ],
            1,
        )
        .unwrap();
        let x = [0.3, -0.7];
        let v = [0.6, -0.8];
        let neg = [-0.6, 0.8];
        let a = step_size(&means, &x, &v).unwrap();
        let b = step_size(&means, &x, &neg).unwrap();
        assert_eq!(a * v[0], b * neg[0]);
        assert_eq!(a * v[1], b * neg[1]);
    }

    #[test]
    fn step_caps() {
        assert_eq!(max_steps(1), 20);
        assert_eq!(max_steps(20), 34);
        assert!(max_steps(0) >= 1);
    }

    #[test]
    fn identical_rows_return_exactly() {
        let c = vec![0.25, -3.5, 7.0];
        let data = DataMatrix::from_rows(&vec![c.clone(); 40]).unwrap();
        let (est, trace) = estimate(&data, 10, 1, 5).unwrap();
        assert_eq!(est, c);
        assert_eq!(trace.terminated_by, TerminatedBy::FallbackMu0);
        assert_eq!(trace.iterations(), 1);
    }

    #[test]
    fn k_range_checked() {
        let data = DataMatrix::from_rows(&vec![vec![0.0]; 20]).unwrap();
        assert!(estimate(&data, 9, 1, 0).is_err());
        assert!(estimate(&data, 21, 1, 0).is_err());
    }
}
