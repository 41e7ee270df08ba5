use crate::blocks::{coordwise_median, median_distance, BlockMeans};
use crate::constants::LEDGER;
use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;
use crate::sdp::covering::{covering_to_dual, AlgRho, SolverOptions};
use crate::sdp::forms::{CenteredForms, DualSolution};
use crate::sdp::search::binary_search;

#[derive(Debug, Clone, PartialEq)]
pub enum SdpOutcome<T> {
    /// A certified matrix whose top eigenvector is the next descent direction.
    Direction(DualSolution<T>),
    /// Stop and return this point (the coordinate-wise median of means).
    Fallback(Vec<T>),
    /// Stop and keep the current point.
    CurrentIsGood,
}

/// `ceil(log2(c_tilde * d^4))` bisection steps.
pub fn bisection_budget(d: usize) -> usize {
    (LEDGER.c_tilde * (d as f64).powi(4)).log2().ceil().max(0.0) as usize
}

/// One descent decision at `x_c`: searches the covering scale starting from
/// `d / delta^2`, where `delta` is the median distance of the block means to
/// their coordinate-wise median.
pub fn solve_sdp<T: Scalar>(
    means: &BlockMeans<T>,
    x_c: &[T],
    u: usize,
    seed: u64,
    opts: &SolverOptions<T>,
) -> Result<SdpOutcome<T>> {
    if means.k() < LEDGER.min_blocks {
        return Err(invalid(format!(
            "need at least {} blocks, got {}",
            LEDGER.min_blocks,
            means.k()
        )));
    }
    if x_c.len() != means.d() {
        return Err(Error::DimensionMismatch {
            expected: means.d(),
            got: x_c.len(),
        });
    }
    let mu0 = coordwise_median(means);
    let delta = median_distance(means, &mu0)?;
    if delta == T::zero() {
        return Ok(SdpOutcome::Fallback(mu0));
    }
    let forms = CenteredForms::new(means, x_c)?;
    let d = T::of_usize(means.d());
    let rho0 = d / (delta * delta);
    let mut alg = AlgRho::new(&forms, u, seed, *opts);
    if alg.solve(rho0)?.objective <= T::lit(LEDGER.window_hi) {
        let search = binary_search(&mut alg, rho0, bisection_budget(means.d()))?;
        if search.found {
            return Ok(SdpOutcome::Direction(covering_to_dual(
                &forms,
                &search.solution,
            )?));
        }
    }
    let rho1 = T::one() / (d * delta).powi(2);
    if alg.solve(rho1)?.objective < T::one() {
        Ok(SdpOutcome::Fallback(mu0))
    } else {
        Ok(SdpOutcome::CurrentIsGood)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_values() {
        assert_eq!(bisection_budget(1), 20);
        assert_eq!(bisection_budget(20), 38);
    }

    #[test]
    fn identical_means_fall_back() {
        let means = BlockMeans::from_rows(&vec![vec![1.5, -2.0]; 12], 3).unwrap();
        let out = solve_sdp(&means, &[0.0, 0.0], 1, 0, &SolverOptions::default()).unwrap();
        assert_eq!(out, SdpOutcome::Fallback(vec![1.5, -2.0]));
    }

    #[test]
    fn too_few_blocks() {
        let means = BlockMeans::from_rows(&vec![vec![1.0]; 9], 1).unwrap();
        assert!(solve_sdp(&means, &[0.0], 1, 0, &SolverOptions::default()).is_err());
    }
}
