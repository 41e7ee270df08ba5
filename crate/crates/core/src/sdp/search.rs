use crate::constants::LEDGER;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sdp::covering::{AlgRho, CoveringSolution};

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult<T> {
    /// Whether the last solution's objective lies in the acceptance window.
    pub found: bool,
    pub solution: CoveringSolution<T>,
    /// Bisection steps taken after the initial solve at `rho0`.
    pub iterations: usize,
}

/// Bisection on `[0, rho0]` for a scale whose covering objective lands in
/// `[0.9981, 1]`. Objectives below the window shrink the upper end, objectives
/// above it raise the lower end.
pub fn binary_search<T: Scalar>(
    alg: &mut AlgRho<'_, T>,
    rho0: T,
    t_max: usize,
) -> Result<SearchResult<T>> {
    let (lo_w, hi_w) = (T::lit(LEDGER.window_lo), T::lit(LEDGER.window_hi));
    let mut solution = alg.solve(rho0)?;
    if solution.objective > hi_w {
        return Err(Error::Precondition(format!(
            "objective {} at rho0 exceeds one",
            solution.objective
        )));
    }
    let inside = |s: &CoveringSolution<T>| s.objective >= lo_w && s.objective <= hi_w;
    let (mut lo, mut hi, mut rho) = (T::zero(), rho0, rho0);
    let mut iterations = 0;
    while !inside(&solution) && iterations < t_max {
        if solution.objective < lo_w {
            hi = rho;
        } else {
            lo = rho;
        }
        rho = (lo + hi) / T::lit(2.0);
        solution = alg.solve(rho)?;
        iterations += 1;
    }
    Ok(SearchResult {
        found: inside(&solution),
        solution,
        iterations,
    })
}
