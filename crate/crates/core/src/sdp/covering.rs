//! The covering problem at scale `rho`,
//!
//! ```text
//! minimize Tr(M') + |y'|_1  s.t.  rho a_k^T M' a_k + (9K/10) y'_k >= 1,  M' PSD,  y' >= 0,
//! ```
//! its explicit conversions to and from trace-one matrices, and the
//! restart-boosted approximate solver built on [`max_h_with`].

use crate::constants::LEDGER;
use crate::error::{invalid, Error, Result};
use crate::rng::derive_seed;
use crate::scalar::Scalar;
use crate::sdp::forms::{factor_forms, CenteredForms, DualSolution, Factor};
use crate::sdp::solver::{max_h_with, MaxHOptions, MaxHResult, StepRule};
use crate::stats::quantile_upper;

#[derive(Debug, Clone, PartialEq)]
pub struct CoveringSolution<T> {
    /// `M'` as rank-one factors; weights are not normalized.
    pub m_prime: Vec<Factor<T>>,
    pub y_prime: Vec<T>,
    pub rho: T,
    /// `Tr(M') + |y'|_1`
    pub objective: T,
}

impl<T: Scalar> CoveringSolution<T> {
    pub fn trace(&self) -> T {
        self.m_prime.iter().map(|f| f.weight).sum()
    }

    /// `rho a_k^T M' a_k + (9K/10) y'_k - 1` per block; feasible when all are `>= 0`.
    pub fn residuals(&self, forms: &CenteredForms<T>) -> Vec<T> {
        let kappa = covering_scale::<T>(forms.k());
        factor_forms(forms, &self.m_prime)
            .into_iter()
            .zip(&self.y_prime)
            .map(|(q, &y)| self.rho * q + kappa * y - T::one())
            .collect()
    }
}

/// The real-valued `9K/10` multiplying `y'` in the constraints.
fn covering_scale<T: Scalar>(k: usize) -> T {
    let f = LEDGER.quantile_fraction;
    T::of_usize(k) * T::lit(*f.numer() as f64) / T::lit(*f.denom() as f64)
}

/// Feasible covering pair from a trace-one matrix: with `z` the upper 9/10
/// quantile of the forms and `y_k = max(0, z - q_k)`, sets `M' = M/(rho z)`
/// and `y' = y / (z 9K/10)`.
pub fn dual_to_covering<T: Scalar>(
    forms: &CenteredForms<T>,
    m: &DualSolution<T>,
    rho: T,
) -> Result<CoveringSolution<T>> {
    if !(rho > T::zero() && rho.is_finite()) {
        return Err(invalid("rho must be positive and finite"));
    }
    let q = forms.quadratic_forms(m);
    let z = quantile_upper(&q, LEDGER.quantile_fraction)?;
    if z <= T::zero() {
        return Err(Error::Degenerate(
            "upper quantile of the quadratic forms is zero".into(),
        ));
    }
    let denom = z * covering_scale::<T>(forms.k());
    let y_prime: Vec<T> = q
        .iter()
        .map(|&qk| (z - qk).max(T::zero()) / denom)
        .collect();
    let m_prime: Vec<Factor<T>> = m
        .factors
        .iter()
        .map(|f| Factor {
            weight: f.weight / (rho * z),
            direction: f.direction.clone(),
        })
        .collect();
    let objective =
        m_prime.iter().map(|f| f.weight).sum::<T>() + y_prime.iter().copied().sum::<T>();
    Ok(CoveringSolution {
        m_prime,
        y_prime,
        rho,
        objective,
    })
}

/// Trace-normalizes `M'`; when the covering objective is at most one the result
/// has inner-minimum objective at least `1/rho`.
pub fn covering_to_dual<T: Scalar>(
    forms: &CenteredForms<T>,
    sol: &CoveringSolution<T>,
) -> Result<DualSolution<T>> {
    if sol.trace() <= T::zero() {
        return Err(Error::Precondition(
            "covering solution has zero trace".into(),
        ));
    }
    if sol.objective > T::one() + T::lit(1e-12) {
        return Err(Error::Precondition(format!(
            "covering objective {} exceeds one",
            sol.objective
        )));
    }
    DualSolution::from_factors(forms, sol.m_prime.clone())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RestartPolicy {
    /// Stop launching restarts once one run certifies its gap.
    #[default]
    UntilCertified,
    /// Always run the full restart count.
    All,
    /// A single run. Suits truncated solves, where a fresh start vector does
    /// not close a gap left by the iteration cap.
    Once,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions<T> {
    pub max_iters: usize,
    /// Relative duality gap each run aims for.
    pub tol: T,
    pub policy: RestartPolicy,
    pub step_rule: StepRule,
}

impl<T: Scalar> Default for SolverOptions<T> {
    fn default() -> Self {
        Self {
            max_iters: 400,
            tol: T::lit(LEDGER.eta / 10.0),
            policy: RestartPolicy::UntilCertified,
            step_rule: StepRule::FullyCorrective,
        }
    }
}

/// `u + ceil(3 ln d) + 10`
pub fn restart_count(u: usize, d: usize) -> usize {
    let log_term = (LEDGER.restart_log_mult * (d.max(1) as f64).ln()).ceil() as usize;
    u + log_term + LEDGER.restart_offset
}

/// Approximate covering solver for one set of forms. The trace-one maximizers
/// are computed once (lazily) and reused for every `rho`, so the objective is
/// a deterministic, non-increasing function of `rho`.
#[derive(Debug, Clone)]
pub struct AlgRho<'a, T> {
    forms: &'a CenteredForms<T>,
    opts: SolverOptions<T>,
    restarts: usize,
    seed: u64,
    runs: Vec<MaxHResult<T>>,
}

impl<'a, T: Scalar> AlgRho<'a, T> {
    pub fn new(forms: &'a CenteredForms<T>, u: usize, seed: u64, opts: SolverOptions<T>) -> Self {
        Self {
            forms,
            opts,
            restarts: restart_count(u, forms.d()),
            seed,
            runs: Vec::new(),
        }
    }

    pub fn forms(&self) -> &'a CenteredForms<T> {
        self.forms
    }

    /// The completed restarts, computing them on first use.
    pub fn runs(&mut self) -> Result<&[MaxHResult<T>]> {
        if self.runs.is_empty() {
            for r in 0..self.restarts {
                let opts = MaxHOptions {
                    iters: self.opts.max_iters,
                    tol: self.opts.tol,
                    seed: derive_seed(self.seed, r as u64),
                    step_rule: self.opts.step_rule,
                };
                let run = max_h_with(self.forms, &opts)?;
                let certified = run.converged;
                self.runs.push(run);
                match self.opts.policy {
                    RestartPolicy::Once => break,
                    RestartPolicy::UntilCertified if certified => break,
                    _ => {}
                }
            }
        }
        Ok(&self.runs)
    }

    /// Best covering pair over the restarts at scale `rho`.
    pub fn solve(&mut self, rho: T) -> Result<CoveringSolution<T>> {
        let forms = self.forms;
        let mut best: Option<CoveringSolution<T>> = None;
        for run in self.runs()? {
            match dual_to_covering(forms, &run.solution, rho) {
                Ok(sol) => {
                    if best.as_ref().is_none_or(|b| sol.objective < b.objective) {
                        best = Some(sol);
                    }
                }
                Err(Error::Degenerate(_)) => {}
                Err(e) => return Err(e),
            }
        }
        best.ok_or_else(|| Error::Degenerate("every restart has a zero upper quantile".into()))
    }
}

/// One-shot covering solve at `rho` with solver tolerance `eta / 10`.
pub fn alg_rho<T: Scalar>(
    forms: &CenteredForms<T>,
    rho: T,
    eta: T,
    u: usize,
    seed: u64,
) -> Result<CoveringSolution<T>> {
    if eta.is_nan() || eta <= T::zero() {
        return Err(invalid("eta must be positive"));
    }
    let opts = SolverOptions {
        tol: eta / T::lit(10.0),
        ..SolverOptions::default()
    };
    AlgRho::new(forms, u, seed, opts).solve(rho)
}
