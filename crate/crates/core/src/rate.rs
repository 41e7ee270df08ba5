use crate::constants::LEDGER;
use crate::error::{invalid, Result};
use crate::scalar::Scalar;

/// Covariance summary and sample/block counts entering the rate formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateParams<T> {
    pub trace_sigma: T,
    pub opnorm_sigma: T,
    pub n: usize,
    pub k: usize,
}

impl<T: Scalar> RateParams<T> {
    pub fn new(trace_sigma: T, opnorm_sigma: T, n: usize, k: usize) -> Result<Self> {
        let p = Self {
            trace_sigma,
            opnorm_sigma,
            n,
            k,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.trace_sigma >= T::zero() && self.opnorm_sigma >= T::zero()) {
            return Err(invalid("covariance scalars must be non-negative"));
        }
        if self.opnorm_sigma > self.trace_sigma {
            return Err(invalid("operator norm exceeds trace"));
        }
        if self.k == 0 || self.k > self.n {
            return Err(invalid(format!(
                "need 1 <= k <= n, got k={} n={}",
                self.k, self.n
            )));
        }
        Ok(())
    }
}

/// `c * sqrt(trace / N) + sqrt(c * opnorm * K / N)` with `c = 1200`.
pub fn rate_r<T: Scalar>(p: &RateParams<T>) -> Result<T> {
    p.validate()?;
    let c = T::lit(LEDGER.rate_coefficient);
    let n = T::of_usize(p.n);
    let k = T::of_usize(p.k);
    Ok(c * (p.trace_sigma / n).sqrt() + (c * p.opnorm_sigma * k / n).sqrt())
}
