//! Every numeric constant the estimator uses, collected in one immutable table.

use num_rational::Ratio;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantsLedger {
    /// Fraction of blocks the inner minimum keeps (the `m` smallest forms).
    pub quantile_fraction: Ratio<u64>,
    /// Per-step contraction of the squared distance far from the mean.
    pub decay_sq: f64,
    /// Alignment level the descent certificates target.
    pub beta_threshold: f64,
    /// Distance (in units of the rate) beyond which the descent contracts.
    pub far_radius_mult: f64,
    /// Final error guarantee in units of the rate.
    pub output_radius_mult: f64,
    /// Closeness required of the covering solver.
    pub eta: f64,
    pub eps_approx: f64,
    /// Acceptance window of the bisection over the covering scale.
    pub window_lo: f64,
    pub window_hi: f64,
    /// Multiplier inside the bisection budget `ceil(log2(c_tilde * d^4))`.
    pub c_tilde: f64,
    /// Radius of the coordinate-wise start, in units of `sqrt(d) * r`.
    pub start_mult: f64,
    /// Minimum ratio of blocks to outliers.
    pub outlier_block_mult: f64,
    /// Leading coefficient of the rate formula.
    pub rate_coefficient: f64,
    /// Restart count is `u + ceil(restart_log_mult * ln d) + restart_offset`.
    pub restart_log_mult: f64,
    pub restart_offset: usize,
    /// Smallest block count accepted by the solver.
    pub min_blocks: usize,
}

pub const LEDGER: ConstantsLedger = ConstantsLedger {
    quantile_fraction: Ratio::new_raw(9, 10),
    decay_sq: 0.81,
    beta_threshold: 0.78,
    far_radius_mult: 800.0,
    output_radius_mult: 808.0,
    eta: 1e-4,
    eps_approx: 0.173,
    window_lo: 0.9981,
    window_hi: 1.0,
    c_tilde: 1e6,
    start_mult: 8.0,
    outlier_block_mult: 300.0,
    rate_coefficient: 1200.0,
    restart_log_mult: 3.0,
    restart_offset: 10,
    min_blocks: 10,
};

impl ConstantsLedger {
    /// `m = ceil(quantile_fraction * k)`.
    pub fn kept_blocks(&self, k: usize) -> usize {
        let num = *self.quantile_fraction.numer() as usize;
        let den = *self.quantile_fraction.denom() as usize;
        (num * k).div_ceil(den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_values() {
        let c = LEDGER;
        assert_eq!(c.quantile_fraction, Ratio::new(9, 10));
        assert_eq!(c.decay_sq, 0.81);
        assert_eq!(c.beta_threshold, 0.78);
        assert_eq!(c.far_radius_mult, 800.0);
        assert_eq!(c.output_radius_mult, 808.0);
        assert_eq!(c.eta, 0.0001);
        assert_eq!(c.eps_approx, 0.173);
        assert_eq!((c.window_lo, c.window_hi), (0.9981, 1.0));
        assert_eq!(c.c_tilde, 1e6);
        assert_eq!(c.start_mult, 8.0);
        assert_eq!(c.outlier_block_mult, 300.0);
        assert_eq!(c.rate_coefficient, 1200.0);
    }

    #[test]
    fn all_positive_and_ordered_window() {
        let c = LEDGER;
        for v in [
            c.decay_sq,
            c.beta_threshold,
            c.far_radius_mult,
            c.output_radius_mult,
            c.eta,
            c.eps_approx,
            c.window_lo,
            c.window_hi,
            c.c_tilde,
            c.start_mult,
            c.outlier_block_mult,
        ] {
            assert!(v > 0.0);
        }
        assert!(c.window_lo < c.window_hi);
    }

    #[test]
    fn kept_blocks_rounds_up() {
        assert_eq!(LEDGER.kept_blocks(10), 9);
        assert_eq!(LEDGER.kept_blocks(11), 10);
        assert_eq!(LEDGER.kept_blocks(20), 18);
        assert_eq!(LEDGER.kept_blocks(3000), 2700);
        assert_eq!(LEDGER.kept_blocks(15), 14);
    }
}
