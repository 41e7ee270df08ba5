//! Adaptive block count: estimates on the dyadic grid `K_j = ceil(N / 2^j)`,
//! keeping the coarsest level whose estimate stays inside every finer level's
//! confidence ball.

use std::str::FromStr;

use crate::blocks::{block_means, coordwise_median, halve_means, partition, BlockMeans};
use crate::constants::LEDGER;
use crate::data::DataMatrix;
use crate::descent::{descend, DescentOptions, TerminatedBy};
use crate::error::{invalid, Result};
use crate::linalg::dist;
use crate::rate::{rate_r, RateParams};
use crate::rng::derive_seed;
use crate::scalar::Scalar;
use crate::sdp::restart_count;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "snake_case")
)]
pub enum Schedule {
    /// `u_j = 2^j`
    #[default]
    Fast,
    /// `u_j = ceil(N / 2^j)`
    Subgaussian,
}

impl FromStr for Schedule {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(Self::Fast),
            "subgaussian" => Ok(Self::Subgaussian),
            other => Err(invalid(format!("unknown schedule `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LepskiConfig<T> {
    pub trace_sigma: T,
    pub opnorm_sigma: T,
    /// Restart parameter per level, indexed by `j`.
    pub u_schedule: Vec<usize>,
}

impl<T: Scalar> LepskiConfig<T> {
    pub fn new(trace_sigma: T, opnorm_sigma: T, u_schedule: Vec<usize>) -> Result<Self> {
        if !(trace_sigma >= T::zero() && opnorm_sigma >= T::zero()) {
            return Err(invalid("covariance scalars must be non-negative"));
        }
        if u_schedule.is_empty() || u_schedule.contains(&0) {
            return Err(invalid("u schedule entries must be at least one"));
        }
        Ok(Self {
            trace_sigma,
            opnorm_sigma,
            u_schedule,
        })
    }

    /// Preset schedule with `floor(log2 N) + 1` entries.
    pub fn with_schedule(
        trace_sigma: T,
        opnorm_sigma: T,
        n: usize,
        schedule: Schedule,
    ) -> Result<Self> {
        let levels = n.max(1).ilog2() as usize + 1;
        let u = (0..levels)
            .map(|j| match schedule {
                Schedule::Fast => 1usize << j,
                Schedule::Subgaussian => n.div_ceil(1 << j),
            })
            .collect();
        Self::new(trace_sigma, opnorm_sigma, u)
    }
}

/// `808 * rate_r(trace, opnorm, n, k)`
pub fn r_star<T: Scalar>(cfg: &LepskiConfig<T>, n: usize, k: usize) -> Result<T> {
    let r = rate_r(&RateParams::new(cfg.trace_sigma, cfg.opnorm_sigma, n, k)?)?;
    Ok(T::lit(LEDGER.output_radius_mult) * r)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LevelEstimate<T> {
    /// Nominal block count `ceil(N / 2^j)`.
    pub k: usize,
    pub u: usize,
    pub estimate: Vec<T>,
    pub radius: T,
    pub terminated_by: TerminatedBy,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LepskiResult<T> {
    pub estimate: Vec<T>,
    pub j_hat: usize,
    pub per_level: Vec<LevelEstimate<T>>,
}

/// Whether level `j`'s estimate lies in every ball `B(est_i, r_j + r_i)`, `i < j`.
pub fn guard_holds<T: Scalar>(levels: &[LevelEstimate<T>], j: usize) -> bool {
    let cur = &levels[j];
    levels[..j]
        .iter()
        .all(|prev| dist(&cur.estimate, &prev.estimate) <= cur.radius + prev.radius)
}

/// Largest level index passing [`guard_holds`].
pub fn select_level<T: Scalar>(levels: &[LevelEstimate<T>]) -> usize {
    (0..levels.len())
        .rev()
        .find(|&j| guard_holds(levels, j))
        .unwrap_or(0)
}

/// Nominal block counts of the grid, stopping before the count drops below the floor.
pub fn level_counts(n: usize) -> Vec<usize> {
    (0..usize::BITS)
        .map(|j| n.div_ceil(1 << j))
        .take_while(|&k| k >= LEDGER.min_blocks)
        .collect()
}

/// Sum over the usable levels of the restart counts `u_j + ceil(3 ln d) + 10`.
pub fn total_restarts<T: Scalar>(cfg: &LepskiConfig<T>, n: usize, d: usize) -> usize {
    level_counts(n)
        .iter()
        .enumerate()
        .map(|(j, _)| restart_count(cfg.u_schedule.get(j).copied().unwrap_or(1), d))
        .sum()
}

pub fn adaptive_estimate<T: Scalar>(
    data: &DataMatrix<T>,
    cfg: &LepskiConfig<T>,
    seed: u64,
) -> Result<LepskiResult<T>> {
    adaptive_estimate_with(data, cfg, seed, &DescentOptions::default())
}

pub fn adaptive_estimate_with<T: Scalar>(
    data: &DataMatrix<T>,
    cfg: &LepskiConfig<T>,
    seed: u64,
    opts: &DescentOptions<T>,
) -> Result<LepskiResult<T>> {
    let n = data.n();
    if n < LEDGER.min_blocks {
        return Err(invalid(format!(
            "need at least {} observations, got {n}",
            LEDGER.min_blocks
        )));
    }
    let counts = level_counts(n);
    let mut means: BlockMeans<T> =
        block_means(data, &partition(n, counts[0], derive_seed(seed, 0))?)?;
    let mut levels: Vec<LevelEstimate<T>> = Vec::new();
    for (j, &k) in counts.iter().enumerate() {
        if j > 0 {
            means = halve_means(&means)?;
            if means.k() < LEDGER.min_blocks {
                break;
            }
        }
        let u = cfg
            .u_schedule
            .get(j)
            .copied()
            .unwrap_or_else(|| *cfg.u_schedule.last().expect("non-empty"));
        let (estimate, trace) = descend(
            &means,
            coordwise_median(&means),
            u,
            derive_seed(seed, j as u64 + 1),
            opts,
        )?;
        levels.push(LevelEstimate {
            k,
            u,
            estimate,
            radius: r_star(cfg, n, k)?,
            terminated_by: trace.terminated_by,
        });
        if !guard_holds(&levels, j) {
            break;
        }
    }
    let j_hat = select_level(&levels);
    Ok(LepskiResult {
        estimate: levels[j_hat].estimate.clone(),
        j_hat,
        per_level: levels,
    })
}
