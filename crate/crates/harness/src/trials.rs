//! Seeded Monte-Carlo trials over a list of configurations.

use std::time::Instant;

use rayon::prelude::*;
use robust_mean::linalg::dist;
use robust_mean::{derive_seed, estimate, Data, LepskiConfig};
use serde::Serialize;

use crate::baselines::{coordinate_median, empirical_mean, geometric_median};
use crate::config::{EstimatorKind, TrialConfig};
use crate::contaminate::contaminate;
use crate::error::Result;
use crate::generate::generate;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialResult {
    pub estimator: String,
    pub seed: u64,
    pub rep: usize,
    pub error_l2: f64,
    pub iterations: usize,
    pub wall_ms: f64,
    pub trial: String,
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub u: usize,
    pub outliers: usize,
    pub epsilon: f64,
}

/// Seed of repetition `rep` of configuration `config`.
pub fn trial_seed(master: u64, config: usize, rep: usize) -> u64 {
    derive_seed(derive_seed(master, config as u64), rep as u64)
}

/// Sample for one trial: inliers from stream 0, outliers from stream 1.
pub fn trial_data(cfg: &TrialConfig, seed: u64) -> Result<Data> {
    let clean = generate(&cfg.generator, cfg.n, derive_seed(seed, 0))?;
    match &cfg.contamination {
        Some(spec) => Ok(contaminate(&clean, spec, derive_seed(seed, 1))?.0),
        None => Ok(clean),
    }
}

/// Runs one estimator, returning its estimate and iteration count.
pub fn run_estimator(
    kind: EstimatorKind,
    cfg: &TrialConfig,
    data: &Data,
    seed: u64,
) -> Result<(Vec<f64>, usize)> {
    Ok(match kind {
        EstimatorKind::RobustMean => {
            let (est, trace) = estimate(data, cfg.k, cfg.u, seed)?;
            (est, trace.iterations())
        }
        EstimatorKind::Lepski => {
            let lcfg = LepskiConfig::with_schedule(
                cfg.generator.trace(),
                cfg.generator.opnorm(),
                cfg.n,
                cfg.schedule,
            )?;
            let res = robust_mean::adaptive_estimate(data, &lcfg, seed)?;
            (res.estimate, res.per_level.len())
        }
        EstimatorKind::Mean => (empirical_mean(data), 0),
        EstimatorKind::CoordinateMedian => (coordinate_median(data)?, 0),
        EstimatorKind::GeometricMedian => {
            let gm = geometric_median(data)?;
            (gm.point, gm.iterations)
        }
    })
}

fn one_trial(cfg: &TrialConfig, rep: usize, seed: u64, timing: bool) -> Result<Vec<TrialResult>> {
    let data = trial_data(cfg, seed)?;
    cfg.estimators
        .iter()
        .map(|&kind| {
            let start = Instant::now();
            let (est, iterations) = run_estimator(kind, cfg, &data, derive_seed(seed, 2))?;
            let wall_ms = if timing {
                start.elapsed().as_secs_f64() * 1e3
            } else {
                0.0
            };
            Ok(TrialResult {
                estimator: kind.name().to_string(),
                seed,
                rep,
                error_l2: dist(&est, &cfg.generator.mu),
                iterations,
                wall_ms,
                trial: cfg.name.clone(),
                n: cfg.n,
                d: cfg.d(),
                k: cfg.k,
                u: cfg.u,
                outliers: cfg.outliers(),
                epsilon: cfg.epsilon(),
            })
        })
        .collect()
}

/// Every (configuration, repetition) pair, in that order whatever the
/// completion order. With `timing` off, `wall_ms` is zero so that repeated
/// runs are identical.
pub fn run_trials(
    configs: &[TrialConfig],
    repetitions: usize,
    seed: u64,
    timing: bool,
) -> Result<Vec<TrialResult>> {
    if repetitions == 0 {
        return Err(crate::HarnessError::Usage(
            "repetitions must be at least 1".into(),
        ));
    }
    configs.iter().try_for_each(TrialConfig::validate)?;
    let jobs: Vec<(usize, usize)> = (0..configs.len())
        .flat_map(|c| (0..repetitions).map(move |r| (c, r)))
        .collect();
    let batches: Vec<Result<Vec<TrialResult>>> = jobs
        .par_iter()
        .map(|&(c, r)| one_trial(&configs[c], r, trial_seed(seed, c, r), timing))
        .collect();
    let mut out = Vec::new();
    for b in batches {
        out.extend(b?);
    }
    Ok(out)
}
