//! Inlier laws with mean `mu` and diagonal covariance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};
use robust_mean::Data;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Coordinate law before scaling. Every variant has mean zero and unit variance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Law {
    Gaussian,
    /// Student t rescaled to unit variance; needs `df > 2`.
    StudentT {
        df: f64,
    },
    /// `exp(G)` centered and standardized.
    Lognormal,
    /// Gaussian whose `j`-th variance is further scaled by `(j + 1)^-exponent`,
    /// which separates the trace from the operator norm.
    ScaledCoordinates {
        exponent: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub law: Law,
    pub mu: Vec<f64>,
    /// Diagonal of the covariance before any law-specific scaling.
    pub sigma_diag: Vec<f64>,
}

impl GeneratorSpec {
    /// Standard Gaussian centered at `mu`.
    pub fn isotropic(law: Law, mu: Vec<f64>) -> Self {
        let sigma_diag = vec![1.0; mu.len()];
        Self {
            law,
            mu,
            sigma_diag,
        }
    }

    pub fn d(&self) -> usize {
        self.mu.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.mu.is_empty() {
            return Err(HarnessError::Usage("mu must be non-empty".into()));
        }
        if self.sigma_diag.len() != self.mu.len() {
            return Err(HarnessError::Usage(format!(
                "sigma_diag has {} entries, mu has {}",
                self.sigma_diag.len(),
                self.mu.len()
            )));
        }
        if self.mu.iter().any(|v| !v.is_finite())
            || self.sigma_diag.iter().any(|v| !v.is_finite() || *v < 0.0)
        {
            return Err(HarnessError::Usage(
                "mu must be finite and sigma_diag finite and non-negative".into(),
            ));
        }
        match self.law {
            Law::StudentT { df } if df.is_nan() || df <= 2.0 => Err(HarnessError::Usage(format!(
                "student_t needs df > 2 for a finite variance, got {df}"
            ))),
            Law::ScaledCoordinates { exponent } if !exponent.is_finite() => Err(
                HarnessError::Usage("scaled_coordinates exponent must be finite".into()),
            ),
            _ => Ok(()),
        }
    }

    /// Diagonal of the covariance of one draw.
    pub fn covariance_diag(&self) -> Vec<f64> {
        match self.law {
            Law::ScaledCoordinates { exponent } => self
                .sigma_diag
                .iter()
                .enumerate()
                .map(|(j, s)| s * ((j + 1) as f64).powf(-exponent))
                .collect(),
            _ => self.sigma_diag.clone(),
        }
    }

    pub fn trace(&self) -> f64 {
        self.covariance_diag().iter().sum()
    }

    pub fn opnorm(&self) -> f64 {
        self.covariance_diag().iter().fold(0.0, |m, &v| m.max(v))
    }
}

fn unit_draw<R: Rng>(law: &Law, t: Option<&StudentT<f64>>, rng: &mut R) -> f64 {
    match law {
        Law::Gaussian | Law::ScaledCoordinates { .. } => StandardNormal.sample(rng),
        Law::StudentT { df } => {
            let t = t.expect("built for student_t");
            t.sample(rng) * ((df - 2.0) / df).sqrt()
        }
        Law::Lognormal => {
            let g: f64 = StandardNormal.sample(rng);
            let e = std::f64::consts::E;
            (g.exp() - e.sqrt()) / ((e - 1.0) * e).sqrt()
        }
    }
}

/// `n` i.i.d. draws, row-major.
pub fn generate(spec: &GeneratorSpec, n: usize, seed: u64) -> Result<Data> {
    spec.validate()?;
    if n == 0 {
        return Err(HarnessError::Usage("n must be at least 1".into()));
    }
    let t = match spec.law {
        Law::StudentT { df } => {
            Some(StudentT::new(df).map_err(|e| HarnessError::Usage(e.to_string()))?)
        }
        _ => None,
    };
    let scale: Vec<f64> = spec.covariance_diag().iter().map(|v| v.sqrt()).collect();
    let d = spec.d();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(n * d);
    for _ in 0..n {
        for (m, s) in spec.mu.iter().zip(&scale) {
            values.push(m + s * unit_draw(&spec.law, t.as_ref(), &mut rng));
        }
    }
    Ok(Data::from_flat(n, d, values)?)
}
