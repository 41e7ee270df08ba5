//! Benchmark configuration, read from TOML or JSON.

use std::path::Path;

use robust_mean::Schedule;
use serde::{Deserialize, Serialize};

use crate::contaminate::ContaminationSpec;
use crate::error::{HarnessError, Result};
use crate::generate::GeneratorSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    /// The SDP descent at the configured `k`.
    RobustMean,
    /// Adaptive `k`, using the generator's covariance.
    Lepski,
    Mean,
    CoordinateMedian,
    GeometricMedian,
}

impl EstimatorKind {
    pub const ALL: [Self; 5] = [
        Self::RobustMean,
        Self::Lepski,
        Self::Mean,
        Self::CoordinateMedian,
        Self::GeometricMedian,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::RobustMean => "robust_mean",
            Self::Lepski => "lepski",
            Self::Mean => "mean",
            Self::CoordinateMedian => "coordinate_median",
            Self::GeometricMedian => "geometric_median",
        }
    }
}

fn default_estimators() -> Vec<EstimatorKind> {
    vec![
        EstimatorKind::RobustMean,
        EstimatorKind::Mean,
        EstimatorKind::CoordinateMedian,
        EstimatorKind::GeometricMedian,
    ]
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrialConfig {
    pub name: String,
    pub n: usize,
    pub k: usize,
    #[serde(default = "one")]
    pub u: usize,
    pub generator: GeneratorSpec,
    #[serde(default)]
    pub contamination: Option<ContaminationSpec>,
    #[serde(default = "default_estimators")]
    pub estimators: Vec<EstimatorKind>,
    #[serde(default)]
    pub schedule: Schedule,
}

impl TrialConfig {
    pub fn d(&self) -> usize {
        self.generator.d()
    }

    pub fn outliers(&self) -> usize {
        self.contamination.as_ref().map_or(0, |c| c.count)
    }

    pub fn epsilon(&self) -> f64 {
        self.outliers() as f64 / self.n as f64
    }

    pub fn validate(&self) -> Result<()> {
        let ctx = |e: HarnessError| match e {
            HarnessError::Usage(m) => HarnessError::Usage(format!("trial `{}`: {m}", self.name)),
            other => other,
        };
        self.generator.validate().map_err(ctx)?;
        if self.n == 0 || self.k == 0 || self.k > self.n {
            return Err(ctx(HarnessError::Usage(format!(
                "need 1 <= k <= n, got k = {}, n = {}",
                self.k, self.n
            ))));
        }
        if self.estimators.is_empty() {
            return Err(ctx(HarnessError::Usage("no estimators listed".into())));
        }
        if let Some(c) = &self.contamination {
            c.validate(self.n, self.d()).map_err(ctx)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkConfig {
    pub seed: u64,
    #[serde(default = "one")]
    pub repetitions: usize,
    /// Also write `curves.tsv`.
    #[serde(default)]
    pub tsv: bool,
    pub trials: Vec<TrialConfig>,
}

impl BenchmarkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(HarnessError::Usage("repetitions must be at least 1".into()));
        }
        if self.trials.is_empty() {
            return Err(HarnessError::Usage("no trials configured".into()));
        }
        self.trials.iter().try_for_each(TrialConfig::validate)
    }

    /// Parses TOML, or JSON when `json` is set. Errors carry the field path.
    pub fn parse(text: &str, json: bool) -> Result<Self> {
        let cfg: Self = if json {
            let de = &mut serde_json::Deserializer::from_str(text);
            serde_path_to_error::deserialize(de).map_err(|e| {
                HarnessError::Usage(format!("config at `{}`: {}", e.path(), e.inner()))
            })?
        } else {
            let de = toml::de::Deserializer::parse(text)
                .map_err(|e| HarnessError::Usage(format!("config: {e}")))?;
            serde_path_to_error::deserialize(de).map_err(|e| {
                HarnessError::Usage(format!("config at `{}`: {}", e.path(), e.inner()))
            })?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a `.json` file as JSON and anything else as TOML.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::io(path.display().to_string(), e))?;
        let json = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"));
        Self::parse(&text, json).map_err(|e| match e {
            HarnessError::Usage(m) => HarnessError::Usage(format!("{}: {m}", path.display())),
            other => other,
        })
    }
}
