//! Replacing a uniformly chosen subset of rows by outliers.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robust_mean::Data;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Corruption {
    /// Every outlier sits at `location`.
    PointMass { location: Vec<f64> },
    /// Each chosen row moves by `magnitude` along the unit vector of `direction`.
    AdversarialShift { direction: Vec<f64>, magnitude: f64 },
    /// Every outlier is `factor` times one uniformly chosen clean row.
    DuplicateInlierScaled { factor: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContaminationSpec {
    pub count: usize,
    #[serde(flatten)]
    pub corruption: Corruption,
}

impl ContaminationSpec {
    pub fn validate(&self, n: usize, d: usize) -> Result<()> {
        if self.count > n {
            return Err(HarnessError::Usage(format!(
                "{} outliers requested for {n} rows",
                self.count
            )));
        }
        let check_dim = |v: &[f64], what: &str| {
            if v.len() != d {
                Err(HarnessError::Usage(format!(
                    "{what} has {} entries, data has dimension {d}",
                    v.len()
                )))
            } else if v.iter().any(|x| !x.is_finite()) {
                Err(HarnessError::Usage(format!("{what} must be finite")))
            } else {
                Ok(())
            }
        };
        match &self.corruption {
            Corruption::PointMass { location } => check_dim(location, "location"),
            Corruption::AdversarialShift {
                direction,
                magnitude,
            } => {
                check_dim(direction, "direction")?;
                if direction.iter().all(|&x| x == 0.0) || !magnitude.is_finite() {
                    return Err(HarnessError::Usage(
                        "shift needs a non-zero direction and a finite magnitude".into(),
                    ));
                }
                Ok(())
            }
            Corruption::DuplicateInlierScaled { factor } => {
                if !factor.is_finite() {
                    return Err(HarnessError::Usage("factor must be finite".into()));
                }
                if self.count == n && n > 0 {
                    return Err(HarnessError::Usage("no clean row left to duplicate".into()));
                }
                Ok(())
            }
        }
    }
}

/// Returns the corrupted data and the sorted indices of the replaced rows.
pub fn contaminate(data: &Data, spec: &ContaminationSpec, seed: u64) -> Result<(Data, Vec<usize>)> {
    let (n, d) = (data.n(), data.d());
    spec.validate(n, d)?;
    let mut out = data.clone();
    if spec.count == 0 {
        return Ok((out, Vec::new()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = sample(&mut rng, n, spec.count).into_vec();
    idx.sort_unstable();
    match &spec.corruption {
        Corruption::PointMass { location } => {
            for &i in &idx {
                out.row_mut(i).copy_from_slice(location);
            }
        }
        Corruption::AdversarialShift {
            direction,
            magnitude,
        } => {
            let norm = robust_mean::linalg::norm(direction);
            for &i in &idx {
                for (x, &u) in out.row_mut(i).iter_mut().zip(direction) {
                    *x += magnitude * u / norm;
                }
            }
        }
        Corruption::DuplicateInlierScaled { factor } => {
            // The source is the r-th clean row in index order.
            let r = rng.random_range(0..n - idx.len());
            let src = (0..n)
                .filter(|i| idx.binary_search(i).is_err())
                .nth(r)
                .expect("a clean row exists");
            let row: Vec<f64> = data.row(src).iter().map(|x| factor * x).collect();
            for &i in &idx {
                out.row_mut(i).copy_from_slice(&row);
            }
        }
    }
    Ok((out, idx))
}
