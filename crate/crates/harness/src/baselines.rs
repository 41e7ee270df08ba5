//! Comparison estimators: empirical mean, coordinate-wise median, geometric median.

use std::collections::BTreeMap;

use robust_mean::linalg::{dist, norm};
use robust_mean::{median_scalar, Data};

use crate::error::Result;

pub const WEISZFELD_TOL: f64 = 1e-9;
pub const WEISZFELD_MAX_ITERS: usize = 10_000;
/// Relative size of the nudge applied when an iterate lands on a data point.
pub const WEISZFELD_NUDGE: f64 = 1e-12;

pub fn empirical_mean(data: &Data) -> Vec<f64> {
    let mut mean = vec![0.0; data.d()];
    for row in data.rows() {
        mean.iter_mut().zip(row).for_each(|(m, &x)| *m += x);
    }
    let n = data.n() as f64;
    mean.iter_mut().for_each(|m| *m /= n);
    mean
}

pub fn coordinate_median(data: &Data) -> Result<Vec<f64>> {
    let mut col = vec![0.0; data.n()];
    (0..data.d())
        .map(|j| {
            col.iter_mut()
                .zip(data.rows())
                .for_each(|(c, row)| *c = row[j]);
            Ok(median_scalar(&col)?)
        })
        .collect()
}

/// One Weiszfeld update, or `None` if `y` coincides with a data point.
pub fn weiszfeld_step(data: &Data, y: &[f64]) -> Option<Vec<f64>> {
    let mut num = vec![0.0; data.d()];
    let mut den = 0.0;
    for row in data.rows() {
        let r = dist(row, y);
        if r == 0.0 {
            return None;
        }
        num.iter_mut().zip(row).for_each(|(a, &x)| *a += x / r);
        den += 1.0 / r;
    }
    Some(num.into_iter().map(|a| a / den).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometricMedian {
    pub point: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Weiszfeld iteration from the coordinate-wise median. Stops once a step
/// moves less than `WEISZFELD_TOL * max(1, |y|)`.
pub fn geometric_median(data: &Data) -> Result<GeometricMedian> {
    let mut y = coordinate_median(data)?;
    let nudge_dir = 1.0 / (data.d() as f64).sqrt();
    for it in 1..=WEISZFELD_MAX_ITERS {
        let next = match weiszfeld_step(data, &y) {
            Some(next) => next,
            None => {
                let h = WEISZFELD_NUDGE * norm(&y).max(1.0);
                y.iter_mut().for_each(|v| *v += h * nudge_dir);
                continue;
            }
        };
        let step = dist(&next, &y);
        y = next;
        if step <= WEISZFELD_TOL * norm(&y).max(1.0) {
            return Ok(GeometricMedian {
                point: y,
                iterations: it,
                converged: true,
            });
        }
    }
    Ok(GeometricMedian {
        point: y,
        iterations: WEISZFELD_MAX_ITERS,
        converged: false,
    })
}

/// All three baselines keyed by estimator name.
pub fn baselines(data: &Data) -> Result<BTreeMap<&'static str, Vec<f64>>> {
    let mut out = BTreeMap::new();
    out.insert("mean", empirical_mean(data));
    out.insert("coordinate_median", coordinate_median(data)?);
    out.insert("geometric_median", geometric_median(data)?.point);
    Ok(out)
}
