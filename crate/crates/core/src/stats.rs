//! Order statistics on scalar slices.

use std::cmp::Ordering;

use num_rational::Ratio;

use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

fn cmp<T: Scalar>(a: &T, b: &T) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}

fn check_finite<T: Scalar>(values: &[T]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::Empty("values"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("values"));
    }
    Ok(())
}

/// Median; the mean of the two central order statistics for even lengths.
pub fn median_scalar<T: Scalar>(values: &[T]) -> Result<T> {
    check_finite(values)?;
    let mut buf = values.to_vec();
    Ok(median_in_place(&mut buf))
}

/// Median of a non-empty finite buffer, reordering it.
pub(crate) fn median_in_place<T: Scalar>(buf: &mut [T]) -> T {
    let n = buf.len();
    let mid = n / 2;
    let (lower, &mut upper, _) = buf.select_nth_unstable_by(mid, cmp);
    if n % 2 == 1 {
        upper
    } else {
        let below = lower.iter().copied().fold(T::neg_infinity(), T::max);
        (below + upper) / T::lit(2.0)
    }
}

/// The `ceil(frac * m)`-th smallest value (1-indexed).
pub fn quantile_upper<T: Scalar>(values: &[T], frac: Ratio<u64>) -> Result<T> {
    check_finite(values)?;
    let rank = upper_rank(values.len(), frac)?;
    let mut buf = values.to_vec();
    Ok(kth_smallest(&mut buf, rank - 1))
}

pub(crate) fn upper_rank(m: usize, frac: Ratio<u64>) -> Result<usize> {
    let (num, den) = (*frac.numer(), *frac.denom());
    if den == 0 || num == 0 || num > den {
        return Err(invalid(format!(
            "quantile fraction {num}/{den} outside (0, 1]"
        )));
    }
    Ok(((num as u128 * m as u128).div_ceil(den as u128)) as usize)
}

/// Zero-indexed order statistic, reordering the buffer.
pub(crate) fn kth_smallest<T: Scalar>(buf: &mut [T], k: usize) -> T {
    *buf.select_nth_unstable_by(k, cmp).1
}

/// Indices of the `m` smallest values, ties broken by ascending index.
pub(crate) fn smallest_indices<T: Scalar>(values: &[T], m: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    if m < idx.len() {
        idx.select_nth_unstable_by(m, |&a, &b| cmp(&values[a], &values[b]).then(a.cmp(&b)));
        idx.truncate(m);
    }
    idx.sort_unstable();
    idx
}

/// Indices of the `m` smallest values in ascending `(value, index)` order.
pub(crate) fn smallest_indices_ordered<T: Scalar>(values: &[T], m: usize) -> Vec<usize> {
    let mut idx = smallest_indices(values, m);
    idx.sort_by(|&a, &b| cmp(&values[a], &values[b]).then(a.cmp(&b)));
    idx
}
