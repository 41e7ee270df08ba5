//! Random equipartition into blocks, block means, and their coordinate-wise median.

use rand::seq::SliceRandom;

use crate::data::DataMatrix;
use crate::error::{invalid, Error, Result};
use crate::linalg::dist;
use crate::rng::rng_from;
use crate::scalar::Scalar;
use crate::stats::median_in_place;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPartition {
    pub assignments: Vec<Vec<usize>>,
    /// The `n mod k` indices left over after the shuffle.
    pub dropped: Vec<usize>,
}

impl BlockPartition {
    pub fn k(&self) -> usize {
        self.assignments.len()
    }

    pub fn block_size(&self) -> usize {
        self.assignments.first().map_or(0, Vec::len)
    }
}

/// Shuffles `0..n` and cuts it into `k` blocks of size `n / k`; the trailing
/// `n mod k` shuffled indices are dropped.
pub fn partition(n: usize, k: usize, seed: u64) -> Result<BlockPartition> {
    if k == 0 || k > n {
        return Err(invalid(format!("need 1 <= k <= n, got k={k} n={n}")));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng_from(seed));
    let size = n / k;
    let dropped = perm.split_off(size * k);
    let assignments = perm.chunks_exact(size).map(<[usize]>::to_vec).collect();
    Ok(BlockPartition {
        assignments,
        dropped,
    })
}

/// `k` block averages in `d` dimensions, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMeans<T> {
    means: Vec<T>,
    d: usize,
    k: usize,
    block_size: usize,
}

impl<T: Scalar> BlockMeans<T> {
    pub fn from_rows(rows: &[Vec<T>], block_size: usize) -> Result<Self> {
        let data = DataMatrix::from_rows(rows)?;
        Ok(Self {
            k: data.n(),
            d: data.d(),
            means: data.as_flat().to_vec(),
            block_size,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn mean(&self, k: usize) -> &[T] {
        &self.means[k * self.d..(k + 1) * self.d]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[T]> {
        self.means.chunks_exact(self.d)
    }

    pub fn as_flat(&self) -> &[T] {
        &self.means
    }
}

/// Average of each block's rows, summed in the block's stored order.
pub fn block_means<T: Scalar>(
    data: &DataMatrix<T>,
    part: &BlockPartition,
) -> Result<BlockMeans<T>> {
    let (n, d) = (data.n(), data.d());
    let k = part.k();
    if k == 0 {
        return Err(Error::Empty("partition"));
    }
    let size = part.block_size();
    let mut means = vec![T::zero(); k * d];
    for (block, out) in part.assignments.iter().zip(means.chunks_exact_mut(d)) {
        if block.len() != size || size == 0 {
            return Err(invalid("blocks must share a non-zero size"));
        }
        for &i in block {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, len: n });
            }
            out.iter_mut().zip(data.row(i)).for_each(|(o, &x)| *o += x);
        }
        let s = T::of_usize(size);
        out.iter_mut().for_each(|o| *o /= s);
    }
    Ok(BlockMeans {
        means,
        d,
        k,
        block_size: size,
    })
}

/// Per-coordinate median of the block means.
pub fn coordwise_median<T: Scalar>(means: &BlockMeans<T>) -> Vec<T> {
    let mut column = vec![T::zero(); means.k];
    (0..means.d)
        .map(|j| {
            column
                .iter_mut()
                .zip(means.iter())
                .for_each(|(c, m)| *c = m[j]);
            median_in_place(&mut column)
        })
        .collect()
}

/// Averages consecutive pairs of means; an unpaired last mean is dropped.
pub fn halve_means<T: Scalar>(means: &BlockMeans<T>) -> Result<BlockMeans<T>> {
    if means.k < 2 {
        return Err(invalid("halving needs at least two means"));
    }
    let k = means.k / 2;
    let two = T::lit(2.0);
    let mut out = Vec::with_capacity(k * means.d);
    for j in 0..k {
        let (a, b) = (means.mean(2 * j), means.mean(2 * j + 1));
        out.extend(a.iter().zip(b).map(|(&x, &y)| (x + y) / two));
    }
    Ok(BlockMeans {
        means: out,
        d: means.d,
        k,
        block_size: 2 * means.block_size,
    })
}

/// Median Euclidean distance from the means to `center`.
pub fn median_distance<T: Scalar>(means: &BlockMeans<T>, center: &[T]) -> Result<T> {
    if center.len() != means.d {
        return Err(Error::DimensionMismatch {
            expected: means.d,
            got: center.len(),
        });
    }
    let mut dists: Vec<T> = means.iter().map(|m| dist(m, center)).collect();
    Ok(median_in_place(&mut dists))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn means_of(rows: &[&[f64]]) -> BlockMeans<f64> {
        let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
        BlockMeans::from_rows(&rows, 1).unwrap()
    }

    #[test]
    fn partition_examples() {
        let p = partition(10, 3, 7).unwrap();
        assert_eq!(p.k(), 3);
        assert!(p.assignments.iter().all(|b| b.len() == 3));
        assert_eq!(p.dropped.len(), 1);

        let p = partition(6, 3, 1).unwrap();
        assert!(p.assignments.iter().all(|b| b.len() == 2));
        assert!(p.dropped.is_empty());

        assert!(partition(5, 6, 0).is_err());
        assert!(partition(5, 0, 0).is_err());
    }

    #[test]
    fn partition_is_seeded() {
        assert_eq!(partition(50, 7, 3).unwrap(), partition(50, 7, 3).unwrap());
        assert_ne!(partition(50, 7, 3).unwrap(), partition(50, 7, 4).unwrap());
    }

    #[test]
    fn block_means_examples() {
        let data = DataMatrix::from_rows(&vec![vec![2.5, -1.0]; 9]).unwrap();
        let bm = block_means(&data, &partition(9, 3, 0).unwrap()).unwrap();
        assert!(bm.iter().all(|m| m == [2.5, -1.0]));

        let data = DataMatrix::from_rows(&[vec![1.0], vec![2.0], vec![3.0], vec![4.0]]).unwrap();
        let whole = block_means(&data, &partition(4, 1, 5).unwrap()).unwrap();
        assert_eq!(whole.mean(0), &[2.5]);

        let part = BlockPartition {
            assignments: vec![vec![0, 1], vec![2, 3]],
            dropped: vec![],
        };
        let bm = block_means(&data, &part).unwrap();
        assert_eq!(bm.as_flat(), &[1.5, 3.5]);
        assert_eq!(bm.block_size(), 2);

        let bad = BlockPartition {
            assignments: vec![vec![0, 9]],
            dropped: vec![],
        };
        assert_eq!(
            block_means(&data, &bad),
            Err(Error::IndexOutOfRange { index: 9, len: 4 })
        );
    }

    #[test]
    fn coordwise_median_examples() {
        assert_eq!(
            coordwise_median(&means_of(&[&[0.0, 0.0], &[1.0, 5.0], &[2.0, 1.0]])),
            vec![1.0, 1.0]
        );
        assert_eq!(
            coordwise_median(&means_of(&[&[3.0, -2.0]])),
            vec![3.0, -2.0]
        );
        let sym = means_of(&[&[1.0, 1.0], &[3.0, 5.0], &[-1.0, 4.0], &[5.0, 2.0]]);
        assert_eq!(coordwise_median(&sym), vec![2.0, 3.0]);
    }

    #[test]
    fn halve_examples() {
        let h = halve_means(&means_of(&[&[1.0, 2.0], &[3.0, 6.0]])).unwrap();
        assert_eq!(h.as_flat(), &[2.0, 4.0]);
        let h = halve_means(&means_of(&[&[7.0], &[7.0], &[7.0], &[7.0]])).unwrap();
        assert_eq!(h.as_flat(), &[7.0, 7.0]);
        let h = halve_means(&means_of(&[&[1.0], &[2.0], &[3.0], &[4.0], &[5.0]])).unwrap();
        assert_eq!(h.as_flat(), &[1.5, 3.5]);
        assert_eq!(h.block_size(), 2);
        assert!(halve_means(&means_of(&[&[1.0]])).is_err());
    }

    #[test]
    fn median_distance_examples() {
        assert_eq!(
            median_distance(
                &means_of(&[&[1.0, 1.0], &[1.0, 1.0], &[1.0, 1.0]]),
                &[1.0, 1.0]
            )
            .unwrap(),
            0.0
        );
        assert_eq!(
            median_distance(&means_of(&[&[0.0], &[1.0], &[3.0]]), &[0.0]).unwrap(),
            1.0
        );
        let m = means_of(&[&[1.0, 0.0], &[0.0, 2.0], &[-4.0, 0.0], &[0.0, -8.0]]);
        assert_eq!(median_distance(&m, &[0.0, 0.0]).unwrap(), 3.0);
        assert!(median_distance(&m, &[0.0]).is_err());
    }

    proptest! {
        #[test]
        fn partition_covers_once(n in 1usize..300, k in 1usize..300, seed in any::<u64>()) {
            let k = k.min(n);
            let p = partition(n, k, seed).unwrap();
            let mut seen = vec![0u8; n];
            for &i in p.assignments.iter().flatten().chain(&p.dropped) {
                seen[i] += 1;
            }
            prop_assert!(seen.iter().all(|&c| c == 1));
            prop_assert!(p.assignments.iter().all(|b| b.len() == n / k));
            prop_assert_eq!(p.dropped.len(), n % k);
        }

        #[test]
        fn translation_equivariance(
            rows in prop::collection::vec(prop::collection::vec(-100.0f64..100.0, 3), 4..40),
            t in prop::collection::vec(-100.0f64..100.0, 3),
            seed in any::<u64>(),
        ) {
            let data = DataMatrix::from_rows(&rows).unwrap();
            let moved = data.translated(&t).unwrap();
            let part = partition(rows.len(), 4, seed).unwrap();
            let a = block_means(&data, &part).unwrap();
            let b = block_means(&moved, &part).unwrap();
            for (ma, mb) in a.iter().zip(b.iter()) {
                for j in 0..3 {
                    prop_assert!((ma[j] + t[j] - mb[j]).abs() < 1e-9);
                }
            }
            let (ca, cb) = (coordwise_median(&a), coordwise_median(&b));
            for j in 0..3 {
                prop_assert!((ca[j] + t[j] - cb[j]).abs() < 1e-9);
            }
            let (ha, hb) = (halve_means(&a).unwrap(), halve_means(&b).unwrap());
            for (ma, mb) in ha.iter().zip(hb.iter()) {
                for j in 0..3 {
                    prop_assert!((ma[j] + t[j] - mb[j]).abs() < 1e-9);
                }
            }
        }

        #[test]
        fn halving_matches_coarser_blocks(
            rows in prop::collection::vec(prop::collection::vec(-100.0f64..100.0, 2), 8..60),
            seed in any::<u64>(),
        ) {
            let data = DataMatrix::from_rows(&rows).unwrap();
            let fine = partition(rows.len(), 5, seed).unwrap();
            let halved = halve_means(&block_means(&data, &fine).unwrap()).unwrap();
            let coarse = BlockPartition {
                assignments: fine.assignments.chunks_exact(2).map(|p| [p[0].clone(), p[1].clone()].concat()).collect(),
                dropped: vec![],
            };
            let direct = block_means(&data, &coarse).unwrap();
            prop_assert_eq!(halved.k(), direct.k());
            for (a, b) in halved.iter().zip(direct.iter()) {
                for j in 0..2 {
                    prop_assert!((a[j] - b[j]).abs() < 1e-9);
                }
            }
        }
    }
}
