//! Top eigenpairs of PSD operators: seeded power iteration and a dense
//! cyclic Jacobi solver used for exact spectral bounds in low dimension.

use rand::Rng;

use crate::linalg::{dot, normalize};
use crate::rng::rng_from;
use crate::scalar::Scalar;
use crate::sdp::forms::Factor;

pub trait SymmetricOperator<T> {
    fn dim(&self) -> usize;
    /// `out = A x`
    fn apply(&self, x: &[T], out: &mut [T]);
}

/// Row-major dense symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSymmetric<T> {
    pub n: usize,
    pub data: Vec<T>,
}

impl<T: Scalar> SymmetricOperator<T> for DenseSymmetric<T> {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[T], out: &mut [T]) {
        for (o, row) in out.iter_mut().zip(self.data.chunks_exact(self.n)) {
            *o = dot(row, x);
        }
    }
}

/// `sum_f w_f v_f v_f^T`, applied in `O(F d)`.
#[derive(Debug, Clone, Copy)]
pub struct FactorSum<'a, T> {
    pub dim: usize,
    pub factors: &'a [Factor<T>],
}

impl<T: Scalar> SymmetricOperator<T> for FactorSum<'_, T> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[T], out: &mut [T]) {
        out.iter_mut().for_each(|o| *o = T::zero());
        for f in self.factors {
            let s = f.weight * dot(&f.direction, x);
            out.iter_mut()
                .zip(&f.direction)
                .for_each(|(o, &v)| *o += s * v);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopEigen<T> {
    pub vector: Vec<T>,
    /// Rayleigh quotient of `vector`.
    pub value: T,
    pub iterations: usize,
    /// Set when the operator annihilated the start vector; `vector` is then arbitrary.
    pub zero_operator: bool,
}

pub(crate) fn random_unit<T: Scalar>(d: usize, seed: u64) -> Vec<T> {
    let mut rng = rng_from(seed);
    loop {
        let mut v: Vec<T> = (0..d)
            .map(|_| T::lit(rng.random_range(-1.0..1.0)))
            .collect();
        if normalize(&mut v) > T::zero() {
            return v;
        }
    }
}

/// Power iteration from a seeded random start.
pub fn top_eigenvector<T: Scalar, A: SymmetricOperator<T> + ?Sized>(
    op: &A,
    iters: usize,
    seed: u64,
) -> TopEigen<T> {
    let start = random_unit(op.dim(), seed);
    power_iteration(op, start, iters, T::lit(1e-13))
}

/// Power iteration from `start`, stopping once the Rayleigh quotient settles
/// to relative precision `tol`.
pub fn power_iteration<T: Scalar, A: SymmetricOperator<T> + ?Sized>(
    op: &A,
    mut v: Vec<T>,
    iters: usize,
    tol: T,
) -> TopEigen<T> {
    let mut w = vec![T::zero(); op.dim()];
    if normalize(&mut v) == T::zero() {
        v = random_unit(op.dim(), 0);
    }
    let mut value = T::zero();
    let mut settled = 0;
    for it in 0..iters.max(1) {
        op.apply(&v, &mut w);
        let rq = dot(&v, &w);
        if normalize(&mut w) == T::zero() {
            return TopEigen {
                vector: v,
                value: T::zero(),
                iterations: it + 1,
                zero_operator: true,
            };
        }
        std::mem::swap(&mut v, &mut w);
        let change = (rq - value).abs();
        value = rq;
        settled = if change <= tol * rq.abs() {
            settled + 1
        } else {
            0
        };
        if settled >= 3 {
            return TopEigen {
                vector: v,
                value,
                iterations: it + 1,
                zero_operator: false,
            };
        }
    }
    op.apply(&v, &mut w);
    value = dot(&v, &w);
    TopEigen {
        vector: v,
        value,
        iterations: iters,
        zero_operator: false,
    }
}

/// Eigenvalues and eigenvectors (columns of the returned row-major matrix)
/// of a dense symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigen<T: Scalar>(a: &DenseSymmetric<T>) -> (Vec<T>, Vec<T>) {
    let n = a.n;
    let mut m = a.data.clone();
    let mut v = vec![T::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = T::one();
    }
    let frob = m.iter().map(|&x| x * x).sum::<T>().sqrt();
    let eps = T::epsilon() * frob;
    for _sweep in 0..100 {
        let mut off = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                off += m[p * n + q] * m[p * n + q];
            }
        }
        if off.sqrt() <= eps {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq.abs() <= T::min_positive_value() {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k * n + p], m[k * n + q]);
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p * n + k], m[q * n + k]);
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| m[i * n + i]).collect(), v)
}

/// Largest eigenvalue with a unit eigenvector, via [`jacobi_eigen`].
pub fn dense_top_eigen<T: Scalar>(a: &DenseSymmetric<T>) -> (T, Vec<T>) {
    let n = a.n;
    let (vals, vecs) = jacobi_eigen(a);
    let (imax, &lmax) = vals
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.partial_cmp(y.1).unwrap_or(std::cmp::Ordering::Equal))
        .expect("non-empty matrix");
    let mut v: Vec<T> = (0..n).map(|k| vecs[k * n + imax]).collect();
    normalize(&mut v);
    (lmax, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_one_recovers_axis() {
        let factors = [Factor {
            weight: 1.0f64,
            direction: vec![1.0, 0.0, 0.0],
        }];
        let top = top_eigenvector(
            &FactorSum {
                dim: 3,
                factors: &factors,
            },
            100,
            3,
        );
        assert!((top.vector[0].abs() - 1.0).abs() < 1e-12);
        assert!((top.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_accepts_any_unit_vector() {
        let eye = DenseSymmetric {
            n: 4,
            data: (0..16)
                .map(|i| if i % 5 == 0 { 1.0f64 } else { 0.0 })
                .collect(),
        };
        let top = top_eigenvector(&eye, 100, 9);
        assert!((dot(&top.vector, &top.vector) - 1.0).abs() < 1e-12);
        assert!((top.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_operator_is_flagged() {
        let zero = DenseSymmetric {
            n: 3,
            data: vec![0.0f64; 9],
        };
        let top = top_eigenvector(&zero, 100, 1);
        assert!(top.zero_operator);
        assert!((dot(&top.vector, &top.vector) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn jacobi_diagonalizes() {
        let a = DenseSymmetric {
            n: 3,
            data: vec![4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 1.0],
        };
        let (vals, vecs) = jacobi_eigen(&a);
        for j in 0..3 {
            let v: Vec<f64> = (0..3).map(|k| vecs[k * 3 + j]).collect();
            let mut av = vec![0.0; 3];
            a.apply(&v, &mut av);
            for k in 0..3 {
                assert!((av[k] - vals[j] * v[k]).abs() < 1e-12);
            }
        }
        let trace: f64 = vals.iter().sum();
        assert!((trace - 8.0).abs() < 1e-12);
    }
}
