use crate::blocks::BlockMeans;
use crate::constants::LEDGER;
use crate::error::{invalid, Error, Result};
use crate::linalg::{dot, normalize};
use crate::scalar::Scalar;
use crate::stats::smallest_indices;

/// Block means re-centred at a query point, `a_k = mean_k - x_c`.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteredForms<T> {
    centered: Vec<T>,
    k: usize,
    d: usize,
    m: usize,
}

impl<T: Scalar> CenteredForms<T> {
    pub fn new(means: &BlockMeans<T>, x_c: &[T]) -> Result<Self> {
        if x_c.len() != means.d() {
            return Err(Error::DimensionMismatch {
                expected: means.d(),
                got: x_c.len(),
            });
        }
        let centered = means
            .iter()
            .flat_map(|m| m.iter().zip(x_c).map(|(&a, &b)| a - b))
            .collect();
        Self::from_flat(means.k(), means.d(), centered)
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let d = rows.first().ok_or(Error::Empty("forms"))?.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(invalid("forms must share a dimension"));
        }
        Self::from_flat(rows.len(), d, rows.concat())
    }

    pub fn from_flat(k: usize, d: usize, centered: Vec<T>) -> Result<Self> {
        if k < LEDGER.min_blocks {
            return Err(invalid(format!(
                "need at least {} blocks, got {k}",
                LEDGER.min_blocks
            )));
        }
        if d == 0 || centered.len() != k * d {
            return Err(Error::DimensionMismatch {
                expected: k * d,
                got: centered.len(),
            });
        }
        Ok(Self {
            centered,
            k,
            d,
            m: LEDGER.kept_blocks(k),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of smallest forms the inner minimum averages over.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Upper bound `1/m` on each weight of the inner minimum.
    pub fn cap(&self) -> T {
        T::one() / T::of_usize(self.m)
    }

    pub fn vector(&self, k: usize) -> &[T] {
        &self.centered[k * self.d..(k + 1) * self.d]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[T]> {
        self.centered.chunks_exact(self.d)
    }

    /// `(a_k . v)^2` for every block.
    pub fn projections_sq(&self, v: &[T]) -> Vec<T> {
        self.iter().map(|a| dot(a, v).powi(2)).collect()
    }

    /// `a_k^T M a_k` for every block.
    pub fn quadratic_forms(&self, m: &DualSolution<T>) -> Vec<T> {
        factor_forms(self, &m.factors)
    }

    /// Dense `sum_k w_k a_k a_k^T`, row-major.
    pub fn second_moment(&self, w: &[T]) -> Vec<T> {
        let mut g = vec![T::zero(); self.d * self.d];
        for (a, &wk) in self.iter().zip(w) {
            if wk != T::zero() {
                add_outer(&mut g, wk, a);
            }
        }
        g
    }

    /// Largest squared norm among the forms.
    pub fn max_norm_sq(&self) -> T {
        self.iter().map(|a| dot(a, a)).fold(T::zero(), T::max)
    }
}

pub(crate) fn add_outer<T: Scalar>(g: &mut [T], w: T, a: &[T]) {
    let d = a.len();
    for (i, &ai) in a.iter().enumerate() {
        let s = w * ai;
        if s != T::zero() {
            g[i * d..(i + 1) * d]
                .iter_mut()
                .zip(a)
                .for_each(|(gij, &aj)| *gij += s * aj);
        }
    }
}

pub(crate) fn factor_forms<T: Scalar>(forms: &CenteredForms<T>, factors: &[Factor<T>]) -> Vec<T> {
    let mut q = vec![T::zero(); forms.k()];
    for f in factors {
        for (qk, a) in q.iter_mut().zip(forms.iter()) {
            *qk += f.weight * dot(a, &f.direction).powi(2);
        }
    }
    q
}

/// One rank-one term `weight * v v^T` with `v` of unit length.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor<T> {
    pub weight: T,
    pub direction: Vec<T>,
}

/// A trace-one PSD matrix kept as a convex combination of rank-one factors.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution<T> {
    pub factors: Vec<Factor<T>>,
    pub objective_h: T,
}

impl<T: Scalar> DualSolution<T> {
    /// Normalizes weights to sum one and directions to unit length, dropping
    /// zero terms, then evaluates the objective on `forms`.
    pub fn from_factors(forms: &CenteredForms<T>, factors: Vec<Factor<T>>) -> Result<Self> {
        let factors = normalized_factors(factors, forms.d())?;
        let total = factors.iter().map(|f| f.weight).sum::<T>();
        if total <= T::zero() {
            return Err(Error::Degenerate("factor weights sum to zero".into()));
        }
        let factors: Vec<Factor<T>> = factors
            .into_iter()
            .map(|f| Factor {
                weight: f.weight / total,
                direction: f.direction,
            })
            .collect();
        let objective_h = h_from_forms(&factor_forms(forms, &factors), forms.m());
        Ok(Self {
            factors,
            objective_h,
        })
    }

    pub fn trace(&self) -> T {
        self.factors.iter().map(|f| f.weight).sum()
    }
}

/// Unit directions; weights absorb the squared norms. Zero terms are removed.
pub(crate) fn normalized_factors<T: Scalar>(
    factors: Vec<Factor<T>>,
    d: usize,
) -> Result<Vec<Factor<T>>> {
    let mut out = Vec::with_capacity(factors.len());
    for mut f in factors {
        if f.direction.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: f.direction.len(),
            });
        }
        if f.weight < T::zero() || !f.weight.is_finite() {
            return Err(invalid("factor weights must be finite and non-negative"));
        }
        let n = normalize(&mut f.direction);
        if n > T::zero() && f.weight > T::zero() {
            out.push(Factor {
                weight: f.weight * n * n,
                direction: f.direction,
            });
        }
    }
    Ok(out)
}

/// Mean of the `m` smallest values.
pub(crate) fn h_from_forms<T: Scalar>(q: &[T], m: usize) -> T {
    let mut buf = q.to_vec();
    if m < buf.len() {
        buf.select_nth_unstable_by(m, |a, b| {
            a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal)
        });
    }
    buf[..m].iter().copied().sum::<T>() / T::of_usize(m)
}

/// Average of the `m` smallest quadratic forms `a_k^T M a_k`.
pub fn h_objective<T: Scalar>(forms: &CenteredForms<T>, m: &DualSolution<T>) -> Result<T> {
    for f in &m.factors {
        if f.direction.len() != forms.d() {
            return Err(Error::DimensionMismatch {
                expected: forms.d(),
                got: f.direction.len(),
            });
        }
    }
    Ok(h_from_forms(&forms.quadratic_forms(m), forms.m()))
}

/// Weights `1/m` on the `m` smallest forms (ties to the lower block index),
/// zero elsewhere: the minimizer of the inner problem for a fixed matrix.
pub fn capped_weights<T: Scalar>(q: &[T], m: usize) -> Vec<T> {
    let mut w = vec![T::zero(); q.len()];
    let c = T::one() / T::of_usize(m);
    for i in smallest_indices(q, m) {
        w[i] = c;
    }
    w
}
