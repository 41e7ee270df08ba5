use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// An `n x d` sample stored row-major, one observation per row.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix<T> {
    n: usize,
    d: usize,
    values: Vec<T>,
}

impl<T: Scalar> DataMatrix<T> {
    pub fn from_flat(n: usize, d: usize, values: Vec<T>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty("data rows"));
        }
        if d == 0 {
            return Err(Error::Empty("data columns"));
        }
        if values.len() != n * d {
            return Err(Error::DimensionMismatch {
                expected: n * d,
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("data"));
        }
        Ok(Self { n, d, values })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let d = rows.first().ok_or(Error::Empty("data rows"))?.len();
        let mut values = Vec::with_capacity(rows.len() * d);
        for row in rows {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Self::from_flat(rows.len(), d, values)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.values.chunks_exact(self.d)
    }

    pub fn as_flat(&self) -> &[T] {
        &self.values
    }

    /// Adds `t` to every row.
    pub fn translated(&self, t: &[T]) -> Result<Self> {
        if t.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: t.len(),
            });
        }
        let mut out = self.clone();
        for row in out.values.chunks_exact_mut(self.d) {
            row.iter_mut().zip(t).for_each(|(x, &s)| *x += s);
        }
        Ok(out)
    }
}
