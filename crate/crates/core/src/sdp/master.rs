//! Restricted master problem of the fully-corrective solver over a set of
//! rank-one atoms `v_f`:
//!
//! ```text
//! minimize t  subject to  sum_k P[f][k] w_k <= t  for every atom f,
//!                         sum_k w_k = 1,  0 <= w_k <= cap,
//! ```
//! with `P[f][k] = (a_k . v_f)^2`. The optimal row multipliers give the atom
//! mixture. Appending an atom row keeps the basis dual feasible, so the bounded
//! dual simplex below restarts from the previous optimum.

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Basic,
    Lower,
    Upper,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum LpError {
    Singular,
    Infeasible,
    IterationLimit,
}

const REFACTOR_EVERY: usize = 40;

#[derive(Debug, Clone)]
pub(crate) struct MasterLp<T> {
    k: usize,
    cap: T,
    /// Payoff column `P[f][..]` of each atom.
    cols: Vec<Vec<T>>,
    basis: Vec<usize>,
    status: Vec<Status>,
    binv: Vec<T>,
    x: Vec<T>,
    /// `cap * sum` of each row's entries over the weights at their upper bound.
    upper_sum: Vec<T>,
    since_refactor: usize,
    pub(crate) pivots: usize,
}

impl<T: Scalar> MasterLp<T> {
    /// Optimal master for a single atom: the `m` smallest payoffs get weight `cap`.
    pub(crate) fn new(col: Vec<T>, m: usize) -> Result<Self, LpError> {
        let k = col.len();
        let cap = T::one() / T::of_usize(m);
        let order = crate::stats::smallest_indices_ordered(&col, m);
        let pivot = order[m - 1];
        let mut status = vec![Status::Lower; k + 2];
        let mut x = vec![T::zero(); k + 2];
        for &i in &order[..m - 1] {
            status[i] = Status::Upper;
            x[i] = cap;
        }
        status[pivot] = Status::Basic;
        status[k] = Status::Basic;
        let mut lp = Self {
            k,
            cap,
            cols: vec![col],
            basis: vec![pivot, k],
            status,
            binv: Vec::new(),
            x,
            upper_sum: Vec::new(),
            since_refactor: 0,
            pivots: 0,
        };
        lp.refactor()?;
        lp.recompute_upper_sum();
        lp.recompute_x();
        Ok(lp)
    }

    pub(crate) fn column(&self, f: usize) -> &[T] {
        &self.cols[f]
    }

    pub(crate) fn atoms(&self) -> usize {
        self.cols.len()
    }

    fn rows(&self) -> usize {
        self.cols.len() + 1
    }

    fn t_var(&self) -> usize {
        self.k
    }

    fn entry(&self, j: usize, row: usize) -> T {
        if j < self.k {
            if row == 0 {
                T::one()
            } else {
                self.cols[row - 1][j]
            }
        } else if j == self.k {
            if row == 0 {
                T::zero()
            } else {
                -T::one()
            }
        } else if row == j - self.k {
            T::one()
        } else {
            T::zero()
        }
    }

    fn bounds(&self, j: usize) -> (T, T) {
        if j < self.k {
            (T::zero(), self.cap)
        } else if j == self.k {
            (T::neg_infinity(), T::infinity())
        } else {
            (T::zero(), T::infinity())
        }
    }

    fn refactor(&mut self) -> Result<(), LpError> {
        let r = self.rows();
        let mut a = vec![T::zero(); r * r];
        for (c, &j) in self.basis.iter().enumerate() {
            for row in 0..r {
                a[row * r + c] = self.entry(j, row);
            }
        }
        self.binv = invert(a, r).ok_or(LpError::Singular)?;
        self.since_refactor = 0;
        Ok(())
    }

    fn recompute_upper_sum(&mut self) {
        let mut sum = vec![T::zero(); self.rows()];
        for j in (0..self.k).filter(|&j| self.status[j] == Status::Upper) {
            sum[0] += self.cap;
            for (f, col) in self.cols.iter().enumerate() {
                sum[f + 1] += self.cap * col[j];
            }
        }
        self.upper_sum = sum;
    }

    fn set_status(&mut self, j: usize, st: Status) {
        if j < self.k && (self.status[j] == Status::Upper) != (st == Status::Upper) {
            let sign = if st == Status::Upper {
                self.cap
            } else {
                -self.cap
            };
            self.upper_sum[0] += sign;
            for (f, col) in self.cols.iter().enumerate() {
                self.upper_sum[f + 1] += sign * col[j];
            }
        }
        self.status[j] = st;
    }

    fn recompute_x(&mut self) {
        let r = self.rows();
        let mut rhs: Vec<T> = self.upper_sum.iter().map(|&u| -u).collect();
        rhs[0] += T::one();
        for i in 0..r {
            let row = &self.binv[i * r..(i + 1) * r];
            self.x[self.basis[i]] = row.iter().zip(&rhs).map(|(&b, &v)| b * v).sum();
        }
    }

    /// Adds an atom row with its slack basic, then restores primal feasibility.
    pub(crate) fn add_atom(&mut self, col: Vec<T>) -> Result<(), LpError> {
        let r = self.rows();
        let coef: Vec<T> = self
            .basis
            .iter()
            .map(|&j| {
                if j < self.k {
                    col[j]
                } else if j == self.k {
                    -T::one()
                } else {
                    T::zero()
                }
            })
            .collect();
        let mut binv = vec![T::zero(); (r + 1) * (r + 1)];
        for i in 0..r {
            binv[i * (r + 1)..i * (r + 1) + r].copy_from_slice(&self.binv[i * r..(i + 1) * r]);
        }
        for c in 0..r {
            let s: T = (0..r).map(|i| coef[i] * self.binv[i * r + c]).sum();
            binv[r * (r + 1) + c] = -s;
        }
        binv[r * (r + 1) + r] = T::one();
        self.binv = binv;
        let up: T = (0..self.k)
            .filter(|&j| self.status[j] == Status::Upper)
            .map(|j| col[j])
            .sum();
        self.upper_sum.push(self.cap * up);
        self.cols.push(col);
        self.basis.push(self.k + self.cols.len());
        self.status.push(Status::Basic);
        self.x.push(T::zero());
        self.recompute_x();
        self.solve()
    }

    fn tolerance(&self, j: usize) -> T {
        if j < self.k {
            self.cap * T::lit(1e-9)
        } else {
            T::lit(1e-10)
                * self.x[self.t_var()]
                    .abs()
                    .max(T::min_positive_value().sqrt())
        }
    }

    fn solve(&mut self) -> Result<(), LpError> {
        let max_iter = 50 * (self.rows() + 10) + self.k;
        let t_var = self.t_var();
        let mut alpha = vec![T::zero(); self.k];
        let mut dual = vec![T::zero(); self.k];
        for _ in 0..max_iter {
            let r = self.rows();
            // Leaving variable: largest violation relative to its tolerance.
            let mut leave = None;
            let mut worst = T::one();
            for (i, &j) in self.basis.iter().enumerate() {
                let (lo, up) = self.bounds(j);
                let tol = self.tolerance(j);
                let xj = self.x[j];
                let (viol, dir) = if xj < lo {
                    ((lo - xj) / tol, T::one())
                } else if xj > up {
                    ((xj - up) / tol, -T::one())
                } else {
                    continue;
                };
                if viol > worst {
                    worst = viol;
                    leave = Some((i, dir));
                }
            }
            let Some((row, dir)) = leave else {
                return Ok(());
            };
            let pos_t = self
                .basis
                .iter()
                .position(|&j| j == t_var)
                .expect("t stays basic");
            let beta = &self.binv[row * r..(row + 1) * r];
            let pi = &self.binv[pos_t * r..(pos_t + 1) * r];

            alpha.iter_mut().for_each(|a| *a = beta[0]);
            dual.iter_mut().for_each(|d| *d = -pi[0]);
            for (f, col) in self.cols.iter().enumerate() {
                let (b, p) = (beta[f + 1], pi[f + 1]);
                for ((a, d), &c) in alpha.iter_mut().zip(dual.iter_mut()).zip(col) {
                    *a += b * c;
                    *d -= p * c;
                }
            }
            let amax = alpha.iter().fold(T::zero(), |m, a| m.max(a.abs()));
            let piv_tol = T::lit(1e-11) * amax.max(T::one());

            // Bound-flipping ratio test: walk the breakpoints in ratio order,
            // flipping boxed weights while the leaving row stays infeasible.
            let mut cands: Vec<(usize, T, T)> = Vec::new();
            let mut push = |j: usize, a: T, d: T, st: Status| {
                let ok = match st {
                    Status::Lower => dir * a < -piv_tol,
                    Status::Upper => dir * a > piv_tol,
                    Status::Basic => false,
                };
                if ok {
                    cands.push((j, d.abs() / a.abs(), a.abs()));
                }
            };
            for j in 0..self.k {
                push(j, alpha[j], dual[j], self.status[j]);
            }
            for f in 0..self.cols.len() {
                let j = self.k + 1 + f;
                push(j, beta[f + 1], -pi[f + 1], self.status[j]);
            }
            if cands.is_empty() {
                return Err(LpError::Infeasible);
            }
            cands.sort_by(|a, b| {
                a.1.partial_cmp(&b.1)
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(a.0.cmp(&b.0))
            });
            let mut slope = worst * self.tolerance(self.basis[row]);
            let mut enter = None;
            let mut flips = Vec::new();
            for (idx, &(j, ratio, a)) in cands.iter().enumerate() {
                let range = if j < self.k { self.cap } else { T::infinity() };
                let after = slope - a * range;
                if after > T::zero() && idx + 1 < cands.len() {
                    flips.push(j);
                    slope = after;
                    continue;
                }
                // Among near-ties at the stopping breakpoint prefer the largest pivot.
                let slack = T::lit(1e-12) * ratio.max(T::min_positive_value());
                let mut pick = (j, a);
                for &(j2, r2, a2) in &cands[idx + 1..] {
                    if r2 > ratio + slack {
                        break;
                    }
                    if a2 > pick.1 {
                        pick = (j2, a2);
                    }
                }
                enter = Some(pick.0);
                break;
            }
            let enter = enter.expect("non-empty candidate list");
            for j in flips {
                if j == enter {
                    continue;
                }
                let st = if self.status[j] == Status::Lower {
                    Status::Upper
                } else {
                    Status::Lower
                };
                self.x[j] = if st == Status::Upper {
                    self.cap
                } else {
                    T::zero()
                };
                self.set_status(j, st);
            }
            self.pivot(
                row,
                enter,
                if dir > T::zero() {
                    Status::Lower
                } else {
                    Status::Upper
                },
            )?;
        }
        Err(LpError::IterationLimit)
    }

    fn pivot(&mut self, row: usize, enter: usize, leave_to: Status) -> Result<(), LpError> {
        let r = self.rows();
        let col: Vec<T> = (0..r)
            .map(|i| {
                let bi = &self.binv[i * r..(i + 1) * r];
                if enter < self.k {
                    bi[0]
                        + self
                            .cols
                            .iter()
                            .enumerate()
                            .map(|(f, c)| bi[f + 1] * c[enter])
                            .sum::<T>()
                } else {
                    bi[enter - self.k]
                }
            })
            .collect();
        let piv = col[row];
        if piv == T::zero() {
            return Err(LpError::Singular);
        }
        for c in 0..r {
            self.binv[row * r + c] /= piv;
        }
        for (i, &f) in col.iter().enumerate().take(r) {
            if i != row && f != T::zero() {
                for c in 0..r {
                    let v = self.binv[row * r + c];
                    self.binv[i * r + c] -= f * v;
                }
            }
        }
        let leaving = self.basis[row];
        let (lo, up) = self.bounds(leaving);
        self.set_status(leaving, leave_to);
        self.x[leaving] = if leave_to == Status::Lower { lo } else { up };
        self.basis[row] = enter;
        self.set_status(enter, Status::Basic);
        self.pivots += 1;
        self.since_refactor += 1;
        if self.since_refactor >= REFACTOR_EVERY {
            self.refactor()?;
            self.recompute_upper_sum();
        }
        self.recompute_x();
        Ok(())
    }

    /// Deletes every atom row whose slack is basic. Such rows carry a zero
    /// multiplier, so the basis stays optimal. Returns the indices kept.
    pub(crate) fn drop_slack_atoms(&mut self) -> Vec<usize> {
        let (k, r) = (self.k, self.rows());
        let slack_basic = |f: usize| self.status[k + 1 + f] == Status::Basic;
        let kept: Vec<usize> = (0..self.cols.len()).filter(|&f| !slack_basic(f)).collect();
        if kept.len() == self.cols.len() {
            return kept;
        }
        let row_keep: Vec<usize> = std::iter::once(0)
            .chain(kept.iter().map(|&f| f + 1))
            .collect();
        let pos_keep: Vec<usize> = (0..r)
            .filter(|&i| {
                let j = self.basis[i];
                j <= k || !slack_basic(j - k - 1)
            })
            .collect();
        debug_assert_eq!(pos_keep.len(), row_keep.len());
        let n = row_keep.len();
        let mut binv = Vec::with_capacity(n * n);
        for &i in &pos_keep {
            binv.extend(row_keep.iter().map(|&c| self.binv[i * r + c]));
        }
        let mut renum = vec![usize::MAX; self.cols.len()];
        for (nf, &f) in kept.iter().enumerate() {
            renum[f] = nf;
        }
        let var = |j: usize| if j <= k { j } else { k + 1 + renum[j - k - 1] };
        self.basis = pos_keep.iter().map(|&i| var(self.basis[i])).collect();
        let mut status = self.status[..=k].to_vec();
        let mut x = self.x[..=k].to_vec();
        for &f in &kept {
            status.push(self.status[k + 1 + f]);
            x.push(self.x[k + 1 + f]);
        }
        self.status = status;
        self.x = x;
        self.upper_sum = row_keep.iter().map(|&c| self.upper_sum[c]).collect();
        let mut cols = std::mem::take(&mut self.cols);
        self.cols = kept.iter().map(|&f| std::mem::take(&mut cols[f])).collect();
        self.binv = binv;
        kept
    }

    /// Optimal value `t`.
    pub(crate) fn value(&self) -> T {
        self.x[self.t_var()]
    }

    /// Block weights, clipped into `[0, cap]`.
    pub(crate) fn weights(&self) -> Vec<T> {
        self.x[..self.k]
            .iter()
            .map(|&w| w.max(T::zero()).min(self.cap))
            .collect()
    }

    /// Atom mixture: non-negative multipliers of the atom rows, summing to one.
    pub(crate) fn mixture(&self) -> Vec<T> {
        let r = self.rows();
        let pos_t = self
            .basis
            .iter()
            .position(|&j| j == self.k)
            .expect("t stays basic");
        let pi = &self.binv[pos_t * r..(pos_t + 1) * r];
        let lam: Vec<T> = pi[1..].iter().map(|&p| (-p).max(T::zero())).collect();
        let s: T = lam.iter().copied().sum();
        if s > T::zero() {
            lam.into_iter().map(|l| l / s).collect()
        } else {
            let n = T::of_usize(lam.len());
            vec![T::one() / n; lam.len()]
        }
    }
}

/// Gauss-Jordan inverse with partial pivoting of a row-major `n x n` matrix.
fn invert<T: Scalar>(mut a: Vec<T>, n: usize) -> Option<Vec<T>> {
    let mut inv = vec![T::zero(); n * n];
    for i in 0..n {
        inv[i * n + i] = T::one();
    }
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| {
            a[x * n + c]
                .abs()
                .partial_cmp(&a[y * n + c].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[p * n + c] == T::zero() {
            return None;
        }
        if p != c {
            for k in 0..n {
                a.swap(p * n + k, c * n + k);
                inv.swap(p * n + k, c * n + k);
            }
        }
        let d = a[c * n + c];
        for k in 0..n {
            a[c * n + k] /= d;
            inv[c * n + k] /= d;
        }
        for i in 0..n {
            if i != c {
                let f = a[i * n + c];
                if f != T::zero() {
                    for k in 0..n {
                        let (ack, ick) = (a[c * n + k], inv[c * n + k]);
                        a[i * n + k] -= f * ack;
                        inv[i * n + k] -= f * ick;
                    }
                }
            }
        }
    }
    Some(inv)
}
