//! Reference solvers for `max_M h(M) = min_w lambda_max(sum_k w_k a_k a_k^T)`
//! written against nalgebra, sharing no code with the crate under test.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, SymmetricEigen};

pub struct Instance {
    pub a: Vec<DVector<f64>>,
    pub m: usize,
}

impl Instance {
    pub fn new(rows: &[Vec<f64>]) -> Self {
        let k = rows.len();
        Self {
            a: rows.iter().map(|r| DVector::from_column_slice(r)).collect(),
            m: (9 * k).div_ceil(10),
        }
    }

    pub fn d(&self) -> usize {
        self.a[0].len()
    }

    pub fn cap(&self) -> f64 {
        1.0 / self.m as f64
    }

    /// Mean of the `m` smallest `a_k^T M a_k`.
    pub fn h(&self, m: &DMatrix<f64>) -> f64 {
        let mut q: Vec<f64> = self.a.iter().map(|a| a.dot(&(m * a))).collect();
        q.sort_by(f64::total_cmp);
        q[..self.m].iter().sum::<f64>() / self.m as f64
    }

    pub fn weighted(&self, w: &[f64]) -> DMatrix<f64> {
        let d = self.d();
        let mut g = DMatrix::zeros(d, d);
        for (a, &wk) in self.a.iter().zip(w) {
            g += wk * a * a.transpose();
        }
        g
    }

    pub fn lambda_max(&self, w: &[f64]) -> f64 {
        SymmetricEigen::new(self.weighted(w)).eigenvalues.max()
    }

    /// Capped weights of the `m` smallest forms under `m`: the inner minimizer.
    pub fn inner_weights(&self, m: &DMatrix<f64>) -> Vec<f64> {
        let q: Vec<f64> = self.a.iter().map(|a| a.dot(&(m * a))).collect();
        let mut idx: Vec<usize> = (0..q.len()).collect();
        idx.sort_by(|&i, &j| q[i].total_cmp(&q[j]).then(i.cmp(&j)));
        let mut w = vec![0.0; q.len()];
        for &i in &idx[..self.m] {
            w[i] = self.cap();
        }
        w
    }

    pub fn scale(&self) -> f64 {
        self.a.iter().map(|a| a.norm_squared()).fold(0.0, f64::max)
    }
}

/// Euclidean projection onto `{0 <= w <= cap, sum w = 1}`.
pub fn project_capped_simplex(y: &[f64], cap: f64) -> Vec<f64> {
    let total = |tau: f64| y.iter().map(|v| (v - tau).clamp(0.0, cap)).sum::<f64>();
    let lo0 = y.iter().copied().fold(f64::INFINITY, f64::min) - cap;
    let hi0 = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (mut lo, mut hi) = (lo0, hi0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if total(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let tau = 0.5 * (lo + hi);
    let mut w: Vec<f64> = y.iter().map(|v| (v - tau).clamp(0.0, cap)).collect();
    // A large |y| leaves tau imprecise; move the residual mass onto
    // coordinates with room so that the result is exactly feasible.
    let mut resid = 1.0 - w.iter().sum::<f64>();
    for wi in w.iter_mut() {
        if resid == 0.0 {
            break;
        }
        let next = (*wi + resid).clamp(0.0, cap);
        resid -= next - *wi;
        *wi = next;
    }
    w
}

/// Euclidean projection onto the trace-one PSD matrices.
pub fn project_spectrahedron(m: &DMatrix<f64>) -> DMatrix<f64> {
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let lam: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let n = lam.len();
    let p = project_capped_simplex(&lam, 1.0);
    let mut out = DMatrix::zeros(n, n);
    for (i, pi) in p.iter().enumerate() {
        let u = eig.eigenvectors.column(i);
        out += *pi * u * u.transpose();
    }
    out
}

/// Best `h` over a long projected supergradient ascent on the spectrahedron
/// with steps `sqrt(2) / (|G|_F sqrt(t + 1))`.
pub fn supergradient_ascent(inst: &Instance, iters: usize) -> f64 {
    let d = inst.d();
    let mut m = DMatrix::identity(d, d) / d as f64;
    let mut best = inst.h(&m);
    for t in 0..iters {
        let w = inst.inner_weights(&m);
        let g = inst.weighted(&w);
        let gn = g.norm();
        if gn == 0.0 {
            break;
        }
        let step = std::f64::consts::SQRT_2 / (gn * ((t + 1) as f64).sqrt());
        m = project_spectrahedron(&(&m + step * g));
        best = best.max(inst.h(&m));
    }
    best
}

/// Certified bracket `[lower, upper]` on the optimum.
#[derive(Debug, Clone, Copy)]
pub struct Bracket {
    pub lower: f64,
    pub upper: f64,
}

impl Bracket {
    pub fn mid(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn relative_width(&self) -> f64 {
        (self.upper - self.lower) / self.upper.abs().max(f64::MIN_POSITIVE)
    }
}

fn softmax_gradient(inst: &Instance, w: &[f64], mu: f64) -> (f64, Vec<f64>, DMatrix<f64>, f64) {
    let eig = SymmetricEigen::new(inst.weighted(w));
    let lmax = eig.eigenvalues.max();
    let ex: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|l| ((l - lmax) / mu).exp())
        .collect();
    let z: f64 = ex.iter().sum();
    let d = inst.d();
    let mut p = DMatrix::zeros(d, d);
    for (i, e) in ex.iter().enumerate() {
        let u = eig.eigenvectors.column(i);
        p += (e / z) * u * u.transpose();
    }
    let f = lmax + mu * z.ln();
    let grad = inst.a.iter().map(|a| a.dot(&(&p * a))).collect();
    (f, grad, p, lmax)
}

/// Accelerated projected gradient on the log-sum-exp smoothing of
/// `lambda_max(A(w))`, with halving smoothing levels. The smoothed gradient's
/// matrix is trace-one PSD, so its `h` is a lower bound.
pub fn smoothed_bracket(inst: &Instance, stages: usize, iters: usize) -> Bracket {
    let k = inst.a.len();
    let cap = inst.cap();
    let scale = inst.scale().max(f64::MIN_POSITIVE);
    let mut w = project_capped_simplex(&vec![1.0 / k as f64; k], cap);
    let mut bracket = Bracket {
        lower: f64::NEG_INFINITY,
        upper: f64::INFINITY,
    };
    let mut mu = 0.1 * scale;
    for _ in 0..stages {
        let mut lips = scale * scale / mu;
        let mut y = w.clone();
        let mut t = 1.0f64;
        for _ in 0..iters {
            let (fy, gy, p, lmax) = softmax_gradient(inst, &y, mu);
            bracket.upper = bracket.upper.min(lmax);
            bracket.lower = bracket.lower.max(inst.h(&p));
            // Backtracking on the quadratic upper model.
            let next = loop {
                let cand = project_capped_simplex(
                    &y.iter()
                        .zip(&gy)
                        .map(|(v, g)| v - g / lips)
                        .collect::<Vec<_>>(),
                    cap,
                );
                let (fc, ..) = softmax_gradient(inst, &cand, mu);
                let diff: Vec<f64> = cand.iter().zip(&y).map(|(c, v)| c - v).collect();
                let model = fy
                    + diff.iter().zip(&gy).map(|(a, b)| a * b).sum::<f64>()
                    + 0.5 * lips * diff.iter().map(|x| x * x).sum::<f64>();
                if fc <= model + 1e-15 * fy.abs() {
                    break cand;
                }
                lips *= 2.0;
            };
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            y = next
                .iter()
                .zip(&w)
                .map(|(n, o)| n + (t - 1.0) / t_next * (n - o))
                .collect();
            y = project_capped_simplex(&y, cap);
            w = next;
            t = t_next;
            lips *= 0.9;
        }
        let lmax = inst.lambda_max(&w);
        bracket.upper = bracket.upper.min(lmax);
        mu *= 0.5;
    }
    bracket
}
