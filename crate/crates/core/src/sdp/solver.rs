//! Approximate maximization of the inner-minimum objective over trace-one PSD
//! matrices, certified by a weak-duality upper bound.
//!
//! Any weight vector `w` in the capped simplex gives the bound
//! `OPT <= lambda_max(sum_k w_k a_k a_k^T)`, and any trace-one `M` gives
//! `h(M) <= OPT`. The default solver is a fully-corrective Frank-Wolfe method:
//! every linear-maximization step adds the top eigenvector of the current
//! weighted second moment as an atom, and the mixture over all atoms is
//! re-optimized exactly by the master LP, whose optimal weights are the
//! certificate.

use crate::error::Result;
use crate::linalg::{dot, normalize};
use crate::scalar::Scalar;
use crate::sdp::eigen::{
    dense_top_eigen, power_iteration, top_eigenvector, DenseSymmetric, SymmetricOperator,
};
use crate::sdp::forms::{
    add_outer, capped_weights, h_from_forms, CenteredForms, DualSolution, Factor,
};
use crate::sdp::master::MasterLp;

/// Dimension up to which spectral bounds come from a full Jacobi decomposition.
const DENSE_EIGEN_MAX_DIM: usize = 64;
const POWER_ITERS: usize = 2000;
const MULTI_CUTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StepRule {
    /// Re-optimize the weights of all atoms after each new atom.
    #[default]
    FullyCorrective,
    /// Classic Frank-Wolfe with step `2 / (t + 2)`.
    OpenLoop,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxHOptions<T> {
    pub iters: usize,
    /// Relative duality gap at which the solver stops.
    pub tol: T,
    pub seed: u64,
    pub step_rule: StepRule,
}

impl<T: Scalar> Default for MaxHOptions<T> {
    fn default() -> Self {
        Self {
            iters: 400,
            tol: T::lit(1e-5),
            seed: 0,
            step_rule: StepRule::FullyCorrective,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxHResult<T> {
    pub solution: DualSolution<T>,
    /// `lambda_max(sum_k w_k a_k a_k^T)` for the certificate weights; at least OPT.
    pub upper_bound: T,
    pub certificate_weights: Vec<T>,
    pub iterations: usize,
    /// Whether the relative gap reached the requested tolerance.
    pub converged: bool,
}

impl<T: Scalar> MaxHResult<T> {
    pub fn gap(&self) -> T {
        (self.upper_bound - self.solution.objective_h).max(T::zero())
    }

    pub fn relative_gap(&self) -> T {
        if self.upper_bound > T::zero() {
            self.gap() / self.upper_bound
        } else {
            T::zero()
        }
    }
}

/// [`max_h_with`] with default options apart from the iteration budget and tolerance.
pub fn max_h<T: Scalar>(forms: &CenteredForms<T>, iters: usize, tol: T) -> Result<MaxHResult<T>> {
    max_h_with(
        forms,
        &MaxHOptions {
            iters,
            tol,
            ..MaxHOptions::default()
        },
    )
}

pub fn max_h_with<T: Scalar>(
    forms: &CenteredForms<T>,
    opts: &MaxHOptions<T>,
) -> Result<MaxHResult<T>> {
    let d = forms.d();
    let m = forms.m();
    let norms: Vec<T> = forms.iter().map(|a| dot(a, a)).collect();
    let w0 = capped_weights(&norms, m);
    let g0 = DenseSymmetric {
        n: d,
        data: forms.second_moment(&w0),
    };
    let first = top_eigenvector(&g0, POWER_ITERS, opts.seed);
    if first.zero_operator {
        // At least m forms vanish, so every matrix has objective zero.
        let solution = DualSolution::from_factors(
            forms,
            vec![Factor {
                weight: T::one(),
                direction: first.vector,
            }],
        )?;
        return Ok(MaxHResult {
            solution,
            upper_bound: T::zero(),
            certificate_weights: w0,
            iterations: 0,
            converged: true,
        });
    }
    match opts.step_rule {
        StepRule::FullyCorrective => fully_corrective(forms, opts, first.vector, w0),
        StepRule::OpenLoop => open_loop(forms, opts, first.vector, w0),
    }
}

/// Upper bound on the top eigenvalue and an (approximate) top eigenvector.
fn spectral<T: Scalar>(g: &DenseSymmetric<T>, warm: &[T]) -> (T, Vec<T>) {
    let top = power_iteration(g, warm.to_vec(), POWER_ITERS, T::lit(1e-12));
    if g.n <= DENSE_EIGEN_MAX_DIM {
        let (lmax, v) = dense_top_eigen(g);
        let vector = if top.value < lmax * (T::one() - T::lit(1e-10)) {
            v
        } else {
            top.vector
        };
        return (lmax.max(top.value), vector);
    }
    let mut gv = vec![T::zero(); g.n];
    g.apply(&top.vector, &mut gv);
    let resid = gv
        .iter()
        .zip(&top.vector)
        .map(|(&a, &b)| (a - top.value * b).powi(2))
        .sum::<T>()
        .sqrt();
    (top.value + resid, top.vector)
}

struct Best<T> {
    lower: T,
    factors: Vec<Factor<T>>,
    upper: T,
    weights: Vec<T>,
}

impl<T: Scalar> Best<T> {
    fn new(weights: Vec<T>) -> Self {
        Self {
            lower: T::neg_infinity(),
            factors: Vec::new(),
            upper: T::infinity(),
            weights,
        }
    }

    fn offer_lower(&mut self, h: T, factors: impl FnOnce() -> Vec<Factor<T>>) {
        if h > self.lower {
            self.lower = h;
            self.factors = factors();
        }
    }

    fn offer_upper(&mut self, ub: T, w: &[T]) {
        if ub < self.upper {
            self.upper = ub;
            self.weights = w.to_vec();
        }
    }

    fn done(&self, tol: T) -> bool {
        self.upper <= T::zero() || self.upper - self.lower <= tol * self.upper
    }

    fn finish(self, forms: &CenteredForms<T>, iterations: usize, tol: T) -> Result<MaxHResult<T>> {
        let solution = DualSolution::from_factors(forms, self.factors)?;
        let converged =
            self.upper <= T::zero() || self.upper - solution.objective_h <= tol * self.upper;
        Ok(MaxHResult {
            solution,
            upper_bound: self.upper,
            certificate_weights: self.weights,
            iterations,
            converged,
        })
    }
}

fn fully_corrective<T: Scalar>(
    forms: &CenteredForms<T>,
    opts: &MaxHOptions<T>,
    v0: Vec<T>,
    w0: Vec<T>,
) -> Result<MaxHResult<T>> {
    let (d, k, m) = (forms.d(), forms.k(), forms.m());
    let max_atoms = 4 * d + 80;
    let mut atoms = vec![v0];
    let Ok(mut lp) = MasterLp::new(forms.projections_sq(&atoms[0]), m) else {
        return open_loop(forms, opts, atoms.swap_remove(0), w0);
    };
    let mut best = Best::new(w0);
    let mut g = vec![T::zero(); d * d];
    let mut w_prev = vec![T::zero(); k];
    let mut warm = atoms[0].clone();
    let mut iterations = 0;
    for it in 0..opts.iters.max(1) {
        iterations = it + 1;
        let lam = lp.mixture();
        let mut q = vec![T::zero(); k];
        for (f, &l) in lam.iter().enumerate() {
            if l > T::zero() {
                q.iter_mut()
                    .zip(lp.column(f))
                    .for_each(|(qk, &p)| *qk += l * p);
            }
        }
        best.offer_lower(h_from_forms(&q, m), || {
            lam.iter()
                .zip(&atoms)
                .filter(|(l, _)| **l > T::zero())
                .map(|(&weight, v)| Factor {
                    weight,
                    direction: v.clone(),
                })
                .collect()
        });

        let w = lp.weights();
        if it % 25 == 0 {
            g = forms.second_moment(&w);
        } else {
            for (kk, (&wn, &wo)) in w.iter().zip(&w_prev).enumerate() {
                if wn != wo {
                    add_outer(&mut g, wn - wo, forms.vector(kk));
                }
            }
        }
        w_prev.clone_from(&w);
        let gm = DenseSymmetric {
            n: d,
            data: g.clone(),
        };
        let (ub, v) = spectral(&gm, &warm);
        best.offer_upper(ub, &w);
        if best.done(opts.tol) {
            break;
        }
        let cuts = violated_directions(&gm, v, lp.value());
        if cuts.is_empty() {
            break;
        }
        warm.clone_from(&cuts[0]);
        let mut added = Ok(());
        for c in cuts {
            atoms.push(c);
            added = lp.add_atom(forms.projections_sq(atoms.last().expect("just pushed")));
            if added.is_err() {
                break;
            }
        }
        if added.is_err() {
            // Drop the atom the master choked on and start the master afresh.
            atoms.pop();
            match rebuild(forms, &atoms, m) {
                Some(fresh) => lp = fresh,
                None => break,
            }
        } else if lp.atoms() > max_atoms {
            let kept = lp.drop_slack_atoms();
            atoms = kept
                .into_iter()
                .map(|f| std::mem::take(&mut atoms[f]))
                .collect();
        }
    }
    best.finish(forms, iterations, opts.tol)
}

/// Eigenvectors of `g` whose Rayleigh quotient exceeds the master value,
/// leading with `top`.
fn violated_directions<T: Scalar>(g: &DenseSymmetric<T>, top: Vec<T>, value: T) -> Vec<Vec<T>> {
    let thresh = value * (T::one() + T::lit(1e-12));
    let mut gv = vec![T::zero(); g.n];
    g.apply(&top, &mut gv);
    if dot(&top, &gv) <= thresh {
        return Vec::new();
    }
    let mut out = vec![top];
    if g.n <= DENSE_EIGEN_MAX_DIM && MULTI_CUTS > 1 {
        let (vals, vecs) = crate::sdp::eigen::jacobi_eigen(g);
        let mut order: Vec<usize> = (0..g.n).collect();
        order.sort_by(|&a, &b| {
            vals[b]
                .partial_cmp(&vals[a])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        for &i in order.iter().skip(1).take(MULTI_CUTS - 1) {
            if vals[i] <= thresh {
                break;
            }
            out.push((0..g.n).map(|r| vecs[r * g.n + i]).collect());
        }
    }
    out
}

fn rebuild<T: Scalar>(forms: &CenteredForms<T>, atoms: &[Vec<T>], m: usize) -> Option<MasterLp<T>> {
    let mut lp = MasterLp::new(forms.projections_sq(&atoms[0]), m).ok()?;
    for v in &atoms[1..] {
        lp.add_atom(forms.projections_sq(v)).ok()?;
    }
    Some(lp)
}

fn open_loop<T: Scalar>(
    forms: &CenteredForms<T>,
    opts: &MaxHOptions<T>,
    v0: Vec<T>,
    w0: Vec<T>,
) -> Result<MaxHResult<T>> {
    let (d, m) = (forms.d(), forms.m());
    let mut factors = vec![Factor {
        weight: T::one(),
        direction: v0,
    }];
    let mut q = forms.projections_sq(&factors[0].direction);
    let mut best = Best::new(w0);
    let mut warm = factors[0].direction.clone();
    let mut iterations = 0;
    for t in 0..opts.iters.max(1) {
        iterations = t + 1;
        best.offer_lower(h_from_forms(&q, m), || factors.clone());
        let w = capped_weights(&q, m);
        let g = DenseSymmetric {
            n: d,
            data: forms.second_moment(&w),
        };
        let (ub, mut v) = spectral(&g, &warm);
        best.offer_upper(ub, &w);
        if best.done(opts.tol) {
            break;
        }
        normalize(&mut v);
        let gamma = T::lit(2.0) / T::of_usize(t + 2);
        let p = forms.projections_sq(&v);
        q.iter_mut()
            .zip(&p)
            .for_each(|(qk, &pk)| *qk = (T::one() - gamma) * *qk + gamma * pk);
        factors
            .iter_mut()
            .for_each(|f| f.weight *= T::one() - gamma);
        warm.clone_from(&v);
        factors.push(Factor {
            weight: gamma,
            direction: v,
        });
    }
    best.finish(forms, iterations, opts.tol)
}
