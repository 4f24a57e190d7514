//! Damped Gauss-Newton (Levenberg-Marquardt) on sparse least-squares problems.
//!
//! Damping follows Nielsen's gain-ratio update. The normal equations
//! `(J^T J + mu I) h = -J^T r` are solved by sparse Cholesky; the symbolic factorization is
//! computed once since the Jacobian pattern does not change. A failed numeric
//! factorization counts as a rejected step.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Llt, SymbolicLlt};
use faer::sparse::{SparseColMat, Triplet};
use faer::{Col, Side};
use nalgebra::{DMatrix, DVector};

use crate::solver::SolveStatus;

/// Nonzeros of one Jacobian row as `(column, value)`; the pattern must not depend on `u`.
pub(crate) type SparseRow = Vec<(usize, f64)>;

pub(crate) trait LeastSquares {
    fn dim(&self) -> usize;
    fn residual(&self, u: &DVector<f64>) -> DVector<f64>;
    fn jacobian(&self, u: &DVector<f64>) -> DMatrix<f64>;

    fn jacobian_rows(&self, u: &DVector<f64>) -> Vec<SparseRow> {
        let jac = self.jacobian(u);
        jac.row_iter().map(|row| row.iter().copied().enumerate().collect()).collect()
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct LmConfig {
    pub residual_limit: f64,
    pub step_rtol: f64,
    pub max_iterations: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct LmOutcome {
    pub u: DVector<f64>,
    pub status: SolveStatus,
    pub iterations: usize,
    pub residual_norm: f64,
}

const INITIAL_DAMPING: f64 = 1e-6;
const MAX_DAMPING: f64 = 1e300;

/// `J^T J` (lower triangle, diagonal always stored) and `J^T r`.
struct Normal {
    matrix: SparseColMat<usize, f64>,
    diagonal: Vec<usize>,
    base_diagonal: Vec<f64>,
    gradient: DVector<f64>,
}

impl Normal {
    fn assemble(dim: usize, rows: &[SparseRow], r: &DVector<f64>) -> Normal {
        let mut triplets: Vec<Triplet<usize, usize, f64>> = (0..dim).map(|i| Triplet::new(i, i, 0.0)).collect();
        let mut gradient = DVector::zeros(dim);
        for (k, row) in rows.iter().enumerate() {
            for &(a, va) in row {
                gradient[a] += va * r[k];
                for &(b, vb) in row {
                    if a >= b {
                        triplets.push(Triplet::new(a, b, va * vb));
                    }
                }
            }
        }
        let matrix = SparseColMat::try_new_from_triplets(dim, dim, &triplets).expect("indices in range");
        let sym = matrix.symbolic();
        let diagonal: Vec<usize> = (0..dim)
            .map(|j| {
                let start = sym.col_ptr()[j];
                let pos = sym.row_idx()[start..sym.col_ptr()[j + 1]].iter().position(|&i| i == j).expect("diagonal stored");
                start + pos
            })
            .collect();
        let base_diagonal = diagonal.iter().map(|&p| matrix.val()[p]).collect();
        Normal { matrix, diagonal, base_diagonal, gradient }
    }

    fn max_diagonal(&self) -> f64 {
        self.base_diagonal.iter().copied().fold(0.0, f64::max)
    }

    fn damp(&mut self, mu: f64) {
        let vals = self.matrix.val_mut();
        for (&p, &d) in self.diagonal.iter().zip(&self.base_diagonal) {
            vals[p] = d + mu;
        }
    }
}

/// Solves `(J^T J + mu I) h = -g`, or `None` if the factorization breaks down.
fn damped_step(normal: &mut Normal, symbolic: &mut Option<SymbolicLlt<usize>>, mu: f64) -> Option<DVector<f64>> {
    normal.damp(mu);
    if symbolic.is_none() {
        *symbolic = SymbolicLlt::try_new(normal.matrix.symbolic(), Side::Lower).ok();
    }
    let sym = symbolic.clone()?;
    let llt = Llt::try_new_with_symbolic(sym, normal.matrix.as_ref(), Side::Lower).ok()?;
    let rhs = Col::<f64>::from_fn(normal.gradient.len(), |i| -normal.gradient[i]);
    let h = llt.solve(&rhs);
    Some(DVector::from_fn(h.nrows(), |i, _| h[i]))
}

pub(crate) fn minimize<P: LeastSquares>(problem: &P, cfg: LmConfig) -> LmOutcome {
    let dim = problem.dim();
    let mut u = DVector::<f64>::zeros(dim);
    let mut r = problem.residual(&u);
    let mut f = r.norm();
    if !f.is_finite() {
        return LmOutcome { u, status: SolveStatus::Singular, iterations: 0, residual_norm: f };
    }
    let mut normal = Normal::assemble(dim, &problem.jacobian_rows(&u), &r);
    let mut symbolic = None;
    let max_diag = normal.max_diagonal();
    let mut mu = INITIAL_DAMPING * if max_diag > 0.0 { max_diag } else { 1.0 };
    let mut nu = 2.0;
    // reported count: accepted steps; the budget bounds all passes
    let mut accepted = 0;
    let singular = |u, accepted, f| LmOutcome { u, status: SolveStatus::Singular, iterations: accepted, residual_norm: f };

    for _ in 0..cfg.max_iterations {
        let step = match damped_step(&mut normal, &mut symbolic, mu) {
            Some(h) if h.iter().all(|v| v.is_finite()) => h,
            _ => {
                mu *= nu;
                nu *= 2.0;
                if mu > MAX_DAMPING {
                    return singular(u, accepted, f);
                }
                continue;
            }
        };
        let step_norm = step.norm();
        if f <= cfg.residual_limit && step_norm <= cfg.step_rtol * (1.0 + u.norm()) {
            return LmOutcome { u, status: SolveStatus::Converged, iterations: accepted, residual_norm: f };
        }

        let candidate = &u + &step;
        let r_new = problem.residual(&candidate);
        let f_new = r_new.norm();
        // L(0) - L(h) for the damped linear model
        let predicted = 0.5 * step.dot(&(mu * &step - &normal.gradient));
        let actual = 0.5 * (f * f - f_new * f_new);
        let gain = if predicted > 0.0 { actual / predicted } else { -1.0 };

        if f_new.is_finite() && gain > 0.0 {
            u = candidate;
            accepted += 1;
            r = r_new;
            f = f_new;
            normal = Normal::assemble(dim, &problem.jacobian_rows(&u), &r);
            mu *= (1.0 / 3.0f64).max(1.0 - (2.0 * gain - 1.0).powi(3));
            nu = 2.0;
        } else {
            mu *= nu;
            nu *= 2.0;
            if mu > MAX_DAMPING {
                return singular(u, accepted, f);
            }
        }
    }
    LmOutcome { u, status: SolveStatus::MaxIterations, iterations: accepted, residual_norm: f }
}
