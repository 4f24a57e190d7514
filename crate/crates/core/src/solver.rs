//! Sparse quadratic system on the reduced affine family, solved by damped least squares.
//!
//! Unknowns are `t` (complex, length `m - 1`) and the real scalar `t_beta`, packed as
//! `u = [Re t_1, Im t_1, ..., Re t_{m-1}, Im t_{m-1}, t_beta]`. Each constraint contributes
//! the real and imaginary part of `x_i - x_j conj(x_k)` to the residual.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::affine::ReducedAffine;
use crate::error::Result;
use crate::lm::{minimize, LeastSquares, LmConfig, SparseRow};
use crate::mobius::{centering, postcompose_and_pullback, BlaschkeProduct, DiskAutomorphism};
use crate::poly::{Polynomial, TRIM_RTOL};
use crate::structure::{DegreeLayout, IndexTables};

/// Roots closer than this to the unit circle are reported as ambiguous.
pub const CLASSIFICATION_MARGIN: f64 = 1e-10;
const STEP_RTOL: f64 = 1e-12;

/// `x_i = x_j * conj(x_k)`, all positions 1-based; `0` stands for the constant 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadraticConstraint {
    pub i: usize,
    pub j: usize,
    pub k: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub residual_tol: f64,
    pub max_iterations: usize,
    pub transform_enabled: bool,
    pub rng_seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { residual_tol: 1e-12, max_iterations: 5000, transform_enabled: true, rng_seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    Singular,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveStatus::Converged => "converged",
            SolveStatus::MaxIterations => "max_iterations",
            SolveStatus::Singular => "singular",
        })
    }
}

/// A product has all poles outside the closed disk; a form has at least one inside.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    BlaschkeProduct,
    BlaschkeForm,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::BlaschkeProduct => "blaschke_product",
            Classification::BlaschkeForm => "blaschke_form",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub a: Vec<Complex64>,
    pub status: SolveStatus,
    pub iterations: usize,
    pub final_residual_norm: f64,
    /// `residual_tol * (1 + |alpha_hat|)` for the system actually solved.
    pub residual_limit: f64,
    pub classification: Classification,
    /// Some numerator root lies within [`CLASSIFICATION_MARGIN`] of the unit circle.
    pub near_circle_warning: bool,
    /// Center of the automorphism, when the data were transformed.
    pub center: Option<Complex64>,
}

impl SolveResult {
    pub fn product(&self) -> BlaschkeProduct {
        BlaschkeProduct::new(self.a.clone())
    }

    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }
}

/// One constraint for every position of the reduced vector that is not a linear slot.
pub fn build_constraints(tables: &IndexTables, layout: &DegreeLayout) -> Vec<QuadraticConstraint> {
    let j = &tables.positions;
    (1..=layout.p())
        .filter(|i| !j[1..].contains(i))
        .map(|i| QuadraticConstraint { i, j: j[tables.index[i - 1]], k: j[tables.conj_index[i - 1]] })
        .collect()
}

/// `C_hat` stored by rows: nonzero `(column, value)` pairs for every position.
#[derive(Debug, Clone)]
struct SparseRows(Vec<Vec<(usize, f64)>>);

impl SparseRows {
    fn new(c: &DMatrix<f64>) -> Self {
        Self(
            (0..c.nrows())
                .map(|i| (0..c.ncols()).filter_map(|j| (c[(i, j)] != 0.0).then_some((j, c[(i, j)]))).collect())
                .collect(),
        )
    }
}

struct SparseModel<'a> {
    aff: &'a ReducedAffine,
    cons: &'a [QuadraticConstraint],
    rows: SparseRows,
}

impl<'a> SparseModel<'a> {
    fn new(aff: &'a ReducedAffine, cons: &'a [QuadraticConstraint]) -> Self {
        Self { aff, cons, rows: SparseRows::new(&aff.c_hat) }
    }

    fn tcount(&self) -> usize {
        self.aff.c_hat.ncols()
    }

    fn unpack(&self, u: &DVector<f64>) -> (Vec<Complex64>, f64) {
        let t = (0..self.tcount()).map(|l| Complex64::new(u[2 * l], u[2 * l + 1])).collect();
        (t, u[2 * self.tcount()])
    }

    fn x_hat(&self, t: &[Complex64], t_beta: f64) -> Vec<Complex64> {
        self.aff
            .alpha_hat
            .iter()
            .zip(&self.aff.beta_hat)
            .zip(&self.rows.0)
            .map(|((a, b), row)| a + b * t_beta + row.iter().map(|&(l, v)| t[l] * v).sum::<Complex64>())
            .collect()
    }

    fn residual_at(&self, x: &[Complex64]) -> DVector<f64> {
        let at = |q: usize| if q == 0 { Complex64::new(1.0, 0.0) } else { x[q - 1] };
        let mut r = DVector::zeros(2 * self.cons.len());
        for (c, q) in self.cons.iter().enumerate() {
            let v = at(q.i) - at(q.j) * at(q.k).conj();
            r[2 * c] = v.re;
            r[2 * c + 1] = v.im;
        }
        r
    }

    /// Nonzeros of each Jacobian row as `(column, value)`, rows interleaved re/im.
    fn rows_at(&self, x: &[Complex64]) -> Vec<SparseRow> {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let im = Complex64::new(0.0, 1.0);
        let at = |q: usize| if q == 0 { one } else { x[q - 1] };
        let beta = |q: usize| if q == 0 { zero } else { self.aff.beta_hat[q - 1] };
        let row = |q: usize| if q == 0 { &[][..] } else { &self.rows.0[q - 1][..] };
        let tb = 2 * self.tcount();
        let mut out = Vec::with_capacity(2 * self.cons.len());
        for q in self.cons {
            let xj = at(q.j);
            let xk_bar = at(q.k).conj();
            // per column l of C_hat: (d/d Re t_l, d/d Im t_l) of x_i - x_j conj(x_k)
            let mut entries: Vec<(usize, Complex64, Complex64)> = Vec::new();
            let mut put = |l: usize, d_re: Complex64, d_im: Complex64| match entries.iter_mut().find(|e| e.0 == l) {
                Some(e) => {
                    e.1 += d_re;
                    e.2 += d_im;
                }
                None => entries.push((l, d_re, d_im)),
            };
            for &(l, v) in row(q.i) {
                put(l, Complex64::new(v, 0.0), im * v);
            }
            for &(l, v) in row(q.j) {
                put(l, -xk_bar * v, -im * xk_bar * v);
            }
            for &(l, v) in row(q.k) {
                put(l, -xj * v, im * xj * v);
            }
            let d_beta = beta(q.i) - beta(q.j) * xk_bar - xj * beta(q.k).conj();
            let mut re_row = Vec::with_capacity(2 * entries.len() + 1);
            let mut im_row = Vec::with_capacity(2 * entries.len() + 1);
            for (l, d_re, d_im) in entries {
                re_row.extend([(2 * l, d_re.re), (2 * l + 1, d_im.re)]);
                im_row.extend([(2 * l, d_re.im), (2 * l + 1, d_im.im)]);
            }
            re_row.push((tb, d_beta.re));
            im_row.push((tb, d_beta.im));
            out.push(re_row);
            out.push(im_row);
        }
        out
    }

    fn jacobian_at(&self, x: &[Complex64]) -> DMatrix<f64> {
        let rows = self.rows_at(x);
        let mut jac = DMatrix::zeros(rows.len(), 2 * self.tcount() + 1);
        for (r, entries) in rows.iter().enumerate() {
            for &(col, v) in entries {
                jac[(r, col)] = v;
            }
        }
        jac
    }
}

impl LeastSquares for SparseModel<'_> {
    fn dim(&self) -> usize {
        2 * self.tcount() + 1
    }

    fn residual(&self, u: &DVector<f64>) -> DVector<f64> {
        let (t, tb) = self.unpack(u);
        self.residual_at(&self.x_hat(&t, tb))
    }

    fn jacobian(&self, u: &DVector<f64>) -> DMatrix<f64> {
        let (t, tb) = self.unpack(u);
        self.jacobian_at(&self.x_hat(&t, tb))
    }

    fn jacobian_rows(&self, u: &DVector<f64>) -> Vec<SparseRow> {
        let (t, tb) = self.unpack(u);
        self.rows_at(&self.x_hat(&t, tb))
    }
}

/// Residual vector of length `2m`: interleaved real and imaginary parts per constraint.
pub fn residual(t: &[Complex64], t_beta: f64, aff: &ReducedAffine, cons: &[QuadraticConstraint]) -> DVector<f64> {
    let model = SparseModel::new(aff, cons);
    model.residual_at(&model.x_hat(t, t_beta))
}

/// Analytic Jacobian, `2m` rows by `2m - 1` columns ordered as the packed unknowns.
pub fn jacobian(t: &[Complex64], t_beta: f64, aff: &ReducedAffine, cons: &[QuadraticConstraint]) -> DMatrix<f64> {
    let model = SparseModel::new(aff, cons);
    model.jacobian_at(&model.x_hat(t, t_beta))
}

/// Numerator zeros other than the origin decide the class: a zero `w` inside the disk
/// puts the pole `1/conj(w)` outside it.
pub fn classify(a: &[Complex64]) -> Result<(Classification, bool)> {
    let mut c = a.to_vec();
    c.push(Complex64::new(1.0, 0.0));
    let roots = Polynomial::new(c).roots(TRIM_RTOL)?;
    let inside = roots.iter().all(|r| r.norm() < 1.0 - CLASSIFICATION_MARGIN);
    let near = roots.iter().any(|r| (r.norm() - 1.0).abs() <= CLASSIFICATION_MARGIN);
    let class = if inside { Classification::BlaschkeProduct } else { Classification::BlaschkeForm };
    Ok((class, near))
}

/// Solves the reduced system for `points` as given, without any transformation.
pub fn solve_model(points: &[Complex64], opts: &SolveOptions) -> Result<SolveResult> {
    crate::validate_points(points)?;
    let aff = ReducedAffine::new(points)?;
    let n = aff.n();
    let alpha_norm = aff.alpha_hat.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let residual_limit = opts.residual_tol * (1.0 + alpha_norm);
    let positions = crate::structure::coeff_positions(n);
    let extract = |x: &[Complex64]| positions[1..].iter().map(|&p| x[p - 1]).collect::<Vec<_>>();

    let (a, status, iterations, final_residual_norm) = if n == 1 {
        (extract(&aff.alpha_hat), SolveStatus::Converged, 0, 0.0)
    } else {
        let tables = crate::structure::index_vectors(n);
        let cons = build_constraints(&tables, &aff.layout);
        let model = SparseModel::new(&aff, &cons);
        let cfg = LmConfig { residual_limit, step_rtol: STEP_RTOL, max_iterations: opts.max_iterations };
        let out = minimize(&model, cfg);
        let (t, tb) = model.unpack(&out.u);
        (extract(&model.x_hat(&t, tb)), out.status, out.iterations, out.residual_norm)
    };
    let (classification, near_circle_warning) = classify(&a)?;
    Ok(SolveResult {
        a,
        status,
        iterations,
        final_residual_norm,
        residual_limit,
        classification,
        near_circle_warning,
        center: None,
    })
}

/// Full pipeline: optional mean-centering, reduced solve, pull-back to the original data.
pub fn solve(points: &[Complex64], opts: &SolveOptions) -> Result<SolveResult> {
    crate::validate_points(points)?;
    if !opts.transform_enabled {
        return solve_model(points, opts);
    }
    let aut: DiskAutomorphism = centering(points, opts.rng_seed)?;
    let moved = points.iter().map(|&z| aut.forward(z)).collect::<Result<Vec<_>>>()?;
    let inner = solve_model(&moved, opts)?;
    let b = postcompose_and_pullback(&inner.product(), &aut)?;
    let (classification, near_circle_warning) = classify(&b.a)?;
    Ok(SolveResult { a: b.a, classification, near_circle_warning, center: Some(aut.z_star()), ..inner })
}
