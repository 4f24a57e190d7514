//! Affine description of the relaxed Wronskian system.
//!
//! Every solution of the relaxed reduced system has the form
//! `x_hat = alpha_hat + C_hat t + beta_hat t_beta` with `t` complex and `t_beta` real.
//! `C_hat` is block diagonal with integer blocks `C^d` spanning the null space of
//! the degree-`d` weight vector and depends only on `n`; `alpha_hat` and `beta_hat`
//! carry all the data and are read off the sampled polynomial
//! `prod (z - z_j)(z - 1/conj(z_j))`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::{sampling_exponent, Polynomial};
use crate::structure::{coeff_positions, DegreeLayout};

/// Integer null-space basis of the degree-`d` weight vector, `2 <= d <= n`.
///
/// Columns are the basis vectors in their natural order.
pub fn null_block(n: usize, d: usize) -> DMatrix<i64> {
    assert!(2 <= d && d <= n, "null blocks exist for 2 <= d <= n");
    let d_i = d as i64;
    let mut cols: Vec<Vec<i64>> = Vec::new();
    // (rows, entries) where each column is a pair of consecutive nonzeros
    let rows;
    let pair = |rows: usize, at: usize, top: i64, bottom: i64| {
        let mut v = vec![0; rows];
        v[at] = top;
        v[at + 1] = bottom;
        v
    };
    if d < n {
        if d.is_multiple_of(2) {
            rows = d + 1;
            cols.push(pair(rows, 0, d_i - 1, d_i + 1));
            for k in 2..=d {
                let k_i = k as i64;
                cols.push(pair(rows, k - 1, -d_i + 2 * k_i - 1, d_i - 2 * k_i + 3));
            }
        } else {
            rows = d;
            cols.push(pair(rows, 0, d_i - 1, d_i + 1));
            for k in 2..d {
                let k_i = k as i64;
                if 2 * k < d + 1 {
                    cols.push(pair(rows, k - 1, -d_i + 2 * k_i - 1, d_i - 2 * k_i + 3));
                } else if 2 * k == d + 1 {
                    cols.push(pair(rows, k - 1, 1, 1));
                } else {
                    cols.push(pair(rows, k - 1, -d_i + 2 * k_i + 1, d_i - 2 * k_i + 1));
                }
            }
        }
    } else if n.is_multiple_of(2) {
        rows = n;
        for k in 2..=n {
            let k_i = k as i64;
            cols.push(pair(rows, k - 2, -d_i + 2 * k_i - 1, d_i - 2 * k_i + 3));
        }
    } else {
        rows = n - 1;
        for k in 2..n {
            let k_i = k as i64;
            if 2 * k < n + 1 {
                cols.push(pair(rows, k - 2, -d_i + 2 * k_i - 1, d_i - 2 * k_i + 3));
            } else if 2 * k == n + 1 {
                cols.push(pair(rows, k - 2, 1, 1));
            } else {
                cols.push(pair(rows, k - 2, -d_i + 2 * k_i + 1, d_i - 2 * k_i + 1));
            }
        }
    }
    DMatrix::from_fn(rows, cols.len(), |r, c| cols[c][r])
}

/// 0-based (row, column) of the northwest corner of `C^d` inside `C_hat`.
fn block_corner(d: usize) -> (usize, usize) {
    ((d * d).div_ceil(2), (d - 1) * (d - 1) / 2)
}

/// The reduced block-diagonal null matrix `C_hat` of shape `p x (m - 1)`.
///
/// For `n = 1` there are no null directions and the result is `1 x 0`.
pub fn assemble_reduced_c(n: usize) -> DMatrix<f64> {
    let layout = DegreeLayout::new(n);
    let cols = layout.m().saturating_sub(1);
    let mut c = DMatrix::<f64>::zeros(layout.p(), cols);
    for d in 2..=n {
        let block = null_block(n, d);
        let (r0, c0) = block_corner(d);
        debug_assert_eq!(r0, layout.block_start(d));
        for (i, j) in (0..block.nrows()).flat_map(|i| (0..block.ncols()).map(move |j| (i, j))) {
            c[(r0 + i, c0 + j)] = block[(i, j)] as f64;
        }
    }
    c
}

/// Full null matrix with blocks `C^d` for `2 <= d <= 2n - 2`, shape `(n^2 + n) x (n^2 - n - 1)`.
///
/// Blocks above degree `n` are `C^{2n-d}` reversed in both dimensions. Only used to
/// cross-check the reduced model against the dense system.
pub fn full_null_matrix(n: usize) -> DMatrix<f64> {
    let layout = DegreeLayout::new(n);
    let mut blocks = Vec::new();
    for d in 2..=(2 * n).saturating_sub(2) {
        let b = if d <= n {
            null_block(n, d)
        } else {
            let lo = null_block(n, 2 * n - d);
            let (r, c) = lo.shape();
            DMatrix::from_fn(r, c, |i, j| lo[(r - 1 - i, c - 1 - j)])
        };
        blocks.push((d, b));
    }
    let total: usize = blocks.iter().map(|(_, b)| b.ncols()).sum();
    let mut out = DMatrix::<f64>::zeros(layout.full_len(), total);
    let mut col = 0;
    for (d, b) in blocks {
        let r0 = layout.block_start(d);
        for j in 0..b.ncols() {
            for i in 0..b.nrows() {
                out[(r0 + i, col + j)] = b[(i, j)] as f64;
            }
        }
        col += b.ncols();
    }
    out
}

/// Coefficients `c_0..c_{2n}` of `W_1`: the polynomial with roots `z_j` and `1/conj(z_j)`,
/// scaled so that the coefficient of `z^n` equals `n + 1`.
pub fn scaled_wronskian(points: &[Complex64]) -> Result<Vec<Complex64>> {
    crate::validate_points(points)?;
    let n = points.len();
    let roots: Vec<Complex64> = points.iter().flat_map(|&z| [z, 1.0 / z.conj()]).collect();
    let w0 = Polynomial::from_roots_fft(&roots, sampling_exponent(2 * n))?;
    let b = w0.coeffs();
    let mid = b[n];
    let scale = w0.max_abs_coeff();
    if mid.norm() <= 1e-14 * scale {
        return Err(Error::DegenerateScaling(mid.norm() / scale));
    }
    let factor = (n + 1) as f64 / mid;
    let mut c: Vec<Complex64> = b.iter().map(|&v| v * factor).collect();
    c[2 * n] = factor;
    Ok(c)
}

fn linear_seed(c: &[Complex64], n: usize, layout: &DegreeLayout) -> Vec<Complex64> {
    let mut x = vec![Complex64::new(0.0, 0.0); layout.p()];
    for (i, &pos) in coeff_positions(n).iter().enumerate().skip(1) {
        x[pos - 1] = c[i - 1] / i as f64;
    }
    x
}

fn middle_block_values(n: usize) -> Vec<f64> {
    // values for |a_i|^2, i = 1..n, skipping the middle index when n is odd
    let nf = n as f64;
    let half = n / 2;
    let mut lower: Vec<f64> = (1..=half)
        .map(|i| -3.0 * (nf + 1.0 - 2.0 * i as f64) / (nf * (nf - 1.0)))
        .collect();
    let upper: Vec<f64> = lower.iter().rev().map(|v| -v).collect();
    lower.extend(upper);
    lower
}

/// `alpha_hat`: linear slots `a_i = c_{i-1} / i`, quadratic slots zero.
pub fn particular_solution(points: &[Complex64]) -> Result<Vec<Complex64>> {
    let c = scaled_wronskian(points)?;
    let n = points.len();
    Ok(linear_seed(&c, n, &DegreeLayout::new(n)))
}

/// `beta_hat`: the same linear slots as `alpha_hat` plus the degree-`n` quadratic slots
/// chosen so that the middle-degree sum equals `n + 1`.
pub fn data_null_vector(points: &[Complex64]) -> Result<Vec<Complex64>> {
    let c = scaled_wronskian(points)?;
    let n = points.len();
    let layout = DegreeLayout::new(n);
    Ok(beta_from(&c, n, &layout))
}

fn beta_from(c: &[Complex64], n: usize, layout: &DegreeLayout) -> Vec<Complex64> {
    let mut x = linear_seed(c, n, layout);
    if n >= 2 {
        let start = layout.block_start(n);
        for (k, v) in middle_block_values(n).into_iter().enumerate() {
            x[start + k] = Complex64::new(v, 0.0);
        }
    }
    x
}

/// Appends degrees `n+1..=2n` as reversed conjugates of degrees `n-1..=0`.
pub fn expand_full(x_hat: &[Complex64], layout: &DegreeLayout) -> Result<Vec<Complex64>> {
    if x_hat.len() != layout.p() {
        return Err(Error::Dimension(format!("expected {} entries, got {}", layout.p(), x_hat.len())));
    }
    let n = layout.n();
    let mut x = x_hat.to_vec();
    for d in n + 1..=2 * n {
        let src = 2 * n - d;
        let s = layout.block_start(src);
        x.extend(x_hat[s..s + layout.block_size(src)].iter().rev().map(|v| v.conj()));
    }
    Ok(x)
}

/// Complete data of the reduced affine model for one set of critical points.
#[derive(Debug, Clone)]
pub struct ReducedAffine {
    pub alpha_hat: Vec<Complex64>,
    pub beta_hat: Vec<Complex64>,
    pub c_hat: DMatrix<f64>,
    pub layout: DegreeLayout,
}

impl ReducedAffine {
    pub fn new(points: &[Complex64]) -> Result<Self> {
        let n = points.len();
        let c = scaled_wronskian(points)?;
        let layout = DegreeLayout::new(n);
        Ok(Self {
            alpha_hat: linear_seed(&c, n, &layout),
            beta_hat: beta_from(&c, n, &layout),
            c_hat: assemble_reduced_c(n),
            layout,
        })
    }

    pub fn n(&self) -> usize {
        self.layout.n()
    }

    /// `alpha_hat + C_hat t + beta_hat t_beta`.
    pub fn point(&self, t: &[Complex64], t_beta: f64) -> Vec<Complex64> {
        let mut x: Vec<Complex64> =
            self.alpha_hat.iter().zip(&self.beta_hat).map(|(a, b)| a + b * t_beta).collect();
        for j in 0..self.c_hat.ncols() {
            for i in 0..self.c_hat.nrows() {
                let v = self.c_hat[(i, j)];
                if v != 0.0 {
                    x[i] += t[j] * v;
                }
            }
        }
        x
    }
}
