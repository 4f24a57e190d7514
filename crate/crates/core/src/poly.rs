//! Dense complex polynomials in ascending coefficient order.
//!
//! Arithmetic never trims coefficients; only [`Polynomial::roots`] drops
//! negligible leading terms before building the companion matrix.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Relative threshold below which leading coefficients are dropped by `roots`.
pub const TRIM_RTOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    /// Builds a polynomial from ascending coefficients. An empty vector becomes `[0]`.
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        if coeffs.is_empty() {
            return Self::zero();
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![Complex64::new(0.0, 0.0)] }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Nominal length minus one; may exceed the true degree if the top coefficients vanish.
    pub fn nominal_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Index of the highest nonzero coefficient, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| *c != Complex64::new(0.0, 0.0))
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() == 1 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, &c)| c * j as f64)
            .collect();
        Self { coeffs }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self { coeffs: out }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = Complex64::new(0.0, 0.0);
        let coeffs = (0..len)
            .map(|j| {
                self.coeffs.get(j).copied().unwrap_or(zero) + other.coeffs.get(j).copied().unwrap_or(zero)
            })
            .collect();
        Self { coeffs }
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> Polynomial {
        Self { coeffs: self.coeffs.iter().map(|&c| c * s).collect() }
    }

    /// Monic polynomial with the given roots, recovered from `2^l` samples on the unit circle
    /// by an inverse discrete Fourier transform.
    pub fn from_roots_fft(roots: &[Complex64], l: u32) -> Result<Polynomial> {
        let degree = roots.len();
        let grid = 1usize
            .checked_shl(l)
            .ok_or(Error::Aliasing { grid: usize::MAX, degree })?;
        if grid <= degree {
            return Err(Error::Aliasing { grid, degree });
        }
        let mut samples: Vec<Complex64> = (0..grid)
            .map(|k| {
                let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / grid as f64);
                roots.iter().fold(Complex64::new(1.0, 0.0), |acc, &r| acc * (w - r))
            })
            .collect();
        let fft = FftPlanner::new().plan_fft_forward(grid);
        fft.process(&mut samples);
        let inv = 1.0 / grid as f64;
        let coeffs = samples.into_iter().take(degree + 1).map(|c| c * inv).collect();
        Ok(Self { coeffs })
    }

    /// Monic polynomial with the given roots by sequential multiplication of linear factors.
    pub fn from_roots(roots: &[Complex64]) -> Polynomial {
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            coeffs.push(Complex64::new(0.0, 0.0));
            for j in (1..coeffs.len()).rev() {
                coeffs[j] = coeffs[j - 1] - r * coeffs[j];
            }
            coeffs[0] *= -r;
        }
        Self { coeffs }
    }

    /// All complex roots with multiplicity, from the eigenvalues of the balanced companion
    /// matrix followed by a guarded Newton polish on the original coefficients.
    ///
    /// Leading coefficients below `tol * max|c|` are discarded first.
    pub fn roots(&self, tol: f64) -> Result<Vec<Complex64>> {
        let scale = self.max_abs_coeff();
        if scale == 0.0 || !scale.is_finite() {
            return Err(Error::ZeroPolynomial);
        }
        let cutoff = tol * scale;
        let top = match self.coeffs.iter().rposition(|c| c.norm() > cutoff) {
            Some(t) => t,
            None => return Err(Error::ZeroPolynomial),
        };
        if top == 0 {
            return Ok(Vec::new());
        }
        let trimmed = Polynomial::new(self.coeffs[..=top].to_vec());
        let lead = trimmed.coeffs[top];
        if top == 1 {
            return Ok(vec![-trimmed.coeffs[0] / lead]);
        }

        let mut companion = DMatrix::<Complex64>::zeros(top, top);
        for i in 1..top {
            companion[(i, i - 1)] = Complex64::new(1.0, 0.0);
        }
        for i in 0..top {
            companion[(i, top - 1)] = -trimmed.coeffs[i] / lead;
        }
        balance(&mut companion);

        let schur = Schur::try_new(companion, f64::EPSILON, 100 * top)
            .ok_or_else(|| Error::RootFinding("Schur iteration did not converge".into()))?;
        let eigs = schur
            .eigenvalues()
            .ok_or_else(|| Error::RootFinding("Schur form is not triangular".into()))?;

        let dp = trimmed.derivative();
        let roots = eigs.iter().map(|&z| newton_polish(&trimmed, &dp, z)).collect();
        Ok(roots)
    }

    /// True if, after some unimodular rotation `e^{i phi}`, the coefficients satisfy
    /// `c_j = conj(c_{N-j})` where `N` is the nominal degree.
    pub fn is_self_inversive(&self, tol: f64) -> bool {
        let scale = self.max_abs_coeff();
        if scale == 0.0 {
            return true;
        }
        let nominal = self.nominal_degree();
        let c = &self.coeffs;
        let (pivot, _) = c
            .iter()
            .enumerate()
            .fold((0, -1.0), |(bi, bv), (i, v)| if v.norm() > bv { (i, v.norm()) } else { (bi, bv) });
        // e^{2 i phi} c_j = conj(c_{N-j})
        let lambda = c[nominal - pivot].conj() / c[pivot];
        if (lambda.norm() - 1.0).abs() > tol {
            return false;
        }
        let lambda = lambda / lambda.norm();
        (0..=nominal).all(|j| (lambda * c[j] - c[nominal - j].conj()).norm() <= tol * scale)
    }
}

/// Parlett-Reinsch diagonal similarity balancing, in place.
fn balance(m: &mut DMatrix<Complex64>) {
    let n = m.nrows();
    let radix = 2.0_f64;
    let mut converged = false;
    let mut sweeps = 0;
    while !converged && sweeps < 100 {
        converged = true;
        sweeps += 1;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].norm();
                    r += m[(i, j)].norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / radix;
            while c < g {
                f *= radix;
                c *= radix * radix;
            }
            g = r * radix;
            while c > g {
                f /= radix;
                c /= radix * radix;
            }
            if (c + r) / f < 0.95 * s {
                converged = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                }
                for j in 0..n {
                    m[(j, i)] *= f;
                }
            }
        }
    }
}

fn newton_polish(p: &Polynomial, dp: &Polynomial, mut z: Complex64) -> Complex64 {
    let mut fz = p.eval(z).norm();
    for _ in 0..3 {
        let d = dp.eval(z);
        if d.norm() == 0.0 || fz == 0.0 {
            break;
        }
        let candidate = z - p.eval(z) / d;
        let fc = p.eval(candidate).norm();
        if !(fc < fz) {
            break;
        }
        z = candidate;
        fz = fc;
    }
    z
}

/// Smallest `l` with `2^l >= 4 (degree + 1)`.
pub fn sampling_exponent(degree: usize) -> u32 {
    let target = 4 * (degree + 1);
    let mut l = 0;
    while (1usize << l) < target {
        l += 1;
    }
    l
}
