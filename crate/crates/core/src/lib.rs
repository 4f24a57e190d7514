//! Finite Blaschke products with prescribed distinct critical points.
//!
//! Given `n` distinct nonzero points in the open unit disk, the library builds a
//! Blaschke product of degree `n + 1`
//!
//! ```text
//! B(z) = (a_1 z + ... + a_n z^n + z^{n+1}) / (1 + conj(a_n) z + ... + conj(a_1) z^n)
//! ```
//! whose derivative vanishes at those points. The Wronskian conditions are recast
//! as an affine description `x = alpha + C t + beta t_beta` (data enters only
//! through `alpha` and `beta`, both obtained by FFT) plus simple conjugate
//! quadratic constraints, which are solved by Levenberg-Marquardt.
//!
//! Module map:
//! - [`poly`]: polynomial arithmetic, FFT coefficient recovery, root extraction.
//! - [`structure`]: data-independent weight and index tables, dense oracle.
//! - [`affine`]: null-space blocks, reduced affine system, `alpha` and `beta`.
//! - [`solver`]: quadratic constraints, residual/Jacobian, LM solve, pipeline.
//! - [`mobius`]: centering automorphism and post-composition.
//! - [`verify`]: critical point extraction, bottleneck assignment, reports.
//! - [`instances`]: seeded instance generators.

pub mod affine;
pub mod error;
pub mod instances;
pub mod mobius;
pub mod poly;
pub mod solver;
pub mod structure;
pub mod verify;

mod lm;
mod refine;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Checks that `points` are finite, distinct, nonzero and strictly inside the unit disk.
pub fn validate_points(points: &[Complex64]) -> Result<()> {
    validate_points_inner(points, true)
}

pub(crate) fn validate_points_inner(points: &[Complex64], forbid_zero: bool) -> Result<()> {
    if points.is_empty() {
        return Err(Error::Empty);
    }
    for (i, z) in points.iter().enumerate() {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::NonFinite(i));
        }
        if forbid_zero && z.norm() == 0.0 {
            return Err(Error::ZeroPoint(i));
        }
        if z.norm() >= 1.0 {
            return Err(Error::OutsideDisk { index: i, modulus: z.norm() });
        }
    }
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if points[i] == points[j] {
                return Err(Error::DuplicatePoints(i, j));
            }
        }
    }
    Ok(())
}
