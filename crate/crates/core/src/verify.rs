//! Recover critical points from a solved product and measure them against the data.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mobius::BlaschkeProduct;
use crate::poly::TRIM_RTOL;
use crate::refine::polish_wronskian_roots;
use crate::solver::{classify, Classification, SolveResult, SolveStatus};

/// A solve counts as accurate only when every paired point is closer than this.
pub const ACCURACY_THRESHOLD: f64 = 0.5e-4;
const DISK_MARGIN: f64 = 1e-12;

/// In-disk roots of the Wronskian; there must be exactly `n` of them.
pub fn computed_critical_points(b: &BlaschkeProduct) -> Result<Vec<Complex64>> {
    let inside = in_disk_roots(b)?;
    if inside.len() != b.n() {
        return Err(Error::RootCountMismatch { expected: b.n(), found: inside.len() });
    }
    Ok(inside)
}

/// Double-precision roots of `W`, polished against `W` formed in double-double.
fn wronskian_roots(b: &BlaschkeProduct) -> Result<Vec<Complex64>> {
    let rough = b.wronskian().roots(TRIM_RTOL)?;
    Ok(polish_wronskian_roots(&b.a, &rough))
}

fn in_disk_roots(b: &BlaschkeProduct) -> Result<Vec<Complex64>> {
    Ok(wronskian_roots(b)?.into_iter().filter(|z| z.norm() < 1.0 - DISK_MARGIN).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentResult {
    /// `pairing[i]` is the column matched to row `i`.
    pub pairing: Vec<usize>,
    pub max_distance: f64,
    pub distance_matrix: DMatrix<f64>,
}

/// Kuhn's augmenting paths on the graph `{(i, j) : d_ij <= thr}`; returns the row of each
/// column when a perfect matching exists.
fn perfect_matching(d: &DMatrix<f64>, thr: f64) -> Option<Vec<usize>> {
    let n = d.nrows();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    fn augment(
        row: usize,
        d: &DMatrix<f64>,
        thr: f64,
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for col in 0..d.ncols() {
            if d[(row, col)] <= thr && !seen[col] {
                seen[col] = true;
                if owner[col].is_none_or(|r| augment(r, d, thr, seen, owner)) {
                    owner[col] = Some(row);
                    return true;
                }
            }
        }
        false
    }
    for row in 0..n {
        let mut seen = vec![false; n];
        if !augment(row, d, thr, &mut seen, &mut owner) {
            return None;
        }
    }
    let mut pairing = vec![0; n];
    for (col, r) in owner.iter().enumerate() {
        pairing[r.expect("perfect matching covers all columns")] = col;
    }
    Some(pairing)
}

/// Bijection minimizing the largest matched entry of a square nonnegative matrix.
pub fn bottleneck_assign(d: &DMatrix<f64>) -> AssignmentResult {
    assert_eq!(d.nrows(), d.ncols(), "distance matrix must be square");
    if d.nrows() == 0 {
        return AssignmentResult { pairing: vec![], max_distance: 0.0, distance_matrix: d.clone() };
    }
    let mut values: Vec<f64> = d.iter().copied().collect();
    values.sort_by(|a, b| a.total_cmp(b));
    values.dedup();
    // smallest index whose threshold admits a perfect matching; the largest always does
    let (mut lo, mut hi) = (0, values.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if perfect_matching(d, values[mid]).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let pairing = perfect_matching(d, values[lo]).expect("threshold admits a matching");
    let max_distance = pairing.iter().enumerate().map(|(i, &j)| d[(i, j)]).fold(0.0, f64::max);
    AssignmentResult { pairing, max_distance, distance_matrix: d.clone() }
}

pub fn distance_matrix(prescribed: &[Complex64], computed: &[Complex64]) -> DMatrix<f64> {
    DMatrix::from_fn(prescribed.len(), computed.len(), |i, j| (prescribed[i] - computed[j]).norm())
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub computed_points: Vec<Complex64>,
    /// Largest distance under the bottleneck pairing.
    pub max_error: f64,
    /// Largest `|B'|` over the computed points.
    pub max_abs_derivative: f64,
    pub accurately_solved: bool,
    pub classification: Classification,
    /// `pairing[i]` indexes the computed point paired with prescribed point `i`.
    pub pairing: Vec<usize>,
    /// Number of Wronskian roots found strictly inside the disk.
    pub in_disk_root_count: usize,
}

/// Verifies `result` against `prescribed`. When the in-disk root count is not `n`, the `n`
/// roots of smallest modulus stand in and the instance is never counted accurate.
pub fn report(prescribed: &[Complex64], result: &SolveResult) -> Result<VerificationReport> {
    let solver_ok = result.status == SolveStatus::Converged && result.final_residual_norm <= result.residual_limit;
    measure(prescribed, &result.product(), result.classification, solver_ok)
}

/// Like [`report`] for a product obtained elsewhere; only the root and error clauses apply.
pub fn check_product(prescribed: &[Complex64], b: &BlaschkeProduct) -> Result<VerificationReport> {
    let (classification, _) = classify(&b.a)?;
    measure(prescribed, b, classification, true)
}

fn measure(
    prescribed: &[Complex64],
    b: &BlaschkeProduct,
    classification: Classification,
    solver_ok: bool,
) -> Result<VerificationReport> {
    if prescribed.len() != b.n() {
        return Err(Error::Dimension(format!("{} prescribed points for n = {}", prescribed.len(), b.n())));
    }
    let mut roots = wronskian_roots(b)?;
    let in_disk_root_count = roots.iter().filter(|z| z.norm() < 1.0 - DISK_MARGIN).count();
    roots.sort_by(|u, v| u.norm().total_cmp(&v.norm()));
    roots.truncate(b.n());
    let assignment = bottleneck_assign(&distance_matrix(prescribed, &roots));
    let max_abs_derivative = roots.iter().map(|&z| b.derivative_at(z).norm()).fold(0.0, f64::max);
    let accurately_solved =
        solver_ok && in_disk_root_count == b.n() && assignment.max_distance < ACCURACY_THRESHOLD;
    Ok(VerificationReport {
        pairing: assignment.pairing,
        computed_points: roots,
        max_error: assignment.max_distance,
        max_abs_derivative,
        accurately_solved,
        classification,
        in_disk_root_count,
    })
}
