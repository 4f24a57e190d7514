//! Newton polishing of Wronskian roots in double-double arithmetic.
//!
//! For clustered points near the circle the critical points are far more sensitive to
//! rounding in `W = p'q - pq'` than to the coefficients `a` themselves. Forming `W` and
//! evaluating it in double-double recovers the roots that `a` actually determines.

use num_complex::{Complex, Complex64};
use twofloat::TwoFloat;

type Dd = Complex<TwoFloat>;

const MAX_STEPS: usize = 8;

fn dd(z: Complex64) -> Dd {
    Complex::new(TwoFloat::from(z.re), TwoFloat::from(z.im))
}

fn to_f64(z: Dd) -> Complex64 {
    Complex64::new(f64::from(z.re), f64::from(z.im))
}

/// Coefficients of `p'q - pq'` for the normalized product with coefficients `a`.
fn wronskian_dd(a: &[Complex64]) -> Vec<Dd> {
    let n = a.len();
    let one = Complex64::new(1.0, 0.0);
    let p: Vec<Dd> = std::iter::once(Complex64::new(0.0, 0.0)).chain(a.iter().copied()).chain([one]).map(dd).collect();
    let q: Vec<Dd> = std::iter::once(one).chain(a.iter().rev().map(|v| v.conj())).map(dd).collect();
    let mut w = vec![Dd::new(TwoFloat::from(0.0), TwoFloat::from(0.0)); 2 * n + 1];
    // coefficient of z^(i+j-1) in p'q - pq' is (i - j) p_i q_j
    for (i, pi) in p.iter().enumerate() {
        for (j, qj) in q.iter().enumerate() {
            if i + j == 0 || i == j {
                continue;
            }
            let k = i + j - 1;
            if k < w.len() {
                let f = TwoFloat::from(i as f64 - j as f64);
                w[k] += pi * qj * f;
            }
        }
    }
    w
}

/// `(W(z), W'(z))` by Horner.
fn eval_with_derivative(w: &[Dd], z: Dd) -> (Dd, Dd) {
    let zero = Dd::new(TwoFloat::from(0.0), TwoFloat::from(0.0));
    w.iter().rev().fold((zero, zero), |(v, d), c| (v * z + c, d * z + v))
}

/// Polishes each root; a root that would move by more than half the gap to its nearest
/// neighbour is left unchanged.
pub(crate) fn polish_wronskian_roots(a: &[Complex64], roots: &[Complex64]) -> Vec<Complex64> {
    let w = wronskian_dd(a);
    roots
        .iter()
        .enumerate()
        .map(|(i, &r0)| {
            let gap = roots
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, s)| (s - r0).norm())
                .fold(f64::INFINITY, f64::min);
            let mut z = dd(r0);
            for _ in 0..MAX_STEPS {
                let (v, d) = eval_with_derivative(&w, z);
                if d.re == TwoFloat::from(0.0) && d.im == TwoFloat::from(0.0) {
                    return r0;
                }
                let step = v / d;
                z -= step;
                let s = to_f64(step).norm();
                if !s.is_finite() {
                    return r0;
                }
                if s <= 1e-20 * to_f64(z).norm().max(1.0) {
                    break;
                }
            }
            let polished = to_f64(z);
            if polished.re.is_finite() && polished.im.is_finite() && (polished - r0).norm() < 0.5 * gap {
                polished
            } else {
                r0
            }
        })
        .collect()
}
