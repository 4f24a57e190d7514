//! Data-independent combinatorics of the Wronskian for a given `n`.
//!
//! The `n^2 + n` coefficient-dependent terms of `W = p'q - pq'` are grouped by
//! degree `d = 0..=2n`. Each term is `w * a_I * conj(a_Ibar) * z^d` with the
//! convention `a_0 = 1`. Degrees above `n` mirror degrees below `n`: their
//! index vectors swap roles and reverse, and weights reverse.
//!
//! Positions into the concatenated vector `x` are reported 1-based throughout
//! this crate (`x_1` is `a_1`); storage is ordinary 0-based `Vec`s.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::Result;
use crate::poly::Polynomial;

/// One term of the Wronskian: weight, index of `a`, index of `conj(a)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Term {
    weight: i64,
    index: usize,
    conj_index: usize,
}

fn lower_terms(n: usize, d: usize) -> Vec<Term> {
    debug_assert!(d <= n);
    let mut out = Vec::new();
    if d < n {
        out.push(Term { weight: (d + 1) as i64, index: d + 1, conj_index: 0 });
        for i in 1..=d {
            if d % 2 == 1 && 2 * i == d + 1 {
                continue;
            }
            out.push(Term { weight: 2 * i as i64 - d as i64 - 1, index: i, conj_index: n - d + i });
        }
    } else {
        for i in 1..=n {
            if n % 2 == 1 && 2 * i == n + 1 {
                continue;
            }
            out.push(Term { weight: 2 * i as i64 - n as i64 - 1, index: i, conj_index: i });
        }
    }
    out
}

fn terms(n: usize, d: usize) -> Vec<Term> {
    if d <= n {
        lower_terms(n, d)
    } else {
        lower_terms(n, 2 * n - d)
            .into_iter()
            .rev()
            .map(|t| Term { weight: t.weight, index: t.conj_index, conj_index: t.index })
            .collect()
    }
}

/// Sizes and offsets of the per-degree blocks of `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeLayout {
    n: usize,
    sizes: Vec<usize>,
    starts: Vec<usize>,
}

impl DegreeLayout {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "n must be positive");
        let sizes: Vec<usize> = (0..=2 * n).map(|d| terms(n, d).len()).collect();
        let mut starts = Vec::with_capacity(sizes.len());
        let mut acc = 0;
        for s in &sizes {
            starts.push(acc);
            acc += s;
        }
        Self { n, sizes, starts }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `floor(n^2 / 2)`, the number of quadratic constraints.
    pub fn m(&self) -> usize {
        self.n * self.n / 2
    }

    /// `floor(n^2 / 2) + n`, the length of the reduced vector.
    pub fn p(&self) -> usize {
        self.m() + self.n
    }

    /// `n^2 + n`, the length of the full vector.
    pub fn full_len(&self) -> usize {
        self.n * self.n + self.n
    }

    pub fn block_size(&self, d: usize) -> usize {
        self.sizes[d]
    }

    /// 1-based position of the first entry of the degree-`d` block.
    pub fn block_offset(&self, d: usize) -> usize {
        self.starts[d] + 1
    }

    /// 0-based storage index of the first entry of the degree-`d` block.
    pub fn block_start(&self, d: usize) -> usize {
        self.starts[d]
    }

    /// Degree of the block holding 0-based storage index `idx`.
    pub fn degree_of(&self, idx: usize) -> usize {
        match self.starts.binary_search(&idx) {
            Ok(mut d) => {
                // skip empty blocks sharing the same start
                while self.sizes[d] == 0 {
                    d += 1;
                }
                d
            }
            Err(d) => d - 1,
        }
    }
}

/// Concatenated weights `w = (w^0, ..., w^{2n})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightVector {
    pub w: Vec<i64>,
}

impl WeightVector {
    pub fn block<'a>(&'a self, layout: &DegreeLayout, d: usize) -> &'a [i64] {
        let s = layout.block_start(d);
        &self.w[s..s + layout.block_size(d)]
    }
}

/// Index vectors `I`, `Ibar` (entries in `0..=n`, 0 meaning the constant 1) and the
/// 1-based positions `J` of the linear variables `a_i` inside `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexTables {
    pub index: Vec<usize>,
    pub conj_index: Vec<usize>,
    pub positions: Vec<usize>,
}

impl IndexTables {
    pub fn n(&self) -> usize {
        self.positions.len() - 1
    }
}

pub fn weight_vectors(n: usize) -> (WeightVector, DegreeLayout) {
    let layout = DegreeLayout::new(n);
    let w = (0..=2 * n).flat_map(|d| terms(n, d)).map(|t| t.weight).collect();
    (WeightVector { w }, layout)
}

pub fn index_vectors(n: usize) -> IndexTables {
    assert!(n >= 1, "n must be positive");
    let all: Vec<Term> = (0..=2 * n).flat_map(|d| terms(n, d)).collect();
    IndexTables {
        index: all.iter().map(|t| t.index).collect(),
        conj_index: all.iter().map(|t| t.conj_index).collect(),
        positions: coeff_positions(n),
    }
}

/// `J_0 = 0` and `J_i = ceil((i-1)^2 / 2) + 1`.
pub fn coeff_positions(n: usize) -> Vec<usize> {
    std::iter::once(0).chain((1..=n).map(|i| ((i - 1) * (i - 1)).div_ceil(2) + 1)).collect()
}

/// Everything data-independent for one `n`.
#[derive(Debug, Clone)]
pub struct Structure {
    pub layout: DegreeLayout,
    pub weights: WeightVector,
    pub tables: IndexTables,
}

impl Structure {
    pub fn new(n: usize) -> Self {
        let (weights, layout) = weight_vectors(n);
        Self { layout, weights, tables: index_vectors(n) }
    }

    pub fn n(&self) -> usize {
        self.layout.n()
    }
}

/// `x_i = a_{I_i} * conj(a_{Ibar_i})` with `a_0 = 1`.
pub fn build_x(a: &[Complex64], tables: &IndexTables) -> Vec<Complex64> {
    let coeff = |k: usize| if k == 0 { Complex64::new(1.0, 0.0) } else { a[k - 1] };
    tables
        .index
        .iter()
        .zip(&tables.conj_index)
        .map(|(&i, &k)| coeff(i) * coeff(k).conj())
        .collect()
}

/// Numerator `a_1 z + ... + a_n z^n + z^{n+1}` of the normalized product.
pub fn numerator(a: &[Complex64]) -> Polynomial {
    let mut c = Vec::with_capacity(a.len() + 2);
    c.push(Complex64::new(0.0, 0.0));
    c.extend_from_slice(a);
    c.push(Complex64::new(1.0, 0.0));
    Polynomial::new(c)
}

/// Denominator `1 + conj(a_n) z + ... + conj(a_1) z^n`.
pub fn denominator(a: &[Complex64]) -> Polynomial {
    let mut c = Vec::with_capacity(a.len() + 1);
    c.push(Complex64::new(1.0, 0.0));
    c.extend(a.iter().rev().map(|v| v.conj()));
    Polynomial::new(c)
}

/// `p'q - pq'` by polynomial arithmetic; nominal degree `2n`.
pub fn wronskian_from_coeffs(a: &[Complex64]) -> Polynomial {
    let p = numerator(a);
    let q = denominator(a);
    p.derivative().mul(&q).sub(&p.mul(&q.derivative()))
}

/// `sum_d w^d . x^d(a) z^d + (n+1) z^n` assembled from the weight and index tables.
pub fn wronskian_from_tables(a: &[Complex64], s: &Structure) -> Polynomial {
    let n = s.n();
    let x = build_x(a, &s.tables);
    let mut c = vec![Complex64::new(0.0, 0.0); 2 * n + 1];
    for d in 0..=2 * n {
        let start = s.layout.block_start(d);
        for (k, &w) in s.weights.block(&s.layout, d).iter().enumerate() {
            c[d] += x[start + k] * w as f64;
        }
    }
    c[n] += (n + 1) as f64;
    Polynomial::new(c)
}

/// Dense relaxed system `A x = b` over the `2n` points `z_k` and `1/conj(z_k)`.
///
/// Badly conditioned for all but small `n`; kept as a cross-check.
pub fn dense_system(points: &[Complex64]) -> Result<(DMatrix<Complex64>, DVector<Complex64>)> {
    crate::validate_points(points)?;
    let n = points.len();
    let s = Structure::new(n);
    let all: Vec<Complex64> = points.iter().copied().chain(points.iter().map(|z| 1.0 / z.conj())).collect();
    let cols = s.layout.full_len();
    let mut a = DMatrix::<Complex64>::zeros(2 * n, cols);
    let mut b = DVector::<Complex64>::zeros(2 * n);
    for (row, &z) in all.iter().enumerate() {
        for d in 0..=2 * n {
            let zd = z.powu(d as u32);
            let start = s.layout.block_start(d);
            for (k, &w) in s.weights.block(&s.layout, d).iter().enumerate() {
                a[(row, start + k)] = zd * w as f64;
            }
        }
        b[row] = -z.powu(n as u32) * (n + 1) as f64;
    }
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn weights_n3() {
        let (w, layout) = weight_vectors(3);
        assert_eq!(w.block(&layout, 0), &[1]);
        assert_eq!(w.block(&layout, 1), &[2]);
        assert_eq!(w.block(&layout, 2), &[3, -1, 1]);
        assert_eq!(w.block(&layout, 3), &[-2, 2]);
        assert_eq!(w.block(&layout, 4), &[1, -1, 3]);
        assert_eq!(w.block(&layout, 5), &[2]);
        assert_eq!(w.block(&layout, 6), &[1]);
    }

    #[test]
    fn weights_mirror_outside_middle() {
        for n in 1..=12 {
            let (w, layout) = weight_vectors(n);
            for d in 0..n {
                let lo: Vec<i64> = w.block(&layout, d).to_vec();
                let mut hi: Vec<i64> = w.block(&layout, 2 * n - d).to_vec();
                hi.reverse();
                assert_eq!(lo, hi, "n={n} d={d}");
            }
        }
    }

    #[test]
    fn layout_sizes() {
        for n in 1..=50 {
            let l = DegreeLayout::new(n);
            for d in 0..n {
                assert_eq!(l.block_size(d), 2 * (d / 2) + 1);
                assert_eq!(l.block_size(2 * n - d), l.block_size(d));
            }
            assert_eq!(l.block_size(n), 2 * (n / 2));
            assert_eq!((0..=2 * n).map(|d| l.block_size(d)).sum::<usize>(), n * n + n);
            assert_eq!((0..=n).map(|d| l.block_size(d)).sum::<usize>(), l.p());
        }
    }

    #[test]
    fn degree_of_skips_empty_blocks() {
        // n = 1: block sizes (1, 0, 1)
        let l = DegreeLayout::new(1);
        assert_eq!(l.degree_of(0), 0);
        assert_eq!(l.degree_of(1), 2);
        let l = DegreeLayout::new(3);
        let degs: Vec<usize> = (0..12).map(|i| l.degree_of(i)).collect();
        assert_eq!(degs, vec![0, 1, 2, 2, 2, 3, 3, 4, 4, 4, 5, 6]);
    }

    #[test]
    fn index_vectors_n3() {
        let t = index_vectors(3);
        assert_eq!(t.index, vec![1, 2, 3, 1, 2, 1, 3, 3, 2, 0, 0, 0]);
        assert_eq!(t.conj_index, vec![0, 0, 0, 2, 3, 1, 3, 2, 1, 3, 2, 1]);
        assert_eq!(t.positions, vec![0, 1, 2, 3]);
    }

    #[test]
    fn positions_examples() {
        assert_eq!(coeff_positions(4)[4], 6);
        assert_eq!(coeff_positions(1)[1], 1);
    }

    #[test]
    fn j_positions_hold_single_factor() {
        for n in 1..=20 {
            let t = index_vectors(n);
            let layout = DegreeLayout::new(n);
            let js: Vec<usize> = t.positions[1..].to_vec();
            for pos in 1..=layout.p() {
                let (i, k) = (t.index[pos - 1], t.conj_index[pos - 1]);
                if js.contains(&pos) {
                    assert!(i != 0 && k == 0, "n={n} pos={pos}");
                } else {
                    assert!(i != 0 && k != 0, "n={n} pos={pos}");
                }
            }
        }
    }

    #[test]
    fn build_x_n3() {
        let a = [c(0.3, 0.1), c(-0.2, 0.5), c(0.7, -0.4)];
        let x = build_x(&a, &index_vectors(3));
        let (a1, a2, a3) = (a[0], a[1], a[2]);
        let expected = [
            a1,
            a2,
            a3,
            a1 * a2.conj(),
            a2 * a3.conj(),
            a1 * a1.conj(),
            a3 * a3.conj(),
            a2.conj() * a3,
            a1.conj() * a2,
            a3.conj(),
            a2.conj(),
            a1.conj(),
        ];
        for (u, v) in x.iter().zip(expected.iter()) {
            assert!((u - v).norm() < 1e-15);
        }
        assert!(build_x(&[c(0.0, 0.0); 3], &index_vectors(3)).iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn build_x_mirror_outside_middle() {
        let n = 5;
        let s = Structure::new(n);
        let a: Vec<Complex64> = (0..n).map(|i| c(0.1 * i as f64 - 0.2, 0.3 - 0.07 * i as f64)).collect();
        let x = build_x(&a, &s.tables);
        for d in 0..n {
            let lo = &x[s.layout.block_start(d)..s.layout.block_start(d) + s.layout.block_size(d)];
            let hi_start = s.layout.block_start(2 * n - d);
            let hi = &x[hi_start..hi_start + s.layout.block_size(2 * n - d)];
            for (u, v) in lo.iter().zip(hi.iter().rev()) {
                assert!((u - v.conj()).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn wronskian_n1() {
        let a1 = c(0.3, -0.2);
        let w = wronskian_from_coeffs(&[a1]);
        let expected = [a1, c(2.0, 0.0), a1.conj()];
        for (u, v) in w.coeffs().iter().zip(expected.iter()) {
            assert!((u - v).norm() < 1e-15);
        }
    }

    #[test]
    fn wronskian_at_zero_coeffs() {
        for n in 1..=6 {
            let w = wronskian_from_coeffs(&vec![c(0.0, 0.0); n]);
            assert_eq!(w.coeffs().len(), 2 * n + 1);
            for (j, v) in w.coeffs().iter().enumerate() {
                let expected = if j == n { (n + 1) as f64 } else { 0.0 };
                assert_eq!(*v, c(expected, 0.0));
            }
        }
    }

    #[test]
    fn dense_rows_n3() {
        let pts = [c(0.3, 0.1), c(-0.2, 0.4), c(0.1, -0.5)];
        let (a, b) = dense_system(&pts).unwrap();
        assert_eq!(a.shape(), (6, 12));
        let z = pts[1];
        let pattern = [
            c(1.0, 0.0),
            2.0 * z,
            3.0 * z * z,
            -z * z,
            z * z,
            -2.0 * z.powu(3),
            2.0 * z.powu(3),
            z.powu(4),
            -z.powu(4),
            3.0 * z.powu(4),
            2.0 * z.powu(5),
            z.powu(6),
        ];
        for (k, v) in pattern.iter().enumerate() {
            assert!((a[(1, k)] - v).norm() < 1e-15);
        }
        assert!((b[1] + 4.0 * z.powu(3)).norm() < 1e-15);
    }

    #[test]
    fn dense_rejects_bad_points() {
        assert!(dense_system(&[c(0.1, 0.0), c(0.1, 0.0)]).is_err());
        assert!(dense_system(&[c(0.0, 0.0)]).is_err());
        assert!(dense_system(&[c(1.0, 0.0)]).is_err());
    }
}
