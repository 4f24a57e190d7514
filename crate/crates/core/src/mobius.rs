//! Disk automorphisms used to mean-center the data, and pulling a solved product back.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::poly::{Polynomial, TRIM_RTOL};
use crate::structure::{denominator, numerator, wronskian_from_coeffs};

/// Largest offset added to the mean when it lands on a critical point.
pub const CENTER_PERTURBATION: f64 = 1e-3;
pub const CENTER_ATTEMPTS: usize = 100;
const COLLISION_TOL: f64 = 1e-12;
const PIVOT_TOL: f64 = 1e-13;

/// `b(z) = (z - z_star) / (1 - conj(z_star) z)` with `|z_star| < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskAutomorphism {
    z_star: Complex64,
}

impl DiskAutomorphism {
    pub fn new(z_star: Complex64) -> Result<Self> {
        if !(z_star.norm() < 1.0) {
            return Err(Error::OutsideDisk { index: 0, modulus: z_star.norm() });
        }
        Ok(Self { z_star })
    }

    pub fn identity() -> Self {
        Self { z_star: Complex64::new(0.0, 0.0) }
    }

    pub fn z_star(&self) -> Complex64 {
        self.z_star
    }

    pub fn forward(&self, z: Complex64) -> Result<Complex64> {
        let den = 1.0 - self.z_star.conj() * z;
        if den.norm() == 0.0 {
            return Err(Error::Pole(format!("{z}")));
        }
        Ok((z - self.z_star) / den)
    }

    pub fn inverse(&self, w: Complex64) -> Result<Complex64> {
        let den = 1.0 + self.z_star.conj() * w;
        if den.norm() == 0.0 {
            return Err(Error::Pole(format!("{w}")));
        }
        Ok((w + self.z_star) / den)
    }
}

/// Automorphism centered at the mean of `points`, nudged by a seeded offset of modulus
/// at most [`CENTER_PERTURBATION`] whenever the mean hits one of the points.
pub fn centering(points: &[Complex64], seed: u64) -> Result<DiskAutomorphism> {
    crate::validate_points_inner(points, false)?;
    let mean = points.iter().sum::<Complex64>() / points.len() as f64;
    let admissible = |c: Complex64| c.norm() < 1.0 && points.iter().all(|z| (z - c).norm() > COLLISION_TOL);
    if admissible(mean) {
        return Ok(DiskAutomorphism { z_star: mean });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..CENTER_ATTEMPTS {
        let radius = CENTER_PERTURBATION * rng.random::<f64>().sqrt();
        let angle = rng.random::<f64>() * std::f64::consts::TAU;
        let candidate = mean + Complex64::from_polar(radius, angle);
        if admissible(candidate) {
            return Ok(DiskAutomorphism { z_star: candidate });
        }
    }
    Err(Error::NoCenter(CENTER_ATTEMPTS))
}

/// `B(z) = (a_1 z + ... + a_n z^n + z^{n+1}) / (1 + conj(a_n) z + ... + conj(a_1) z^n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeProduct {
    pub a: Vec<Complex64>,
}

impl BlaschkeProduct {
    pub fn new(a: Vec<Complex64>) -> Self {
        Self { a }
    }

    /// Number of prescribed critical points; the product has degree `n + 1`.
    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn numerator(&self) -> Polynomial {
        numerator(&self.a)
    }

    pub fn denominator(&self) -> Polynomial {
        denominator(&self.a)
    }

    pub fn wronskian(&self) -> Polynomial {
        wronskian_from_coeffs(&self.a)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.numerator().eval(z) / self.denominator().eval(z)
    }

    /// `B'(z) = W(z) / q(z)^2`.
    pub fn derivative_at(&self, z: Complex64) -> Complex64 {
        let q = self.denominator().eval(z);
        self.wronskian().eval(z) / (q * q)
    }

    /// Zeros of the numerator: `0` followed by the roots of `a_1 + a_2 z + ... + z^n`.
    pub fn zeros(&self) -> Result<Vec<Complex64>> {
        let mut out = vec![Complex64::new(0.0, 0.0)];
        let mut c = self.a.clone();
        c.push(Complex64::new(1.0, 0.0));
        out.extend(Polynomial::new(c).roots(TRIM_RTOL)?);
        Ok(out)
    }
}

/// Given `B_tilde` solving the problem for `b(z_j)`, returns `b_p . B_tilde . b` in normalized
/// form, which has critical points `z_j`.
///
/// Works in coefficient space: numerator and denominator of `B_tilde(b(z))` are cleared by
/// `(1 - conj(z_star) z)^{n+1}`, `b_p` becomes a linear combination of the two cleared
/// polynomials, and the result is scaled to a monic numerator and unit constant denominator.
pub fn postcompose_and_pullback(b_tilde: &BlaschkeProduct, aut: &DiskAutomorphism) -> Result<BlaschkeProduct> {
    let n = b_tilde.n();
    let degree = n + 1;
    let mut p = b_tilde.numerator().into_coeffs();
    let mut q = b_tilde.denominator().into_coeffs();
    q.resize(degree + 1, Complex64::new(0.0, 0.0));
    p.resize(degree + 1, Complex64::new(0.0, 0.0));

    let zs = aut.z_star();
    let lin = Polynomial::new(vec![-zs, Complex64::new(1.0, 0.0)]);
    let den = Polynomial::new(vec![Complex64::new(1.0, 0.0), -zs.conj()]);
    // lin_pow[k] = (z - z_star)^k, den_pow[k] = (1 - conj(z_star) z)^k
    let mut lin_pow = vec![Polynomial::new(vec![Complex64::new(1.0, 0.0)])];
    let mut den_pow = vec![Polynomial::new(vec![Complex64::new(1.0, 0.0)])];
    for k in 1..=degree {
        lin_pow.push(lin_pow[k - 1].mul(&lin));
        den_pow.push(den_pow[k - 1].mul(&den));
    }
    let compose = |coeffs: &[Complex64]| {
        let mut acc = Polynomial::new(vec![Complex64::new(0.0, 0.0); degree + 1]);
        for (k, &ck) in coeffs.iter().enumerate() {
            if ck != Complex64::new(0.0, 0.0) {
                acc = acc.add(&lin_pow[k].mul(&den_pow[degree - k]).scale(ck));
            }
        }
        acc
    };
    let pc = compose(&p);
    let qc = compose(&q);

    let q0 = qc.coeffs()[0];
    let scale = pc.max_abs_coeff().max(qc.max_abs_coeff());
    if q0.norm() < PIVOT_TOL * scale {
        return Err(Error::DegenerateComposition(q0.norm() / scale));
    }
    let c0 = pc.coeffs()[0] / q0;
    let num = pc.sub(&qc.scale(c0));
    let lead = num.coeffs()[degree];
    if lead.norm() < PIVOT_TOL * scale {
        return Err(Error::DegenerateComposition(lead.norm() / scale));
    }
    let a = (1..=n).map(|k| num.coeffs()[k] / lead).collect();
    Ok(BlaschkeProduct::new(a))
}
