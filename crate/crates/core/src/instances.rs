//! Seeded generators for the three benchmark families.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

const MIN_SEPARATION: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Disk,
    Cluster,
    Circle,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Disk => "disk",
            Family::Cluster => "cluster",
            Family::Circle => "circle",
        })
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "disk" => Ok(Family::Disk),
            "cluster" => Ok(Family::Cluster),
            "circle" => Ok(Family::Circle),
            other => Err(format!("unknown family `{other}`")),
        }
    }
}

/// `r` is ignored by the cluster family; disks accept `0 < r <= 1`, circles `0 < r < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceSpec {
    pub family: Family,
    pub n: usize,
    pub r: f64,
    pub seed: u64,
}

impl InstanceSpec {
    pub fn generate(&self) -> Result<Vec<Complex64>> {
        if self.n == 0 {
            return Err(Error::Empty);
        }
        // disk radii are drawn as r * sqrt(u) with u < 1, so r = 1 still stays inside
        let radius_ok = match self.family {
            Family::Disk => self.r > 0.0 && self.r <= 1.0,
            Family::Circle => self.r > 0.0 && self.r < 1.0,
            Family::Cluster => true,
        };
        if !radius_ok {
            return Err(Error::OutsideDisk { index: 0, modulus: self.r });
        }
        Ok(match self.family {
            Family::Disk => gen_disk(self.n, self.r, self.seed),
            Family::Cluster => gen_cluster(self.n, self.seed),
            Family::Circle => gen_circle(self.n, self.r, self.seed),
        })
    }
}

fn admissible(z: Complex64, taken: &[Complex64]) -> bool {
    z.norm() > 0.0 && z.norm() < 1.0 && taken.iter().all(|w| (z - w).norm() > MIN_SEPARATION)
}

fn draw_distinct(n: usize, seed: u64, mut draw: impl FnMut(&mut ChaCha8Rng) -> Complex64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let z = draw(&mut rng);
        if admissible(z, &out) {
            out.push(z);
        }
    }
    out
}

/// Uniform by area in the disk of radius `r`.
pub fn gen_disk(n: usize, r: f64, seed: u64) -> Vec<Complex64> {
    draw_distinct(n, seed, |rng| Complex64::from_polar(r * rng.random::<f64>().sqrt(), TAU * rng.random::<f64>()))
}

/// `(1 + i)/3 + (N + iN)/4`, rejecting draws outside the disk.
pub fn gen_cluster(n: usize, seed: u64) -> Vec<Complex64> {
    let center = Complex64::new(1.0, 1.0) / 3.0;
    draw_distinct(n, seed, |rng| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        center + 0.25 * Complex64::new(re, im)
    })
}

/// Radius `r`, angles `2 pi k / n` jittered uniformly by at most `jitter`.
pub fn gen_circle_with_jitter(n: usize, r: f64, jitter: f64, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|k| {
            let offset = if jitter > 0.0 { rng.random_range(-jitter..jitter) } else { 0.0 };
            Complex64::from_polar(r, TAU * k as f64 / n as f64 + offset)
        })
        .collect()
}

/// Jitter `pi / (4n)` keeps neighbouring angles at least `3 pi / (2n)` apart.
pub fn gen_circle(n: usize, r: f64, seed: u64) -> Vec<Complex64> {
    gen_circle_with_jitter(n, r, PI / (4.0 * n as f64), seed)
}

pub fn generate(spec: &InstanceSpec) -> Result<Vec<Complex64>> {
    spec.generate()
}
