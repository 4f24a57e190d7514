use thiserror::Error;

/// Errors raised by the construction and verification routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("sampling grid of size {grid} cannot resolve a polynomial of degree {degree}")]
    Aliasing { grid: usize, degree: usize },

    #[error("cannot take roots of the zero polynomial")]
    ZeroPolynomial,

    #[error("root finder failed: {0}")]
    RootFinding(String),

    #[error("duplicate critical points at indices {0} and {1}")]
    DuplicatePoints(usize, usize),

    #[error("critical point {0} is zero")]
    ZeroPoint(usize),

    #[error("critical point {index} has modulus {modulus} >= 1")]
    OutsideDisk { index: usize, modulus: f64 },

    #[error("critical point {0} is not finite")]
    NonFinite(usize),

    #[error("no critical points given")]
    Empty,

    #[error("middle coefficient of the sampled Wronskian vanishes ({0:e})")]
    DegenerateScaling(f64),

    #[error("no admissible centering point found after {0} attempts")]
    NoCenter(usize),

    #[error("automorphism pole at {0}")]
    Pole(String),

    #[error("degenerate composition: pivot {0:e} below threshold")]
    DegenerateComposition(f64),

    #[error("expected {expected} critical points inside the disk, found {found}")]
    RootCountMismatch { expected: usize, found: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

pub type Result<T> = std::result::Result<T, Error>;
