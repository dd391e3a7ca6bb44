use crate::Basis;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("argument {x} outside the Legendre domain [-1, 1]")]
    LegendreDomain { x: f64 },

    #[error("inclination {theta} outside [0, pi]")]
    InvalidInclination { theta: f64 },

    #[error(
        "coefficient vector of length {len} does not match order {order} (expected {expected})"
    )]
    LengthMismatch {
        len: usize,
        order: usize,
        expected: usize,
    },

    #[error("basis mismatch: expected {expected:?}, got {found:?}")]
    BasisMismatch { expected: Basis, found: Basis },

    #[error("order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("function is not real-valued: imaginary residue {residue:e} exceeds {tolerance:e}")]
    NotRealValued { residue: f64, tolerance: f64 },

    #[error("quadrature grid of degree {degree} cannot integrate degree {required} exactly")]
    UnderResolvedGrid { degree: usize, required: usize },

    #[error("target ({n}, {m}) out of range for factor orders ({n1}, {n2})")]
    TargetOutOfRange {
        n: u32,
        m: i32,
        n1: usize,
        n2: usize,
    },

    #[error("real Gaunt matrix ({n}, {m}) has imaginary residue {residue:e}")]
    ImaginaryResidue { n: u32, m: i32, residue: f64 },

    #[error("Gaunt table ({basis:?}, {n1}, {n2}) too small: need {basis_needed:?} with orders ({need1}, {need2})")]
    TableTooSmall {
        basis: Basis,
        n1: usize,
        n2: usize,
        basis_needed: Basis,
        need1: usize,
        need2: usize,
    },

    #[error("table file: {0}")]
    Format(String),

    #[error("table file checksum mismatch: stored {stored:016x}, computed {computed:016x}")]
    Checksum { stored: u64, computed: u64 },

    #[error("matrix is not a proper rotation (orthogonality error {orthogonality:e}, det {det})")]
    InvalidRotation { orthogonality: f64, det: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("linear system is singular (condition number {condition:e})")]
    Singular { condition: f64 },

    #[error("coefficient vector has zero energy")]
    ZeroEnergy,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
