//! Gaunt coupling coefficients for complex and real (Ambisonics, ACN/N3D)
//! spherical harmonics, coefficient-domain spherical multiplication, and the
//! spherical-acoustics operations built on them.

pub mod acoustics;
pub mod basis;
pub mod error;
pub mod gaunt;
pub mod quadrature;
pub mod sh;
pub mod wigner;

pub use error::{Error, Result};

/// Spherical harmonic basis of a coefficient vector or coupling matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    Complex,
    Real,
}
