//! Spherical acoustics in the real (ACN/N3D) basis: translation, intensity,
//! windowing, array modelling and diffuse-field covariances.
//!
//! Sound-field coefficient vectors are complex slices in ACN order. Every
//! operation takes an immutable real-basis [`GauntTable`](crate::gaunt::GauntTable)
//! large enough for the orders involved and reports
//! [`Error::TableTooSmall`] otherwise.

pub mod array;
pub mod bessel;
pub mod diffuse;
pub mod field;
pub mod window;

pub use array::{
    array_coeff_matrix, array_sensor_coeffs, axis_angle, encoding_filters_ls, sh_rotation_matrix,
    validate_rotation, ArrayModel, Sensor, ShRotation,
};
pub use bessel::spherical_jn;
pub use diffuse::{
    scm_anisotropic_field, scm_array_anisotropic, scm_array_isotropic, scm_isotropic_field,
    scm_spaced_anisotropic, scm_spaced_isotropic, DirectionalPsd,
};
pub use field::{
    default_expansion_order, energy_vector, expansion_tail_bound, intensity_at, plane_wave_coeffs,
    pressure_at, radial_diag, translate_coeffs, translation_kernel, truncation_order, velocity_at,
    RadialDiag,
};
pub use window::{apply_window, axisymmetric_pattern, window_matrix, BinauralBeamformer};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sh::{order_of_len, Direction};

/// Propagation medium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Medium {
    /// Speed of sound, m/s.
    pub sound_speed: f64,
    /// Density, kg/m^3.
    pub density: f64,
}

impl Default for Medium {
    fn default() -> Self {
        Medium {
            sound_speed: 343.0,
            density: 1.2,
        }
    }
}

/// Direction and length of `x`. The zero vector maps to `+z` with length 0.
pub fn polar(x: [f64; 3]) -> (Direction, f64) {
    let d = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    (Direction::from_cartesian(x), d)
}

fn coeff_order(v: &[Complex64]) -> Result<usize> {
    order_of_len(v.len())
        .ok_or_else(|| Error::Dimension(format!("{} is not a square coefficient count", v.len())))
}
