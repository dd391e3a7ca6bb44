//! Spatial covariance matrices of isotropic and anisotropic diffuse fields.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::field::translation_kernel;
use crate::error::{Error, Result};
use crate::gaunt::{multiply_coeffs, GauntTable};
use crate::quadrature::QuadratureGrid;
use crate::sh::{coeff_count, order_of_len, real_sh_vector};
use crate::Basis;

/// Real-basis coefficients of a directional power spectral density.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionalPsd {
    order: usize,
    coeffs: Vec<f64>,
}

impl DirectionalPsd {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        let order = order_of_len(coeffs.len()).ok_or_else(|| {
            Error::Dimension(format!(
                "{} is not a square coefficient count",
                coeffs.len()
            ))
        })?;
        Ok(DirectionalPsd { order, coeffs })
    }

    /// Constant density `pd`.
    pub fn isotropic(pd: f64) -> Self {
        DirectionalPsd {
            order: 0,
            coeffs: vec![(4.0 * PI).sqrt() * pd],
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Smallest value of the density on a grid of band `max_band`. Negative
    /// values indicate truncation undershoot; callers may warn on them.
    pub fn min_on_grid(&self, max_band: usize) -> f64 {
        let grid = QuadratureGrid::new(max_band.max(self.order));
        grid.nodes()
            .iter()
            .map(|d| {
                real_sh_vector(self.order, d)
                    .iter()
                    .zip(&self.coeffs)
                    .map(|(r, p)| r * p)
                    .sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// `sum_q c_q F^q_{N,N}` over targets `q` with degree at most `2N`; higher
/// targets have all-zero `(N, N)` blocks.
fn weighted_gaunt_sum(
    c: &[Complex64],
    order: usize,
    table: &GauntTable,
) -> Result<DMatrix<Complex64>> {
    table.require(Basis::Real, order, order)?;
    let size = coeff_count(order);
    let mut s = DMatrix::zeros(size, size);
    let targets = c.len().min(coeff_count(2 * order));
    for (q, &cq) in c.iter().enumerate().take(targets) {
        if cq == Complex64::new(0.0, 0.0) {
            continue;
        }
        for e in table.matrix_acn(q).entries() {
            let (r, l) = (e.row as usize, e.col as usize);
            if r < size && l < size {
                s[(r, l)] += cq * e.value;
            }
        }
    }
    Ok(s)
}

fn to_complex(v: &[f64]) -> Vec<Complex64> {
    v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

/// `P_d I`.
pub fn scm_isotropic_field(pd: f64, order: usize) -> DMatrix<Complex64> {
    DMatrix::identity(coeff_count(order), coeff_count(order)) * Complex64::new(pd, 0.0)
}

/// `P_d H H^H`.
pub fn scm_array_isotropic(h: &DMatrix<Complex64>, pd: f64) -> DMatrix<Complex64> {
    h * h.adjoint() * Complex64::new(pd, 0.0)
}

/// `sum p_q F^q_{N,N}`.
pub fn scm_anisotropic_field(
    p: &DirectionalPsd,
    order: usize,
    table: &GauntTable,
) -> Result<DMatrix<Complex64>> {
    weighted_gaunt_sum(&to_complex(&p.coeffs), order, table)
}

/// `H (sum p_q F^q) H^H`.
pub fn scm_array_anisotropic(
    h: &DMatrix<Complex64>,
    p: &DirectionalPsd,
    table: &GauntTable,
) -> Result<DMatrix<Complex64>> {
    let order = order_of_len(h.ncols()).ok_or_else(|| {
        Error::Dimension(format!(
            "{} columns is not a square coefficient count",
            h.ncols()
        ))
    })?;
    let s = scm_anisotropic_field(p, order, table)?;
    Ok(h * s * h.adjoint())
}

/// Cross-covariance `E[d(0) d(x)^H]` of isotropic diffuse coefficients at the
/// origin and at `x`, with the plane-wave factor expanded to `expansion`.
pub fn scm_spaced_isotropic(
    pd: f64,
    k: f64,
    x: [f64; 3],
    order: usize,
    expansion: usize,
    table: &GauntTable,
) -> Result<DMatrix<Complex64>> {
    let c = spaced_kernel(k, x, expansion);
    Ok(weighted_gaunt_sum(&c, order, table)? * Complex64::new(pd, 0.0))
}

/// Anisotropic counterpart of [`scm_spaced_isotropic`]. The product of the
/// density and the plane-wave factor is formed in the coefficient domain, so
/// `table` must cover factor orders `(max(expansion, N), max(order(p), N))`.
pub fn scm_spaced_anisotropic(
    p: &DirectionalPsd,
    k: f64,
    x: [f64; 3],
    order: usize,
    expansion: usize,
    table: &GauntTable,
) -> Result<DMatrix<Complex64>> {
    let c = spaced_kernel(k, x, expansion);
    let h = multiply_coeffs(&c, &to_complex(&p.coeffs), table)?;
    weighted_gaunt_sum(&h, order, table)
}

/// Coefficients of `exp(-i k u.x)`: `4 pi i^n j_n(kd) R_nm(-x_hat)`.
fn spaced_kernel(k: f64, x: [f64; 3], expansion: usize) -> Vec<Complex64> {
    translation_kernel(k, [-x[0], -x[1], -x[2]], expansion)
}
