//! Plane-wave expansions, translation, pressure, intensity and energy vector.

use std::f64::consts::{E, PI};

use num_complex::Complex64;

use super::bessel::spherical_jn;
use super::{coeff_order, polar, Medium};
use crate::error::{Error, Result};
use crate::gaunt::GauntTable;
use crate::sh::{coeff_count, real_sh_vector, Direction, ShIndex};
use crate::Basis;

/// `i^n`.
pub fn i_pow(n: usize) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Diagonal of `J_N(kd)`, entry `q` equal to `4 pi i^n j_n(kd)` with `n`
/// the degree of `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialDiag {
    order: usize,
    kd: f64,
    entries: Vec<Complex64>,
}

impl RadialDiag {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn kd(&self) -> f64 {
        self.kd
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Per-degree factors `4 pi i^n j_n(kd)`.
    pub fn by_degree(&self) -> Vec<Complex64> {
        (0..=self.order).map(|n| self.entries[n * n]).collect()
    }
}

pub fn radial_diag(order: usize, k: f64, d: f64) -> RadialDiag {
    let kd = k * d;
    let j = spherical_jn(order, kd);
    let entries = (0..coeff_count(order))
        .map(|q| {
            let n = ShIndex::from_acn(q).n as usize;
            i_pow(n) * (4.0 * PI * j[n])
        })
        .collect();
    RadialDiag { order, kd, entries }
}

/// The truncation rule `ceil(e kd / 2)`.
pub fn truncation_order(kd: f64) -> usize {
    (E * kd / 2.0).ceil().max(0.0) as usize
}

/// Worst-case plane-wave truncation error target of [`default_expansion_order`].
pub const EXPANSION_TOLERANCE: f64 = 1e-4;

/// Bound on `|exp(i k u.x) - truncated expansion|` over all directions:
/// `sum_{n > order} (2n+1) |j_n(kd)|`.
pub fn expansion_tail_bound(kd: f64, order: usize) -> f64 {
    let top = order.max(truncation_order(kd)) + 40;
    let j = spherical_jn(top, kd);
    (order + 1..=top)
        .map(|n| (2 * n + 1) as f64 * j[n].abs())
        .sum()
}

/// Default expansion order: the truncation rule plus a margin of two, raised
/// where needed (small `kd`) until the tail bound is at most
/// [`EXPANSION_TOLERANCE`].
pub fn default_expansion_order(kd: f64) -> usize {
    let mut order = truncation_order(kd) + 2;
    let top = order + 40;
    let j = spherical_jn(top, kd);
    let mut tail: f64 = (order + 1..=top)
        .map(|n| (2 * n + 1) as f64 * j[n].abs())
        .sum();
    while tail > EXPANSION_TOLERANCE && order < top {
        order += 1;
        tail -= (2 * order + 1) as f64 * j[order].abs();
    }
    order
}

/// Factors of the truncated plane-wave expansion
/// `exp(i k u.x) ~ r(u)^T (J r(x_hat))`: returns `r(u)` and `J r(x_hat)`.
pub fn plane_wave_coeffs(
    u: &Direction,
    k: f64,
    x: [f64; 3],
    order: usize,
) -> (Vec<f64>, Vec<Complex64>) {
    (real_sh_vector(order, u), translation_kernel(k, x, order))
}

/// `J_N(kd) r_N(x_hat)`: the real-basis coefficients of `u -> exp(i k u.x)`.
pub fn translation_kernel(k: f64, x: [f64; 3], order: usize) -> Vec<Complex64> {
    let (dir, d) = polar(x);
    let j = radial_diag(order, k, d);
    real_sh_vector(order, &dir)
        .into_iter()
        .zip(j.entries())
        .map(|(r, jq)| jq * r)
        .collect()
}

/// Coefficients of `a(u) exp(i k u.x)` up to order `N + expansion`, from the
/// real-basis coefficients `a` of order `N`.
pub fn translate_coeffs(
    a: &[Complex64],
    k: f64,
    x: [f64; 3],
    expansion: usize,
    table: &GauntTable,
) -> Result<Vec<Complex64>> {
    let n = coeff_order(a)?;
    table.require(Basis::Real, n, expansion)?;
    let kernel = translation_kernel(k, x, expansion);
    Ok((0..coeff_count(n + expansion))
        .map(|q| table.matrix_acn(q).bilinear(a, &kernel))
        .collect())
}

/// Pressure `a^T J r(x_hat)` at `x`.
pub fn pressure_at(a: &[Complex64], k: f64, x: [f64; 3]) -> Result<Complex64> {
    let n = coeff_order(a)?;
    let kernel = translation_kernel(k, x, n);
    Ok(a.iter().zip(&kernel).map(|(a, b)| a * b).sum())
}

const FIRST_ORDER_XYZ: [i32; 3] = [1, -1, 0];

/// Particle velocity at `x`, components `(x, y, z)`.
pub fn velocity_at(
    a: &[Complex64],
    k: f64,
    x: [f64; 3],
    expansion: usize,
    medium: Medium,
    table: &GauntTable,
) -> Result<[Complex64; 3]> {
    let n = coeff_order(a)?;
    table.require(Basis::Real, n, expansion)?;
    let kernel = translation_kernel(k, x, expansion);
    let scale = -(4.0 * PI / 3.0).sqrt() / (medium.sound_speed * medium.density);
    Ok(FIRST_ORDER_XYZ.map(|m| match table.matrix(1, m) {
        Some(f) => f.bilinear(a, &kernel) * scale,
        None => Complex64::new(0.0, 0.0),
    }))
}

/// Complex intensity `p^* v / 2` at `x`. The real part is the active
/// intensity.
pub fn intensity_at(
    a: &[Complex64],
    k: f64,
    x: [f64; 3],
    expansion: usize,
    medium: Medium,
    table: &GauntTable,
) -> Result<[Complex64; 3]> {
    let p = pressure_at(a, k, x)?;
    let v = velocity_at(a, k, x, expansion, medium, table)?;
    Ok(v.map(|c| 0.5 * p.conj() * c))
}

/// Energy vector `int |a|^2 u / int |a|^2` from real-basis coefficients.
pub fn energy_vector(a: &[Complex64], table: &GauntTable) -> Result<[f64; 3]> {
    let n = coeff_order(a)?;
    table.require(Basis::Real, n, n)?;
    let energy: f64 = a.iter().map(|c| c.norm_sqr()).sum();
    if energy == 0.0 {
        return Err(Error::ZeroEnergy);
    }
    let scale = (4.0 * PI / 3.0).sqrt() / energy;
    Ok(FIRST_ORDER_XYZ.map(|m| match table.matrix(1, m) {
        // F is real symmetric, so the form is real
        Some(f) => f.hermitian_form(a, a).re * scale,
        None => 0.0,
    }))
}
