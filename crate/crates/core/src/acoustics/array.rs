//! Array transfer-function modelling, SH-domain rotations and least-squares
//! encoding filters.

use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64;
use rayon::prelude::*;

use super::coeff_order;
use super::field::translation_kernel;
use crate::error::{Error, Result};
use crate::gaunt::GauntTable;
use crate::quadrature::QuadratureGrid;
use crate::sh::{coeff_count, real_sh_vector, Direction};
use crate::Basis;

pub const ROTATION_TOLERANCE: f64 = 1e-9;

/// Condition number above which an unregularized system counts as singular.
pub const MAX_CONDITION: f64 = 1e12;

/// Checks that `r` is orthogonal with determinant +1.
pub fn validate_rotation(r: &Matrix3<f64>) -> Result<()> {
    let orthogonality = (r * r.transpose() - Matrix3::identity()).abs().max();
    let det = r.determinant();
    if !(orthogonality <= ROTATION_TOLERANCE) || !((det - 1.0).abs() <= ROTATION_TOLERANCE) {
        return Err(Error::InvalidRotation { orthogonality, det });
    }
    Ok(())
}

/// Rotation by `angle` about the unit axis `axis` (right-hand rule).
pub fn axis_angle(axis: [f64; 3], angle: f64) -> Matrix3<f64> {
    let a = nalgebra::Unit::new_normalize(nalgebra::Vector3::from(axis));
    *nalgebra::Rotation3::from_axis_angle(&a, angle).matrix()
}

/// Block-diagonal matrix `M` with `r(R u) = M r(u)`, one orthogonal block per
/// degree.
#[derive(Debug, Clone, PartialEq)]
pub struct ShRotation {
    blocks: Vec<DMatrix<f64>>,
}

impl ShRotation {
    pub fn order(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn block(&self, n: usize) -> &DMatrix<f64> {
        &self.blocks[n]
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let size = coeff_count(self.order());
        let mut d = DMatrix::zeros(size, size);
        for (n, b) in self.blocks.iter().enumerate() {
            d.view_mut((n * n, n * n), (2 * n + 1, 2 * n + 1))
                .copy_from(b);
        }
        d
    }

    /// `M v`.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.blocks
            .iter()
            .enumerate()
            .flat_map(|(n, b)| {
                let off = n * n;
                (0..2 * n + 1).map(move |i| {
                    (0..2 * n + 1)
                        .map(|j| v[off + j] * b[(i, j)])
                        .sum::<Complex64>()
                })
            })
            .collect()
    }

    /// `M^T v`, so that `v^T M = (M^T v)^T`.
    pub fn apply_transpose(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.blocks
            .iter()
            .enumerate()
            .flat_map(|(n, b)| {
                let off = n * n;
                (0..2 * n + 1).map(move |i| {
                    (0..2 * n + 1)
                        .map(|j| v[off + j] * b[(j, i)])
                        .sum::<Complex64>()
                })
            })
            .collect()
    }
}

/// SH rotation matrix by projection: `M = int r(R u) r(u)^T du` on a grid
/// exact for degree `2N`.
pub fn sh_rotation_matrix(r: &Matrix3<f64>, order: usize) -> Result<ShRotation> {
    validate_rotation(r)?;
    let grid = QuadratureGrid::new(2 * order);
    let mut blocks: Vec<DMatrix<f64>> = (0..=order)
        .map(|n| DMatrix::zeros(2 * n + 1, 2 * n + 1))
        .collect();
    for (node, w) in grid.nodes().iter().zip(grid.weights()) {
        let u = nalgebra::Vector3::from(node.unit_vector());
        let ru = Direction::from_cartesian((r * u).into());
        let a = real_sh_vector(order, &ru);
        let b = real_sh_vector(order, node);
        for (n, blk) in blocks.iter_mut().enumerate() {
            let off = n * n;
            for i in 0..2 * n + 1 {
                let wa = w * a[off + i];
                for j in 0..2 * n + 1 {
                    blk[(i, j)] += wa * b[off + j];
                }
            }
        }
    }
    Ok(ShRotation { blocks })
}

/// One sensor: position (m), orientation, and real-basis directivity
/// coefficients in its own frame.
#[derive(Debug, Clone)]
pub struct Sensor {
    position: [f64; 3],
    orientation: Matrix3<f64>,
    directivity: Vec<Complex64>,
}

impl Sensor {
    pub fn new(
        position: [f64; 3],
        orientation: Matrix3<f64>,
        directivity: Vec<Complex64>,
    ) -> Result<Self> {
        validate_rotation(&orientation)?;
        coeff_order(&directivity)?;
        Ok(Sensor {
            position,
            orientation,
            directivity,
        })
    }

    pub fn position(&self) -> [f64; 3] {
        self.position
    }

    pub fn orientation(&self) -> &Matrix3<f64> {
        &self.orientation
    }

    pub fn directivity(&self) -> &[Complex64] {
        &self.directivity
    }

    pub fn directivity_order(&self) -> usize {
        crate::sh::order_of_len(self.directivity.len()).expect("validated in new")
    }
}

#[derive(Debug, Clone, Default)]
pub struct ArrayModel {
    pub sensors: Vec<Sensor>,
}

impl ArrayModel {
    pub fn new(sensors: Vec<Sensor>) -> Self {
        ArrayModel { sensors }
    }

    pub fn len(&self) -> usize {
        self.sensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sensors.is_empty()
    }
}

/// Real-basis coefficients of `h(u) = d(R^-1 u) exp(i k u.x)` for one sensor,
/// truncated to `out_order` (at most `N' + expansion`).
pub fn array_sensor_coeffs(
    sensor: &Sensor,
    k: f64,
    expansion: usize,
    out_order: usize,
    table: &GauntTable,
) -> Result<Vec<Complex64>> {
    let nd = sensor.directivity_order();
    table.require(Basis::Real, nd, expansion)?;
    if out_order > nd + expansion {
        return Err(Error::TargetOutOfRange {
            n: out_order as u32,
            m: 0,
            n1: nd,
            n2: expansion,
        });
    }
    // d(R^-1 u) = d^T M(R^T) r(u)
    let rot = sh_rotation_matrix(&sensor.orientation.transpose(), nd)?;
    let rotated = rot.apply_transpose(&sensor.directivity);
    let kernel = translation_kernel(k, sensor.position, expansion);
    Ok((0..coeff_count(out_order))
        .map(|q| table.matrix_acn(q).bilinear(&rotated, &kernel))
        .collect())
}

/// ATF coefficient matrix `H`, one row per sensor, so that `h(u) = H r(u)`.
pub fn array_coeff_matrix(
    model: &ArrayModel,
    k: f64,
    expansion: usize,
    out_order: usize,
    table: &GauntTable,
) -> Result<DMatrix<Complex64>> {
    let rows = model
        .sensors
        .par_iter()
        .map(|s| array_sensor_coeffs(s, k, expansion, out_order, table))
        .collect::<Result<Vec<_>>>()?;
    let cols = coeff_count(out_order);
    Ok(DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}

/// Regularized least-squares encoder `E = H_L^H (H H^H + lambda^2 I)^-1`
/// mapping `Q` sensor signals to real-basis coefficients of order `L`.
pub fn encoding_filters_ls(
    h: &DMatrix<Complex64>,
    target_order: usize,
    lambda: f64,
) -> Result<DMatrix<Complex64>> {
    let n = crate::sh::order_of_len(h.ncols()).ok_or_else(|| {
        Error::Dimension(format!(
            "{} columns is not a square coefficient count",
            h.ncols()
        ))
    })?;
    if target_order > n {
        return Err(Error::OrderMismatch {
            left: target_order,
            right: n,
        });
    }
    if !(lambda >= 0.0) {
        return Err(Error::Dimension(format!(
            "regularization {lambda} must be non-negative"
        )));
    }
    let q = h.nrows();
    let mut a = h * h.adjoint();
    for i in 0..q {
        a[(i, i)] += lambda * lambda;
    }
    if lambda == 0.0 {
        let eig = a.clone().symmetric_eigenvalues();
        let max = eig.max();
        let min = eig.min();
        let condition = if min > 0.0 { max / min } else { f64::INFINITY };
        if condition > MAX_CONDITION {
            return Err(Error::Singular { condition });
        }
    }
    let chol = a.cholesky().ok_or(Error::Singular {
        condition: f64::INFINITY,
    })?;
    let hl = h.columns(0, coeff_count(target_order)).into_owned();
    // A is Hermitian, so (A^-1 H_L)^H = H_L^H A^-1
    Ok(chol.solve(&hl).adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rejects_non_rotations() {
        let mut r = Matrix3::identity();
        r[(2, 2)] = -1.0;
        assert!(matches!(
            validate_rotation(&r),
            Err(Error::InvalidRotation { .. })
        ));
        assert!(validate_rotation(&(Matrix3::identity() * 1.1)).is_err());
        assert!(sh_rotation_matrix(&r, 2).is_err());
    }

    #[test]
    fn identity_rotation() {
        let m = sh_rotation_matrix(&Matrix3::identity(), 4)
            .unwrap()
            .to_dense();
        assert!((m - DMatrix::identity(25, 25)).abs().max() < 1e-13);
    }

    #[test]
    fn half_turn_about_z() {
        // phi -> phi + pi flips the sign of every odd-|m| harmonic
        let m = sh_rotation_matrix(&axis_angle([0.0, 0.0, 1.0], PI), 3).unwrap();
        for n in 0..=3usize {
            let b = m.block(n);
            for i in 0..2 * n + 1 {
                let deg = i as i32 - n as i32;
                let want = if deg.abs() % 2 == 0 { 1.0 } else { -1.0 };
                for j in 0..2 * n + 1 {
                    let expect = if i == j { want } else { 0.0 };
                    assert!((b[(i, j)] - expect).abs() < 1e-13, "n={n} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn ideal_pickup_encoder() {
        let h = DMatrix::<Complex64>::identity(9, 9);
        let e = encoding_filters_ls(&h, 1, 0.0).unwrap();
        assert_eq!(e.shape(), (4, 9));
        let want = DMatrix::<Complex64>::identity(4, 9);
        assert!((e - want).iter().all(|c| c.norm() < 1e-14));
    }

    #[test]
    fn singular_system_reported() {
        let h = DMatrix::<Complex64>::from_fn(2, 4, |_, j| Complex64::new(j as f64, 0.0));
        assert!(matches!(
            encoding_filters_ls(&h, 1, 0.0),
            Err(Error::Singular { .. })
        ));
        assert!(encoding_filters_ls(&h, 1, 0.1).is_ok());
    }
}
