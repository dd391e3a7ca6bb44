//! Spherical windowing and combined beamforming / binaural decoding.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::coeff_order;
use crate::error::{Error, Result};
use crate::gaunt::GauntTable;
use crate::sh::{coeff_count, real_sh_vector, Direction};
use crate::Basis;

/// Coefficients of an axisymmetric pattern `sum_n c_n sum_m R_nm(u0) R_nm(u)`
/// centred at `u0`.
pub fn axisymmetric_pattern(per_degree: &[f64], u0: &Direction) -> Vec<f64> {
    let Some(order) = per_degree.len().checked_sub(1) else {
        return Vec::new();
    };
    let r = real_sh_vector(order, u0);
    let mut out = Vec::with_capacity(r.len());
    for (n, c) in per_degree.iter().enumerate() {
        out.extend(r[n * n..(n + 1) * (n + 1)].iter().map(|v| c * v));
    }
    out
}

/// Window matrix `W` with `a_out^T = a^T W`: column `q` is `F^q w` over the
/// rows of the input order.
///
/// The output order is `N + order(w)`, or `N` with `truncate`, which keeps
/// the channel count at the price of an inexact product.
pub fn window_matrix(
    w: &[Complex64],
    input_order: usize,
    truncate: bool,
    table: &GauntTable,
) -> Result<DMatrix<Complex64>> {
    let nw = coeff_order(w)?;
    table.require(Basis::Real, input_order, nw)?;
    let rows = coeff_count(input_order);
    let out_order = if truncate {
        input_order
    } else {
        input_order + nw
    };
    let cols = coeff_count(out_order);
    let mut m = DMatrix::zeros(rows, cols);
    for q in 0..cols {
        let col = table.matrix_acn(q).apply(w, rows);
        m.set_column(q, &nalgebra::DVector::from_vec(col));
    }
    Ok(m)
}

/// Applies a window matrix to a coefficient vector.
pub fn apply_window(a: &[Complex64], w: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    if a.len() != w.nrows() {
        return Err(Error::Dimension(format!(
            "{} coefficients for a window with {} rows",
            a.len(),
            w.nrows()
        )));
    }
    Ok((0..w.ncols())
        .map(|c| a.iter().zip(w.column(c).iter()).map(|(x, y)| x * y).sum())
        .collect())
}

/// Precomputed `H~^{n,m} = H F^{n,m}` for beamforming a sound field of order
/// `N` and decoding it binaurally with HRTF coefficients of order `N'`.
#[derive(Debug, Clone)]
pub struct BinauralBeamformer {
    field_order: usize,
    mats: Vec<DMatrix<Complex64>>,
}

impl BinauralBeamformer {
    /// `hrtf` holds the left and right ear coefficient rows, `2 x (N'+1)^2`.
    pub fn new(hrtf: &DMatrix<Complex64>, field_order: usize, table: &GauntTable) -> Result<Self> {
        if hrtf.nrows() != 2 {
            return Err(Error::Dimension(format!(
                "HRTF matrix has {} rows, expected 2",
                hrtf.nrows()
            )));
        }
        let hrtf_order = coeff_order_of(hrtf.ncols())?;
        table.require(Basis::Real, hrtf_order, field_order)?;
        let cols = coeff_count(field_order);
        let mats = (0..cols)
            .map(|q| {
                let f = table.matrix_acn(q);
                let mut m = DMatrix::zeros(2, cols);
                for e in f.entries() {
                    let (r, c) = (e.row as usize, e.col as usize);
                    if r < hrtf.ncols() && c < cols {
                        for ear in 0..2 {
                            m[(ear, c)] += hrtf[(ear, r)] * e.value;
                        }
                    }
                }
                m
            })
            .collect();
        Ok(BinauralBeamformer { field_order, mats })
    }

    pub fn field_order(&self) -> usize {
        self.field_order
    }

    /// `H~^{n,m}` by ACN index.
    pub fn matrices(&self) -> &[DMatrix<Complex64>] {
        &self.mats
    }

    /// `W = [H~^0 w, H~^1 w, ...]`, so that `b = W a`.
    pub fn matrix(&self, w: &[Complex64]) -> Result<DMatrix<Complex64>> {
        self.check(w)?;
        let wv = nalgebra::DVector::from_column_slice(w);
        let mut out = DMatrix::zeros(2, self.mats.len());
        for (q, m) in self.mats.iter().enumerate() {
            out.set_column(q, &(m * &wv));
        }
        Ok(out)
    }

    /// Left and right outputs `b = sum a_q H~^q w`.
    pub fn apply(&self, a: &[Complex64], w: &[Complex64]) -> Result<[Complex64; 2]> {
        self.check(a)?;
        let m = self.matrix(w)?;
        let av = nalgebra::DVector::from_column_slice(a);
        let b = m * av;
        Ok([b[0], b[1]])
    }

    fn check(&self, v: &[Complex64]) -> Result<()> {
        if v.len() != self.mats.len() {
            return Err(Error::LengthMismatch {
                len: v.len(),
                order: self.field_order,
                expected: self.mats.len(),
            });
        }
        Ok(())
    }
}

fn coeff_order_of(len: usize) -> Result<usize> {
    crate::sh::order_of_len(len)
        .ok_or_else(|| Error::Dimension(format!("{len} is not a square coefficient count")))
}
