//! Complex-to-real basis conversion (`U_N`) and the conjugation map (`T_N`).
//!
//! Row `m` of the per-order block `U_n` expresses `R_{n,m}` in terms of
//! `Y_{n,-|m|}` and `Y_{n,|m|}`:
//!
//! ```text
//! m > 0:  R = ( Y_{n,-m} + (-1)^m Y_{n,m} ) / sqrt(2)
//! m = 0:  R = Y_{n,0}
//! m < 0:  R = ( i Y_{n,m} - i (-1)^m Y_{n,-m} ) / sqrt(2)
//! ```
//!
//! so `r_N = U_N y_N`. `T_N` maps `y_N` to `y_N^*`, with `(-1)^m` on the
//! anti-diagonal of each block.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sh::{coeff_count, order_of_len, ShIndex};
use crate::Basis;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn parity(m: i32) -> f64 {
    if m.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Nonzero entries of row `m` of `U_n`, as `(column degree, value)`.
pub fn u_row(m: i32) -> ([(i32, Complex64); 2], usize) {
    let s = FRAC_1_SQRT_2;
    match m {
        0 => ([(0, Complex64::new(1.0, 0.0)), (0, ZERO)], 1),
        m if m > 0 => (
            [
                (-m, Complex64::new(s, 0.0)),
                (m, Complex64::new(parity(m) * s, 0.0)),
            ],
            2,
        ),
        m => (
            [
                (m, Complex64::new(0.0, s)),
                (-m, Complex64::new(0.0, -parity(m) * s)),
            ],
            2,
        ),
    }
}

/// Block-diagonal unitary map from complex to real harmonics up to order `N`.
#[derive(Debug, Clone)]
pub struct BasisMap {
    order: usize,
    blocks: Vec<DMatrix<Complex64>>,
}

impl BasisMap {
    pub fn new(order: usize) -> Self {
        let blocks = (0..=order as i32)
            .map(|n| {
                let dim = (2 * n + 1) as usize;
                let mut b = DMatrix::from_element(dim, dim, ZERO);
                for m in -n..=n {
                    let (row, len) = u_row(m);
                    for &(col, v) in &row[..len] {
                        b[((m + n) as usize, (col + n) as usize)] = v;
                    }
                }
                b
            })
            .collect();
        BasisMap { order, blocks }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn block(&self, n: usize) -> &DMatrix<Complex64> {
        &self.blocks[n]
    }

    /// Full `(N+1)^2` square matrix.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let dim = coeff_count(self.order);
        let mut full = DMatrix::from_element(dim, dim, ZERO);
        for (n, b) in self.blocks.iter().enumerate() {
            let off = n * n;
            full.view_mut((off, off), (b.nrows(), b.ncols()))
                .copy_from(b);
        }
        full
    }

    /// `U_N v`, e.g. harmonic vectors `y_N -> r_N`.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.apply_rows(v, false)
    }

    /// `conj(U_N) v`.
    pub fn apply_conj(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.apply_rows(v, true)
    }

    fn apply_rows(&self, v: &[Complex64], conjugate: bool) -> Vec<Complex64> {
        assert_eq!(v.len(), coeff_count(self.order));
        (0..v.len())
            .map(|q| {
                let idx = ShIndex::from_acn(q);
                let (row, len) = u_row(idx.m);
                row[..len]
                    .iter()
                    .map(|&(col, u)| {
                        let u = if conjugate { u.conj() } else { u };
                        u * v[ShIndex { n: idx.n, m: col }.acn()]
                    })
                    .sum()
            })
            .collect()
    }

    /// `U_N^T v`.
    pub fn apply_transpose(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), coeff_count(self.order));
        let mut out = vec![ZERO; v.len()];
        for (q, &vq) in v.iter().enumerate() {
            let idx = ShIndex::from_acn(q);
            let (row, len) = u_row(idx.m);
            for &(col, u) in &row[..len] {
                out[ShIndex { n: idx.n, m: col }.acn()] += u * vq;
            }
        }
        out
    }
}

/// Anti-diagonal sign map with `T_N y_N = y_N^*`.
#[derive(Debug, Clone)]
pub struct ConjugationMap {
    order: usize,
}

impl ConjugationMap {
    pub fn new(order: usize) -> Self {
        ConjugationMap { order }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Anti-diagonal of block `n`, top row first.
    pub fn anti_diagonal(&self, n: usize) -> Vec<f64> {
        let n = n as i32;
        (-n..=n).map(parity).collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let dim = coeff_count(self.order);
        let mut t = DMatrix::zeros(dim, dim);
        for q in 0..dim {
            let idx = ShIndex::from_acn(q);
            t[(
                q,
                ShIndex {
                    n: idx.n,
                    m: -idx.m,
                }
                .acn(),
            )] = parity(idx.m);
        }
        t
    }

    /// `T_N v`.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), coeff_count(self.order));
        (0..v.len())
            .map(|q| {
                let idx = ShIndex::from_acn(q);
                v[ShIndex {
                    n: idx.n,
                    m: -idx.m,
                }
                .acn()]
                    * parity(idx.m)
            })
            .collect()
    }
}

/// Finite spherical harmonic expansion, ACN-ordered.
#[derive(Debug, Clone, PartialEq)]
pub enum CoeffVector {
    Complex { order: usize, data: Vec<Complex64> },
    Real { order: usize, data: Vec<f64> },
}

impl CoeffVector {
    pub fn complex(data: Vec<Complex64>) -> Result<Self> {
        let order = check_len(data.len())?;
        Ok(CoeffVector::Complex { order, data })
    }

    pub fn real(data: Vec<f64>) -> Result<Self> {
        let order = check_len(data.len())?;
        Ok(CoeffVector::Real { order, data })
    }

    pub fn zeros(basis: Basis, order: usize) -> Self {
        let len = coeff_count(order);
        match basis {
            Basis::Complex => CoeffVector::Complex {
                order,
                data: vec![ZERO; len],
            },
            Basis::Real => CoeffVector::Real {
                order,
                data: vec![0.0; len],
            },
        }
    }

    /// Unit coefficient at one index.
    pub fn unit(basis: Basis, order: usize, idx: ShIndex) -> Self {
        let mut v = Self::zeros(basis, order);
        match &mut v {
            CoeffVector::Complex { data, .. } => data[idx.acn()] = Complex64::new(1.0, 0.0),
            CoeffVector::Real { data, .. } => data[idx.acn()] = 1.0,
        }
        v
    }

    pub fn basis(&self) -> Basis {
        match self {
            CoeffVector::Complex { .. } => Basis::Complex,
            CoeffVector::Real { .. } => Basis::Real,
        }
    }

    pub fn order(&self) -> usize {
        match self {
            CoeffVector::Complex { order, .. } | CoeffVector::Real { order, .. } => *order,
        }
    }

    pub fn len(&self) -> usize {
        coeff_count(self.order())
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coefficients widened to complex values.
    pub fn to_complex_vec(&self) -> Vec<Complex64> {
        match self {
            CoeffVector::Complex { data, .. } => data.clone(),
            CoeffVector::Real { data, .. } => {
                data.iter().map(|&v| Complex64::new(v, 0.0)).collect()
            }
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        match self {
            CoeffVector::Complex { data, .. } => data.iter().map(|c| c.norm_sqr()).sum(),
            CoeffVector::Real { data, .. } => data.iter().map(|v| v * v).sum(),
        }
    }

    /// Zero-pads or truncates to another order.
    pub fn resized(&self, order: usize) -> Self {
        let len = coeff_count(order);
        match self {
            CoeffVector::Complex { data, .. } => {
                let mut d = data.clone();
                d.resize(len, ZERO);
                CoeffVector::Complex { order, data: d }
            }
            CoeffVector::Real { data, .. } => {
                let mut d = data.clone();
                d.resize(len, 0.0);
                CoeffVector::Real { order, data: d }
            }
        }
    }
}

fn check_len(len: usize) -> Result<usize> {
    order_of_len(len).ok_or(Error::LengthMismatch {
        len,
        order: len.isqrt().saturating_sub(1),
        expected: coeff_count(len.isqrt().saturating_sub(1)),
    })
}

/// Relative imaginary residue tolerated when converting to the real basis.
pub const REAL_RESIDUE_TOLERANCE: f64 = 1e-10;

/// Real-basis coefficients of an arbitrary (possibly complex-valued)
/// function from its complex-basis coefficients: `f_hat = conj(U) f`.
pub fn complex_to_real_coeffs(f: &[Complex64]) -> Vec<Complex64> {
    let order = order_of_len(f.len()).expect("coefficient length is a perfect square");
    BasisMap::new(order).apply_conj(f)
}

/// Complex-basis coefficients from real-basis ones: `f = U^T f_hat`.
pub fn real_to_complex_coeffs(f_hat: &[Complex64]) -> Vec<Complex64> {
    let order = order_of_len(f_hat.len()).expect("coefficient length is a perfect square");
    BasisMap::new(order).apply_transpose(f_hat)
}

/// Converts between bases. Converting to the real basis requires the
/// function to be real-valued: imaginary parts above
/// [`REAL_RESIDUE_TOLERANCE`] times the vector norm are an error.
pub fn convert_coeffs(v: &CoeffVector, target: Basis) -> Result<CoeffVector> {
    match (v, target) {
        (CoeffVector::Complex { .. }, Basis::Complex) | (CoeffVector::Real { .. }, Basis::Real) => {
            Ok(v.clone())
        }
        (CoeffVector::Real { .. }, Basis::Complex) => {
            CoeffVector::complex(real_to_complex_coeffs(&v.to_complex_vec()))
        }
        (CoeffVector::Complex { data, .. }, Basis::Real) => {
            let converted = complex_to_real_coeffs(data);
            let norm = v.norm_sqr().sqrt();
            let residue = converted.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
            let tolerance = REAL_RESIDUE_TOLERANCE * norm.max(f64::MIN_POSITIVE);
            if residue > tolerance {
                return Err(Error::NotRealValued { residue, tolerance });
            }
            CoeffVector::real(converted.into_iter().map(|c| c.re).collect())
        }
    }
}

/// Coefficients of the pointwise conjugate `f^*`. Complex basis:
/// `T_N conj(f)`; real basis: `conj(f_hat)`, which for real-typed vectors is
/// the identity.
pub fn conjugate_coeffs(v: &CoeffVector) -> CoeffVector {
    match v {
        CoeffVector::Complex { order, data } => {
            let conj: Vec<Complex64> = data.iter().map(|c| c.conj()).collect();
            CoeffVector::Complex {
                order: *order,
                data: ConjugationMap::new(*order).apply(&conj),
            }
        }
        CoeffVector::Real { .. } => v.clone(),
    }
}
