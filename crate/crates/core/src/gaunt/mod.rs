//! Gaunt coefficients and coupling matrices.
//!
//! For target `(n, m)` the matrix `G^{n,m}_{N1,N2}` holds
//! `int Y_{n1,m1} Y_{n2,m2} Y^*_{n,m}` at row `acn(n1, m1)`, column
//! `acn(n2, m2)`, so that the product coefficient is the bilinear form
//! `h_{n,m} = f^T G^{n,m} g`. The real-basis matrices `F^{n,m}` hold
//! `int R_{n1,m1} R_{n2,m2} R_{n,m}` and are obtained from the complex ones
//! through the basis map:
//!
//! ```text
//! m > 0:  F = U (G^{n,-m} + (-1)^m G^{n,m}) U^T / sqrt(2)
//! m = 0:  F = U G^{n,0} U^T
//! m < 0:  F = U (G^{n,m} - (-1)^m G^{n,-m}) U^T / (i sqrt(2))
//! ```

mod io;
mod table;

pub use io::{
    decode_table, encode_table, load_table, save_table, write_json, TABLE_MAGIC, TABLE_VERSION,
};
pub use table::{build_table, build_table_with, GauntTable};

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::basis::{u_row, CoeffVector};
use crate::error::{Error, Result};
use crate::quadrature::QuadratureGrid;
use crate::sh::{coeff_count, sh_complex, sh_real, ShIndex};
use crate::wigner::{wigner3j_with, FactorialPath, Wigner3jArgs};
use crate::Basis;

/// Imaginary residue tolerated when assembling real matrices.
pub const REAL_GAUNT_RESIDUE: f64 = 1e-13;

fn parity(m: i32) -> f64 {
    if m.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `G^{n,m}_{n1,m1,n2,m2}` by Cruzan's formula, exact factorial path.
pub fn gaunt_complex(n1: u32, m1: i32, n2: u32, m2: i32, n: u32, m: i32) -> f64 {
    gaunt_complex_with(n1, m1, n2, m2, n, m, FactorialPath::Exact)
}

pub fn gaunt_complex_with(
    n1: u32,
    m1: i32,
    n2: u32,
    m2: i32,
    n: u32,
    m: i32,
    path: FactorialPath,
) -> f64 {
    if complex_structural_zero(n1, m1, n2, m2, n, m) {
        return 0.0;
    }
    let zero_row = wigner3j_with(Wigner3jArgs::new(n, n1, n2, 0, 0, 0), path);
    cruzan(n1, m1, n2, m2, n, m, zero_row, path)
}

/// Selection rules of the complex coefficient: degree sum, triangle, and
/// parity of the order sum.
pub fn complex_structural_zero(n1: u32, m1: i32, n2: u32, m2: i32, n: u32, m: i32) -> bool {
    m1.unsigned_abs() > n1
        || m2.unsigned_abs() > n2
        || m.unsigned_abs() > n
        || m != m1 + m2
        || n < n1.abs_diff(n2)
        || n > n1 + n2
        || (n + n1 + n2) % 2 == 1
}

#[allow(clippy::too_many_arguments)]
fn cruzan(
    n1: u32,
    m1: i32,
    n2: u32,
    m2: i32,
    n: u32,
    m: i32,
    zero_row: f64,
    path: FactorialPath,
) -> f64 {
    if zero_row == 0.0 {
        return 0.0;
    }
    let degree_row = wigner3j_with(Wigner3jArgs::new(n, n1, n2, -m, m1, m2), path);
    if degree_row == 0.0 {
        return 0.0;
    }
    let norm = ((2 * n + 1) as f64 * (2 * n1 + 1) as f64 * (2 * n2 + 1) as f64 / (4.0 * PI)).sqrt();
    parity(m) * norm * zero_row * degree_row
}

/// `F^{n,m}_{n1,m1,n2,m2}`, summed directly from complex coefficients as
/// `sum U[m1,a] U[m2,b] conj(U[m,c]) G^{n,c}_{n1,a,n2,b}`. Independent of the
/// matrix assembly in [`gaunt_matrix`].
pub fn gaunt_real(n1: u32, m1: i32, n2: u32, m2: i32, n: u32, m: i32) -> f64 {
    if m1.unsigned_abs() > n1 || m2.unsigned_abs() > n2 || m.unsigned_abs() > n {
        return 0.0;
    }
    let (r1, l1) = u_row(m1);
    let (r2, l2) = u_row(m2);
    let (r, l) = u_row(m);
    let mut acc = Complex64::new(0.0, 0.0);
    for &(a, ua) in &r1[..l1] {
        for &(b, ub) in &r2[..l2] {
            for &(c, uc) in &r[..l] {
                let g = gaunt_complex(n1, a, n2, b, n, c);
                if g != 0.0 {
                    acc += ua * ub * uc.conj() * g;
                }
            }
        }
    }
    acc.re
}

/// Quadrature value of `int Y_{n1,m1} Y_{n2,m2} Y^*_{n,m}`.
pub fn gaunt_complex_oracle(
    n1: u32,
    m1: i32,
    n2: u32,
    m2: i32,
    n: u32,
    m: i32,
    grid: &QuadratureGrid,
) -> Result<f64> {
    grid.require_degree((n + n1 + n2) as usize)?;
    let v = grid.integrate_fn(|d| {
        sh_complex(ShIndex { n: n1, m: m1 }, d)
            * sh_complex(ShIndex { n: n2, m: m2 }, d)
            * sh_complex(ShIndex { n, m }, d).conj()
    });
    Ok(v.re)
}

/// Quadrature value of `int R_{n1,m1} R_{n2,m2} R_{n,m}`.
pub fn gaunt_real_oracle(
    n1: u32,
    m1: i32,
    n2: u32,
    m2: i32,
    n: u32,
    m: i32,
    grid: &QuadratureGrid,
) -> Result<f64> {
    grid.require_degree((n + n1 + n2) as usize)?;
    let v = grid.integrate_fn(|d| {
        Complex64::new(
            sh_real(ShIndex { n: n1, m: m1 }, d)
                * sh_real(ShIndex { n: n2, m: m2 }, d)
                * sh_real(ShIndex { n, m }, d),
            0.0,
        )
    });
    Ok(v.re)
}

/// One nonzero of a coupling matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entry {
    pub row: u32,
    pub col: u32,
    pub value: f64,
}

/// Coupling matrix for one target index, stored sparsely with entries
/// sorted by `(row, col)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GauntMatrix {
    basis: Basis,
    n1: usize,
    n2: usize,
    target: ShIndex,
    entries: Vec<Entry>,
}

impl GauntMatrix {
    pub(crate) fn from_sorted(
        basis: Basis,
        n1: usize,
        n2: usize,
        target: ShIndex,
        entries: Vec<Entry>,
    ) -> Self {
        debug_assert!(entries
            .windows(2)
            .all(|w| (w[0].row, w[0].col) < (w[1].row, w[1].col)));
        GauntMatrix {
            basis,
            n1,
            n2,
            target,
            entries,
        }
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn orders(&self) -> (usize, usize) {
        (self.n1, self.n2)
    }

    pub fn target(&self) -> ShIndex {
        self.target
    }

    pub fn rows(&self) -> usize {
        coeff_count(self.n1)
    }

    pub fn cols(&self) -> usize {
        coeff_count(self.n2)
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries
            .binary_search_by(|e| (e.row as usize, e.col as usize).cmp(&(row, col)))
            .map(|i| self.entries[i].value)
            .unwrap_or(0.0)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.rows(), self.cols());
        for e in &self.entries {
            d[(e.row as usize, e.col as usize)] = e.value;
        }
        d
    }

    /// `f^T M g`. Shorter inputs act as zero-padded vectors, so a matrix for
    /// larger orders serves any smaller factor orders.
    pub fn bilinear(&self, f: &[Complex64], g: &[Complex64]) -> Complex64 {
        self.entries
            .iter()
            .filter(|e| (e.row as usize) < f.len() && (e.col as usize) < g.len())
            .map(|e| f[e.row as usize] * g[e.col as usize] * e.value)
            .sum()
    }

    /// `f^H M g`.
    pub fn hermitian_form(&self, f: &[Complex64], g: &[Complex64]) -> Complex64 {
        self.entries
            .iter()
            .filter(|e| (e.row as usize) < f.len() && (e.col as usize) < g.len())
            .map(|e| f[e.row as usize].conj() * g[e.col as usize] * e.value)
            .sum()
    }

    /// `M g`, truncated to the first `rows` rows.
    pub fn apply(&self, g: &[Complex64], rows: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); rows];
        for e in &self.entries {
            if (e.row as usize) < rows && (e.col as usize) < g.len() {
                out[e.row as usize] += g[e.col as usize] * e.value;
            }
        }
        out
    }
}

/// Zero-degree 3-j symbols `(n n1 n2; 0 0 0)`, shared by every target.
pub(crate) struct ZeroRowCache {
    n1: usize,
    n2: usize,
    values: Vec<f64>,
}

impl ZeroRowCache {
    pub(crate) fn new(n1: usize, n2: usize, path: FactorialPath) -> Self {
        let nmax = n1 + n2;
        let mut values = vec![0.0; (nmax + 1) * (n1 + 1) * (n2 + 1)];
        for n in 0..=nmax {
            for a in 0..=n1 {
                for b in 0..=n2 {
                    values[(n * (n1 + 1) + a) * (n2 + 1) + b] = wigner3j_with(
                        Wigner3jArgs::new(n as u32, a as u32, b as u32, 0, 0, 0),
                        path,
                    );
                }
            }
        }
        ZeroRowCache { n1, n2, values }
    }

    fn get(&self, n: u32, a: u32, b: u32) -> f64 {
        self.values[(n as usize * (self.n1 + 1) + a as usize) * (self.n2 + 1) + b as usize]
    }
}

pub(crate) fn complex_matrix(
    n1: usize,
    n2: usize,
    target: ShIndex,
    cache: &ZeroRowCache,
    path: FactorialPath,
) -> GauntMatrix {
    let ShIndex { n, m } = target;
    let mut entries = Vec::new();
    for q in 0..coeff_count(n1) {
        let ShIndex { n: a, m: ma } = ShIndex::from_acn(q);
        let mb = m - ma;
        let lo = n.abs_diff(a).max(mb.unsigned_abs());
        let hi = (n + a).min(n2 as u32);
        for b in lo..=hi {
            if (n + a + b) % 2 == 1 {
                continue;
            }
            let v = cruzan(a, ma, b, mb, n, m, cache.get(n, a, b), path);
            if v != 0.0 {
                entries.push(Entry {
                    row: q as u32,
                    col: ShIndex { n: b, m: mb }.acn() as u32,
                    value: v,
                });
            }
        }
    }
    GauntMatrix::from_sorted(Basis::Complex, n1, n2, target, entries)
}

/// Accumulates `scale * U1 G U2^T` into `acc`, using the sparsity of `U`.
fn scatter_sandwich(g: &GauntMatrix, scale: Complex64, acc: &mut BTreeMap<(u32, u32), Complex64>) {
    for e in g.entries() {
        let a = ShIndex::from_acn(e.row as usize);
        let b = ShIndex::from_acn(e.col as usize);
        for (q, uq) in u_column(a) {
            for (l, ul) in u_column(b) {
                *acc.entry((q, l)).or_insert(Complex64::new(0.0, 0.0)) += scale * uq * ul * e.value;
            }
        }
    }
}

/// Nonzeros of column `idx` of `U`: rows `(n, +-m)` whose expansion uses `Y_{n,m}`.
fn u_column(idx: ShIndex) -> impl Iterator<Item = (u32, Complex64)> {
    let rows: &[i32] = if idx.m == 0 { &[0] } else { &[-1, 1] };
    rows.iter().filter_map(move |&s| {
        let row_m = if idx.m == 0 { 0 } else { s * idx.m.abs() };
        let (row, len) = u_row(row_m);
        row[..len]
            .iter()
            .find(|(col, _)| *col == idx.m)
            .map(|&(_, u)| (ShIndex { n: idx.n, m: row_m }.acn() as u32, u))
    })
}

pub(crate) fn real_matrix(
    n1: usize,
    n2: usize,
    target: ShIndex,
    cache: &ZeroRowCache,
    path: FactorialPath,
) -> Result<GauntMatrix> {
    let ShIndex { n, m } = target;
    let mut acc = BTreeMap::new();
    let g = |deg: i32| complex_matrix(n1, n2, ShIndex { n, m: deg }, cache, path);
    let s = FRAC_1_SQRT_2;
    match m {
        0 => scatter_sandwich(&g(0), Complex64::new(1.0, 0.0), &mut acc),
        m if m > 0 => {
            scatter_sandwich(&g(-m), Complex64::new(s, 0.0), &mut acc);
            scatter_sandwich(&g(m), Complex64::new(parity(m) * s, 0.0), &mut acc);
        }
        m => {
            // 1 / (i sqrt 2) = -i / sqrt 2
            scatter_sandwich(&g(m), Complex64::new(0.0, -s), &mut acc);
            scatter_sandwich(&g(-m), Complex64::new(0.0, parity(m) * s), &mut acc);
        }
    }
    let mut entries = Vec::with_capacity(acc.len());
    for ((row, col), v) in acc {
        if v.im.abs() > REAL_GAUNT_RESIDUE {
            return Err(Error::ImaginaryResidue {
                n,
                m,
                residue: v.im.abs(),
            });
        }
        if v.re != 0.0 {
            entries.push(Entry {
                row,
                col,
                value: v.re,
            });
        }
    }
    Ok(GauntMatrix::from_sorted(
        Basis::Real,
        n1,
        n2,
        target,
        entries,
    ))
}

/// Coupling matrix of one target for factor orders `(n1, n2)`.
pub fn gaunt_matrix(basis: Basis, n1: usize, n2: usize, target: ShIndex) -> Result<GauntMatrix> {
    gaunt_matrix_with(basis, n1, n2, target, FactorialPath::Exact)
}

pub fn gaunt_matrix_with(
    basis: Basis,
    n1: usize,
    n2: usize,
    target: ShIndex,
    path: FactorialPath,
) -> Result<GauntMatrix> {
    if target.n as usize > n1 + n2 || target.m.unsigned_abs() > target.n {
        return Err(Error::TargetOutOfRange {
            n: target.n,
            m: target.m,
            n1,
            n2,
        });
    }
    let cache = ZeroRowCache::new(n1, n2, path);
    match basis {
        Basis::Complex => Ok(complex_matrix(n1, n2, target, &cache, path)),
        Basis::Real => real_matrix(n1, n2, target, &cache, path),
    }
}

/// Product coefficients `h_{n,m} = f^T M^{n,m} g` for every target up to
/// `order(f) + order(g)`, for general complex coefficient slices in the
/// table's basis.
pub fn multiply_coeffs(
    f: &[Complex64],
    g: &[Complex64],
    table: &GauntTable,
) -> Result<Vec<Complex64>> {
    let of =
        crate::sh::order_of_len(f.len()).ok_or(Error::Dimension(format!("length {}", f.len())))?;
    let og =
        crate::sh::order_of_len(g.len()).ok_or(Error::Dimension(format!("length {}", g.len())))?;
    table.require(table.basis(), of, og)?;
    Ok((0..coeff_count(of + og))
        .map(|q| table.matrix_acn(q).bilinear(f, g))
        .collect())
}

/// Coefficient-domain product of two band-limited functions.
pub fn multiply_spherical(
    f: &CoeffVector,
    g: &CoeffVector,
    table: &GauntTable,
) -> Result<CoeffVector> {
    for v in [f, g] {
        if v.basis() != table.basis() {
            return Err(Error::BasisMismatch {
                expected: table.basis(),
                found: v.basis(),
            });
        }
    }
    let h = multiply_coeffs(&f.to_complex_vec(), &g.to_complex_vec(), table)?;
    match table.basis() {
        Basis::Complex => CoeffVector::complex(h),
        // products of real-typed real-basis vectors are real; the imaginary
        // parts are exactly zero here
        Basis::Real => CoeffVector::real(h.into_iter().map(|c| c.re).collect()),
    }
}
