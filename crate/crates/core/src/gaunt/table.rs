use rayon::prelude::*;

use super::{complex_matrix, real_matrix, GauntMatrix, ZeroRowCache};
use crate::error::{Error, Result};
use crate::sh::{coeff_count, ShIndex};
use crate::wigner::FactorialPath;
use crate::Basis;

/// Coupling matrices for every target `(n, m)` with `n <= n1 + n2`, indexed
/// by ACN.
#[derive(Debug, Clone, PartialEq)]
pub struct GauntTable {
    basis: Basis,
    n1: usize,
    n2: usize,
    matrices: Vec<GauntMatrix>,
}

/// Builds a full table with the exact factorial path.
pub fn build_table(basis: Basis, n1: usize, n2: usize) -> Result<GauntTable> {
    build_table_with(basis, n1, n2, FactorialPath::Exact)
}

/// Targets are computed in parallel on the current rayon pool. Each matrix
/// depends only on its target, so the result does not depend on the number
/// of threads.
pub fn build_table_with(
    basis: Basis,
    n1: usize,
    n2: usize,
    path: FactorialPath,
) -> Result<GauntTable> {
    let cache = ZeroRowCache::new(n1, n2, path);
    let matrices = (0..coeff_count(n1 + n2))
        .into_par_iter()
        .map(|q| {
            let target = ShIndex::from_acn(q);
            match basis {
                Basis::Complex => Ok(complex_matrix(n1, n2, target, &cache, path)),
                Basis::Real => real_matrix(n1, n2, target, &cache, path),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GauntTable {
        basis,
        n1,
        n2,
        matrices,
    })
}

impl GauntTable {
    pub(crate) fn from_parts(
        basis: Basis,
        n1: usize,
        n2: usize,
        matrices: Vec<GauntMatrix>,
    ) -> Self {
        debug_assert_eq!(matrices.len(), coeff_count(n1 + n2));
        GauntTable {
            basis,
            n1,
            n2,
            matrices,
        }
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn orders(&self) -> (usize, usize) {
        (self.n1, self.n2)
    }

    pub fn max_target_order(&self) -> usize {
        self.n1 + self.n2
    }

    pub fn matrices(&self) -> &[GauntMatrix] {
        &self.matrices
    }

    /// Matrix for target `(n, m)`, or `None` when out of range.
    pub fn matrix(&self, n: u32, m: i32) -> Option<&GauntMatrix> {
        let idx = ShIndex::new(n, m)?;
        self.matrices.get(idx.acn())
    }

    /// Matrix by ACN index; panics when out of range.
    pub fn matrix_acn(&self, q: usize) -> &GauntMatrix {
        &self.matrices[q]
    }

    pub fn nnz(&self) -> usize {
        self.matrices.iter().map(GauntMatrix::nnz).sum()
    }

    /// Checks that this table can serve factors of orders `(need1, need2)` in
    /// `basis`.
    pub fn require(&self, basis: Basis, need1: usize, need2: usize) -> Result<()> {
        if basis != self.basis || need1 > self.n1 || need2 > self.n2 {
            return Err(Error::TableTooSmall {
                basis: self.basis,
                n1: self.n1,
                n2: self.n2,
                basis_needed: basis,
                need1,
                need2,
            });
        }
        Ok(())
    }
}
