//! Small dense-matrix helpers shared across the crate.
//!
//! Orthonormalization and kernel extraction go through twice-reorthogonalized
//! Gram-Schmidt rather than singular vectors: complex SVDs with degenerate
//! spectra (projectors, orthonormal inputs) can return mildly contaminated
//! vectors, while rank decisions only need singular values.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::num::RANK_REL_TOL;

pub(crate) fn numerical_rank(m: &DMatrix<Complex64>) -> usize {
    let svals = m.clone().singular_values();
    let smax = svals.iter().cloned().fold(0.0f64, f64::max);
    if smax == 0.0 {
        return 0;
    }
    svals.iter().filter(|&&s| s > RANK_REL_TOL * smax).count()
}

/// Project `x` orthogonal to every vector in `basis` (assumed orthonormal),
/// twice for numerical orthogonality.
fn orthogonalize_against(x: &mut DVector<Complex64>, basis: &[DVector<Complex64>]) {
    for _ in 0..2 {
        for b in basis {
            let c = b.dotc(x);
            *x -= b * c;
        }
    }
}

/// Orthonormal basis of the column span; the input must have full column
/// rank (validated upstream).
pub(crate) fn orthonormal_columns(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let mut basis: Vec<DVector<Complex64>> = Vec::with_capacity(m.ncols());
    for c in 0..m.ncols() {
        let mut x = m.column(c).into_owned();
        orthogonalize_against(&mut x, &basis);
        let norm = x.norm();
        debug_assert!(norm > 1e-12, "orthonormal_columns: dependent column {c}");
        basis.push(x / Complex64::new(norm, 0.0));
    }
    let mut q = DMatrix::<Complex64>::zeros(m.nrows(), m.ncols());
    for (c, b) in basis.iter().enumerate() {
        q.column_mut(c).copy_from(b);
    }
    q
}

/// Orthonormal basis of the kernel of `m`, as columns. The row space comes
/// from the thin SVD (its vectors are well separated from the kernel); the
/// complement is completed from coordinate vectors by Gram-Schmidt.
pub(crate) fn null_space_basis(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let k = m.ncols();
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("SVD with V requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let mut row_space: Vec<DVector<Complex64>> = Vec::new();
    for (r, &s) in svd.singular_values.iter().enumerate() {
        if smax > 0.0 && s > RANK_REL_TOL * smax {
            row_space.push(vt.row(r).adjoint());
        }
    }
    let rank = row_space.len();
    let kernel_dim = k - rank;
    let mut kernel: Vec<DVector<Complex64>> = Vec::with_capacity(kernel_dim);
    // Coordinate vectors in decreasing order of their residual against the
    // row space, so the best-conditioned candidates are taken first.
    let mut candidates: Vec<(f64, usize)> = (0..k)
        .map(|i| {
            let mut x = DVector::<Complex64>::zeros(k);
            x[i] = Complex64::new(1.0, 0.0);
            orthogonalize_against(&mut x, &row_space);
            (x.norm(), i)
        })
        .collect();
    candidates.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    for (_, i) in candidates {
        if kernel.len() == kernel_dim {
            break;
        }
        let mut x = DVector::<Complex64>::zeros(k);
        x[i] = Complex64::new(1.0, 0.0);
        orthogonalize_against(&mut x, &row_space);
        orthogonalize_against(&mut x, &kernel);
        let norm = x.norm();
        if norm > 1e-8 {
            kernel.push(x / Complex64::new(norm, 0.0));
        }
    }
    debug_assert_eq!(kernel.len(), kernel_dim, "kernel completion fell short");
    let mut basis = DMatrix::<Complex64>::zeros(k, kernel.len());
    for (c, b) in kernel.iter().enumerate() {
        basis.column_mut(c).copy_from(b);
    }
    basis
}

/// Cosines of the principal angles between two orthonormal column spans,
/// through the hermitian eigenvalues of the overlap gram matrix.
pub(crate) fn principal_cosines(
    qa: &DMatrix<Complex64>,
    qb: &DMatrix<Complex64>,
) -> Vec<f64> {
    let overlap = qa.adjoint() * qb;
    let gram = overlap.adjoint() * &overlap;
    let eig = gram.symmetric_eigen();
    eig.eigenvalues
        .iter()
        .map(|&l| l.max(0.0).sqrt().clamp(0.0, 1.0))
        .collect()
}
