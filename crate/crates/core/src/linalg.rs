//! Dense symmetric eigensolver and small vector helpers.
//!
//! Matrices live in nalgebra containers; the eigendecomposition itself is
//! delegated to faer's self-adjoint solver.

use alloc::vec::Vec;
use faer::{Mat, Side};
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Eigenpairs of a real symmetric matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, in the order of `values`.
    pub vectors: DMatrix<f64>,
}

/// Full diagonalization of a symmetric matrix.
///
/// Only the lower triangle is read. Eigenvectors get a deterministic sign: the
/// component of largest magnitude is made positive.
pub fn symmetric_eigen(matrix: &DMatrix<f64>) -> Result<Eigenpairs> {
    let n = matrix.nrows();
    assert_eq!(n, matrix.ncols(), "symmetric_eigen needs a square matrix");
    if n == 0 {
        return Ok(Eigenpairs {
            values: Vec::new(),
            vectors: DMatrix::zeros(0, 0),
        });
    }
    let input = Mat::<f64>::from_fn(n, n, |i, j| {
        if i >= j {
            matrix[(i, j)]
        } else {
            matrix[(j, i)]
        }
    });
    let eig = input
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::NoConvergence)?;
    let (s, u) = (eig.S(), eig.U());

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[a].total_cmp(&s[b]));

    let mut vectors = DMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        values.push(s[src]);
        let mut col = DVector::from_fn(n, |i, _| u[(i, src)]);
        fix_sign(&mut col);
        vectors.set_column(dst, &col);
    }
    Ok(Eigenpairs { values, vectors })
}

/// Flips `v` so that its largest-magnitude component is positive.
pub fn fix_sign(v: &mut DVector<f64>) {
    let mut best = 0.0;
    let mut sign = 1.0;
    for &x in v.iter() {
        // 1e-9 relative slack keeps the choice stable against round-off ties.
        if x.abs() > best * (1.0 + 1e-9) {
            best = x.abs();
            sign = x.signum();
        }
    }
    if sign < 0.0 {
        v.neg_mut();
    }
}

/// Modified Gram-Schmidt; candidates whose residual norm falls below `tol` are dropped.
pub fn orthonormalize<I>(candidates: I, tol: f64) -> Vec<DVector<f64>>
where
    I: IntoIterator<Item = DVector<f64>>,
{
    let mut out: Vec<DVector<f64>> = Vec::new();
    for mut v in candidates {
        for _ in 0..2 {
            for q in &out {
                let overlap = q.dot(&v);
                v.axpy(-overlap, q, 1.0);
            }
        }
        let norm = v.norm();
        if norm > tol {
            out.push(v / norm);
        }
    }
    out
}
