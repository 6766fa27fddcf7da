//! Dense complex linear algebra for small registers.
//!
//! Matrices are `nalgebra` dense matrices over `Complex64`. Qubit 0 is the
//! leftmost tensor factor throughout.

mod channel;
mod measure;
mod pauli;
mod state;

pub use channel::{pauli_basis, pauli_basis_index, LinearChannel, MeasurePrepareTerm};
pub(crate) use measure::sample_index;
pub use measure::{apply_local, embed_operator, measure, measure_local, reduced_matrix, Povm};
pub use pauli::{Pauli, PauliExpr, PauliWord};
pub use state::{max_eigenpair, max_eigenpair_dense, DensityOperator, EigenResult};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Default cap on register size for dense simulation.
pub const DEFAULT_MAX_QUBITS: usize = 12;

/// Identity/Hermiticity/trace tolerance for algebraic checks.
pub const ALGEBRA_TOL: f64 = 1e-9;

/// Residual tolerance for eigenpairs.
pub const EIGEN_TOL: f64 = 1e-7;

/// Current qubit cap: `QRAO_MAX_QUBITS` if set and valid, else 12.
pub fn max_qubits() -> usize {
    std::env::var("QRAO_MAX_QUBITS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0 && n <= 30)
        .unwrap_or(DEFAULT_MAX_QUBITS)
}

pub(crate) fn check_qubit_cap(what: &'static str, n: usize) -> Result<()> {
    let limit = max_qubits();
    if n > limit {
        return Err(Error::Size { what, required: n, limit });
    }
    Ok(())
}

pub fn pauli_matrix(p: Pauli) -> CMatrix {
    PauliWord::single(0, p).to_dense(1)
}

pub fn identity(n_qubits: usize) -> CMatrix {
    CMatrix::identity(1 << n_qubits, 1 << n_qubits)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// `Tr[A B]` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    assert_eq!(a.ncols(), b.nrows());
    assert_eq!(a.nrows(), b.ncols());
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && (m - m.adjoint()).iter().all(|z| z.norm() <= tol)
}

/// Hermitian part's eigenvalues, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Principal square root of a PSD matrix.
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let roots = eig.eigenvalues.map(|l| Complex64::new(l.max(0.0).sqrt(), 0.0));
    &eig.eigenvectors * CMatrix::from_diagonal(&roots) * eig.eigenvectors.adjoint()
}

pub fn matrix_rank(m: &CMatrix, tol: f64) -> usize {
    m.clone().svd(false, false).singular_values.iter().filter(|s| **s > tol).count()
}

pub fn c64(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn ket_from_slice(amps: &[Complex64]) -> CVector {
    CVector::from_column_slice(amps)
}
