use num_complex::Complex64;

use super::{
    check_qubit_cap, hermitian_eigenvalues, is_hermitian, trace_product, CMatrix, CVector,
    PauliExpr, ALGEBRA_TOL,
};
use crate::error::{Error, Result};

/// Unit-trace positive semidefinite Hermitian operator on `n_qubits` qubits.
///
/// States built from a ket remember it; measurement sampling uses the ket (or
/// an eigen-ensemble for mixed states) instead of the full matrix.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    n_qubits: usize,
    matrix: CMatrix,
    ket: Option<CVector>,
}

impl DensityOperator {
    /// Validates Hermiticity, unit trace and positivity to 1e-9.
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        let n_qubits = qubits_for_dim(matrix.nrows())?;
        if matrix.ncols() != matrix.nrows() {
            return Err(Error::Dimension { expected: matrix.nrows(), got: matrix.ncols() });
        }
        if !is_hermitian(&matrix, ALGEBRA_TOL) {
            return Err(Error::validation("density operator is not Hermitian"));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > ALGEBRA_TOL || tr.im.abs() > ALGEBRA_TOL {
            return Err(Error::validation(format!("density operator trace is {tr}, expected 1")));
        }
        if let Some(&min) = hermitian_eigenvalues(&matrix).first() {
            if min < -ALGEBRA_TOL {
                return Err(Error::validation(format!(
                    "density operator has negative eigenvalue {min:e}"
                )));
            }
        }
        Ok(DensityOperator { n_qubits, matrix, ket: None })
    }

    /// Pure state `|ψ⟩⟨ψ|`; the ket is normalized first.
    pub fn from_ket(ket: CVector) -> Result<Self> {
        let n_qubits = qubits_for_dim(ket.len())?;
        let norm = ket.norm();
        if norm < 1e-12 {
            return Err(Error::Numerical("cannot normalize a zero ket".into()));
        }
        let ket = ket / Complex64::new(norm, 0.0);
        let matrix = &ket * ket.adjoint();
        Ok(DensityOperator { n_qubits, matrix, ket: Some(ket) })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis_state(n_qubits: usize, index: usize) -> Result<Self> {
        let mut v = CVector::zeros(1 << n_qubits);
        v[index] = Complex64::new(1.0, 0.0);
        DensityOperator::from_ket(v)
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let d = 1usize << n_qubits;
        DensityOperator {
            n_qubits,
            matrix: CMatrix::identity(d, d) / Complex64::new(d as f64, 0.0),
            ket: None,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn ket(&self) -> Option<&CVector> {
        self.ket.as_ref()
    }

    pub fn purity(&self) -> f64 {
        trace_product(&self.matrix, &self.matrix).re
    }

    pub fn tensor(&self, other: &DensityOperator) -> DensityOperator {
        let ket = match (&self.ket, &other.ket) {
            (Some(a), Some(b)) => Some(a.kronecker(b)),
            _ => None,
        };
        DensityOperator {
            n_qubits: self.n_qubits + other.n_qubits,
            matrix: self.matrix.kronecker(&other.matrix),
            ket,
        }
    }

    pub fn tensor_all<'a>(parts: impl IntoIterator<Item = &'a DensityOperator>) -> Option<Self> {
        parts.into_iter().fold(None, |acc: Option<DensityOperator>, p| {
            Some(match acc {
                None => p.clone(),
                Some(a) => a.tensor(p),
            })
        })
    }

    /// `Tr[obs · ρ]`, checking the imaginary residue is below 1e-9.
    pub fn expectation(&self, obs: &PauliExpr) -> Result<f64> {
        if obs.n_qubits() != self.n_qubits {
            return Err(Error::Dimension { expected: self.n_qubits, got: obs.n_qubits() });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (w, c) in obs.terms() {
            let mut t = Complex64::new(0.0, 0.0);
            w.for_each_entry(self.n_qubits, |r, col, v| t += v * self.matrix[(col, r)]);
            acc += t * *c;
        }
        if acc.im.abs() > ALGEBRA_TOL * (1.0 + acc.re.abs()) {
            return Err(Error::Numerical(format!(
                "expectation has imaginary part {:e}",
                acc.im
            )));
        }
        Ok(acc.re)
    }

    /// Mixture decomposition `Σ p_k |ψ_k⟩⟨ψ_k|` with weights above 1e-12.
    pub fn ensemble(&self) -> Vec<(f64, CVector)> {
        if let Some(k) = &self.ket {
            return vec![(1.0, k.clone())];
        }
        let eig = self.matrix.clone().symmetric_eigen();
        let mut out: Vec<(f64, CVector)> = eig
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, l)| **l > 1e-12)
            .map(|(i, l)| (*l, eig.eigenvectors.column(i).into_owned()))
            .collect();
        let total: f64 = out.iter().map(|(p, _)| p).sum();
        for (p, _) in &mut out {
            *p /= total;
        }
        out
    }

    /// Attaches the dominant eigenvector as the ket when the state is pure to 1e-9.
    pub fn with_ket(mut self) -> Self {
        if self.ket.is_none() && (self.purity() - 1.0).abs() <= ALGEBRA_TOL {
            let mut ens = self.ensemble();
            ens.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
            self.ket = ens.into_iter().next().map(|(_, v)| v);
        }
        self
    }

    pub(crate) fn from_parts_unchecked(n_qubits: usize, matrix: CMatrix) -> Self {
        DensityOperator { n_qubits, matrix, ket: None }
    }
}

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::validation(format!("dimension {dim} is not a power of two")));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Largest eigenvalue and a unit eigenvector stored as a rank-1 state.
#[derive(Debug, Clone)]
pub struct EigenResult {
    pub max_eigenvalue: f64,
    pub state: DensityOperator,
    /// `‖H v − λ v‖` for the returned vector.
    pub residual: f64,
}

pub fn max_eigenpair(h: &PauliExpr) -> Result<EigenResult> {
    check_qubit_cap("eigensolver qubits", h.n_qubits())?;
    max_eigenpair_dense(&h.to_dense()?)
}

/// Dense Hermitian eigensolve; among degenerate maximizers any vector is returned.
pub fn max_eigenpair_dense(h: &CMatrix) -> Result<EigenResult> {
    if !is_hermitian(h, ALGEBRA_TOL) {
        return Err(Error::validation("eigensolver input is not Hermitian"));
    }
    let eig = h.clone().symmetric_eigen();
    let (idx, &lambda) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .ok_or_else(|| Error::Numerical("empty matrix".into()))?;
    let v: CVector = eig.eigenvectors.column(idx).into_owned();
    let residual = (h * &v - &v * Complex64::new(lambda, 0.0)).norm();
    if residual > super::EIGEN_TOL {
        return Err(Error::Numerical(format!("eigenpair residual {residual:e} too large")));
    }
    Ok(EigenResult {
        max_eigenvalue: lambda,
        state: DensityOperator::from_ket(v)?,
        residual,
    })
}
