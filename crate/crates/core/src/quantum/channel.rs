use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{c64, trace_product, CMatrix, DensityOperator, Pauli, PauliWord, ALGEBRA_TOL};
use crate::error::{Error, Result};

/// One `τ ↦ Tr[effect · τ] · output` term of a measure-and-prepare map.
#[derive(Debug, Clone)]
pub struct MeasurePrepareTerm {
    pub effect: CMatrix,
    pub output: CMatrix,
}

#[derive(Debug, Clone)]
enum Repr {
    Kraus(Vec<CMatrix>),
    MeasurePrepare(Vec<MeasurePrepareTerm>),
}

/// Trace-preserving linear map on operators of an `n_qubits` register.
#[derive(Debug, Clone)]
pub struct LinearChannel {
    n_qubits: usize,
    repr: Repr,
}

impl LinearChannel {
    /// `τ ↦ Σ K τ K†`; requires `Σ K†K = I`.
    pub fn kraus(ops: Vec<CMatrix>) -> Result<Self> {
        let d = common_dim(ops.iter())?;
        let sum = ops.iter().fold(CMatrix::zeros(d, d), |acc, k| acc + k.adjoint() * k);
        if !near_identity(&sum) {
            return Err(Error::validation("Kraus operators are not trace preserving"));
        }
        Ok(LinearChannel {
            n_qubits: d.trailing_zeros() as usize,
            repr: Repr::Kraus(ops),
        })
    }

    /// `τ ↦ Σ Tr[E τ] σ`; requires `Σ Tr[σ] E = I`.
    pub fn measure_prepare(terms: Vec<MeasurePrepareTerm>) -> Result<Self> {
        let d = common_dim(terms.iter().flat_map(|t| [&t.effect, &t.output]))?;
        let sum = terms
            .iter()
            .fold(CMatrix::zeros(d, d), |acc, t| acc + &t.effect * t.output.trace());
        if !near_identity(&sum) {
            return Err(Error::validation("measure-prepare map is not trace preserving"));
        }
        Ok(LinearChannel {
            n_qubits: d.trailing_zeros() as usize,
            repr: Repr::MeasurePrepare(terms),
        })
    }

    pub fn identity(n_qubits: usize) -> Self {
        LinearChannel {
            n_qubits,
            repr: Repr::Kraus(vec![CMatrix::identity(1 << n_qubits, 1 << n_qubits)]),
        }
    }

    /// Single-qubit depolarizing map `ρ ↦ λ I/2 + (1 − λ) ρ`.
    pub fn depolarizing(lambda: f64) -> Result<Self> {
        if !(0.0..=4.0 / 3.0).contains(&lambda) {
            return Err(Error::validation(format!("depolarizing parameter {lambda} out of range")));
        }
        let mut ops = vec![CMatrix::identity(2, 2) * c64((1.0 - 0.75 * lambda).sqrt())];
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            ops.push(PauliWord::single(0, p).to_dense(1) * c64((lambda / 4.0).sqrt()));
        }
        LinearChannel::kraus(ops)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Action on an arbitrary operator.
    pub fn apply_operator(&self, tau: &CMatrix) -> CMatrix {
        let d = 1usize << self.n_qubits;
        assert_eq!(tau.nrows(), d, "operator dimension mismatch");
        match &self.repr {
            Repr::Kraus(ops) => ops
                .iter()
                .fold(CMatrix::zeros(d, d), |acc, k| acc + k * tau * k.adjoint()),
            Repr::MeasurePrepare(terms) => terms.iter().fold(CMatrix::zeros(d, d), |acc, t| {
                acc + &t.output * trace_product(&t.effect, tau)
            }),
        }
    }

    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        if rho.n_qubits() != self.n_qubits {
            return Err(Error::Dimension { expected: self.n_qubits, got: rho.n_qubits() });
        }
        DensityOperator::from_matrix(self.apply_operator(rho.matrix()))
    }

    /// Pauli transfer matrix `R[q][p] = Tr[Q Φ(P)] / 2^n`, words ordered by
    /// [`pauli_basis`].
    pub fn transfer_matrix(&self) -> DMatrix<f64> {
        let basis = pauli_basis(self.n_qubits);
        let dense: Vec<CMatrix> = basis.iter().map(|w| w.to_dense(self.n_qubits)).collect();
        let d = (1usize << self.n_qubits) as f64;
        let images: Vec<CMatrix> = dense.iter().map(|p| self.apply_operator(p)).collect();
        DMatrix::from_fn(basis.len(), basis.len(), |q, p| {
            trace_product(&dense[q], &images[p]).re / d
        })
    }
}

/// All `4^n` Pauli words on `n` qubits; index digit `k` (base 4, most
/// significant first) selects the Pauli on qubit `k` in I, X, Y, Z order.
pub fn pauli_basis(n_qubits: usize) -> Vec<PauliWord> {
    (0..1usize << (2 * n_qubits))
        .map(|idx| {
            (0..n_qubits).fold(PauliWord::IDENTITY, |w, q| {
                let digit = (idx >> (2 * (n_qubits - 1 - q))) & 3;
                w.with(q, Pauli::ALL[digit])
            })
        })
        .collect()
}

/// Position of `w` in [`pauli_basis`] order.
pub fn pauli_basis_index(w: &PauliWord, n_qubits: usize) -> usize {
    (0..n_qubits).fold(0, |acc, q| {
        let digit = Pauli::ALL.iter().position(|p| *p == w.get(q)).unwrap();
        (acc << 2) | digit
    })
}

fn common_dim<'a>(mats: impl Iterator<Item = &'a CMatrix>) -> Result<usize> {
    let mut dim = None;
    for m in mats {
        if !m.is_square() {
            return Err(Error::validation("channel operators must be square"));
        }
        match dim {
            None => dim = Some(m.nrows()),
            Some(d) if d != m.nrows() => {
                return Err(Error::Dimension { expected: d, got: m.nrows() })
            }
            _ => {}
        }
    }
    let d = dim.ok_or_else(|| Error::validation("channel has no operators"))?;
    if !d.is_power_of_two() {
        return Err(Error::validation(format!("dimension {d} is not a power of two")));
    }
    Ok(d)
}

fn near_identity(m: &CMatrix) -> bool {
    let d = m.nrows();
    (m - CMatrix::identity(d, d))
        .iter()
        .all(|z: &Complex64| z.norm() <= ALGEBRA_TOL)
}
