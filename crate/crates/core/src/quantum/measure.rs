use num_complex::Complex64;
use rand::Rng;

use super::{
    hermitian_eigenvalues, is_hermitian, psd_sqrt, trace_product, CMatrix, DensityOperator,
    ALGEBRA_TOL,
};
use crate::error::{Error, Result};

/// Probabilities below this are treated as impossible outcomes.
const MIN_PROBABILITY: f64 = 1e-12;

/// Positive operator-valued measure: PSD effects summing to the identity.
#[derive(Debug, Clone)]
pub struct Povm {
    n_qubits: usize,
    effects: Vec<CMatrix>,
}

impl Povm {
    pub fn new(effects: Vec<CMatrix>) -> Result<Self> {
        let first = effects.first().ok_or_else(|| Error::validation("POVM has no effects"))?;
        let d = first.nrows();
        if d == 0 || !d.is_power_of_two() {
            return Err(Error::validation(format!("effect dimension {d} is not a power of two")));
        }
        let mut sum = CMatrix::zeros(d, d);
        for (i, e) in effects.iter().enumerate() {
            if e.nrows() != d || e.ncols() != d {
                return Err(Error::Dimension { expected: d, got: e.nrows() });
            }
            if !is_hermitian(e, ALGEBRA_TOL) {
                return Err(Error::validation(format!("effect {i} is not Hermitian")));
            }
            if hermitian_eigenvalues(e)[0] < -ALGEBRA_TOL {
                return Err(Error::validation(format!("effect {i} is not PSD")));
            }
            sum += e;
        }
        if (sum - CMatrix::identity(d, d)).iter().any(|z| z.norm() > ALGEBRA_TOL) {
            return Err(Error::validation("POVM effects do not sum to the identity"));
        }
        Ok(Povm { n_qubits: d.trailing_zeros() as usize, effects })
    }

    /// Computational-basis measurement on `n_qubits` qubits.
    pub fn computational(n_qubits: usize) -> Self {
        let d = 1usize << n_qubits;
        let effects = (0..d)
            .map(|i| {
                let mut m = CMatrix::zeros(d, d);
                m[(i, i)] = Complex64::new(1.0, 0.0);
                m
            })
            .collect();
        Povm { n_qubits, effects }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn effects(&self) -> &[CMatrix] {
        &self.effects
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn is_projective(&self, tol: f64) -> bool {
        self.effects.iter().all(|e| (e * e - e).iter().all(|z| z.norm() <= tol))
    }

    /// `Tr[M_a ρ]` for every outcome.
    pub fn probabilities(&self, rho: &CMatrix) -> Vec<f64> {
        self.effects.iter().map(|e| trace_product(e, rho).re).collect()
    }
}

/// Samples an outcome with probability `Tr[M_a ρ]` and returns the
/// normalized post-measurement state `√M_a ρ √M_a / Pr(a)`.
pub fn measure(
    rho: &DensityOperator,
    povm: &Povm,
    rng: &mut impl Rng,
) -> Result<(usize, DensityOperator)> {
    if povm.n_qubits() != rho.n_qubits() {
        return Err(Error::Dimension { expected: rho.n_qubits(), got: povm.n_qubits() });
    }
    let probs = povm.probabilities(rho.matrix());
    let a = sample_index(&probs, rng)?;
    let root = effect_root(povm, a);
    let post = &root * rho.matrix() * root.adjoint() / Complex64::new(probs[a], 0.0);
    Ok((a, DensityOperator::from_parts_unchecked(rho.n_qubits(), post)))
}

/// Measures `povm` on the listed qubits (first listed = most significant
/// local index), leaving the rest untouched. Equivalent to measuring the
/// embedded effects `M_a ⊗ I`.
pub fn measure_local(
    rho: &DensityOperator,
    povm: &Povm,
    qubits: &[usize],
    rng: &mut impl Rng,
) -> Result<(usize, DensityOperator)> {
    let n = rho.n_qubits();
    check_subset(qubits, n)?;
    if povm.n_qubits() != qubits.len() {
        return Err(Error::Dimension { expected: qubits.len(), got: povm.n_qubits() });
    }
    let reduced = reduced_matrix(rho.matrix(), qubits, n);
    let probs = povm.probabilities(&reduced);
    let a = sample_index(&probs, rng)?;
    let root = effect_root(povm, a);
    // (L ⊗ I) ρ (L ⊗ I)†, using ρ = ρ†.
    let left = apply_local_matrix(&root, qubits, n, rho.matrix());
    let both = apply_local_matrix(&root, qubits, n, &left.adjoint()).adjoint();
    let post = both / Complex64::new(probs[a], 0.0);
    Ok((a, DensityOperator::from_parts_unchecked(n, post)))
}

fn effect_root(povm: &Povm, a: usize) -> CMatrix {
    let e = &povm.effects()[a];
    if (e * e - e).iter().all(|z| z.norm() <= ALGEBRA_TOL) {
        e.clone()
    } else {
        psd_sqrt(e)
    }
}

pub(crate) fn sample_index(probs: &[f64], rng: &mut impl Rng) -> Result<usize> {
    let total: f64 = probs.iter().map(|p| p.max(0.0)).sum();
    if probs.iter().all(|p| *p < MIN_PROBABILITY) || total <= 0.0 {
        return Err(Error::Numerical("all outcome probabilities vanish".into()));
    }
    let r = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (i, p) in probs.iter().enumerate() {
        if *p < MIN_PROBABILITY {
            continue;
        }
        acc += p;
        last = i;
        if r < acc {
            return Ok(i);
        }
    }
    Ok(last)
}

fn check_subset(qubits: &[usize], n: usize) -> Result<()> {
    let mut seen = 0u64;
    for &q in qubits {
        if q >= n {
            return Err(Error::validation(format!("qubit {q} out of range for {n} qubits")));
        }
        if seen & (1 << q) != 0 {
            return Err(Error::validation(format!("qubit {q} listed twice")));
        }
        seen |= 1 << q;
    }
    Ok(())
}

/// Basis-index offsets of each local index, and the mask of touched bits.
fn local_layout(qubits: &[usize], n: usize) -> (Vec<usize>, usize) {
    let k = qubits.len();
    let bits: Vec<usize> = qubits.iter().map(|q| 1usize << (n - 1 - q)).collect();
    let offsets = (0..1usize << k)
        .map(|l| {
            (0..k)
                .filter(|j| (l >> (k - 1 - j)) & 1 == 1)
                .fold(0, |acc, j| acc | bits[j])
        })
        .collect();
    (offsets, bits.iter().fold(0, |a, b| a | b))
}

/// Applies `op` (on the listed qubits) to a state vector in place.
pub fn apply_local(op: &CMatrix, qubits: &[usize], n: usize, v: &mut [Complex64]) {
    let (offsets, mask) = local_layout(qubits, n);
    let d = offsets.len();
    assert_eq!(op.nrows(), d);
    let mut buf = vec![Complex64::new(0.0, 0.0); d];
    for base in (0..1usize << n).filter(|i| i & mask == 0) {
        for (l, off) in offsets.iter().enumerate() {
            buf[l] = v[base | off];
        }
        for (r, off) in offsets.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (c, b) in buf.iter().enumerate() {
                acc += op[(r, c)] * b;
            }
            v[base | off] = acc;
        }
    }
}

fn apply_local_matrix(op: &CMatrix, qubits: &[usize], n: usize, m: &CMatrix) -> CMatrix {
    let mut out = m.clone();
    for mut col in out.column_iter_mut() {
        apply_local(op, qubits, n, col.as_mut_slice());
    }
    out
}

/// Partial trace keeping the listed qubits, in the listed order.
pub fn reduced_matrix(m: &CMatrix, qubits: &[usize], n: usize) -> CMatrix {
    let (offsets, mask) = local_layout(qubits, n);
    let d = offsets.len();
    let mut out = CMatrix::zeros(d, d);
    for base in (0..1usize << n).filter(|i| i & mask == 0) {
        for (a, oa) in offsets.iter().enumerate() {
            for (b, ob) in offsets.iter().enumerate() {
                out[(a, b)] += m[(base | oa, base | ob)];
            }
        }
    }
    out
}

/// `op ⊗ I` with `op` placed on the listed qubits of an `n`-qubit register.
pub fn embed_operator(op: &CMatrix, qubits: &[usize], n: usize) -> CMatrix {
    apply_local_matrix(op, qubits, n, &CMatrix::identity(1 << n, 1 << n))
}
