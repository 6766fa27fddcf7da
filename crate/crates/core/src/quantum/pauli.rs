use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use super::{check_qubit_cap, CMatrix};
use crate::error::{Error, Result};

/// Coefficients smaller than this are dropped from a [`PauliExpr`].
const PRUNE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// Tensor product of single-qubit Paulis in symplectic form.
///
/// Bit `k` of `x`/`z` describes qubit `k`; qubit 0 is the leftmost tensor
/// factor and therefore the most significant bit of a basis-state index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PauliWord {
    x: u64,
    z: u64,
}

impl PauliWord {
    pub const IDENTITY: PauliWord = PauliWord { x: 0, z: 0 };

    pub fn single(qubit: usize, p: Pauli) -> Self {
        PauliWord::IDENTITY.with(qubit, p)
    }

    /// Builds a word from `(qubit, Pauli)` pairs; later pairs overwrite earlier ones.
    pub fn from_sparse(ops: &[(usize, Pauli)]) -> Self {
        ops.iter().fold(PauliWord::IDENTITY, |w, &(q, p)| w.with(q, p))
    }

    pub fn parse(s: &str) -> Result<Self> {
        let mut w = PauliWord::IDENTITY;
        for (q, c) in s.chars().enumerate() {
            let p = Pauli::from_symbol(c)
                .ok_or_else(|| Error::validation(format!("`{c}` is not a Pauli symbol")))?;
            w = w.with(q, p);
        }
        Ok(w)
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        Pauli::from_bits((self.x >> qubit) & 1 == 1, (self.z >> qubit) & 1 == 1)
    }

    pub fn with(mut self, qubit: usize, p: Pauli) -> Self {
        let (x, z) = p.bits();
        let bit = 1u64 << qubit;
        self.x = (self.x & !bit) | if x { bit } else { 0 };
        self.z = (self.z & !bit) | if z { bit } else { 0 };
        self
    }

    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    /// Highest qubit index touched plus one.
    pub fn span(&self) -> usize {
        64 - self.support().leading_zeros() as usize
    }

    pub fn is_identity(&self) -> bool {
        self.support() == 0
    }

    /// Sub-word on qubits `offset..offset+len`, re-indexed from 0.
    pub fn extract(&self, offset: usize, len: usize) -> PauliWord {
        let mask = (1u64 << len) - 1;
        PauliWord {
            x: (self.x >> offset) & mask,
            z: (self.z >> offset) & mask,
        }
    }

    /// Places `sub` on qubits starting at `offset`.
    pub fn insert(&self, offset: usize, len: usize, sub: PauliWord) -> PauliWord {
        let mask = ((1u64 << len) - 1) << offset;
        PauliWord {
            x: (self.x & !mask) | (sub.x << offset),
            z: (self.z & !mask) | (sub.z << offset),
        }
    }

    pub fn to_label(&self, n_qubits: usize) -> String {
        (0..n_qubits).map(|q| self.get(q).symbol()).collect()
    }

    /// Masks in basis-index convention plus the `i^{#Y}` phase exponent.
    fn index_form(&self, n: usize) -> (usize, usize, u32) {
        let mut xm = 0usize;
        let mut zm = 0usize;
        for q in 0..n {
            let bit = 1usize << (n - 1 - q);
            if (self.x >> q) & 1 == 1 {
                xm |= bit;
            }
            if (self.z >> q) & 1 == 1 {
                zm |= bit;
            }
        }
        (xm, zm, (self.x & self.z).count_ones() % 4)
    }

    /// Calls `f(row, col, value)` for each nonzero entry of the `2^n`-dimensional matrix.
    pub(crate) fn for_each_entry(&self, n: usize, mut f: impl FnMut(usize, usize, Complex64)) {
        let (xm, zm, ny) = self.index_form(n);
        let phase = I_POWERS[ny as usize];
        for col in 0..(1usize << n) {
            let sign = if (zm & col).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            f(col ^ xm, col, phase * sign);
        }
    }

    pub fn to_dense(&self, n: usize) -> CMatrix {
        let dim = 1usize << n;
        let mut m = CMatrix::zeros(dim, dim);
        self.for_each_entry(n, |r, c, v| m[(r, c)] = v);
        m
    }
}

const I_POWERS: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

/// Real-weighted sum of Pauli words on `n_qubits` qubits.
///
/// Real coefficients on Hermitian words make every expression Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliExpr {
    n_qubits: usize,
    terms: BTreeMap<PauliWord, f64>,
}

impl PauliExpr {
    pub fn zero(n_qubits: usize) -> Self {
        assert!(n_qubits <= 64, "PauliExpr supports at most 64 qubits");
        PauliExpr { n_qubits, terms: BTreeMap::new() }
    }

    pub fn identity(n_qubits: usize, coeff: f64) -> Self {
        let mut e = PauliExpr::zero(n_qubits);
        e.add_term(PauliWord::IDENTITY, coeff);
        e
    }

    pub fn from_terms(n_qubits: usize, terms: impl IntoIterator<Item = (PauliWord, f64)>) -> Self {
        let mut e = PauliExpr::zero(n_qubits);
        for (w, c) in terms {
            e.add_term(w, c);
        }
        e
    }

    /// Parses `(label, coeff)` pairs such as `("XX", 3.0)`.
    pub fn from_labels(n_qubits: usize, terms: &[(&str, f64)]) -> Result<Self> {
        let mut e = PauliExpr::zero(n_qubits);
        for (label, c) in terms {
            if label.chars().count() != n_qubits {
                return Err(Error::Dimension {
                    expected: n_qubits,
                    got: label.chars().count(),
                });
            }
            e.add_term(PauliWord::parse(label)?, *c);
        }
        Ok(e)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn add_term(&mut self, word: PauliWord, coeff: f64) {
        assert!(
            word.span() <= self.n_qubits,
            "word {} exceeds {} qubits",
            word.to_label(word.span()),
            self.n_qubits
        );
        let entry = self.terms.entry(word).or_insert(0.0);
        *entry += coeff;
        if entry.abs() <= PRUNE {
            self.terms.remove(&word);
        }
    }

    pub fn coefficient(&self, word: &PauliWord) -> f64 {
        self.terms.get(word).copied().unwrap_or(0.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliWord, &f64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scaled(&self, s: f64) -> Self {
        PauliExpr::from_terms(self.n_qubits, self.terms.iter().map(|(w, c)| (*w, c * s)))
    }

    /// Re-embeds the expression into a larger register, starting at `offset`.
    pub fn embed(&self, n_qubits: usize, offset: usize) -> Self {
        assert!(offset + self.n_qubits <= n_qubits);
        PauliExpr::from_terms(
            n_qubits,
            self.terms
                .iter()
                .map(|(w, c)| (PauliWord::IDENTITY.insert(offset, self.n_qubits, *w), *c)),
        )
    }

    /// Product of two expressions acting on disjoint qubit supports.
    ///
    /// Panics if any pair of words overlaps, since the product would not be
    /// Hermitian in general.
    pub fn disjoint_product(&self, other: &PauliExpr) -> Self {
        assert_eq!(self.n_qubits, other.n_qubits);
        let mut out = PauliExpr::zero(self.n_qubits);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                assert_eq!(a.support() & b.support(), 0, "overlapping supports");
                out.add_term(
                    PauliWord { x: a.x | b.x, z: a.z | b.z },
                    ca * cb,
                );
            }
        }
        out
    }

    /// Dense Kronecker expansion.
    pub fn to_dense(&self) -> Result<CMatrix> {
        check_qubit_cap("dense Pauli expansion qubits", self.n_qubits)?;
        let dim = 1usize << self.n_qubits;
        let mut m = CMatrix::zeros(dim, dim);
        for (w, c) in &self.terms {
            w.for_each_entry(self.n_qubits, |r, col, v| m[(r, col)] += v * *c);
        }
        Ok(m)
    }

    /// Largest absolute difference between coefficients of the two expressions.
    pub fn max_abs_diff(&self, other: &PauliExpr) -> f64 {
        let mut worst: f64 = 0.0;
        for (w, c) in &self.terms {
            worst = worst.max((c - other.coefficient(w)).abs());
        }
        for (w, c) in &other.terms {
            worst = worst.max((c - self.coefficient(w)).abs());
        }
        worst
    }
}

impl fmt::Display for PauliExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}*{}", w.to_label(self.n_qubits))?;
        }
        Ok(())
    }
}

impl Add<&PauliExpr> for &PauliExpr {
    type Output = PauliExpr;

    fn add(self, rhs: &PauliExpr) -> PauliExpr {
        assert_eq!(self.n_qubits, rhs.n_qubits);
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(*w, *c);
        }
        out
    }
}

impl Sub<&PauliExpr> for &PauliExpr {
    type Output = PauliExpr;

    fn sub(self, rhs: &PauliExpr) -> PauliExpr {
        self + &rhs.scaled(-1.0)
    }
}

impl Mul<f64> for &PauliExpr {
    type Output = PauliExpr;

    fn mul(self, rhs: f64) -> PauliExpr {
        self.scaled(rhs)
    }
}
