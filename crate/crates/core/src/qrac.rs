//! Quantum random access codes and their measurement families.
//!
//! Bit position `k` (1-based) is tied to a fixed operator per code: for the
//! single-qubit codes position 1 ↔ X, 2 ↔ Y, 3 ↔ Z (the (2,1) code uses X and
//! Z, the (1,1) code Z alone), and for the (3,2) code the two-qubit operators
//! X′, Y′, Z′. An encoded state carries `(-1)^{x_k}` on each of them.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::quantum::{
    c64, CMatrix, CVector, DensityOperator, Pauli, PauliExpr, PauliWord, Povm, ALGEBRA_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QracKind {
    /// One bit per qubit, `Z` only.
    OneOne,
    /// Two bits per qubit on the X–Z square.
    TwoOne,
    /// Three bits per qubit on the cube corners.
    ThreeOne,
    /// Three bits on a qubit pair.
    ThreeTwo,
    /// Two bits per qubit with their parity in the Z slot (tetrahedron).
    Tetra,
}

impl QracKind {
    pub const ALL: [QracKind; 5] = [
        QracKind::OneOne,
        QracKind::TwoOne,
        QracKind::ThreeOne,
        QracKind::ThreeTwo,
        QracKind::Tetra,
    ];

    pub fn bits_per_unit(self) -> usize {
        match self {
            QracKind::OneOne => 1,
            QracKind::TwoOne | QracKind::Tetra => 2,
            QracKind::ThreeOne | QracKind::ThreeTwo => 3,
        }
    }

    pub fn qubits_per_unit(self) -> usize {
        match self {
            QracKind::ThreeTwo => 2,
            _ => 1,
        }
    }

    /// Nominal bits per qubit.
    pub fn compression_ratio(self) -> f64 {
        self.bits_per_unit() as f64 / self.qubits_per_unit() as f64
    }

    /// Whether vertices sharing a unit must be non-adjacent.
    pub fn needs_coloring(self) -> bool {
        !matches!(self, QracKind::Tetra)
    }

    /// Optimal per-bit decoding success probability.
    pub fn success_probability(self) -> f64 {
        0.5 + 0.5 * self.bias()
    }

    /// `|Tr[P_k ρ_x]|` for the unit-norm relaxation operator `P_k` of each slot.
    pub fn bias(self) -> f64 {
        match self {
            QracKind::OneOne => 1.0,
            QracKind::TwoOne => 1.0 / 2f64.sqrt(),
            QracKind::ThreeOne | QracKind::Tetra => 1.0 / 3f64.sqrt(),
            QracKind::ThreeTwo => 2.0 / 6f64.sqrt(),
        }
    }

    /// `|Tr[P ρ_x]|` for the slot operator `P` returned by [`slot_operator`].
    /// Its inverse square is the relaxed-Hamiltonian edge coefficient.
    pub fn slot_scale(self) -> f64 {
        match self {
            QracKind::ThreeTwo => 1.0 / 6f64.sqrt(),
            k => k.bias(),
        }
    }

    /// Edge coefficient `c` in `½(I − c·P_i P_j)`.
    pub fn edge_coefficient(self) -> f64 {
        match self {
            QracKind::OneOne => 1.0,
            QracKind::TwoOne => 2.0,
            QracKind::ThreeOne | QracKind::Tetra => 3.0,
            QracKind::ThreeTwo => 6.0,
        }
    }

    /// Number of bit positions with a decoding POVM.
    pub fn decodable_positions(self) -> usize {
        self.bits_per_unit()
    }

    pub fn label(self) -> &'static str {
        match self {
            QracKind::OneOne => "11",
            QracKind::TwoOne => "21",
            QracKind::ThreeOne => "31",
            QracKind::ThreeTwo => "32",
            QracKind::Tetra => "tetra",
        }
    }
}

impl fmt::Display for QracKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for QracKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "11" => Ok(QracKind::OneOne),
            "21" => Ok(QracKind::TwoOne),
            "31" => Ok(QracKind::ThreeOne),
            "32" => Ok(QracKind::ThreeTwo),
            "tetra" => Ok(QracKind::Tetra),
            other => Err(Error::validation(format!("unknown encoding `{other}`"))),
        }
    }
}

fn sign(bit: u8) -> f64 {
    if bit == 0 {
        1.0
    } else {
        -1.0
    }
}

fn word(label: &str) -> PauliWord {
    PauliWord::parse(label).expect("static Pauli label")
}

fn check_bits(kind: QracKind, bits: &[u8]) -> Result<()> {
    if bits.len() != kind.bits_per_unit() {
        return Err(Error::Dimension { expected: kind.bits_per_unit(), got: bits.len() });
    }
    if bits.iter().any(|b| *b > 1) {
        return Err(Error::validation("bits must be 0 or 1"));
    }
    Ok(())
}

/// Single-qubit Pauli carrying slot `k` (0-based) of a single-qubit code.
fn single_qubit_slot(kind: QracKind, slot: usize) -> Option<Pauli> {
    let table: &[Pauli] = match kind {
        QracKind::OneOne => &[Pauli::Z],
        QracKind::TwoOne => &[Pauli::X, Pauli::Z],
        QracKind::ThreeOne => &[Pauli::X, Pauli::Y, Pauli::Z],
        QracKind::Tetra => &[Pauli::X, Pauli::Y],
        QracKind::ThreeTwo => &[],
    };
    table.get(slot).copied()
}

/// A classical tuple and its encoded density operator.
#[derive(Debug, Clone)]
pub struct EncodedState {
    pub kind: QracKind,
    pub bits: Vec<u8>,
    /// Pauli expansion of the density operator.
    pub expr: PauliExpr,
    pub state: DensityOperator,
}

/// Density-operator expansion of the encoded state.
pub fn encoded_expr(kind: QracKind, bits: &[u8]) -> Result<PauliExpr> {
    check_bits(kind, bits)?;
    let mut e = PauliExpr::identity(kind.qubits_per_unit(), 1.0 / (1 << kind.qubits_per_unit()) as f64);
    match kind {
        QracKind::OneOne | QracKind::TwoOne | QracKind::ThreeOne => {
            let r = 0.5 * kind.bias();
            for (slot, b) in bits.iter().enumerate() {
                let p = single_qubit_slot(kind, slot).unwrap();
                e.add_term(PauliWord::single(0, p), r * sign(*b));
            }
        }
        QracKind::Tetra => {
            let r = 0.5 / 3f64.sqrt();
            e.add_term(word("X"), r * sign(bits[0]));
            e.add_term(word("Y"), r * sign(bits[1]));
            e.add_term(word("Z"), r * sign(bits[0] ^ bits[1]));
        }
        QracKind::ThreeTwo => {
            let (s1, s2, s3) = (sign(bits[0]), sign(bits[1]), sign(bits[2]));
            if bits[0] ^ bits[1] ^ bits[2] == 0 {
                e.add_term(word("ZI"), 0.25 * s1);
                e.add_term(word("IZ"), 0.25 * s2);
                e.add_term(word("ZZ"), 0.25 * s3);
            } else {
                let (a, b) = (1.0 / 12.0, 1.0 / 6.0);
                e.add_term(word("ZI"), a * s1);
                e.add_term(word("XX"), b * s1);
                e.add_term(word("XZ"), b * s1);
                e.add_term(word("IX"), b * s2);
                e.add_term(word("IZ"), a * s2);
                e.add_term(word("YY"), b * s2);
                e.add_term(word("ZZ"), a * s3);
                e.add_term(word("XI"), -b * s3);
                e.add_term(word("ZX"), -b * s3);
            }
        }
    }
    Ok(e)
}

pub fn encode(kind: QracKind, bits: &[u8]) -> Result<EncodedState> {
    let expr = encoded_expr(kind, bits)?;
    let state = DensityOperator::from_matrix(expr.to_dense()?)?.with_ket();
    Ok(EncodedState { kind, bits: bits.to_vec(), expr, state })
}

/// Every bit tuple of the code's arity, in lexicographic order.
pub fn all_tuples(kind: QracKind) -> Vec<Vec<u8>> {
    let m = kind.bits_per_unit();
    (0..1usize << m)
        .map(|v| (0..m).map(|k| ((v >> (m - 1 - k)) & 1) as u8).collect())
        .collect()
}

/// Operator `P` with `Tr[P ρ_x] = bias · (−1)^{x_k}` used in the relaxed
/// Hamiltonian: a Pauli for single-qubit codes, X′/Y′/Z′ for the (3,2) code.
/// `slot` is 0-based.
pub fn slot_operator(kind: QracKind, slot: usize) -> Result<PauliExpr> {
    if slot >= kind.bits_per_unit() {
        return Err(Error::validation(format!("slot {} out of range for {kind}", slot + 1)));
    }
    match kind {
        QracKind::ThreeTwo => Ok(primed_operators()[slot].expr.clone()),
        _ => Ok(PauliExpr::from_terms(
            1,
            [(PauliWord::single(0, single_qubit_slot(kind, slot).unwrap()), 1.0)],
        )),
    }
}

/// Two-outcome projective measurement decoding bit `position` (1-based);
/// outcome `a` guesses the bit value `a`.
pub fn decoding_povm(kind: QracKind, position: usize) -> Result<Povm> {
    if position == 0 || position > kind.decodable_positions() {
        return Err(Error::validation(format!(
            "position {position} is not decodable for encoding {kind}"
        )));
    }
    let op = slot_operator(kind, position - 1)?;
    // Scale so the observable has eigenvalues ±1: primed operators have ±1/2.
    let obs = match kind {
        QracKind::ThreeTwo => op.scaled(2.0).to_dense()?,
        _ => op.to_dense()?,
    };
    let id = CMatrix::identity(obs.nrows(), obs.ncols());
    Povm::new(vec![(&id + &obs) * c64(0.5), (&id - &obs) * c64(0.5)])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimedLabel {
    X,
    Y,
    Z,
}

/// Two-qubit analogue of a Pauli operator used by the (3,2) relaxation.
#[derive(Debug, Clone)]
pub struct PrimedOperator {
    pub label: PrimedLabel,
    pub expr: PauliExpr,
}

/// X′, Y′, Z′ on a qubit pair (subscript 1 = first qubit).
pub fn primed_operators() -> [PrimedOperator; 3] {
    let k = 1.0 / 6f64.sqrt();
    let mk = |label, terms: &[(&str, f64)]| PrimedOperator {
        label,
        expr: PauliExpr::from_terms(2, terms.iter().map(|(l, c)| (word(l), k * c))),
    };
    [
        mk(PrimedLabel::X, &[("XX", 0.5), ("XZ", 0.5), ("ZI", 1.0)]),
        mk(PrimedLabel::Y, &[("IX", 0.5), ("IZ", 1.0), ("YY", 0.5)]),
        mk(PrimedLabel::Z, &[("ZZ", 1.0), ("XI", -0.5), ("ZX", -0.5)]),
    ]
}

/// Randomized-rounding measurement families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MagicFamily {
    /// Plain computational basis for the (1,1) code.
    Computational11,
    /// ξ± bases of the (2,1) code.
    Xi21,
    /// μ± bases of the (3,1) code.
    Mu31,
    /// Four-outcome bases of same-parity (3,2) states; index is the parity.
    Parity32,
    /// μ± bases with the tetrahedron decoding rule.
    TetraMu,
}

impl MagicFamily {
    pub fn for_kind(kind: QracKind) -> Self {
        match kind {
            QracKind::OneOne => MagicFamily::Computational11,
            QracKind::TwoOne => MagicFamily::Xi21,
            QracKind::ThreeOne => MagicFamily::Mu31,
            QracKind::ThreeTwo => MagicFamily::Parity32,
            QracKind::Tetra => MagicFamily::TetraMu,
        }
    }

    /// Valid basis indices, each chosen uniformly during rounding.
    pub fn indices(self) -> std::ops::RangeInclusive<usize> {
        match self {
            MagicFamily::Computational11 => 1..=1,
            MagicFamily::Xi21 => 1..=2,
            MagicFamily::Mu31 | MagicFamily::TetraMu => 1..=4,
            MagicFamily::Parity32 => 0..=1,
        }
    }

    pub fn n_outcomes(self) -> usize {
        match self {
            MagicFamily::Parity32 => 4,
            _ => 2,
        }
    }

    pub fn kind(self) -> QracKind {
        match self {
            MagicFamily::Computational11 => QracKind::OneOne,
            MagicFamily::Xi21 => QracKind::TwoOne,
            MagicFamily::Mu31 => QracKind::ThreeOne,
            MagicFamily::Parity32 => QracKind::ThreeTwo,
            MagicFamily::TetraMu => QracKind::Tetra,
        }
    }
}

/// One projective rank-1 basis of a family, with its kets.
#[derive(Debug, Clone)]
pub struct MagicBasis {
    pub family: MagicFamily,
    pub index: usize,
    pub povm: Povm,
    /// `kets[a]` spans effect `a`.
    pub kets: Vec<CVector>,
}

/// Corner of the cube addressed by `μ_index`; `+` decodes to these bits.
const MU_SIGNS: [[u8; 3]; 4] = [[0, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 0]];
/// `ξ_index`'s `+` pattern.
const XI_SIGNS: [[u8; 2]; 2] = [[0, 0], [0, 1]];

pub fn magic_basis(family: MagicFamily, index: usize) -> Result<MagicBasis> {
    if !family.indices().contains(&index) {
        return Err(Error::validation(format!("basis index {index} invalid for {family:?}")));
    }
    let effects: Vec<CMatrix> = match family {
        MagicFamily::Computational11 => Povm::computational(1).effects().to_vec(),
        MagicFamily::Xi21 => {
            let plus = XI_SIGNS[index - 1];
            let minus = plus.map(|b| 1 - b);
            vec![
                encode(QracKind::TwoOne, &plus)?.state.matrix().clone(),
                encode(QracKind::TwoOne, &minus)?.state.matrix().clone(),
            ]
        }
        MagicFamily::Mu31 | MagicFamily::TetraMu => {
            let plus = MU_SIGNS[index - 1];
            let minus = plus.map(|b| 1 - b);
            vec![
                encode(QracKind::ThreeOne, &plus)?.state.matrix().clone(),
                encode(QracKind::ThreeOne, &minus)?.state.matrix().clone(),
            ]
        }
        MagicFamily::Parity32 => parity_tuples(index as u8)
            .iter()
            .map(|t| encode(QracKind::ThreeTwo, t).map(|e| e.state.matrix().clone()))
            .collect::<Result<_>>()?,
    };
    let kets = effects
        .iter()
        .map(|e| {
            DensityOperator::from_matrix(e.clone())
                .map(|d| d.with_ket())
                .and_then(|d| {
                    d.ket()
                        .cloned()
                        .ok_or_else(|| Error::Numerical("basis effect is not rank 1".into()))
                })
        })
        .collect::<Result<_>>()?;
    Ok(MagicBasis { family, index, povm: Povm::new(effects)?, kets })
}

/// The four 3-bit tuples of a parity, in lexicographic order.
pub fn parity_tuples(parity: u8) -> Vec<[u8; 3]> {
    (0u8..8)
        .map(|v| [(v >> 2) & 1, (v >> 1) & 1, v & 1])
        .filter(|t| t[0] ^ t[1] ^ t[2] == parity)
        .collect()
}

/// Maps a measurement outcome back to the unit's bit tuple.
///
/// Tetra non-singleton outcomes pick uniformly among the three remaining
/// patterns using `rng`; every other family is deterministic.
pub fn decode_outcome(
    family: MagicFamily,
    index: usize,
    outcome: usize,
    rng: &mut impl Rng,
) -> Result<Vec<u8>> {
    if !family.indices().contains(&index) {
        return Err(Error::validation(format!("basis index {index} invalid for {family:?}")));
    }
    if outcome >= family.n_outcomes() {
        return Err(Error::validation(format!("outcome {outcome} invalid for {family:?}")));
    }
    let flip = |bits: &[u8]| bits.iter().map(|b| 1 - b).collect::<Vec<u8>>();
    Ok(match family {
        MagicFamily::Computational11 => vec![outcome as u8],
        MagicFamily::Xi21 => {
            let plus = XI_SIGNS[index - 1];
            if outcome == 0 {
                plus.to_vec()
            } else {
                flip(&plus)
            }
        }
        MagicFamily::Mu31 => {
            let plus = MU_SIGNS[index - 1];
            if outcome == 0 {
                plus.to_vec()
            } else {
                flip(&plus)
            }
        }
        MagicFamily::Parity32 => parity_tuples(index as u8)[outcome].to_vec(),
        MagicFamily::TetraMu => {
            let singleton = index - 1;
            let pair = |i: usize| vec![(i >> 1) as u8 & 1, i as u8 & 1];
            if outcome == 0 {
                pair(singleton)
            } else {
                let others: Vec<usize> = (0..4).filter(|i| *i != singleton).collect();
                pair(others[rng.random_range(0..3)])
            }
        }
    })
}

/// True when `a` and `b` are trace-orthogonal to the algebra tolerance.
pub fn orthogonal(a: &DensityOperator, b: &DensityOperator) -> bool {
    crate::quantum::trace_product(a.matrix(), b.matrix()).norm() <= ALGEBRA_TOL
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{pauli_matrix, trace_product};
    use crate::rng::substream;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn tr(a: &CMatrix, b: &CMatrix) -> f64 {
        trace_product(a, b).re
    }

    #[test]
    fn kind_metadata() {
        let ratios: Vec<f64> = QracKind::ALL.iter().map(|k| k.compression_ratio()).collect();
        assert_eq!(ratios, vec![1.0, 2.0, 3.0, 1.5, 2.0]);
        for k in QracKind::ALL {
            assert_eq!(k.label().parse::<QracKind>().unwrap(), k);
        }
        assert!("41".parse::<QracKind>().is_err());
    }

    #[test]
    fn three_one_zero_state() {
        let e = encode(QracKind::ThreeOne, &[0, 0, 0]).unwrap();
        let s = 1.0 / 3f64.sqrt();
        let expected = (CMatrix::identity(2, 2)
            + (pauli_matrix(Pauli::X) + pauli_matrix(Pauli::Y) + pauli_matrix(Pauli::Z)) * c64(s))
            * c64(0.5);
        assert!((e.state.matrix() - expected).norm() < 1e-15);
        let x = PauliExpr::from_terms(1, [(word("X"), 1.0)]);
        assert!((e.state.expectation(&x).unwrap() - s).abs() < 1e-15);
    }

    #[test]
    fn three_two_zero_state_is_computational_projector() {
        let e = encode(QracKind::ThreeTwo, &[0, 0, 0]).unwrap();
        let proj = DensityOperator::basis_state(2, 0).unwrap();
        assert!((e.state.matrix() - proj.matrix()).norm() < 1e-15);
    }

    #[test]
    fn tetra_zero_one() {
        let e = encode(QracKind::Tetra, &[0, 1]).unwrap();
        let s = 1.0 / 3f64.sqrt();
        let expected = (CMatrix::identity(2, 2)
            + (pauli_matrix(Pauli::X) - pauli_matrix(Pauli::Y) - pauli_matrix(Pauli::Z)) * c64(s))
            * c64(0.5);
        assert!((e.state.matrix() - expected).norm() < 1e-15);
    }

    #[test]
    fn arity_mismatch() {
        assert!(matches!(encode(QracKind::ThreeOne, &[0, 1]), Err(Error::Dimension { .. })));
        assert!(encode(QracKind::Tetra, &[0, 2]).is_err());
    }

    #[test]
    fn every_encoded_state_is_pure() {
        for kind in QracKind::ALL {
            for t in all_tuples(kind) {
                let e = encode(kind, &t).unwrap();
                assert!((e.state.purity() - 1.0).abs() < 1e-9, "{kind} {t:?}");
                assert!(e.state.ket().is_some());
            }
        }
    }

    #[test]
    fn ket_forms_cross_check() {
        // (2,1): |ψ⟩ = cos θ|0⟩ + sin θ|1⟩ with Bloch vector (sin 2θ, 0, cos 2θ),
        // so the signs of X and Z pick θ = π/8, 3π/8, 7π/8, 5π/8 in tuple order.
        let tuples = [[0u8, 0], [0, 1], [1, 0], [1, 1]];
        let odd = [1.0, 3.0, 7.0, 5.0];
        for (k, t) in tuples.iter().enumerate() {
            let th = odd[k] * PI / 8.0;
            let ket = CVector::from_column_slice(&[c64(th.cos()), c64(th.sin())]);
            let rho = &ket * ket.adjoint();
            let e = encode(QracKind::TwoOne, t).unwrap();
            assert!((e.state.matrix() - rho).norm() < 1e-12, "{t:?}");
        }
        // (3,1): cos²θ̃ = ½ + 1/(2√3); phases e^{iπ/4}, e^{−iπ/4}, e^{3iπ/4}, e^{−3iπ/4}.
        let c = (0.5 + 0.5 / 3f64.sqrt()).sqrt();
        let s = (1.0 - c * c).sqrt();
        let phases = [PI / 4.0, -PI / 4.0, 3.0 * PI / 4.0, -3.0 * PI / 4.0];
        for t in all_tuples(QracKind::ThreeOne) {
            let phase = Complex64::from_polar(1.0, phases[(2 * t[0] + t[1]) as usize]);
            let (a, b) = if t[2] == 0 { (c, s) } else { (s, c) };
            let ket = CVector::from_column_slice(&[c64(a), phase * b]);
            let rho = &ket * ket.adjoint();
            let e = encode(QracKind::ThreeOne, &t).unwrap();
            assert!((e.state.matrix() - rho).norm() < 1e-12, "{t:?}");
        }
    }

    #[test]
    fn decoding_probability_table() {
        let expected = [
            (QracKind::OneOne, 1.0),
            (QracKind::TwoOne, 0.5 + 0.5 / 2f64.sqrt()),
            (QracKind::ThreeOne, 0.5 + 0.5 / 3f64.sqrt()),
            (QracKind::ThreeTwo, 0.5 + 1.0 / 6f64.sqrt()),
            (QracKind::Tetra, 0.5 + 0.5 / 3f64.sqrt()),
        ];
        for (kind, p) in expected {
            assert!((kind.success_probability() - p).abs() < 1e-15);
            for pos in 1..=kind.decodable_positions() {
                let povm = decoding_povm(kind, pos).unwrap();
                assert!(povm.is_projective(1e-12));
                for t in all_tuples(kind) {
                    let e = encode(kind, &t).unwrap();
                    let got = tr(&povm.effects()[t[pos - 1] as usize], e.state.matrix());
                    assert!((got - p).abs() < 1e-9, "{kind} pos {pos} {t:?}: {got}");
                }
            }
        }
        assert!((QracKind::ThreeTwo.success_probability() - 0.9082).abs() < 1e-4);
    }

    #[test]
    fn f1_povm_matches_closed_form() {
        let povm = decoding_povm(QracKind::ThreeTwo, 1).unwrap();
        let k = 1.0 / 6f64.sqrt();
        let inner = PauliExpr::from_labels(2, &[("XX", 0.5), ("XZ", 0.5), ("ZI", 1.0)])
            .unwrap()
            .to_dense()
            .unwrap();
        let half = CMatrix::identity(4, 4) * c64(0.5);
        assert!((&povm.effects()[0] - (&half + &inner * c64(k))).norm() < 1e-14);
        assert!((&povm.effects()[1] - (&half - &inner * c64(k))).norm() < 1e-14);
        let e3 = decoding_povm(QracKind::ThreeOne, 3).unwrap();
        assert!((&e3.effects()[0] - Povm::computational(1).effects()[0].clone()).norm() < 1e-15);
        assert!(decoding_povm(QracKind::Tetra, 3).is_err());
        assert!(decoding_povm(QracKind::ThreeOne, 0).is_err());
    }

    #[test]
    fn primed_operator_algebra() {
        let ops = primed_operators();
        let dense: Vec<CMatrix> = ops.iter().map(|p| p.expr.to_dense().unwrap()).collect();
        for i in 0..3 {
            assert!(dense[i].trace().norm() < 1e-15);
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((tr(&dense[i], &dense[j]) - want).abs() < 1e-12);
            }
        }
        let k = 1.0 / 6f64.sqrt();
        for t in all_tuples(QracKind::ThreeTwo) {
            let rho = encode(QracKind::ThreeTwo, &t).unwrap().state;
            for (slot, d) in dense.iter().enumerate() {
                let got = tr(d, rho.matrix());
                assert!((got - k * sign(t[slot])).abs() < 1e-12, "{t:?} slot {slot}");
            }
        }
    }

    #[test]
    fn same_parity_states_are_orthogonal() {
        for p in 0..2 {
            let states: Vec<DensityOperator> = parity_tuples(p)
                .iter()
                .map(|t| encode(QracKind::ThreeTwo, t).unwrap().state)
                .collect();
            for i in 0..4 {
                for j in 0..4 {
                    if i != j {
                        let ov = states[i].ket().unwrap().dotc(states[j].ket().unwrap());
                        assert!(ov.norm() < 1e-9);
                        assert!(orthogonal(&states[i], &states[j]));
                    }
                }
            }
        }
    }

    #[test]
    fn magic_bases_are_rank1_projective() {
        for fam in [
            MagicFamily::Computational11,
            MagicFamily::Xi21,
            MagicFamily::Mu31,
            MagicFamily::Parity32,
            MagicFamily::TetraMu,
        ] {
            for idx in fam.indices() {
                let b = magic_basis(fam, idx).unwrap();
                assert_eq!(b.povm.len(), fam.n_outcomes());
                assert!(b.povm.is_projective(1e-9));
                for (e, k) in b.povm.effects().iter().zip(&b.kets) {
                    assert_eq!(crate::quantum::matrix_rank(e, 1e-9), 1);
                    assert!((e - k * k.adjoint()).norm() < 1e-9);
                }
            }
        }
        assert!(magic_basis(MagicFamily::Mu31, 0).is_err());
        assert!(magic_basis(MagicFamily::Parity32, 2).is_err());
    }

    #[test]
    fn mu_one_is_the_magic_state() {
        let b = magic_basis(MagicFamily::Mu31, 1).unwrap();
        let s = 1.0 / 3f64.sqrt();
        let n = (pauli_matrix(Pauli::X) + pauli_matrix(Pauli::Y) + pauli_matrix(Pauli::Z)) * c64(s);
        let id = CMatrix::identity(2, 2);
        assert!((&b.povm.effects()[0] - (&id + &n) * c64(0.5)).norm() < 1e-15);
        assert!((&b.povm.effects()[1] - (&id - &n) * c64(0.5)).norm() < 1e-15);
        // μ_2 = X μ X.
        let b2 = magic_basis(MagicFamily::Mu31, 2).unwrap();
        let x = pauli_matrix(Pauli::X);
        assert!((&b2.povm.effects()[0] - &x * &b.povm.effects()[0] * &x).norm() < 1e-15);
        // Trace of μ⁺ against ρ_000 is one: they are the same pure state.
        let rho = encode(QracKind::ThreeOne, &[0, 0, 0]).unwrap().state;
        assert!((tr(&b.povm.effects()[0], rho.matrix()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn decoding_map_examples() {
        let mut rng = substream(0, 0);
        let d = |f, i, o, rng: &mut _| decode_outcome(f, i, o, rng).unwrap();
        assert_eq!(d(MagicFamily::Parity32, 0, 2, &mut rng), vec![1, 0, 1]);
        assert_eq!(d(MagicFamily::Parity32, 0, 0, &mut rng), vec![0, 0, 0]);
        assert_eq!(d(MagicFamily::Parity32, 0, 1, &mut rng), vec![0, 1, 1]);
        assert_eq!(d(MagicFamily::Parity32, 0, 3, &mut rng), vec![1, 1, 0]);
        assert_eq!(d(MagicFamily::Parity32, 1, 3, &mut rng), vec![1, 1, 1]);
        assert_eq!(d(MagicFamily::TetraMu, 1, 0, &mut rng), vec![0, 0]);
        assert_eq!(d(MagicFamily::Mu31, 1, 1, &mut rng), vec![1, 1, 1]);
        assert_eq!(d(MagicFamily::Mu31, 2, 0, &mut rng), vec![0, 1, 1]);
        assert_eq!(d(MagicFamily::Xi21, 2, 1, &mut rng), vec![1, 0]);
        assert_eq!(d(MagicFamily::Computational11, 1, 1, &mut rng), vec![1]);
        assert!(decode_outcome(MagicFamily::Mu31, 1, 2, &mut rng).is_err());
        assert!(decode_outcome(MagicFamily::Mu31, 5, 0, &mut rng).is_err());
    }

    #[test]
    fn magic_outcomes_decode_to_encoded_state() {
        // Each + effect of Mu31/Xi21 equals the encoded state of its decoded pattern.
        let mut rng = substream(0, 0);
        for (fam, kind) in [(MagicFamily::Mu31, QracKind::ThreeOne), (MagicFamily::Xi21, QracKind::TwoOne)] {
            for idx in fam.indices() {
                let b = magic_basis(fam, idx).unwrap();
                for a in 0..2 {
                    let bits = decode_outcome(fam, idx, a, &mut rng).unwrap();
                    let e = encode(kind, &bits).unwrap();
                    assert!((e.state.matrix() - &b.povm.effects()[a]).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn tetra_non_singleton_choice_is_uniform() {
        let mut rng = substream(17, 0);
        let mut counts = std::collections::HashMap::new();
        let n = 30_000;
        for _ in 0..n {
            *counts.entry(decode_outcome(MagicFamily::TetraMu, 1, 1, &mut rng).unwrap()).or_insert(0) += 1;
        }
        assert_eq!(counts.len(), 3);
        assert!(!counts.contains_key(&vec![0, 0]));
        let p = 1.0 / 3.0;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        for c in counts.values() {
            assert!((*c as f64 / n as f64 - p).abs() < 4.0 * se);
        }
    }

    #[test]
    fn tetra_singleton_is_certain() {
        for idx in 1..=4 {
            let b = magic_basis(MagicFamily::TetraMu, idx).unwrap();
            let pair = [((idx - 1) >> 1) as u8, ((idx - 1) & 1) as u8];
            let rho = encode(QracKind::Tetra, &pair).unwrap().state;
            assert!((tr(&b.povm.effects()[0], rho.matrix()) - 1.0).abs() < 1e-9);
        }
        // Against a different basis the singleton effect has weight 1/3.
        let b2 = magic_basis(MagicFamily::TetraMu, 2).unwrap();
        let rho = encode(QracKind::Tetra, &[0, 0]).unwrap().state;
        assert!((tr(&b2.povm.effects()[1], rho.matrix()) - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn parity_round_trip_is_exact() {
        for t in all_tuples(QracKind::ThreeTwo) {
            let p = t[0] ^ t[1] ^ t[2];
            let b = magic_basis(MagicFamily::Parity32, p as usize).unwrap();
            let rho = encode(QracKind::ThreeTwo, &t).unwrap().state;
            let probs = b.povm.probabilities(rho.matrix());
            let k = parity_tuples(p).iter().position(|x| x.as_slice() == t.as_slice()).unwrap();
            assert!((probs[k] - 1.0).abs() < 1e-9);
        }
    }
}
