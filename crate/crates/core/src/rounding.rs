//! Rounding relaxed states back to cuts.
//!
//! Bitwise methods (`pauli`, `individual`) estimate each vertex's slot
//! observable and take its sign. Basis-sampling methods (`magic`,
//! `simultaneous`, `tetra-magic`) draw one random basis per unit, measure all
//! units at once, and decode a whole cut per shot.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;

use crate::encoding::EncodingAssignment;
use crate::error::{Error, Result};
use crate::graph::{CutSolution, Graph};
use crate::qrac::{decode_outcome, decoding_povm, magic_basis, MagicBasis, MagicFamily, QracKind};
use crate::quantum::{
    apply_local, reduced_matrix, sample_index, trace_product, CMatrix, CVector, DensityOperator,
};
use crate::rng::{substream, AUX_STREAM};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RoundingMethod {
    Pauli,
    Magic,
    Individual,
    Simultaneous,
    TetraMagic,
}

impl RoundingMethod {
    pub const ALL: [RoundingMethod; 5] = [
        RoundingMethod::Pauli,
        RoundingMethod::Magic,
        RoundingMethod::Individual,
        RoundingMethod::Simultaneous,
        RoundingMethod::TetraMagic,
    ];

    pub fn compatible(self, kind: QracKind) -> bool {
        use QracKind::*;
        match self {
            RoundingMethod::Pauli => matches!(kind, OneOne | TwoOne | ThreeOne | Tetra),
            RoundingMethod::Magic => matches!(kind, OneOne | TwoOne | ThreeOne),
            RoundingMethod::Individual | RoundingMethod::Simultaneous => kind == ThreeTwo,
            RoundingMethod::TetraMagic => kind == Tetra,
        }
    }

    /// Whether each shot samples a whole cut (as opposed to bitwise estimation).
    pub fn is_basis_sampling(self) -> bool {
        matches!(
            self,
            RoundingMethod::Magic | RoundingMethod::Simultaneous | RoundingMethod::TetraMagic
        )
    }

    pub fn label(self) -> &'static str {
        match self {
            RoundingMethod::Pauli => "pauli",
            RoundingMethod::Magic => "magic",
            RoundingMethod::Individual => "individual",
            RoundingMethod::Simultaneous => "simultaneous",
            RoundingMethod::TetraMagic => "tetra-magic",
        }
    }

    pub fn check(self, kind: QracKind) -> Result<()> {
        if self.compatible(kind) {
            Ok(())
        } else {
            Err(Error::Incompatible { method: self.label().into(), kind: kind.label().into() })
        }
    }
}

impl fmt::Display for RoundingMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for RoundingMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RoundingMethod::ALL
            .into_iter()
            .find(|m| m.label() == s)
            .ok_or_else(|| Error::validation(format!("unknown rounding method `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundingConfig {
    pub method: RoundingMethod,
    /// Measurement repetitions; 0 selects exact expectations for bitwise methods.
    pub shots: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShotRecord {
    pub shot: usize,
    /// Basis index drawn for each unit (empty for bitwise methods).
    pub bases: Vec<usize>,
    pub assignment: Vec<u8>,
    pub cut_value: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundingOutcome {
    pub method: RoundingMethod,
    pub best: CutSolution,
    pub per_shot: Vec<ShotRecord>,
}

impl RoundingOutcome {
    fn from_records(g: &Graph, method: RoundingMethod, per_shot: Vec<ShotRecord>) -> Result<Self> {
        // Ties keep the earliest shot.
        let best = per_shot
            .iter()
            .fold(None::<&ShotRecord>, |acc, r| match acc {
                Some(b) if b.cut_value >= r.cut_value => Some(b),
                _ => Some(r),
            })
            .ok_or_else(|| Error::validation("rounding produced no shots"))?;
        Ok(RoundingOutcome {
            method,
            best: CutSolution::evaluate(g, best.assignment.clone())?,
            per_shot,
        })
    }

    pub fn mean_cut(&self) -> f64 {
        self.per_shot.iter().map(|r| r.cut_value as f64).sum::<f64>() / self.per_shot.len() as f64
    }

    /// Standard error of the per-shot mean cut.
    pub fn standard_error(&self) -> f64 {
        let n = self.per_shot.len() as f64;
        if n < 2.0 {
            return 0.0;
        }
        let m = self.mean_cut();
        let var = self
            .per_shot
            .iter()
            .map(|r| (r.cut_value as f64 - m).powi(2))
            .sum::<f64>()
            / (n - 1.0);
        (var / n).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioReport {
    pub best_ratio: f64,
    pub mean_ratio: f64,
}

pub fn best_of(outcome: &RoundingOutcome, opt: usize) -> Result<RatioReport> {
    ratio_from_cuts(&outcome.per_shot.iter().map(|r| r.cut_value).collect::<Vec<_>>(), opt)
}

pub fn ratio_from_cuts(cuts: &[usize], opt: usize) -> Result<RatioReport> {
    if opt == 0 {
        return Err(Error::validation("optimum must be positive"));
    }
    let best = cuts.iter().max().ok_or_else(|| Error::validation("no shots to rate"))?;
    let mean = cuts.iter().sum::<usize>() as f64 / cuts.len() as f64;
    Ok(RatioReport { best_ratio: *best as f64 / opt as f64, mean_ratio: mean / opt as f64 })
}

fn check_state(rho: &DensityOperator, a: &EncodingAssignment) -> Result<()> {
    if rho.n_qubits() != a.n_qubits {
        return Err(Error::Dimension { expected: a.n_qubits, got: rho.n_qubits() });
    }
    Ok(())
}

fn unit_qubits(a: &EncodingAssignment, unit: usize) -> Vec<usize> {
    let off = a.qubit_offset(unit);
    (off..off + a.kind.qubits_per_unit()).collect()
}

/// Per-vertex estimates of the ±1 decoding observable, exact when `shots == 0`.
pub fn bit_estimates(
    rho: &DensityOperator,
    a: &EncodingAssignment,
    shots: usize,
    rng: &mut impl Rng,
) -> Result<Vec<f64>> {
    check_state(rho, a)?;
    let reduced: Vec<CMatrix> = (0..a.n_units)
        .map(|u| reduced_matrix(rho.matrix(), &unit_qubits(a, u), a.n_qubits))
        .collect();
    let povms = (1..=a.kind.decodable_positions())
        .map(|p| decoding_povm(a.kind, p))
        .collect::<Result<Vec<_>>>()?;
    let mut est = Vec::with_capacity(a.n_vertices());
    for v in 0..a.n_vertices() {
        let e = povms[a.slot_of[v] - 1].effects();
        let r = &reduced[a.unit_of[v]];
        let p0 = trace_product(&e[0], r).re.clamp(0.0, 1.0);
        if shots == 0 {
            est.push(2.0 * p0 - 1.0);
        } else {
            let zeros = (0..shots).filter(|_| rng.random::<f64>() < p0).count();
            est.push((2.0 * zeros as f64 - shots as f64) / shots as f64);
        }
    }
    Ok(est)
}

/// Estimates this close to zero count as ties.
const TIE_TOL: f64 = 1e-12;

/// Sign decoding: positive → 0, negative → 1, zero → fair coin.
fn sign_decode(est: &[f64], rng: &mut impl Rng) -> Vec<u8> {
    est.iter()
        .map(|e| {
            if *e > TIE_TOL {
                0
            } else if *e < -TIE_TOL {
                1
            } else {
                rng.random_range(0..2u8)
            }
        })
        .collect()
}

fn bitwise_round(
    g: &Graph,
    rho: &DensityOperator,
    a: &EncodingAssignment,
    shots: usize,
    seed: u64,
) -> Result<CutSolution> {
    if g.n_vertices() != a.n_vertices() {
        return Err(Error::Dimension { expected: a.n_vertices(), got: g.n_vertices() });
    }
    let mut rng = substream(seed, AUX_STREAM);
    let est = bit_estimates(rho, a, shots, &mut rng)?;
    CutSolution::evaluate(g, sign_decode(&est, &mut rng))
}

/// Pauli rounding for the single-qubit codes and Tetra (X/Y slots only).
pub fn pauli_round(
    g: &Graph,
    rho: &DensityOperator,
    a: &EncodingAssignment,
    shots: usize,
    seed: u64,
) -> Result<CutSolution> {
    RoundingMethod::Pauli.check(a.kind)?;
    bitwise_round(g, rho, a, shots, seed)
}

/// Individual rounding of the (3,2) code with the F¹–F³ measurements.
pub fn individual_round(
    g: &Graph,
    rho: &DensityOperator,
    a: &EncodingAssignment,
    shots: usize,
    seed: u64,
) -> Result<CutSolution> {
    RoundingMethod::Individual.check(a.kind)?;
    bitwise_round(g, rho, a, shots, seed)
}

/// Per-unit measurement rotations: row `k` of `unitaries[i]` is `⟨k_i|`, so
/// measuring the rotated state in the computational basis realizes basis `i`.
struct BasisTable {
    family: MagicFamily,
    indices: Vec<usize>,
    unitaries: Vec<CMatrix>,
}

impl BasisTable {
    fn new(family: MagicFamily) -> Result<Self> {
        let indices: Vec<usize> = family.indices().collect();
        let unitaries = indices
            .iter()
            .map(|&i| magic_basis(family, i).map(|b| rotation(&b)))
            .collect::<Result<_>>()?;
        Ok(BasisTable { family, indices, unitaries })
    }
}

fn rotation(b: &MagicBasis) -> CMatrix {
    let d = b.kets[0].len();
    let mut u = CMatrix::zeros(d, d);
    for (r, k) in b.kets.iter().enumerate() {
        for c in 0..d {
            u[(r, c)] = k[c].conj();
        }
    }
    u
}

fn sampling_family(method: RoundingMethod, kind: QracKind) -> MagicFamily {
    match method {
        RoundingMethod::TetraMagic => MagicFamily::TetraMu,
        _ => MagicFamily::for_kind(kind),
    }
}

/// One shot: draw bases, measure every unit, decode the cut.
fn sample_shot(
    g: &Graph,
    ensemble: &[(f64, CVector)],
    a: &EncodingAssignment,
    table: &BasisTable,
    seed: u64,
    shot: usize,
) -> Result<ShotRecord> {
    let mut rng = substream(seed, shot as u64);
    let n = a.n_qubits;
    let choice: Vec<usize> =
        (0..a.n_units).map(|_| rng.random_range(0..table.indices.len())).collect();
    let weights: Vec<f64> = ensemble.iter().map(|(p, _)| *p).collect();
    let comp = if ensemble.len() == 1 { 0 } else { sample_index(&weights, &mut rng)? };
    let mut psi: Vec<_> = ensemble[comp].1.iter().copied().collect();
    for (u, &c) in choice.iter().enumerate() {
        apply_local(&table.unitaries[c], &unit_qubits(a, u), n, &mut psi);
    }
    let probs: Vec<f64> = psi.iter().map(|z| z.norm_sqr()).collect();
    let index = sample_index(&probs, &mut rng)?;
    let q = a.kind.qubits_per_unit();
    let members = a.members();
    let mut x = vec![0u8; a.n_vertices()];
    for u in 0..a.n_units {
        let shift = n - (u + 1) * q;
        let outcome = (index >> shift) & ((1 << q) - 1);
        let bits = decode_outcome(table.family, table.indices[choice[u]], outcome, &mut rng)?;
        for (slot, v) in members[u].iter().enumerate() {
            if let Some(v) = v {
                x[*v] = bits[slot];
            }
        }
    }
    let cut_value = g.cut_value(&x)?;
    Ok(ShotRecord {
        shot,
        bases: choice.iter().map(|c| table.indices[*c]).collect(),
        assignment: x,
        cut_value,
    })
}

fn basis_round(
    g: &Graph,
    rho: &DensityOperator,
    a: &EncodingAssignment,
    method: RoundingMethod,
    shots: usize,
    seed: u64,
) -> Result<RoundingOutcome> {
    method.check(a.kind)?;
    check_state(rho, a)?;
    if g.n_vertices() != a.n_vertices() {
        return Err(Error::Dimension { expected: a.n_vertices(), got: g.n_vertices() });
    }
    if shots == 0 {
        return Err(Error::validation(format!("{method} rounding needs at least one shot")));
    }
    let table = BasisTable::new(sampling_family(method, a.kind))?;
    let ensemble = rho.ensemble();
    let records = (0..shots)
        .into_par_iter()
        .map(|s| sample_shot(g, &ensemble, a, &table, seed, s))
        .collect::<Result<Vec<_>>>()?;
    RoundingOutcome::from_records(g, method, records)
}

/// Magic-state rounding for the (1,1), (2,1) and (3,1) codes.
pub fn magic_round(
    g: &Graph,
    rho: &DensityOperator,
    a: &EncodingAssignment,
    shots: usize,
    seed: u64,
) -> Result<RoundingOutcome> {
    basis_round(g, rho, a, RoundingMethod::Magic, shots, seed)
}

/// Simultaneous rounding of the (3,2) code with random-parity bases.
pub fn simultaneous_round(
    g: &Graph,
    rho: &DensityOperator,
    a: &EncodingAssignment,
    shots: usize,
    seed: u64,
) -> Result<RoundingOutcome> {
    basis_round(g, rho, a, RoundingMethod::Simultaneous, shots, seed)
}

pub fn tetra_magic_round(
    g: &Graph,
    rho: &DensityOperator,
    a: &EncodingAssignment,
    shots: usize,
    seed: u64,
) -> Result<RoundingOutcome> {
    basis_round(g, rho, a, RoundingMethod::TetraMagic, shots, seed)
}

/// Runs any method; bitwise methods yield a single record.
pub fn round(
    g: &Graph,
    rho: &DensityOperator,
    a: &EncodingAssignment,
    cfg: &RoundingConfig,
) -> Result<RoundingOutcome> {
    cfg.method.check(a.kind)?;
    if cfg.method.is_basis_sampling() {
        return basis_round(g, rho, a, cfg.method, cfg.shots, cfg.seed);
    }
    let sol = bitwise_round(g, rho, a, cfg.shots, cfg.seed)?;
    let record = ShotRecord {
        shot: 0,
        bases: Vec::new(),
        assignment: sol.assignment.clone(),
        cut_value: sol.cut_value,
    };
    RoundingOutcome::from_records(g, cfg.method, vec![record])
}

/// Product of encoded unit states for a vertex assignment.
pub fn encoded_product_state(a: &EncodingAssignment, x: &[u8]) -> Result<DensityOperator> {
    let parts = a
        .unit_bits(x)?
        .iter()
        .map(|b| crate::qrac::encode(a.kind, b).map(|e| e.state))
        .collect::<Result<Vec<_>>>()?;
    DensityOperator::tensor_all(&parts).ok_or_else(|| Error::validation("graph has no vertices"))
}

/// Identity-scaled mixed state `I/2^n` matching the assignment's register.
pub fn maximally_mixed_for(a: &EncodingAssignment) -> DensityOperator {
    DensityOperator::maximally_mixed(a.n_qubits)
}
