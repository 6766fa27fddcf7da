//! Expectation channels of the rounding procedures, identity certification,
//! approximation-ratio bounds and parameter sweeps.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use rand::Rng;

use crate::encoding::{assign, EncodingAssignment, PairingStrategy};
use crate::error::{Error, Result};
use crate::graph::{brute_force_maxcut, Graph};
use crate::hamiltonian::{build, RelaxedHamiltonian};
use crate::qrac::{decode_outcome, encode, magic_basis, MagicFamily, QracKind};
use crate::quantum::{
    c64, is_hermitian, matrix_rank, max_eigenpair, pauli_basis, pauli_basis_index, trace_product,
    CMatrix, DensityOperator, LinearChannel, MeasurePrepareTerm, PauliExpr, PauliWord, Povm,
    ALGEBRA_TOL,
};
use crate::rng::substream;

/// Averaged measure-and-decode map of one rounding procedure on one unit.
#[derive(Debug, Clone)]
pub struct ExpectationChannel {
    pub family: MagicFamily,
    pub channel: LinearChannel,
    /// Pauli transfer matrix in [`pauli_basis`] order.
    pub transfer: DMatrix<f64>,
}

impl ExpectationChannel {
    pub fn kind(&self) -> QracKind {
        self.family.kind()
    }

    pub fn n_qubits(&self) -> usize {
        self.channel.n_qubits()
    }

    /// Largest deviation from `Φ(I) = I` and from trace preservation.
    pub fn unital_residual(&self) -> f64 {
        let d = self.transfer.nrows();
        let unital = (1..d).map(|q| self.transfer[(q, 0)].abs()).fold(0.0, f64::max);
        let tp = (1..d).map(|p| self.transfer[(0, p)].abs()).fold(0.0, f64::max);
        unital.max(tp).max((self.transfer[(0, 0)] - 1.0).abs())
    }

    /// `⟨P, Φ(P)⟩ / 2^n` for each non-identity Pauli word `P`.
    pub fn pauli_shrink(&self) -> Vec<(PauliWord, f64)> {
        pauli_basis(self.n_qubits())
            .into_iter()
            .enumerate()
            .skip(1)
            .map(|(i, w)| (w, self.transfer[(i, i)]))
            .collect()
    }

    /// `Tr[S Φ(S)] / Tr[S²]` for a Hermitian slot operator `S`; the factor by
    /// which the rounding shrinks that slot.
    pub fn slot_shrink(&self, slot_op: &PauliExpr) -> Result<f64> {
        let s = slot_op.to_dense()?;
        let image = self.channel.apply_operator(&s);
        Ok(trace_product(&s, &image).re / trace_product(&s, &s).re)
    }

    /// Applies `Φ^{⊗units}` (or its adjoint) to an expression on a register
    /// made of consecutive units.
    pub fn apply_expr(&self, expr: &PauliExpr, adjoint: bool) -> Result<PauliExpr> {
        let q = self.n_qubits();
        let n = expr.n_qubits();
        if !n.is_multiple_of(q) {
            return Err(Error::Dimension { expected: q, got: n });
        }
        let units = n / q;
        let basis = pauli_basis(q);
        let dim = basis.len();
        // images[p] = Σ_q coef · basis[q]
        let images: Vec<Vec<(usize, f64)>> = (0..dim)
            .map(|p| {
                (0..dim)
                    .filter_map(|r| {
                        let c = if adjoint { self.transfer[(p, r)] } else { self.transfer[(r, p)] };
                        (c.abs() > 1e-14).then_some((r, c))
                    })
                    .collect()
            })
            .collect();
        let mut out = PauliExpr::zero(n);
        for (w, c) in expr.terms() {
            let mut partial: Vec<(PauliWord, f64)> = vec![(PauliWord::IDENTITY, *c)];
            for u in 0..units {
                let sub = pauli_basis_index(&w.extract(u * q, q), q);
                let mut next = Vec::with_capacity(partial.len() * images[sub].len());
                for (pw, pc) in &partial {
                    for (r, rc) in &images[sub] {
                        next.push((pw.insert(u * q, q, basis[*r]), pc * rc));
                    }
                }
                partial = next;
            }
            for (pw, pc) in partial {
                out.add_term(pw, pc);
            }
        }
        Ok(out)
    }

    /// Exact `E[cut] = Tr[H Φ^{⊗}(ρ)]`, evaluated as `Tr[Φ†^{⊗}(H) ρ]`.
    pub fn expected_cut(&self, h: &RelaxedHamiltonian, rho: &DensityOperator) -> Result<f64> {
        if h.kind != self.kind() {
            return Err(Error::Incompatible {
                method: format!("{:?}", self.family),
                kind: h.kind.label().into(),
            });
        }
        rho.expectation(&self.apply_expr(&h.expr, true)?)
    }
}

/// Builds the expectation channel of a rounding family: each basis is drawn
/// uniformly, and each outcome re-prepares the encoded state of its decoded
/// bits (averaged when decoding is random).
pub fn expectation_channel(family: MagicFamily) -> Result<ExpectationChannel> {
    let indices: Vec<usize> = family.indices().collect();
    let w = 1.0 / indices.len() as f64;
    let mut terms = Vec::new();
    for &idx in &indices {
        let basis = magic_basis(family, idx)?;
        for (a, effect) in basis.povm.effects().iter().enumerate() {
            terms.push(MeasurePrepareTerm {
                effect: effect * c64(w),
                output: decoded_output(family, idx, a)?,
            });
        }
    }
    let channel = LinearChannel::measure_prepare(terms)?;
    let transfer = channel.transfer_matrix();
    Ok(ExpectationChannel { family, channel, transfer })
}

/// Mean encoded state over the decode distribution of one outcome.
fn decoded_output(family: MagicFamily, index: usize, outcome: usize) -> Result<CMatrix> {
    let kind = family.kind();
    if family == MagicFamily::TetraMu && outcome == 1 {
        let singleton = index - 1;
        let d = 1 << kind.qubits_per_unit();
        let mut acc = CMatrix::zeros(d, d);
        for i in (0..4).filter(|i| *i != singleton) {
            let bits = [(i >> 1) as u8, (i & 1) as u8];
            acc += encode(kind, &bits)?.state.matrix() * c64(1.0 / 3.0);
        }
        return Ok(acc);
    }
    // Deterministic decoders ignore the generator.
    let bits = decode_outcome(family, index, outcome, &mut substream(0, 0))?;
    Ok(encode(kind, &bits)?.state.matrix().clone())
}

/// The family used to round each code.
pub fn channel_for(kind: QracKind) -> Result<ExpectationChannel> {
    expectation_channel(MagicFamily::for_kind(kind))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckReport {
    pub passed: bool,
    pub worst_residual: f64,
}

impl CheckReport {
    fn from_residual(worst: f64, tol: f64) -> Self {
        CheckReport { passed: worst <= tol, worst_residual: worst }
    }
}

/// Random Hermitian operator with Gaussian-ish entries.
pub fn random_hermitian(dim: usize, rng: &mut impl Rng) -> CMatrix {
    let m = CMatrix::from_fn(dim, dim, |_, _| {
        num_complex::Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    (&m + m.adjoint()) * c64(0.5)
}

/// Random full-rank density operator `A A† / Tr[A A†]`.
pub fn random_density(n_qubits: usize, rng: &mut impl Rng) -> DensityOperator {
    let d = 1 << n_qubits;
    let a = CMatrix::from_fn(d, d, |_, _| {
        num_complex::Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    let m = &a * a.adjoint();
    let t = m.trace();
    DensityOperator::from_matrix(m / t).expect("A A† is a valid state")
}

/// Random non-identity Pauli word on `n_qubits` qubits.
pub fn random_word(n_qubits: usize, rng: &mut impl Rng) -> PauliWord {
    let basis = pauli_basis(n_qubits);
    basis[rng.random_range(1..basis.len())]
}

/// Checks `Tr[φ Φ(τ)] = Tr[Φ(φ) τ]` on random Hermitian pairs.
pub fn verify_self_adjoint(chan: &LinearChannel, trials: usize, seed: u64) -> CheckReport {
    let d = 1 << chan.n_qubits();
    let mut rng = substream(seed, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let phi = random_hermitian(d, &mut rng);
        let tau = random_hermitian(d, &mut rng);
        let lhs = trace_product(&phi, &chan.apply_operator(&tau));
        let rhs = trace_product(&chan.apply_operator(&phi), &tau);
        worst = worst.max((lhs - rhs).norm());
    }
    CheckReport::from_residual(worst, ALGEBRA_TOL)
}

/// Checks `M² = M`, rank 1 and `Σ M = I` for every effect.
pub fn verify_rank1_projective(povm: &Povm) -> CheckReport {
    let d = povm.effects()[0].nrows();
    let mut worst: f64 = 0.0;
    let mut sum = CMatrix::zeros(d, d);
    let mut ranks_ok = true;
    for m in povm.effects() {
        worst = worst.max((m * m - m).camax());
        ranks_ok &= matrix_rank(m, 1e-6) == 1;
        sum += m;
    }
    worst = worst.max((sum - CMatrix::identity(d, d)).camax());
    let r = CheckReport::from_residual(worst, ALGEBRA_TOL);
    CheckReport { passed: r.passed && ranks_ok, ..r }
}

/// Checks `|Tr[P ρ]| ≤ 1` for a single Pauli word with unit coefficient.
pub fn trace_range_check(p: &PauliExpr, rho: &DensityOperator) -> Result<bool> {
    let mut terms = p.terms();
    let ok = matches!((terms.next(), terms.next()), (Some((_, c)), None) if (*c - 1.0).abs() < 1e-15);
    if !ok {
        return Err(Error::validation("expected a single Pauli word with coefficient 1"));
    }
    Ok(rho.expectation(p)?.abs() <= 1.0 + ALGEBRA_TOL)
}

/// Worst deviation from `Φ(I) = I` and `Φ(P′) = (2/3) P′` for the (3,2) simultaneous-rounding channel.
pub fn primed_shrink_residual(chan: &ExpectationChannel) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let id = CMatrix::identity(4, 4);
    worst = worst.max((chan.channel.apply_operator(&id) - &id).camax());
    for p in crate::qrac::primed_operators() {
        let m = p.expr.to_dense()?;
        let image = chan.channel.apply_operator(&m);
        worst = worst.max((image - &m * c64(2.0 / 3.0)).camax());
    }
    Ok(worst)
}

/// Entrywise distance between two channels' transfer matrices.
pub fn transfer_distance(a: &LinearChannel, b: &LinearChannel) -> f64 {
    (a.transfer_matrix() - b.transfer_matrix()).amax()
}

/// `sqrt(3)`, used throughout the Tetra bound.
fn s3() -> f64 {
    3f64.sqrt()
}

/// Both branches of the Tetra ratio bound.
pub fn tetra_bound_branches(epsilon: f64, lambda: f64) -> (f64, f64) {
    let first = (81.0 - 14.0 * s3() + 14.0 * s3() * lambda + 8.0 * epsilon) / (81.0 + 162.0 * epsilon);
    let second = (27.0 - 14.0 * lambda + 12.0 * epsilon) / (27.0 + 54.0 * epsilon);
    (first, second)
}

/// Largest gain for which the Tetra bound beats ½ for every λ.
pub fn tetra_feasibility_threshold() -> f64 {
    (81.0 - s3()) / (146.0 + 30.0 * s3())
}

/// λ-interval where the Tetra bound is at most ½, if any.
pub fn tetra_infeasible_band(epsilon: f64) -> Option<(f64, f64)> {
    let lo = 27.0 / 28.0 - 15.0 / 14.0 * epsilon;
    let hi = 1.0 - 27.0 * s3() / 28.0 + 73.0 * s3() / 42.0 * epsilon;
    let (lo, hi) = (lo.max(0.0), hi.min(1.0));
    (lo <= hi).then_some((lo, hi))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub kind: QracKind,
    /// Guaranteed expected ratio over all instances (Tetra: at the given ε, λ).
    pub nominal_ratio: f64,
    pub epsilon: f64,
    pub lambda: Option<f64>,
    /// Active Tetra branch (1 or 2).
    pub branch: Option<u8>,
    pub feasible: bool,
    /// Guarantee at this instance's gain: `(½ + s²ε)/(½ + ε)` with `s` the
    /// slot shrink factor (Tetra: same as the nominal value).
    pub instance_ratio: f64,
}

/// Closed-form ratio guarantees; squared slot shrink per code.
fn squared_shrink(kind: QracKind) -> f64 {
    match kind {
        QracKind::OneOne => 1.0,
        QracKind::TwoOne => 0.25,
        QracKind::ThreeOne => 1.0 / 9.0,
        QracKind::ThreeTwo => 4.0 / 9.0,
        QracKind::Tetra => (2.0f64 / 9.0).powi(2),
    }
}

pub fn ratio_bound(kind: QracKind, epsilon: f64, lambda: Option<f64>) -> Result<BoundReport> {
    if !(0.0..=0.5).contains(&epsilon) {
        return Err(Error::validation(format!("gain {epsilon} outside [0, 1/2]")));
    }
    if kind == QracKind::Tetra {
        let l = lambda.ok_or_else(|| Error::validation("Tetra bound needs λ"))?;
        if !(0.0..=1.0).contains(&l) {
            return Err(Error::validation(format!("λ = {l} outside [0, 1]")));
        }
        let (a, b) = tetra_bound_branches(epsilon, l);
        let (v, branch) = if a >= b { (a, 1) } else { (b, 2) };
        return Ok(BoundReport {
            kind,
            nominal_ratio: v,
            epsilon,
            lambda: Some(l),
            branch: Some(branch),
            feasible: v > 0.5,
            instance_ratio: v,
        });
    }
    let s2 = squared_shrink(kind);
    let nominal = 0.5 * (1.0 + s2);
    Ok(BoundReport {
        kind,
        nominal_ratio: nominal,
        epsilon,
        lambda: None,
        branch: None,
        feasible: nominal > 0.5,
        instance_ratio: (0.5 + s2 * epsilon) / (0.5 + epsilon),
    })
}

/// `½(1 + r⁻²)` for compression ratio `r`.
pub fn conjectured_ratio(kind: QracKind) -> f64 {
    0.5 * (1.0 + kind.compression_ratio().powi(-2))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QracBound {
    pub nayak: f64,
    pub improved: f64,
    pub tightest: f64,
}

fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// Upper bounds on the success probability of a code storing `bits` bits in
/// `qubits` qubits.
pub fn qrac_probability_bounds(qubits: usize, bits: usize) -> Result<QracBound> {
    if qubits == 0 || bits == 0 {
        return Err(Error::validation("code sizes must be positive"));
    }
    let improved = (0.5 + 0.5 * (2f64.powi(qubits as i32 - 1) / bits as f64).sqrt()).min(1.0);
    // Nayak: qubits ≥ (1 − H(p))·bits, with 1 − H increasing on [½, 1].
    let nayak = if qubits >= bits {
        1.0
    } else {
        let target = 1.0 - qubits as f64 / bits as f64;
        let (mut lo, mut hi) = (0.5, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if binary_entropy(mid) >= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    Ok(QracBound { nayak, improved, tightest: nayak.min(improved) })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionRow {
    pub epsilon: f64,
    pub lambda: f64,
    pub bound: f64,
    pub branch: u8,
    pub feasible: bool,
}

/// Tetra bound on the grid, ordered by ε then λ.
pub fn region_sweep(eps_grid: &[f64], lambda_grid: &[f64]) -> Result<Vec<RegionRow>> {
    let mut eps = eps_grid.to_vec();
    let mut lam = lambda_grid.to_vec();
    eps.sort_by(|a, b| a.total_cmp(b));
    lam.sort_by(|a, b| a.total_cmp(b));
    let mut rows = Vec::with_capacity(eps.len() * lam.len());
    for &e in &eps {
        for &l in &lam {
            let r = ratio_bound(QracKind::Tetra, e, Some(l))?;
            rows.push(RegionRow {
                epsilon: e,
                lambda: l,
                bound: r.nominal_ratio,
                branch: r.branch.unwrap(),
                feasible: r.feasible,
            });
        }
    }
    Ok(rows)
}

/// `points` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect(),
    }
}

/// Fixed-point rendering with 12 significant digits.
pub fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{:.11}", x);
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (11 - mag).max(0) as usize;
    format!("{:.*}", decimals, x)
}

pub const REGION_CSV_HEADER: &str = "epsilon,lambda,bound,branch,feasible";

pub fn region_csv(rows: &[RegionRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 64);
    out.push_str(REGION_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            sig12(r.epsilon),
            sig12(r.lambda),
            sig12(r.bound),
            r.branch,
            r.feasible
        );
    }
    out
}

/// One line of the compression-vs-ratio table.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjectureRow {
    pub graph: usize,
    pub kind: QracKind,
    /// `½(1 + s²)` with the slot shrink `s` measured from the channel.
    pub measured_nominal: f64,
    pub conjectured: f64,
    /// Exact `E[cut]/OPT` for the maximum eigenstate.
    pub eigenstate_ratio: f64,
    pub opt: usize,
}

/// Kinds covered by the compression-vs-ratio table.
pub const CONJECTURE_KINDS: [QracKind; 4] =
    [QracKind::OneOne, QracKind::TwoOne, QracKind::ThreeOne, QracKind::ThreeTwo];

/// Measured `½(1 + s²)` from the kind's rounding channel.
pub fn measured_nominal(kind: QracKind) -> Result<f64> {
    let chan = channel_for(kind)?;
    let s = chan.slot_shrink(&crate::qrac::slot_operator(kind, 0)?)?;
    Ok(0.5 * (1.0 + s * s))
}

/// Runs the exact pipeline (eigenstate plus analytic rounding) for each kind
/// on each graph. Empirical evidence only.
pub fn conjecture_sweep(corpus: &[Graph]) -> Result<Vec<ConjectureRow>> {
    let mut rows = Vec::new();
    let nominal: Vec<f64> = CONJECTURE_KINDS.iter().map(|k| measured_nominal(*k)).collect::<Result<_>>()?;
    for (gi, g) in corpus.iter().enumerate() {
        let opt = brute_force_maxcut(g)?.cut_value;
        if opt == 0 {
            continue;
        }
        for (ki, &kind) in CONJECTURE_KINDS.iter().enumerate() {
            let a = assign(g, kind, PairingStrategy::Index)?;
            let (_, ratio) = exact_pipeline(g, &a, opt)?;
            rows.push(ConjectureRow {
                graph: gi,
                kind,
                measured_nominal: nominal[ki],
                conjectured: conjectured_ratio(kind),
                eigenstate_ratio: ratio,
                opt,
            });
        }
    }
    Ok(rows)
}

/// Maximum eigenstate of the relaxation plus its exact expected cut ratio.
pub fn exact_pipeline(
    g: &Graph,
    a: &EncodingAssignment,
    opt: usize,
) -> Result<(DensityOperator, f64)> {
    let h = build(g, a)?;
    let eig = max_eigenpair(&h.expr)?;
    let chan = channel_for(a.kind)?;
    let cut = chan.expected_cut(&h, &eig.state)?;
    Ok((eig.state, cut / opt as f64))
}

/// `(x, y)` of the Tetra proof: the 2-local and 1-local parts of
/// `Tr[(H − |E|/2) ρ]`, each divided by `|E|`.
pub fn tetra_locality_parts(h: &RelaxedHamiltonian, rho: &DensityOperator) -> Result<(f64, f64)> {
    let split = h.local_split();
    let m = h.n_edges as f64;
    Ok((rho.expectation(&split.two_local)? / m, rho.expectation(&split.one_local)? / m))
}

/// Hermiticity helper for callers building custom channels.
pub fn channel_preserves_hermiticity(chan: &LinearChannel, seed: u64) -> bool {
    let d = 1 << chan.n_qubits();
    let mut rng = substream(seed, 0);
    let h = random_hermitian(d, &mut rng);
    is_hermitian(&chan.apply_operator(&h), ALGEBRA_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{pauli_matrix, Pauli};

    #[test]
    fn channels_are_unital_and_trace_preserving() {
        for fam in [
            MagicFamily::Computational11,
            MagicFamily::Xi21,
            MagicFamily::Mu31,
            MagicFamily::Parity32,
            MagicFamily::TetraMu,
        ] {
            let c = expectation_channel(fam).unwrap();
            assert!(c.unital_residual() < 1e-12, "{fam:?}");
            assert!(channel_preserves_hermiticity(&c.channel, 1));
        }
    }

    #[test]
    fn magic31_shrinks_by_a_third() {
        let c = expectation_channel(MagicFamily::Mu31).unwrap();
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            let m = pauli_matrix(p);
            assert!((c.channel.apply_operator(&m) - &m * c64(1.0 / 3.0)).camax() < 1e-12);
        }
    }

    #[test]
    fn magic21_shrink_is_measured() {
        let c = expectation_channel(MagicFamily::Xi21).unwrap();
        let shrink: Vec<f64> = c.pauli_shrink().iter().map(|(_, s)| *s).collect();
        assert!((shrink[0] - 0.5).abs() < 1e-12);
        assert!(shrink[1].abs() < 1e-12);
        assert!((shrink[2] - 0.5).abs() < 1e-12);
        assert!((measured_nominal(QracKind::TwoOne).unwrap() - 0.625).abs() < 1e-12);
    }

    #[test]
    fn tetra_channel_is_depolarizing() {
        let c = expectation_channel(MagicFamily::TetraMu).unwrap();
        let d = LinearChannel::depolarizing(7.0 / 9.0).unwrap();
        assert!(transfer_distance(&c.channel, &d) < 1e-12);
    }

    #[test]
    fn parity_channel_shrinks_primed_by_two_thirds() {
        let c = expectation_channel(MagicFamily::Parity32).unwrap();
        assert!(primed_shrink_residual(&c).unwrap() < 1e-12);
        assert!(verify_self_adjoint(&c.channel, 100, 4).passed);
    }

    #[test]
    fn self_adjointness_negative_control() {
        // Reset-to-|0⟩ map: Φ(τ) = Tr[τ]|0⟩⟨0|.
        let zero = DensityOperator::basis_state(1, 0).unwrap().matrix().clone();
        let reset = LinearChannel::measure_prepare(vec![MeasurePrepareTerm {
            effect: CMatrix::identity(2, 2),
            output: zero,
        }])
        .unwrap();
        assert!(!verify_self_adjoint(&reset, 10, 1).passed);
        assert!(verify_self_adjoint(&LinearChannel::depolarizing(0.3).unwrap(), 50, 1).passed);
    }

    #[test]
    fn rank1_projective_checks() {
        for p in 0..2 {
            let b = magic_basis(MagicFamily::Parity32, p).unwrap();
            assert!(verify_rank1_projective(&b.povm).passed);
        }
        let half = CMatrix::identity(2, 2) * c64(0.5);
        let bad = Povm::new(vec![half.clone(), half]).unwrap();
        assert!(!verify_rank1_projective(&bad).passed);
    }

    #[test]
    fn trace_range_examples() {
        let z = PauliExpr::from_labels(1, &[("Z", 1.0)]).unwrap();
        let rho = DensityOperator::basis_state(1, 0).unwrap();
        assert!(trace_range_check(&z, &rho).unwrap());
        assert_eq!(rho.expectation(&z).unwrap(), 1.0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = DensityOperator::from_ket(crate::quantum::ket_from_slice(&[
            c64(s),
            c64(0.0),
            c64(0.0),
            c64(s),
        ]))
        .unwrap();
        let xx = PauliExpr::from_labels(2, &[("XX", 1.0)]).unwrap();
        assert!((bell.expectation(&xx).unwrap() - 1.0).abs() < 1e-12);
        assert!(trace_range_check(&xx, &bell).unwrap());
        assert!(trace_range_check(&xx.scaled(2.0), &bell).is_err());
    }

    #[test]
    fn ratio_bound_constants() {
        let r = ratio_bound(QracKind::ThreeTwo, 0.2, None).unwrap();
        assert!((r.nominal_ratio - 13.0 / 18.0).abs() < 1e-15);
        assert!((ratio_bound(QracKind::ThreeOne, 0.0, None).unwrap().nominal_ratio - 5.0 / 9.0).abs() < 1e-15);
        assert!((ratio_bound(QracKind::TwoOne, 0.0, None).unwrap().nominal_ratio - 0.625).abs() < 1e-15);
        assert_eq!(ratio_bound(QracKind::OneOne, 0.0, None).unwrap().nominal_ratio, 1.0);
        assert!(ratio_bound(QracKind::ThreeOne, 0.6, None).is_err());
        assert!(ratio_bound(QracKind::Tetra, 0.1, None).is_err());
    }

    #[test]
    fn tetra_spot_value() {
        let r = ratio_bound(QracKind::Tetra, 0.1, Some(0.5)).unwrap();
        // Independent arithmetic: (81 − 7√3 + 0.8)/97.2.
        let want = (81.8 - 7.0 * 3f64.sqrt()) / 97.2;
        assert!((r.nominal_ratio - want).abs() < 1e-12);
        assert!((r.nominal_ratio - 0.71683).abs() < 1e-5);
        assert_eq!(r.branch, Some(1));
        let z = ratio_bound(QracKind::Tetra, 0.0, Some(0.0)).unwrap();
        assert!((z.nominal_ratio - 1.0).abs() < 1e-15);
        assert_eq!(z.branch, Some(2));
    }

    #[test]
    fn threshold_separates_feasibility() {
        let t = tetra_feasibility_threshold();
        assert!((t - 0.40042).abs() < 1e-5);
        let grid = linspace(0.0, 1.0, 2001);
        for (eps, expect_all) in [(t - 1e-6, true), (t + 1e-3, false)] {
            let all = grid
                .iter()
                .all(|l| ratio_bound(QracKind::Tetra, eps, Some(*l)).unwrap().feasible);
            assert_eq!(all, expect_all, "ε = {eps}");
        }
        assert!(tetra_infeasible_band(t - 1e-6).is_none());
        let (lo, hi) = tetra_infeasible_band(0.5).unwrap();
        for l in [lo + 1e-9, 0.5 * (lo + hi), hi - 1e-9] {
            assert!(!ratio_bound(QracKind::Tetra, 0.5, Some(l)).unwrap().feasible);
        }
        assert!(ratio_bound(QracKind::Tetra, 0.5, Some(lo - 1e-6)).unwrap().feasible);
        assert!(ratio_bound(QracKind::Tetra, 0.5, Some(hi + 1e-6)).unwrap().feasible);
    }

    #[test]
    fn branch_monotonicity() {
        for e in linspace(0.0, 0.5, 11) {
            let ls = linspace(0.0, 1.0, 51);
            for w in ls.windows(2) {
                let (a0, b0) = tetra_bound_branches(e, w[0]);
                let (a1, b1) = tetra_bound_branches(e, w[1]);
                assert!(a1 > a0 && b1 < b0);
            }
        }
    }

    #[test]
    fn qrac_bound_values() {
        let b = qrac_probability_bounds(2, 4).unwrap();
        assert!((b.improved - (0.5 + 1.0 / (2.0 * 2f64.sqrt()))).abs() < 1e-15);
        let b = qrac_probability_bounds(2, 6).unwrap();
        assert!((b.improved - (0.5 + 1.0 / (2.0 * 3f64.sqrt()))).abs() < 1e-15);
        let b = qrac_probability_bounds(2, 3).unwrap();
        assert!((b.improved - (0.5 + 1.0 / 6f64.sqrt())).abs() < 1e-15);
        assert!(QracKind::ThreeTwo.success_probability() <= b.tightest + 1e-12);
        for (q, n, kind) in [(1, 2, QracKind::TwoOne), (1, 3, QracKind::ThreeOne)] {
            let b = qrac_probability_bounds(q, n).unwrap();
            assert!(kind.success_probability() <= b.tightest + 1e-12);
            assert!((binary_entropy(b.nayak) - (1.0 - q as f64 / n as f64)).abs() < 1e-9);
        }
        assert_eq!(qrac_probability_bounds(2, 2).unwrap().tightest, 1.0);
        assert!(qrac_probability_bounds(0, 2).is_err());
    }

    #[test]
    fn csv_format() {
        let rows = region_sweep(&[0.1], &[0.5, 0.0]).unwrap();
        let csv = region_csv(&rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], REGION_CSV_HEADER);
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("0.100000000000,0.00000000000,"));
        assert!(csv.ends_with('\n'));
        assert_eq!(sig12(0.716832), "0.716832000000");
        assert_eq!(sig12(1.0), "1.00000000000");
    }

    #[test]
    fn adjoint_and_forward_agree_for_self_adjoint_channels() {
        let c = expectation_channel(MagicFamily::Mu31).unwrap();
        let e = PauliExpr::from_labels(2, &[("XY", 1.0), ("ZI", 0.3), ("II", 2.0)]).unwrap();
        let f = c.apply_expr(&e, false).unwrap();
        let b = c.apply_expr(&e, true).unwrap();
        assert!(f.max_abs_diff(&b) < 1e-12);
        assert!((f.coefficient(&PauliWord::parse("XY").unwrap()) - 1.0 / 9.0).abs() < 1e-12);
    }
}
