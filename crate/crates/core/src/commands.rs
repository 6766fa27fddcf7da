//! Front-end commands shared by the binary and the Python bindings.
//!
//! Each command returns its report text and the process exit status, so
//! callers only print and exit.

use std::fmt::Write as _;

use crate::analysis::{
    channel_for, expectation_channel, linspace, measured_nominal, primed_shrink_residual,
    qrac_probability_bounds, random_density, random_word, ratio_bound, region_csv, region_sweep,
    tetra_feasibility_threshold, tetra_infeasible_band, tetra_locality_parts, trace_range_check, transfer_distance,
    verify_rank1_projective, verify_self_adjoint, CONJECTURE_KINDS,
};
use crate::encoding::{assign, EncodingAssignment, PairingStrategy};
use crate::error::{Error, Result};
use crate::graph::{brute_force_maxcut, gain, parse_edge_list, CutSolution, Graph};
use crate::hamiltonian::build;
use crate::qrac::{
    all_tuples, decoding_povm, encode, magic_basis, parity_tuples, primed_operators,
    MagicFamily, QracKind,
};
use crate::quantum::{
    check_qubit_cap, max_eigenpair, trace_product, LinearChannel, PauliExpr,
};
use crate::rng::substream;
use crate::rounding::{best_of, round, RoundingConfig, RoundingMethod, RoundingOutcome};

pub const DEFAULT_SHOTS: usize = 10_000;
pub const DEFAULT_SEED: u64 = 42;

/// Text plus exit status of a finished command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutput {
    pub text: String,
    pub exit_code: i32,
}

impl CommandOutput {
    fn ok(text: String) -> Self {
        CommandOutput { text, exit_code: 0 }
    }

    pub fn from_error(e: &Error) -> Self {
        CommandOutput { text: format!("error: {e}\n"), exit_code: e.exit_code() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub kind: QracKind,
    /// `None` runs every method compatible with `kind`.
    pub rounding: Option<RoundingMethod>,
    pub shots: usize,
    pub seed: u64,
    pub pairing: PairingStrategy,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            kind: QracKind::ThreeOne,
            rounding: None,
            shots: DEFAULT_SHOTS,
            seed: DEFAULT_SEED,
            pairing: PairingStrategy::Index,
        }
    }
}

/// Result of one rounding method inside a solve run.
#[derive(Debug, Clone)]
pub struct MethodResult {
    pub outcome: RoundingOutcome,
    pub best_ratio: f64,
    pub mean_ratio: f64,
    /// Exact expected ratio through the expectation channel (sampling methods).
    pub expected_ratio: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub graph: Graph,
    pub optimum: CutSolution,
    pub epsilon: Option<f64>,
    pub assignment: EncodingAssignment,
    pub lambda_max: f64,
    pub relaxed_energy: f64,
    pub methods: Vec<MethodResult>,
}

fn f(x: f64) -> String {
    format!("{x:.9}")
}

/// Runs the full pipeline on a graph.
pub fn solve_graph(g: &Graph, cfg: &SolveConfig) -> Result<SolveReport> {
    let a = assign(g, cfg.kind, cfg.pairing)?;
    check_qubit_cap("qubits for this encoding", a.n_qubits)?;
    let methods: Vec<RoundingMethod> = match cfg.rounding {
        Some(m) => {
            m.check(cfg.kind)?;
            vec![m]
        }
        None => RoundingMethod::ALL.into_iter().filter(|m| m.compatible(cfg.kind)).collect(),
    };
    let optimum = brute_force_maxcut(g)?;
    let epsilon = if g.n_edges() > 0 { Some(gain(g, optimum.cut_value)?.epsilon) } else { None };
    let h = build(g, &a)?;
    let eig = max_eigenpair(&h.expr)?;
    let rho = eig.state;
    let relaxed_energy = rho.expectation(&h.expr)?;
    let opt = optimum.cut_value.max(1);
    let mut results = Vec::new();
    for method in methods {
        let outcome = round(g, &rho, &a, &RoundingConfig { method, shots: cfg.shots, seed: cfg.seed })?;
        let ratios = best_of(&outcome, opt)?;
        let expected_ratio = if method.is_basis_sampling() {
            let chan = match method {
                RoundingMethod::TetraMagic => expectation_channel(MagicFamily::TetraMu)?,
                _ => channel_for(cfg.kind)?,
            };
            Some(chan.expected_cut(&h, &rho)? / opt as f64)
        } else {
            None
        };
        results.push(MethodResult {
            outcome,
            best_ratio: ratios.best_ratio,
            mean_ratio: ratios.mean_ratio,
            expected_ratio,
        });
    }
    Ok(SolveReport {
        graph: g.clone(),
        optimum,
        epsilon,
        assignment: a,
        lambda_max: eig.max_eigenvalue,
        relaxed_energy,
        methods: results,
    })
}

pub fn render_solve(r: &SolveReport, cfg: &SolveConfig) -> Result<String> {
    let mut out = String::new();
    let g = &r.graph;
    let a = &r.assignment;
    let _ = writeln!(out, "graph          {} vertices, {} edges", g.n_vertices(), g.n_edges());
    let _ = writeln!(out, "optimum        {} ({})", r.optimum.cut_value, r.optimum.bitstring());
    match r.epsilon {
        Some(e) => {
            let _ = writeln!(out, "gain           {}", f(e));
        }
        None => {
            let _ = writeln!(out, "gain           n/a (no edges)");
        }
    }
    let kind = cfg.kind;
    let _ = writeln!(
        out,
        "encoding       {} ({} bits on {} qubit{})",
        kind,
        kind.bits_per_unit(),
        kind.qubits_per_unit(),
        if kind.qubits_per_unit() == 1 { "" } else { "s" }
    );
    let _ = writeln!(out, "qubits         {}", a.n_qubits);
    let _ = writeln!(
        out,
        "compression    nominal {}, achieved {}",
        f(kind.compression_ratio()),
        f(a.compression())
    );
    if let Some(l) = a.lambda {
        let _ = writeln!(out, "lambda         {}", f(l));
    }
    let _ = writeln!(out, "lambda_max     {}", f(r.lambda_max));
    let _ = writeln!(out, "relaxed energy {}", f(r.relaxed_energy));
    if let Some(e) = r.epsilon {
        let b = ratio_bound(kind, e, a.lambda)?;
        let _ = writeln!(
            out,
            "guarantee      nominal {}, at this gain {}, {}",
            f(b.nominal_ratio),
            f(b.instance_ratio),
            if b.feasible { "non-trivial" } else { "trivial (<= 1/2)" }
        );
    }
    let _ = writeln!(out, "shots          {}", cfg.shots);
    let _ = writeln!(out, "seed           {}", cfg.seed);
    for m in &r.methods {
        let o = &m.outcome;
        let _ = write!(
            out,
            "method {:<12} best {} ({}) mean {} best/opt {} mean/opt {}",
            o.method.label(),
            o.best.cut_value,
            o.best.bitstring(),
            f(o.mean_cut()),
            f(m.best_ratio),
            f(m.mean_ratio)
        );
        if let Some(x) = m.expected_ratio {
            let _ = write!(out, " expected/opt {}", f(x));
        }
        out.push('\n');
    }
    // Earlier methods win ties.
    let mut best: Option<&MethodResult> = None;
    for m in &r.methods {
        if best.is_none_or(|b| m.outcome.best.cut_value > b.outcome.best.cut_value) {
            best = Some(m);
        }
    }
    if let Some(best) = best {
        let _ = writeln!(
            out,
            "best cut       {} ({}) via {}",
            best.outcome.best.cut_value,
            best.outcome.best.bitstring(),
            best.outcome.method
        );
    }
    Ok(out)
}

pub fn solve_text(text: &str, cfg: &SolveConfig) -> CommandOutput {
    let run = || -> Result<String> {
        let g = parse_edge_list(text)?;
        let report = solve_graph(&g, cfg)?;
        render_solve(&report, cfg)
    };
    match run() {
        Ok(t) => CommandOutput::ok(t),
        Err(e) => CommandOutput::from_error(&e),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Qrac,
    Channels,
    Bounds,
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qrac" => Ok(Suite::Qrac),
            "channels" => Ok(Suite::Channels),
            "bounds" => Ok(Suite::Bounds),
            "all" => Ok(Suite::All),
            other => Err(Error::Validation(format!("unknown suite `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
}

fn check(name: &str, residual: f64, tol: f64) -> Check {
    Check { name: name.into(), passed: residual <= tol, residual }
}

const TOL: f64 = 1e-9;

pub fn qrac_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for kind in QracKind::ALL {
        let p = kind.success_probability();
        let mut worst: f64 = 0.0;
        let mut purity: f64 = 0.0;
        for pos in 1..=kind.decodable_positions() {
            let povm = decoding_povm(kind, pos)?;
            for t in all_tuples(kind) {
                let rho = encode(kind, &t)?.state;
                let got = trace_product(&povm.effects()[t[pos - 1] as usize], rho.matrix()).re;
                worst = worst.max((got - p).abs());
                purity = purity.max((rho.purity() - 1.0).abs());
            }
        }
        out.push(check(&format!("decode probability {kind} = {p:.6}"), worst, TOL));
        out.push(check(&format!("purity {kind}"), purity, TOL));
    }
    let mut ortho: f64 = 0.0;
    let mut round_trip: f64 = 0.0;
    for parity in 0..2u8 {
        let states = parity_tuples(parity)
            .iter()
            .map(|t| encode(QracKind::ThreeTwo, t).map(|e| e.state))
            .collect::<Result<Vec<_>>>()?;
        let basis = magic_basis(MagicFamily::Parity32, parity as usize)?;
        for (i, s) in states.iter().enumerate() {
            for (j, t) in states.iter().enumerate() {
                if i != j {
                    ortho = ortho.max(trace_product(s.matrix(), t.matrix()).norm());
                }
            }
            round_trip = round_trip.max((basis.povm.probabilities(s.matrix())[i] - 1.0).abs());
        }
    }
    out.push(check("(3,2) same-parity orthogonality", ortho, TOL));
    out.push(check("(3,2) parity-basis round trip", round_trip, TOL));
    let ops = primed_operators();
    let mut primed: f64 = 0.0;
    let dense = ops.iter().map(|p| p.expr.to_dense()).collect::<Result<Vec<_>>>()?;
    for i in 0..3 {
        primed = primed.max(dense[i].trace().norm());
        for j in 0..3 {
            let want = if i == j { 1.0 } else { 0.0 };
            primed = primed.max((trace_product(&dense[i], &dense[j]).re - want).abs());
        }
    }
    out.push(check("primed operators traceless and orthonormal", primed, TOL));
    Ok(out)
}

pub fn channel_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for parity in 0..2 {
        let r = verify_rank1_projective(&magic_basis(MagicFamily::Parity32, parity)?.povm);
        out.push(Check {
            name: format!("parity-{parity} basis rank-1 projective"),
            passed: r.passed,
            residual: r.worst_residual,
        });
    }
    let phi = expectation_channel(MagicFamily::Parity32)?;
    out.push(check("(3,2) channel: I -> I, P' -> (2/3) P'", primed_shrink_residual(&phi)?, TOL));
    let sa = verify_self_adjoint(&phi.channel, 100, DEFAULT_SEED);
    out.push(Check {
        name: "(3,2) channel self-adjoint (100 random pairs)".into(),
        passed: sa.passed,
        residual: sa.worst_residual,
    });
    let tetra = expectation_channel(MagicFamily::TetraMu)?;
    let dep = LinearChannel::depolarizing(7.0 / 9.0)?;
    out.push(check(
        "tetra rounding channel equals depolarizing(7/9)",
        transfer_distance(&tetra.channel, &dep),
        TOL,
    ));
    let mut rng = substream(DEFAULT_SEED, 1);
    let mut worst_excess: f64 = 0.0;
    let mut all_ok = true;
    for k in 0..200 {
        let n = 1 + k % 4;
        let rho = random_density(n, &mut rng);
        let w = random_word(n, &mut rng);
        let p = PauliExpr::from_terms(n, [(w, 1.0)]);
        all_ok &= trace_range_check(&p, &rho)?;
        worst_excess = worst_excess.max(rho.expectation(&p)?.abs() - 1.0);
    }
    out.push(Check {
        name: "Pauli expectations within [-1, 1] (200 random cases)".into(),
        passed: all_ok,
        residual: worst_excess.max(0.0),
    });
    for kind in QracKind::ALL {
        let c = channel_for(kind)?;
        out.push(check(&format!("{kind} rounding channel unital"), c.unital_residual(), TOL));
    }
    Ok(out)
}

pub fn bound_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for kind in CONJECTURE_KINDS {
        let closed = ratio_bound(kind, 0.5, None)?.nominal_ratio;
        let measured = measured_nominal(kind)?;
        let conj = crate::analysis::conjectured_ratio(kind);
        out.push(check(
            &format!("{kind} guarantee {closed:.6} (measured channel, compression rule)"),
            (closed - measured).abs().max((closed - conj).abs()),
            TOL,
        ));
    }
    let t = tetra_feasibility_threshold();
    let below = linspace(0.0, 1.0, 1001)
        .iter()
        .all(|l| ratio_bound(QracKind::Tetra, t - 1e-7, Some(*l)).map(|b| b.feasible).unwrap_or(false));
    // Just above the threshold the infeasible band is a sliver; probe its middle.
    let above = match tetra_infeasible_band(t + 1e-6) {
        Some((lo, hi)) => !ratio_bound(QracKind::Tetra, t + 1e-6, Some(0.5 * (lo + hi)))?.feasible,
        None => false,
    };
    out.push(Check {
        name: format!("tetra feasibility threshold {t:.9}"),
        passed: below && above,
        residual: 0.0,
    });
    for (q, n, want) in [
        (2usize, 4usize, 0.5 + 1.0 / (2.0 * 2f64.sqrt())),
        (2, 6, 0.5 + 1.0 / (2.0 * 3f64.sqrt())),
        (2, 3, 0.5 + 1.0 / 6f64.sqrt()),
    ] {
        let b = qrac_probability_bounds(q, n)?;
        out.push(check(&format!("({n},{q}) success bound"), (b.improved - want).abs(), TOL));
    }
    // Proof identities on a small corpus.
    for g in [Graph::complete(3), Graph::cycle(5), Graph::complete(4)] {
        let opt = brute_force_maxcut(&g)?.cut_value as f64;
        let m = g.n_edges() as f64;
        let a = assign(&g, QracKind::ThreeTwo, PairingStrategy::Index)?;
        let h = build(&g, &a)?;
        let rho = max_eigenpair(&h.expr)?.state;
        let chan = channel_for(QracKind::ThreeTwo)?;
        let e = chan.expected_cut(&h, &rho)?;
        let energy = rho.expectation(&h.expr)?;
        let replay = m / 2.0 + 4.0 / 9.0 * (energy - m / 2.0);
        out.push(check(
            &format!("(3,2) expected cut identity on {}-vertex graph", g.n_vertices()),
            (e - replay).abs(),
            TOL,
        ));
        out.push(Check {
            name: format!("(3,2) ratio >= 13/18 on {}-vertex graph", g.n_vertices()),
            passed: e / opt >= 13.0 / 18.0 - TOL,
            residual: (13.0 / 18.0 - e / opt).max(0.0),
        });
        let at = assign(&g, QracKind::Tetra, PairingStrategy::Index)?;
        let ht = build(&g, &at)?;
        let rt = max_eigenpair(&ht.expr)?.state;
        let et = expectation_channel(MagicFamily::TetraMu)?.expected_cut(&ht, &rt)?;
        let (x, y) = tetra_locality_parts(&ht, &rt)?;
        let replay = m * (0.5 + 4.0 / 81.0 * x + 2.0 / 9.0 * y);
        out.push(check(
            &format!("tetra expected cut identity on {}-vertex graph", g.n_vertices()),
            (et - replay).abs(),
            TOL,
        ));
    }
    Ok(out)
}

pub fn run_checks(suite: Suite) -> Result<Vec<Check>> {
    Ok(match suite {
        Suite::Qrac => qrac_checks()?,
        Suite::Channels => channel_checks()?,
        Suite::Bounds => bound_checks()?,
        Suite::All => {
            let mut v = qrac_checks()?;
            v.extend(channel_checks()?);
            v.extend(bound_checks()?);
            v
        }
    })
}

pub fn verify(suite: Suite) -> CommandOutput {
    let checks = match run_checks(suite) {
        Ok(c) => c,
        Err(e) => return CommandOutput::from_error(&e),
    };
    let mut text = String::new();
    let mut failed = 0;
    for c in &checks {
        if !c.passed {
            failed += 1;
        }
        let _ = writeln!(
            text,
            "{} {:<60} residual {:.3e}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.residual
        );
    }
    let _ = writeln!(text, "{} checks, {} failed", checks.len(), failed);
    CommandOutput { text, exit_code: if failed == 0 { 0 } else { 3 } }
}

/// Grid specification for the ε–λ sweep.
#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    Points(usize),
    Values(Vec<f64>),
}

impl Grid {
    fn resolve(&self, hi: f64) -> Vec<f64> {
        match self {
            Grid::Points(n) => linspace(0.0, hi, *n),
            Grid::Values(v) => v.clone(),
        }
    }
}

pub fn sweep_csv(eps: &Grid, lambda: &Grid) -> Result<String> {
    let rows = region_sweep(&eps.resolve(0.5), &lambda.resolve(1.0))?;
    Ok(region_csv(&rows))
}

/// Writes the sweep CSV to `out` (or returns it as the report when `None`).
pub fn sweep(eps: &Grid, lambda: &Grid, out: Option<&std::path::Path>) -> CommandOutput {
    let csv = match sweep_csv(eps, lambda) {
        Ok(c) => c,
        Err(e) => return CommandOutput::from_error(&e),
    };
    match out {
        None => CommandOutput::ok(csv),
        Some(path) => match std::fs::write(path, &csv) {
            Ok(()) => CommandOutput::ok(format!(
                "wrote {} rows to {}\n",
                csv.lines().count() - 1,
                path.display()
            )),
            Err(e) => CommandOutput {
                text: format!("error: cannot write {}: {e}\n", path.display()),
                exit_code: 1,
            },
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_tetra_report() {
        let cfg = SolveConfig {
            kind: QracKind::Tetra,
            rounding: Some(RoundingMethod::TetraMagic),
            shots: 2000,
            seed: 7,
            pairing: PairingStrategy::Index,
        };
        let out = solve_text("0 1\n1 2\n0 2\n", &cfg);
        assert_eq!(out.exit_code, 0, "{}", out.text);
        assert!(out.text.contains("lambda         0.666666667"));
        assert!(out.text.contains("gain           0.166666667"));
        assert_eq!(out, solve_text("0 1\n1 2\n0 2\n", &cfg));
    }

    #[test]
    fn single_edge_three_one() {
        let out = solve_text("0 1\n", &SolveConfig { shots: 500, ..SolveConfig::default() });
        assert_eq!(out.exit_code, 0);
        assert!(out.text.contains("optimum        1 (01)"));
        assert!(out.text.contains("lambda_max     2.000000000"));
    }

    #[test]
    fn complete_graph_has_unit_compression() {
        let out = solve_text("0 1\n1 2\n0 2\n", &SolveConfig { shots: 100, ..SolveConfig::default() });
        assert!(out.text.contains("achieved 1.000000000"));
    }

    #[test]
    fn error_exit_codes() {
        assert_eq!(solve_text("0 x\n", &SolveConfig::default()).exit_code, 1);
        let big: String = (0..13).map(|i| format!("{i} {}\n", i + 1)).collect();
        let cfg = SolveConfig { kind: QracKind::OneOne, ..SolveConfig::default() };
        assert_eq!(solve_text(&big, &cfg).exit_code, 2);
        let cfg = SolveConfig { rounding: Some(RoundingMethod::Simultaneous), ..SolveConfig::default() };
        assert_eq!(solve_text("0 1\n", &cfg).exit_code, 1);
    }

    #[test]
    fn sweep_sizes() {
        let csv = sweep_csv(&Grid::Points(101), &Grid::Points(101)).unwrap();
        assert_eq!(csv.lines().count(), 10202);
        let one = sweep_csv(&Grid::Values(vec![0.1]), &Grid::Values(vec![0.5])).unwrap();
        assert_eq!(one.lines().count(), 2);
    }

    #[test]
    fn suite_names() {
        assert_eq!("all".parse::<Suite>().unwrap(), Suite::All);
        assert!("nope".parse::<Suite>().is_err());
    }
}
