use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qrao_core::commands::{self, CommandOutput, Grid, SolveConfig, Suite};
use qrao_core::encoding::PairingStrategy;
use qrao_core::rounding::RoundingMethod;
use qrao_core::QracKind;

#[derive(Parser)]
#[command(name = "qrao", version, about = "Quantum-relaxation MaxCut laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode, relax, solve exactly and round a graph.
    Solve {
        /// Edge-list file ("u v" per line, '#' comments, optional "p n m" header).
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = KindArg::K31)]
        kind: KindArg,
        /// Rounding method; every compatible method runs when omitted.
        #[arg(long, value_enum)]
        rounding: Option<RoundingArg>,
        #[arg(long, default_value_t = commands::DEFAULT_SHOTS)]
        shots: usize,
        #[arg(long, default_value_t = commands::DEFAULT_SEED)]
        seed: u64,
        /// Tetra vertex pairing.
        #[arg(long, value_enum, default_value_t = PairingArg::Index)]
        pairing: PairingArg,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run certification suites.
    Verify {
        #[arg(value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate the Tetra ratio bound over an epsilon-lambda grid as CSV.
    Sweep {
        /// Comma-separated gain values (overrides --eps-points).
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
        /// Evenly spaced gains on [0, 1/2].
        #[arg(long, default_value_t = 101)]
        eps_points: usize,
        /// Comma-separated lambda values (overrides --lambda-points).
        #[arg(long, value_delimiter = ',')]
        lambda: Option<Vec<f64>>,
        /// Evenly spaced lambdas on [0, 1].
        #[arg(long, default_value_t = 101)]
        lambda_points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    #[value(name = "11")]
    K11,
    #[value(name = "21")]
    K21,
    #[value(name = "31")]
    K31,
    #[value(name = "32")]
    K32,
    Tetra,
}

impl From<KindArg> for QracKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::K11 => QracKind::OneOne,
            KindArg::K21 => QracKind::TwoOne,
            KindArg::K31 => QracKind::ThreeOne,
            KindArg::K32 => QracKind::ThreeTwo,
            KindArg::Tetra => QracKind::Tetra,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RoundingArg {
    Pauli,
    Magic,
    Individual,
    Simultaneous,
    TetraMagic,
}

impl From<RoundingArg> for RoundingMethod {
    fn from(r: RoundingArg) -> Self {
        match r {
            RoundingArg::Pauli => RoundingMethod::Pauli,
            RoundingArg::Magic => RoundingMethod::Magic,
            RoundingArg::Individual => RoundingMethod::Individual,
            RoundingArg::Simultaneous => RoundingMethod::Simultaneous,
            RoundingArg::TetraMagic => RoundingMethod::TetraMagic,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PairingArg {
    Index,
    Random,
    Greedy,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Qrac,
    Channels,
    Bounds,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Qrac => Suite::Qrac,
            SuiteArg::Channels => Suite::Channels,
            SuiteArg::Bounds => Suite::Bounds,
            SuiteArg::All => Suite::All,
        }
    }
}

/// Errors go to stderr; reports go to `out` when given, otherwise stdout.
fn emit(output: CommandOutput, out: Option<&PathBuf>) -> ExitCode {
    let code = ExitCode::from(output.exit_code as u8);
    if output.text.starts_with("error:") {
        eprint!("{}", output.text);
        return code;
    }
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &output.text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{}", output.text),
    }
    code
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { 1 } else { 0 };
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Solve { graph, kind, rounding, shots, seed, pairing, out } => {
            let text = match std::fs::read_to_string(&graph) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", graph.display());
                    return ExitCode::from(1);
                }
            };
            let pairing = match pairing {
                PairingArg::Index => PairingStrategy::Index,
                PairingArg::Random => PairingStrategy::Random(seed),
                PairingArg::Greedy => PairingStrategy::GreedyIntra,
            };
            let cfg = SolveConfig {
                kind: kind.into(),
                rounding: rounding.map(Into::into),
                shots,
                seed,
                pairing,
            };
            emit(commands::solve_text(&text, &cfg), out.as_ref())
        }
        Command::Verify { suite, out } => emit(commands::verify(suite.into()), out.as_ref()),
        Command::Sweep { eps, eps_points, lambda, lambda_points, out } => {
            let eg = eps.map_or(Grid::Points(eps_points), Grid::Values);
            let lg = lambda.map_or(Grid::Points(lambda_points), Grid::Values);
            emit(commands::sweep(&eg, &lg, out.as_deref()), None)
        }
    }
}
