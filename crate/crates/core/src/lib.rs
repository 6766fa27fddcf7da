//! Desk-scale laboratory for quantum-relaxation MaxCut.
//!
//! Binary variables are packed into few qubits with quantum random access
//! codes ([`qrac`]), a relaxed Hamiltonian is built over the packed qubits
//! ([`hamiltonian`]), its exact maximum eigenstate is found with a dense
//! solver ([`quantum`]), and randomized measurements round the state back to
//! a cut ([`rounding`]). The [`analysis`] module turns each rounding scheme
//! into its expectation channel and certifies the approximation-ratio
//! guarantees numerically.
//!
//! Everything is dense and exact; the qubit cap defaults to 12 and can be
//! raised with the `QRAO_MAX_QUBITS` environment variable.

pub mod analysis;
pub mod commands;
pub mod encoding;
pub mod error;
pub mod graph;
pub mod hamiltonian;
pub mod qrac;
pub mod quantum;
pub mod rng;
pub mod rounding;

pub use error::{Error, Result};
pub use graph::{CutSolution, GainReport, Graph};
pub use qrac::QracKind;
pub use quantum::{DensityOperator, PauliExpr, PauliWord, Povm};
