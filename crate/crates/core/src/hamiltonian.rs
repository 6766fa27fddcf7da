//! Relaxed MaxCut Hamiltonians.
//!
//! Every edge contributes `½(I − O_e)` where `O_e` is the product of the two
//! endpoints' slot operators scaled so that encoded product states reproduce
//! the cut exactly. Tetra edges whose endpoints share a qubit use `√3·Z`.

use crate::encoding::EncodingAssignment;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::qrac::{encoded_expr, slot_operator, QracKind};
use crate::quantum::{Pauli, PauliExpr, PauliWord};

#[derive(Debug, Clone)]
pub struct RelaxedHamiltonian {
    pub expr: PauliExpr,
    pub kind: QracKind,
    pub n_edges: usize,
    pub assignment: EncodingAssignment,
}

/// Tetra Hamiltonian minus its constant, split by locality.
#[derive(Debug, Clone)]
pub struct LocalSplit {
    /// `−(3/2) Σ P_i P_j` over edges across qubits.
    pub two_local: PauliExpr,
    /// `−(√3/2) Σ Z_k` over edges inside a qubit.
    pub one_local: PauliExpr,
}

/// `O_e` for one edge, as an operator on the full register.
fn edge_operator(a: &EncodingAssignment, i: usize, j: usize) -> Result<PauliExpr> {
    let kind = a.kind;
    let n = a.n_qubits;
    let (ui, uj) = (a.unit_of[i], a.unit_of[j]);
    if ui == uj {
        if kind != QracKind::Tetra {
            return Err(Error::validation(format!(
                "edge ({i},{j}) joins two vertices of unit {ui}"
            )));
        }
        return Ok(PauliExpr::from_terms(n, [(PauliWord::single(ui, Pauli::Z), 3f64.sqrt())]));
    }
    let q = kind.qubits_per_unit();
    let pi = slot_operator(kind, a.slot_of[i] - 1)?.embed(n, a.qubit_offset(ui));
    let pj = slot_operator(kind, a.slot_of[j] - 1)?.embed(n, a.qubit_offset(uj));
    debug_assert_eq!(q * a.n_units, n);
    Ok(pi.disjoint_product(&pj).scaled(kind.edge_coefficient()))
}

pub fn build(g: &Graph, a: &EncodingAssignment) -> Result<RelaxedHamiltonian> {
    if a.n_vertices() != g.n_vertices() {
        return Err(Error::Dimension { expected: g.n_vertices(), got: a.n_vertices() });
    }
    let n = a.n_qubits;
    let mut expr = PauliExpr::identity(n, g.n_edges() as f64 / 2.0);
    for &(i, j) in g.edges() {
        expr = &expr - &edge_operator(a, i, j)?.scaled(0.5);
    }
    Ok(RelaxedHamiltonian { expr, kind: a.kind, n_edges: g.n_edges(), assignment: a.clone() })
}

/// Diagonal MaxCut Hamiltonian `½ Σ (I − Z_i Z_j)` on one qubit per vertex.
pub fn maxcut_hamiltonian(g: &Graph) -> PauliExpr {
    let n = g.n_vertices();
    let mut expr = PauliExpr::identity(n, g.n_edges() as f64 / 2.0);
    for &(i, j) in g.edges() {
        expr.add_term(PauliWord::from_sparse(&[(i, Pauli::Z), (j, Pauli::Z)]), -0.5);
    }
    expr
}

impl RelaxedHamiltonian {
    pub fn n_qubits(&self) -> usize {
        self.expr.n_qubits()
    }

    /// `Tr[H ⊗_u ρ_u(x)]` computed from the Pauli expansions of the unit
    /// states, without forming the register matrix.
    pub fn classical_energy(&self, x: &[u8]) -> Result<f64> {
        let a = &self.assignment;
        let unit_bits = a.unit_bits(x)?;
        let q = self.kind.qubits_per_unit();
        let states = unit_bits
            .iter()
            .map(|b| encoded_expr(self.kind, b))
            .collect::<Result<Vec<_>>>()?;
        let dim = (1usize << q) as f64;
        let mut total = 0.0;
        for (w, c) in self.expr.terms() {
            let mut prod = *c;
            for (u, rho) in states.iter().enumerate() {
                let sub = w.extract(a.qubit_offset(u), q);
                // Tr[P ρ] = 2^q · (coefficient of P in ρ).
                prod *= dim * rho.coefficient(&sub);
                if prod == 0.0 {
                    break;
                }
            }
            total += prod;
        }
        Ok(total)
    }

    /// Locality split of `H − |E|/2·I` used by the Tetra bound.
    pub fn local_split(&self) -> LocalSplit {
        let n = self.n_qubits();
        let mut two = PauliExpr::zero(n);
        let mut one = PauliExpr::zero(n);
        for (w, c) in self.expr.terms() {
            match w.weight() {
                0 => {}
                1 => one.add_term(*w, *c),
                _ => two.add_term(*w, *c),
            }
        }
        LocalSplit { two_local: two, one_local: one }
    }

    pub fn constant(&self) -> f64 {
        self.expr.coefficient(&PauliWord::IDENTITY)
    }
}

pub fn classical_energy(h: &RelaxedHamiltonian, x: &[u8]) -> Result<f64> {
    h.classical_energy(x)
}
