//! Vertex-to-qubit assignment.

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::qrac::QracKind;
use crate::rng::substream;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    pub color_of: Vec<usize>,
}

impl Coloring {
    pub fn n_colors(&self) -> usize {
        self.color_of.iter().max().map_or(0, |c| c + 1)
    }

    pub fn is_proper(&self, g: &Graph) -> bool {
        g.edges().iter().all(|&(i, j)| self.color_of[i] != self.color_of[j])
    }

    /// Vertices of each color, ascending.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut classes = vec![Vec::new(); self.n_colors()];
        for (v, &c) in self.color_of.iter().enumerate() {
            classes[c].push(v);
        }
        classes
    }
}

/// Largest-degree-first greedy coloring; ties go to the lower index.
pub fn ldf_coloring(g: &Graph) -> Coloring {
    let n = g.n_vertices();
    let deg = g.degrees();
    let nbrs = g.neighbors();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| deg[b].cmp(&deg[a]).then(a.cmp(&b)));
    let mut color_of = vec![usize::MAX; n];
    for v in order {
        let mut used = vec![false; nbrs[v].len() + 1];
        for &u in &nbrs[v] {
            if color_of[u] < used.len() {
                used[color_of[u]] = true;
            }
        }
        color_of[v] = used.iter().position(|u| !u).unwrap();
    }
    Coloring { color_of }
}

/// How Tetra groups vertices into qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairingStrategy {
    /// `{0,1}, {2,3}, …`
    Index,
    /// Seeded shuffle, then consecutive pairs.
    Random(u64),
    /// Greedy matching over edges in lexicographic order, so that many edges
    /// land inside a qubit; leftovers pair in ascending order.
    GreedyIntra,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncodingAssignment {
    pub kind: QracKind,
    /// Code unit hosting each vertex.
    pub unit_of: Vec<usize>,
    /// 1-based operator slot of each vertex inside its unit.
    pub slot_of: Vec<usize>,
    pub n_units: usize,
    pub n_qubits: usize,
    /// Fraction of edges whose endpoints sit on different units (Tetra only).
    pub lambda: Option<f64>,
    pub coloring: Option<Coloring>,
}

impl EncodingAssignment {
    pub fn n_vertices(&self) -> usize {
        self.unit_of.len()
    }

    /// Vertex occupying each slot of each unit.
    pub fn members(&self) -> Vec<Vec<Option<usize>>> {
        let mut m = vec![vec![None; self.kind.bits_per_unit()]; self.n_units];
        for v in 0..self.n_vertices() {
            m[self.unit_of[v]][self.slot_of[v] - 1] = Some(v);
        }
        m
    }

    /// First qubit of unit `u`.
    pub fn qubit_offset(&self, unit: usize) -> usize {
        unit * self.kind.qubits_per_unit()
    }

    /// Splits a vertex assignment into per-unit bit tuples; empty slots get 0.
    pub fn unit_bits(&self, x: &[u8]) -> Result<Vec<Vec<u8>>> {
        if x.len() != self.n_vertices() {
            return Err(Error::Dimension { expected: self.n_vertices(), got: x.len() });
        }
        let mut bits = vec![vec![0u8; self.kind.bits_per_unit()]; self.n_units];
        for (v, &b) in x.iter().enumerate() {
            bits[self.unit_of[v]][self.slot_of[v] - 1] = b;
        }
        if self.kind == QracKind::Tetra {
            // A lone vertex's dummy partner copies it, so an intra edge
            // cannot appear and the Z slot stays consistent.
            for (u, m) in self.members().iter().enumerate() {
                if m[1].is_none() {
                    bits[u][1] = bits[u][0];
                }
            }
        }
        Ok(bits)
    }

    /// Achieved vertices per qubit.
    pub fn compression(&self) -> f64 {
        if self.n_qubits == 0 {
            return 0.0;
        }
        self.n_vertices() as f64 / self.n_qubits as f64
    }
}

pub fn assign(g: &Graph, kind: QracKind, pairing: PairingStrategy) -> Result<EncodingAssignment> {
    let n = g.n_vertices();
    let mut unit_of = vec![0; n];
    let mut slot_of = vec![0; n];
    if kind.needs_coloring() {
        let coloring = ldf_coloring(g);
        let mut n_units = 0;
        for class in coloring.classes() {
            for chunk in class.chunks(kind.bits_per_unit()) {
                for (k, &v) in chunk.iter().enumerate() {
                    unit_of[v] = n_units;
                    slot_of[v] = k + 1;
                }
                n_units += 1;
            }
        }
        return Ok(EncodingAssignment {
            kind,
            unit_of,
            slot_of,
            n_units,
            n_qubits: n_units * kind.qubits_per_unit(),
            lambda: None,
            coloring: Some(coloring),
        });
    }

    let pairs = tetra_pairs(g, pairing);
    for (u, pair) in pairs.iter().enumerate() {
        for (k, v) in pair.iter().enumerate() {
            unit_of[*v] = u;
            slot_of[*v] = k + 1;
        }
    }
    let lambda = inter_unit_fraction(g, &unit_of);
    Ok(EncodingAssignment {
        kind,
        unit_of,
        slot_of,
        n_units: pairs.len(),
        n_qubits: pairs.len(),
        lambda: Some(lambda),
        coloring: None,
    })
}

fn tetra_pairs(g: &Graph, pairing: PairingStrategy) -> Vec<Vec<usize>> {
    let n = g.n_vertices();
    let order: Vec<usize> = match pairing {
        PairingStrategy::Index => (0..n).collect(),
        PairingStrategy::Random(seed) => {
            let mut v: Vec<usize> = (0..n).collect();
            v.shuffle(&mut substream(seed, 0));
            v
        }
        PairingStrategy::GreedyIntra => {
            let mut used = vec![false; n];
            let mut v = Vec::with_capacity(n);
            for &(i, j) in g.edges() {
                if !used[i] && !used[j] {
                    used[i] = true;
                    used[j] = true;
                    v.extend([i, j]);
                }
            }
            v.extend((0..n).filter(|i| !used[*i]));
            v
        }
    };
    order.chunks(2).map(|c| c.to_vec()).collect()
}

/// Fraction of edges joining different units; 1 for edgeless graphs.
pub fn inter_unit_fraction(g: &Graph, unit_of: &[usize]) -> f64 {
    if g.n_edges() == 0 {
        return 1.0;
    }
    let inter = g.edges().iter().filter(|&&(i, j)| unit_of[i] != unit_of[j]).count();
    inter as f64 / g.n_edges() as f64
}

/// Achieved compression `|V| / n_qubits`.
pub fn compression_report(a: &EncodingAssignment, g: &Graph) -> Result<f64> {
    if a.n_vertices() != g.n_vertices() {
        return Err(Error::Dimension { expected: g.n_vertices(), got: a.n_vertices() });
    }
    Ok(a.compression())
}
