//! Unweighted simple graphs, edge-list ingestion and the exhaustive MaxCut oracle.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Largest vertex count accepted by [`brute_force_maxcut`].
pub const BRUTE_FORCE_MAX_VERTICES: usize = 24;

/// Undirected simple graph on vertices `0..n_vertices`.
///
/// Edges are stored normalized (`i < j`) and sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n_vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n_vertices: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::validation(format!("self-loop on vertex {a}")));
            }
            if a >= n_vertices || b >= n_vertices {
                return Err(Error::validation(format!(
                    "edge ({a}, {b}) references a vertex outside 0..{n_vertices}"
                )));
            }
            let e = (a.min(b), a.max(b));
            if !seen.insert(e) {
                return Err(Error::validation(format!("duplicate edge ({}, {})", e.0, e.1)));
            }
        }
        Ok(Graph {
            n_vertices,
            edges: seen.into_iter().collect(),
        })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
        Graph::new(n, edges).expect("complete graph is simple")
    }

    pub fn path(n: usize) -> Self {
        Graph::new(n, (1..n).map(|i| (i - 1, i))).expect("path is simple")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle is simple")
    }

    pub fn star(n: usize) -> Self {
        Graph::new(n, (1..n).map(|i| (0, i))).expect("star is simple")
    }

    pub fn empty(n: usize) -> Self {
        Graph { n_vertices: n, edges: Vec::new() }
    }

    /// Erdős–Rényi G(n, p) sample drawn from `rng`.
    pub fn random_gnp(n: usize, p: f64, rng: &mut impl rand::Rng) -> Self {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.random::<f64>() < p {
                    edges.push((i, j));
                }
            }
        }
        Graph { n_vertices: n, edges }
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n_vertices];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n_vertices];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// Number of edges whose endpoints receive different bits.
    pub fn cut_value(&self, assignment: &[u8]) -> Result<usize> {
        if assignment.len() != self.n_vertices {
            return Err(Error::Dimension {
                expected: self.n_vertices,
                got: assignment.len(),
            });
        }
        Ok(self
            .edges
            .iter()
            .filter(|&&(a, b)| assignment[a] != assignment[b])
            .count())
    }

    /// Applies a vertex relabeling `v -> perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n_vertices {
            return Err(Error::Dimension {
                expected: self.n_vertices,
                got: perm.len(),
            });
        }
        Graph::new(self.n_vertices, self.edges.iter().map(|&(a, b)| (perm[a], perm[b])))
    }
}

impl fmt::Display for Graph {
    /// Writes the graph in the edge-list format accepted by [`parse_edge_list`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p {} {}", self.n_vertices, self.edges.len())?;
        for (a, b) in &self.edges {
            writeln!(f, "{a} {b}")?;
        }
        Ok(())
    }
}

/// Parses a whitespace-separated edge list.
///
/// Lines starting with `#` and blank lines are skipped. An optional first
/// content line `p <n_vertices> <n_edges>` declares the vertex count (which
/// may exceed `1 + max index` to allow isolated vertices) and the edge count,
/// which is checked.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut declared: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    let mut seen_content = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields[0] == "p" {
            if seen_content {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "header must precede all edges".into(),
                });
            }
            seen_content = true;
            if fields.len() != 3 {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "header must be `p <n_vertices> <n_edges>`".into(),
                });
            }
            let n = parse_index(fields[1], line_no)?;
            let m = parse_index(fields[2], line_no)?;
            declared = Some((n, m));
            continue;
        }
        seen_content = true;
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected two vertex indices, found {} fields", fields.len()),
            });
        }
        let a = parse_index(fields[0], line_no)?;
        let b = parse_index(fields[1], line_no)?;
        if a == b {
            return Err(Error::validation(format!("self-loop on vertex {a} (line {line_no})")));
        }
        edges.push((a, b));
    }

    let max_index = edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0);
    let n_vertices = match declared {
        Some((n, m)) => {
            if n < max_index {
                return Err(Error::validation(format!(
                    "header declares {n} vertices but edges reference vertex {}",
                    max_index - 1
                )));
            }
            if m != edges.len() {
                return Err(Error::validation(format!(
                    "header declares {m} edges but {} were listed",
                    edges.len()
                )));
            }
            n
        }
        None => max_index,
    };
    Graph::new(n_vertices, edges)
}

fn parse_index(field: &str, line: usize) -> Result<usize> {
    field.parse::<usize>().map_err(|_| Error::Parse {
        line,
        msg: format!("`{field}` is not a non-negative integer"),
    })
}

/// A bit assignment together with its cut value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutSolution {
    pub assignment: Vec<u8>,
    pub cut_value: usize,
}

impl CutSolution {
    pub fn evaluate(g: &Graph, assignment: Vec<u8>) -> Result<Self> {
        let cut_value = g.cut_value(&assignment)?;
        Ok(CutSolution { assignment, cut_value })
    }

    pub fn bitstring(&self) -> String {
        self.assignment.iter().map(|b| if *b == 0 { '0' } else { '1' }).collect()
    }
}

/// Exact MaxCut by exhaustive enumeration.
///
/// Ties resolve to the lexicographically smallest bitstring (vertex 0 is the
/// most significant position). The sweep is split across threads but the
/// reduction is order-independent, so the result does not depend on it.
pub fn brute_force_maxcut(g: &Graph) -> Result<CutSolution> {
    let n = g.n_vertices();
    if n > BRUTE_FORCE_MAX_VERTICES {
        return Err(Error::Size {
            what: "brute-force MaxCut vertices",
            required: n,
            limit: BRUTE_FORCE_MAX_VERTICES,
        });
    }
    // Bit (n-1-v) of the mask is vertex v, so numeric order is lexicographic order.
    let shifts: Vec<(u32, u32)> = g
        .edges()
        .iter()
        .map(|&(a, b)| ((n - 1 - a) as u32, (n - 1 - b) as u32))
        .collect();
    let cut_of = |mask: u32| -> usize {
        shifts
            .iter()
            .filter(|&&(sa, sb)| ((mask >> sa) ^ (mask >> sb)) & 1 == 1)
            .count()
    };
    let total: u64 = 1u64 << n;
    let (best_cut, best_mask) = (0..total)
        .into_par_iter()
        .map(|m| (cut_of(m as u32), m as u32))
        .reduce(
            || (0usize, u32::MAX),
            |a, b| {
                if a.0 > b.0 || (a.0 == b.0 && a.1 < b.1) {
                    a
                } else {
                    b
                }
            },
        );
    let assignment = (0..n).map(|v| ((best_mask >> (n - 1 - v)) & 1) as u8).collect();
    Ok(CutSolution { assignment, cut_value: best_cut })
}

/// MaxCut gain: `opt = (1/2 + epsilon) |E|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainReport {
    pub opt: usize,
    pub epsilon: f64,
}

pub fn gain(g: &Graph, opt: usize) -> Result<GainReport> {
    let m = g.n_edges();
    if m == 0 {
        return Err(Error::validation("gain is undefined for a graph without edges"));
    }
    if 2 * opt < m || opt > m {
        return Err(Error::validation(format!(
            "optimum {opt} outside the feasible range [{}, {m}]",
            m as f64 / 2.0
        )));
    }
    Ok(GainReport {
        opt,
        epsilon: opt as f64 / m as f64 - 0.5,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: plain loop over every assignment, no bit tricks.
    fn naive_maxcut(g: &Graph) -> usize {
        let n = g.n_vertices();
        let mut best = 0;
        for m in 0..(1usize << n) {
            let x: Vec<u8> = (0..n).map(|v| ((m >> v) & 1) as u8).collect();
            best = best.max(g.cut_value(&x).unwrap());
        }
        best
    }

    #[test]
    fn parses_triangle() {
        let g = parse_edge_list("0 1\n1 2\n0 2").unwrap();
        assert_eq!(g, Graph::complete(3));
        assert_eq!(g.n_edges(), 3);
    }

    #[test]
    fn parses_single_edge_and_header() {
        let g = parse_edge_list("0 1").unwrap();
        assert_eq!((g.n_vertices(), g.n_edges()), (2, 1));
        let g = parse_edge_list("# comment\np 5 1\n\n3 1\n").unwrap();
        assert_eq!((g.n_vertices(), g.n_edges()), (5, 1));
        assert_eq!(g.edges(), &[(1, 3)]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse_edge_list("0 0"), Err(Error::Validation(_))));
        assert!(matches!(parse_edge_list("0 1\n1 0"), Err(Error::Validation(_))));
        assert_eq!(
            parse_edge_list("0 1\n1 x\n"),
            Err(Error::Parse { line: 2, msg: "`x` is not a non-negative integer".into() })
        );
        assert!(matches!(parse_edge_list("0 1 2"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_edge_list("p 3 2\n0 1"), Err(Error::Validation(_))));
        assert!(matches!(parse_edge_list("p 2 1\n0 5"), Err(Error::Validation(_))));
    }

    #[test]
    fn display_round_trips() {
        let g = Graph::new(6, [(0, 4), (2, 3)]).unwrap();
        assert_eq!(parse_edge_list(&g.to_string()).unwrap(), g);
    }

    #[test]
    fn brute_force_small_values() {
        assert_eq!(brute_force_maxcut(&Graph::path(2)).unwrap().cut_value, 1);
        assert_eq!(brute_force_maxcut(&Graph::complete(3)).unwrap().cut_value, 2);
        assert_eq!(brute_force_maxcut(&Graph::complete(4)).unwrap().cut_value, 4);
        assert_eq!(brute_force_maxcut(&Graph::empty(3)).unwrap().cut_value, 0);
    }

    #[test]
    fn brute_force_tie_break_is_lexicographic() {
        // For a single edge both 01 and 10 are optimal.
        let sol = brute_force_maxcut(&Graph::path(2)).unwrap();
        assert_eq!(sol.assignment, vec![0, 1]);
        let sol = brute_force_maxcut(&Graph::complete(3)).unwrap();
        assert_eq!(sol.assignment, vec![0, 0, 1]);
    }

    #[test]
    fn brute_force_size_limit() {
        let g = Graph::empty(25);
        assert!(matches!(brute_force_maxcut(&g), Err(Error::Size { .. })));
    }

    #[test]
    fn gain_values() {
        let k3 = Graph::complete(3);
        let r = gain(&k3, 2).unwrap();
        assert!((r.epsilon - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(gain(&Graph::path(2), 1).unwrap().epsilon, 0.5);
        assert!((gain(&Graph::complete(4), 4).unwrap().epsilon - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(gain(&Graph::star(5), 4).unwrap().epsilon, 0.5);
        let c4 = Graph::cycle(4);
        assert_eq!(gain(&c4, 2).unwrap().epsilon, 0.0);
        assert!(gain(&k3, 1).is_err());
        assert!(gain(&k3, 4).is_err());
        assert!(gain(&Graph::empty(2), 0).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_graph() -> impl Strategy<Value = Graph> {
            (1usize..=10).prop_flat_map(|n| {
                let pairs: Vec<(usize, usize)> =
                    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
                let k = pairs.len();
                proptest::collection::vec(any::<bool>(), k).prop_map(move |keep| {
                    let e = pairs.iter().zip(&keep).filter(|(_, k)| **k).map(|(e, _)| *e);
                    Graph::new(n, e).unwrap()
                })
            })
        }

        proptest! {
            #[test]
            fn maxcut_matches_naive_and_random_bound(g in arb_graph()) {
                let sol = brute_force_maxcut(&g).unwrap();
                prop_assert_eq!(sol.cut_value, naive_maxcut(&g));
                prop_assert_eq!(g.cut_value(&sol.assignment).unwrap(), sol.cut_value);
                prop_assert!(2 * sol.cut_value >= g.n_edges());
            }

            #[test]
            fn gain_invariant_under_relabeling(g in arb_graph(), seed in any::<u64>()) {
                prop_assume!(g.n_edges() > 0);
                use rand::seq::SliceRandom;
                let mut perm: Vec<usize> = (0..g.n_vertices()).collect();
                perm.shuffle(&mut crate::rng::substream(seed, 0));
                let h = g.relabel(&perm).unwrap();
                let eg = gain(&g, brute_force_maxcut(&g).unwrap().cut_value).unwrap().epsilon;
                let eh = gain(&h, brute_force_maxcut(&h).unwrap().cut_value).unwrap().epsilon;
                prop_assert_eq!(eg, eh);
            }
        }
    }
}
