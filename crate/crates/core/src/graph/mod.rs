//! Undirected weighted graphs: the communication topology.
//!
//! A [`WeightedGraph`] stores an edge list with symmetric positive weights
//! (`W_ij = W_ji > 0`, zero for absent edges, no self-loops). Node indices are
//! `0..n` internally; the edge-list text format ([`io`]) is 1-based.
//!
//! The weighted Laplacian is `L = D - W` with `D = diag(row sums of W)`; its
//! second-smallest and largest eigenvalues drive the step-size bound of the
//! allocation dynamics (see [`spectral_bounds`]).

mod generate;
pub mod io;
mod spectral;

pub use generate::{assign_weights, generate, GraphModel, GraphModelSpec};
pub use spectral::{laplacian_eigenvalues, spectral_bounds, SpectralSummary};

use ndarray::Array2;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("node index {index} out of range for {n} nodes")]
    NodeOutOfRange { index: usize, n: usize },

    #[error("self-loop at node {0} is not allowed")]
    SelfLoop(usize),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("edge ({a}, {b}) has non-positive weight {w}")]
    NonPositiveWeight { a: usize, b: usize, w: f64 },

    #[error("invalid model parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("graph is disconnected (zero Laplacian eigenvalue has multiplicity > 1)")]
    Disconnected,

    #[error("operation needs at least {need} nodes, graph has {have}")]
    TooFewNodes { need: usize, have: usize },

    #[error("node counts differ: {0} vs {1}")]
    NodeCountMismatch(usize, usize),

    #[error("cannot take the union of an empty graph sequence")]
    EmptyUnion,

    #[error("edge-list parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One undirected edge with `a < b` and weight `w > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub w: f64,
}

/// Undirected graph with symmetric positive link weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    /// Sorted by `(a, b)` with `a < b`; this canonical order makes every
    /// seeded draw over edges reproducible.
    edges: Vec<Edge>,
}

impl WeightedGraph {
    /// An edgeless graph on `n` nodes.
    pub fn new(n: usize) -> Self {
        WeightedGraph { n, edges: Vec::new() }
    }

    /// Build a graph from `(a, b, w)` triples, validating all invariants.
    pub fn with_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self, GraphError> {
        let mut g = WeightedGraph::new(n);
        for (a, b, w) in edges {
            g.add_edge(a, b, w)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, a: usize, b: usize, w: f64) -> Result<(), GraphError> {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        if a == b {
            return Err(GraphError::SelfLoop(a));
        }
        if b >= self.n {
            return Err(GraphError::NodeOutOfRange { index: b, n: self.n });
        }
        if !(w > 0.0) {
            return Err(GraphError::NonPositiveWeight { a, b, w });
        }
        match self.edges.binary_search_by(|e| (e.a, e.b).cmp(&(a, b))) {
            Ok(_) => Err(GraphError::DuplicateEdge(a, b)),
            Err(pos) => {
                self.edges.insert(pos, Edge { a, b, w });
                Ok(())
            }
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges in canonical `(a, b)` order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        self.edges.binary_search_by(|e| (e.a, e.b).cmp(&(a, b))).is_ok()
    }

    /// `W_ij`, or zero when the edge is absent.
    pub fn weight(&self, a: usize, b: usize) -> f64 {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        match self.edges.binary_search_by(|e| (e.a, e.b).cmp(&(a, b))) {
            Ok(pos) => self.edges[pos].w,
            Err(_) => 0.0,
        }
    }

    /// Unweighted degree of every node.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n];
        for e in &self.edges {
            deg[e.a] += 1;
            deg[e.b] += 1;
        }
        deg
    }

    /// Sum of incident link weights per node (the diagonal of `D`).
    pub fn weighted_degrees(&self) -> Vec<f64> {
        let mut deg = vec![0.0; self.n];
        for e in &self.edges {
            deg[e.a] += e.w;
            deg[e.b] += e.w;
        }
        deg
    }

    /// Mean unweighted degree `2|E| / n`.
    pub fn mean_degree(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        2.0 * self.edges.len() as f64 / self.n as f64
    }

    /// True iff one traversal reaches all nodes (spanning tree exists).
    pub fn is_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let mut ds = DisjointSet::new(self.n);
        for e in &self.edges {
            ds.union(e.a, e.b);
        }
        ds.component_count() == 1
    }

    pub fn component_count(&self) -> usize {
        let mut ds = DisjointSet::new(self.n);
        for e in &self.edges {
            ds.union(e.a, e.b);
        }
        ds.component_count()
    }

    /// Dense weighted Laplacian `L = D - W`.
    pub fn laplacian(&self) -> Array2<f64> {
        let mut l = Array2::zeros((self.n, self.n));
        for e in &self.edges {
            l[[e.a, e.b]] -= e.w;
            l[[e.b, e.a]] -= e.w;
            l[[e.a, e.a]] += e.w;
            l[[e.b, e.b]] += e.w;
        }
        l
    }

    /// Keep only the edges whose index is flagged in `mask`.
    pub fn edge_subgraph(&self, mask: &[bool]) -> WeightedGraph {
        let edges = self
            .edges
            .iter()
            .zip(mask)
            .filter(|(_, keep)| **keep)
            .map(|(e, _)| *e)
            .collect();
        WeightedGraph { n: self.n, edges }
    }

    /// Hop diameter via repeated BFS; `None` when disconnected.
    pub fn diameter(&self) -> Option<usize> {
        if self.n == 0 {
            return Some(0);
        }
        let adj = self.adjacency_lists();
        let mut diameter = 0;
        for start in 0..self.n {
            let mut dist = vec![usize::MAX; self.n];
            let mut queue = std::collections::VecDeque::new();
            dist[start] = 0;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                for &v in &adj[u] {
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        queue.push_back(v);
                    }
                }
            }
            let far = *dist.iter().max().unwrap();
            if far == usize::MAX {
                return None;
            }
            diameter = diameter.max(far);
        }
        Some(diameter)
    }

    pub fn adjacency_lists(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.a].push(e.b);
            adj[e.b].push(e.a);
        }
        adj
    }
}

/// Edge-set union of a graph sequence.
///
/// An edge is present iff it is present in any member; it keeps the weight
/// from the earliest member containing it. In this crate unions are taken
/// over lossy snapshots of one fixed weighted base graph, so the weights of a
/// shared edge agree across members anyway.
pub fn union_graph(graphs: &[WeightedGraph]) -> Result<WeightedGraph, GraphError> {
    let first = graphs.first().ok_or(GraphError::EmptyUnion)?;
    let n = first.n;
    let mut union = WeightedGraph::new(n);
    for g in graphs {
        if g.n != n {
            return Err(GraphError::NodeCountMismatch(n, g.n));
        }
        for e in g.edges() {
            if !union.has_edge(e.a, e.b) {
                union.add_edge(e.a, e.b, e.w)?;
            }
        }
    }
    Ok(union)
}

/// Union-find over node indices; used for connectivity checks everywhere a
/// full traversal would be wasteful (percolation trials, window audits).
pub(crate) struct DisjointSet {
    parent: Vec<usize>,
    size: Vec<usize>,
    components: usize,
}

impl DisjointSet {
    pub fn new(n: usize) -> Self {
        DisjointSet { parent: (0..n).collect(), size: vec![1; n], components: n }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (big, small) = if self.size[ra] >= self.size[rb] { (ra, rb) } else { (rb, ra) };
        self.parent[small] = big;
        self.size[big] += self.size[small];
        self.components -= 1;
        true
    }

    pub fn component_count(&self) -> usize {
        self.components
    }

    pub fn largest_component(&mut self) -> usize {
        let n = self.parent.len();
        let mut best = 0;
        for x in 0..n {
            if self.find(x) == x {
                best = best.max(self.size[x]);
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k2() -> WeightedGraph {
        WeightedGraph::with_edges(2, [(0, 1, 1.0)]).unwrap()
    }

    #[test]
    fn laplacian_of_k2_matches_definition() {
        let l = k2().laplacian();
        assert_eq!(l[[0, 0]], 1.0);
        assert_eq!(l[[0, 1]], -1.0);
        assert_eq!(l[[1, 0]], -1.0);
        assert_eq!(l[[1, 1]], 1.0);
    }

    #[test]
    fn laplacian_of_empty_graph_is_zero() {
        let l = WeightedGraph::new(3).laplacian();
        assert!(l.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn laplacian_of_weighted_triangle_has_zero_row_sums() {
        let g = WeightedGraph::with_edges(3, [(0, 1, 1.0), (1, 2, 2.0), (0, 2, 3.0)]).unwrap();
        let l = g.laplacian();
        assert_eq!(l[[0, 1]], -1.0);
        assert_eq!(l[[1, 2]], -2.0);
        assert_eq!(l[[0, 2]], -3.0);
        for i in 0..3 {
            let row: f64 = (0..3).map(|j| l[[i, j]]).sum();
            assert!(row.abs() <= 1e-12, "row {i} sums to {row}");
        }
    }

    #[test]
    fn connectivity_basics() {
        assert!(k2().is_connected());
        assert!(!WeightedGraph::new(2).is_connected());
        let path = WeightedGraph::with_edges(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        assert!(path.is_connected());
        assert_eq!(path.diameter(), Some(2));
    }

    #[test]
    fn mean_degree_examples() {
        let ring: Vec<_> = (0..10).map(|i| (i, (i + 1) % 10, 1.0)).collect();
        let g = WeightedGraph::with_edges(10, ring).unwrap();
        assert_eq!(g.mean_degree(), 2.0);
        assert_eq!(k2().mean_degree(), 1.0);
    }

    #[test]
    fn union_is_idempotent_and_merges_edge_sets() {
        let g = k2();
        let u = union_graph(&[g.clone(), g.clone()]).unwrap();
        assert_eq!(u, g);

        let a = WeightedGraph::with_edges(3, [(0, 1, 1.0)]).unwrap();
        let b = WeightedGraph::with_edges(3, [(1, 2, 1.0)]).unwrap();
        let u = union_graph(&[a, b]).unwrap();
        assert_eq!(u.edge_count(), 2);
        assert!(u.is_connected());
    }

    #[test]
    fn union_keeps_weight_from_earliest_member() {
        let a = WeightedGraph::with_edges(2, [(0, 1, 2.5)]).unwrap();
        let b = WeightedGraph::with_edges(2, [(0, 1, 9.0)]).unwrap();
        let u = union_graph(&[a, b]).unwrap();
        assert_eq!(u.weight(0, 1), 2.5);
    }

    #[test]
    fn union_rejects_mismatched_node_counts() {
        let a = WeightedGraph::new(2);
        let b = WeightedGraph::new(3);
        assert!(matches!(union_graph(&[a, b]), Err(GraphError::NodeCountMismatch(2, 3))));
    }

    #[test]
    fn union_of_lossy_snapshots_recovers_base_when_every_edge_survives_once() {
        // Triangle with three snapshots; each edge survives in at least one.
        let base =
            WeightedGraph::with_edges(3, [(0, 1, 1.0), (1, 2, 2.0), (0, 2, 3.0)]).unwrap();
        // Enumerate all survival patterns where each edge appears somewhere.
        let masks = [
            [true, false, false],
            [false, true, false],
            [false, false, true],
        ];
        let snaps: Vec<_> = masks.iter().map(|m| base.edge_subgraph(m)).collect();
        let u = union_graph(&snaps).unwrap();
        assert_eq!(u, base);
    }

    #[test]
    fn invalid_edges_are_rejected() {
        let mut g = WeightedGraph::new(3);
        assert!(matches!(g.add_edge(1, 1, 1.0), Err(GraphError::SelfLoop(1))));
        assert!(matches!(g.add_edge(0, 3, 1.0), Err(GraphError::NodeOutOfRange { .. })));
        assert!(matches!(
            g.add_edge(0, 1, 0.0),
            Err(GraphError::NonPositiveWeight { .. })
        ));
        g.add_edge(0, 1, 1.0).unwrap();
        assert!(matches!(g.add_edge(1, 0, 2.0), Err(GraphError::DuplicateEdge(0, 1))));
    }
}
