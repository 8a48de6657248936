//! Directed multigraphs and their edge shifts.

use std::collections::HashSet;

use serde::Serialize;
use thiserror::Error;

use crate::matrix::{label_is_valid, Matrix01};

pub type Vertex = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph has no vertices")]
    NoVertices,
    #[error("edge `{id}` uses vertex {vertex} outside 1..={count}")]
    VertexOutOfRange { id: String, vertex: usize, count: usize },
    #[error("duplicate edge id `{0}`")]
    DuplicateEdge(String),
    #[error("invalid edge id `{0}`")]
    InvalidEdgeId(String),
    #[error("vertex {0} has no outgoing edge (zero row)")]
    NoOutgoingEdge(usize),
    #[error("vertex {0} has no incoming edge (zero column)")]
    NoIncomingEdge(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Edge {
    pub id: String,
    pub source: Vertex,
    pub range: Vertex,
}

/// A finite directed multigraph. Vertices are `0..vertex_count`; parallel
/// edges and loops are allowed. Every vertex has an incoming and an outgoing edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multigraph {
    vertex_count: usize,
    edges: Vec<Edge>,
}

impl Multigraph {
    pub fn new(vertex_count: usize, edges: Vec<Edge>) -> Result<Self, GraphError> {
        if vertex_count == 0 {
            return Err(GraphError::NoVertices);
        }
        let mut ids = HashSet::new();
        let mut has_out = vec![false; vertex_count];
        let mut has_in = vec![false; vertex_count];
        for e in &edges {
            if !label_is_valid(&e.id) {
                return Err(GraphError::InvalidEdgeId(e.id.clone()));
            }
            if !ids.insert(e.id.as_str()) {
                return Err(GraphError::DuplicateEdge(e.id.clone()));
            }
            for v in [e.source, e.range] {
                if v >= vertex_count {
                    return Err(GraphError::VertexOutOfRange {
                        id: e.id.clone(),
                        vertex: v + 1,
                        count: vertex_count,
                    });
                }
            }
            has_out[e.source] = true;
            has_in[e.range] = true;
        }
        if let Some(v) = has_out.iter().position(|&b| !b) {
            return Err(GraphError::NoOutgoingEdge(v + 1));
        }
        if let Some(v) = has_in.iter().position(|&b| !b) {
            return Err(GraphError::NoIncomingEdge(v + 1));
        }
        Ok(Multigraph { vertex_count, edges })
    }

    /// Builds a graph from `(id, source, range)` triples with 1-based vertices.
    pub fn from_triples(vertex_count: usize, triples: &[(&str, usize, usize)]) -> Result<Self, GraphError> {
        let mut edges = Vec::with_capacity(triples.len());
        for &(id, s, r) in triples {
            if s == 0 || r == 0 {
                return Err(GraphError::VertexOutOfRange { id: id.to_string(), vertex: 0, count: vertex_count });
            }
            edges.push(Edge { id: id.to_string(), source: s - 1, range: r - 1 });
        }
        Multigraph::new(vertex_count, edges)
    }

    /// The graph with one vertex per letter and one edge `i -> j` per 1-entry.
    /// Its edge shift is conjugate to the vertex shift of `matrix`.
    pub fn from_vertex_shift(matrix: &Matrix01) -> Self {
        let mut edges = Vec::new();
        for i in 0..matrix.size() {
            for &j in matrix.followers(i) {
                edges.push(Edge {
                    id: format!("{}_{}", matrix.label(i), matrix.label(j)),
                    source: i,
                    range: j,
                });
            }
        }
        Multigraph { vertex_count: matrix.size(), edges }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    /// `counts[u][v]` = number of edges from `u` to `v`.
    pub fn multiplicities(&self) -> Vec<Vec<usize>> {
        let mut counts = vec![vec![0; self.vertex_count]; self.vertex_count];
        for e in &self.edges {
            counts[e.source][e.range] += 1;
        }
        counts
    }

    /// Number of edges from each vertex into `v`.
    pub fn in_vector(&self, v: Vertex) -> Vec<usize> {
        let mut counts = vec![0; self.vertex_count];
        for e in self.edges.iter().filter(|e| e.range == v) {
            counts[e.source] += 1;
        }
        counts
    }

    pub fn out_edges(&self, v: Vertex) -> impl Iterator<Item = (usize, &Edge)> {
        self.edges.iter().enumerate().filter(move |(_, e)| e.source == v)
    }

    pub fn in_edges(&self, v: Vertex) -> impl Iterator<Item = (usize, &Edge)> {
        self.edges.iter().enumerate().filter(move |(_, e)| e.range == v)
    }

    /// Edge matrix of the edge shift: letters are edges in list order,
    /// `A(e, f) = 1` iff `range(e) = source(f)`.
    pub fn edge_matrix(&self) -> Matrix01 {
        let n = self.edges.len();
        let mut entries = vec![false; n * n];
        for (i, e) in self.edges.iter().enumerate() {
            for (j, f) in self.edges.iter().enumerate() {
                entries[i * n + j] = e.range == f.source;
            }
        }
        let labels = self.edges.iter().map(|e| e.id.clone()).collect();
        Matrix01::from_entries(n, entries, labels).expect("valid graphs have valid edge matrices")
    }

    /// Same multiplicities with edge ids renamed by `rename`.
    pub fn renamed(&self, rename: impl Fn(&str) -> String) -> Result<Self, GraphError> {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge { id: rename(&e.id), source: e.source, range: e.range })
            .collect();
        Multigraph::new(self.vertex_count, edges)
    }

    /// Applies a vertex permutation: vertex `v` becomes `perm[v]`.
    pub fn permuted(&self, perm: &[Vertex]) -> Self {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge { id: e.id.clone(), source: perm[e.source], range: perm[e.range] })
            .collect();
        Multigraph { vertex_count: self.vertex_count, edges }
    }

    pub(crate) fn from_parts_unchecked(vertex_count: usize, edges: Vec<Edge>) -> Self {
        debug_assert!(Multigraph::new(vertex_count, edges.clone()).is_ok());
        Multigraph { vertex_count, edges }
    }
}

/// Serializable view with 1-based vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphSummary {
    pub vertices: usize,
    pub edge_count: usize,
    pub edges: Vec<(String, usize, usize)>,
    pub multiplicities: Vec<Vec<usize>>,
}

impl From<&Multigraph> for GraphSummary {
    fn from(g: &Multigraph) -> Self {
        GraphSummary {
            vertices: g.vertex_count,
            edge_count: g.edges.len(),
            edges: g.edges.iter().map(|e| (e.id.clone(), e.source + 1, e.range + 1)).collect(),
            multiplicities: g.multiplicities(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_loop_is_the_full_one_shift() {
        let g = Multigraph::from_triples(1, &[("x", 1, 1)]).unwrap();
        let m = g.edge_matrix();
        assert_eq!(m.rows(), vec![vec![1]]);
        let v = Multigraph::from_vertex_shift(&m);
        assert_eq!(v.multiplicities(), g.multiplicities());
    }

    #[test]
    fn rejects_sinks_sources_and_duplicates() {
        assert_eq!(
            Multigraph::from_triples(2, &[("a", 1, 1), ("b", 1, 2)]),
            Err(GraphError::NoOutgoingEdge(2))
        );
        assert_eq!(
            Multigraph::from_triples(2, &[("a", 1, 1), ("b", 2, 1)]),
            Err(GraphError::NoIncomingEdge(2))
        );
        assert_eq!(
            Multigraph::from_triples(1, &[("a", 1, 1), ("a", 1, 1)]),
            Err(GraphError::DuplicateEdge("a".into()))
        );
        assert!(matches!(
            Multigraph::from_triples(1, &[("a", 1, 2)]),
            Err(GraphError::VertexOutOfRange { .. })
        ));
    }
}
