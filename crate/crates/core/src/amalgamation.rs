//! Out-splitting and out-amalgamation of multigraphs, and the one-sided
//! conjugacy decision.
//!
//! Two vertices can be out-amalgamated when they receive the same number of
//! edges from every vertex. The merged vertex keeps one copy of those
//! incoming edges and all outgoing edges of both. Amalgamating until no pair
//! is left gives the total amalgamation, and two edge shifts are one-sided
//! conjugate iff their total amalgamations are isomorphic.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::code::SlidingBlockCode;
use crate::graph::{Edge, GraphSummary, Multigraph, Vertex};
use crate::witness::{Conjugacy, ConjugacyWitness};

/// Largest vertex count accepted by the permutation search.
pub const MAX_ISOMORPHISM_VERTICES: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AmalgamationError {
    #[error("vertices {0} and {1} do not have identical in-edge counts")]
    InvalidMove(usize, usize),
    #[error("isomorphism search refuses graphs with {0} vertices (limit {MAX_ISOMORPHISM_VERTICES})")]
    TooLarge(usize),
    #[error("partition has an empty part")]
    EmptyPart,
    #[error("partition does not cover the out-edges of vertex {0} exactly once")]
    InvalidPartition(usize),
    #[error("vertex {0} does not exist")]
    UnknownVertex(usize),
}

/// Merge `remove` into `keep`. `pairing` matches every in-edge of `keep`
/// with the in-edge of `remove` it absorbs, source by source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmalgamationMove {
    pub keep: Vertex,
    pub remove: Vertex,
    pub pairing: Vec<(usize, usize)>,
}

impl AmalgamationMove {
    /// The lexicographic pairing for merging `w` into `v`.
    pub fn new(g: &Multigraph, v: Vertex, w: Vertex) -> Result<Self, AmalgamationError> {
        let n = g.vertex_count();
        if v >= n {
            return Err(AmalgamationError::UnknownVertex(v + 1));
        }
        if w >= n {
            return Err(AmalgamationError::UnknownVertex(w + 1));
        }
        if v == w || g.in_vector(v) != g.in_vector(w) {
            return Err(AmalgamationError::InvalidMove(v + 1, w + 1));
        }
        let mut pairing = Vec::new();
        for u in 0..n {
            let into_v = g.in_edges(v).filter(|(_, e)| e.source == u).map(|(i, _)| i);
            let into_w = g.in_edges(w).filter(|(_, e)| e.source == u).map(|(i, _)| i);
            pairing.extend(into_v.zip(into_w));
        }
        Ok(AmalgamationMove { keep: v, remove: w, pairing })
    }
}

/// One logged merge, 1-based, as it appears in reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MoveRecord {
    pub merged: (usize, usize),
    pub dropped_edges: Vec<String>,
    pub vertices_after: usize,
}

/// Unordered pairs `(v, w)`, `v < w`, with identical in-edge count vectors.
pub fn mergeable_pairs(g: &Multigraph) -> Vec<(Vertex, Vertex)> {
    let vectors: Vec<Vec<usize>> = (0..g.vertex_count()).map(|v| g.in_vector(v)).collect();
    let mut pairs = Vec::new();
    for v in 0..vectors.len() {
        for w in v + 1..vectors.len() {
            if vectors[v] == vectors[w] {
                pairs.push((v, w));
            }
        }
    }
    pairs
}

/// Applies a move. Edges into `remove` are dropped; edges out of `remove`
/// now leave `keep`; vertices above `remove` shift down by one.
pub fn out_amalgamate(g: &Multigraph, mv: &AmalgamationMove) -> Result<Multigraph, AmalgamationError> {
    let checked = AmalgamationMove::new(g, mv.keep, mv.remove)?;
    let absorbed: Vec<usize> = mv.pairing.iter().map(|&(_, w)| w).collect();
    let mut expected: Vec<usize> = checked.pairing.iter().map(|&(_, w)| w).collect();
    let mut got = absorbed.clone();
    expected.sort_unstable();
    got.sort_unstable();
    if expected != got {
        return Err(AmalgamationError::InvalidMove(mv.keep + 1, mv.remove + 1));
    }
    let relabel = |x: Vertex| {
        let x = if x == mv.remove { mv.keep } else { x };
        if x > mv.remove { x - 1 } else { x }
    };
    let edges = g
        .edges()
        .iter()
        .filter(|e| e.range != mv.remove)
        .map(|e| Edge { id: e.id.clone(), source: relabel(e.source), range: relabel(e.range) })
        .collect();
    Ok(Multigraph::from_parts_unchecked(g.vertex_count() - 1, edges))
}

/// Which mergeable pair to take at each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MergeOrder {
    First,
    Last,
}

pub fn total_amalgamation(g: &Multigraph) -> (Multigraph, Vec<MoveRecord>) {
    total_amalgamation_with(g, MergeOrder::First)
}

pub fn total_amalgamation_with(g: &Multigraph, order: MergeOrder) -> (Multigraph, Vec<MoveRecord>) {
    let mut current = g.clone();
    let mut log = Vec::new();
    loop {
        let pairs = mergeable_pairs(&current);
        let pick = match order {
            MergeOrder::First => pairs.first(),
            MergeOrder::Last => pairs.last(),
        };
        let Some(&(v, w)) = pick else { break };
        let mv = AmalgamationMove::new(&current, v, w).expect("mergeable pair");
        let dropped = current.in_edges(w).map(|(_, e)| e.id.clone()).collect();
        current = out_amalgamate(&current, &mv).expect("mergeable pair");
        log.push(MoveRecord { merged: (v + 1, w + 1), dropped_edges: dropped, vertices_after: current.vertex_count() });
    }
    (current, log)
}

type Counts = Vec<Vec<usize>>;

#[derive(PartialEq, Eq, PartialOrd, Ord)]
struct Signature {
    loops: usize,
    out_row: Vec<usize>,
    in_col: Vec<usize>,
}

fn signatures(m: &[Vec<usize>]) -> Vec<Signature> {
    (0..m.len())
        .map(|v| {
            let mut out_row = m[v].clone();
            let mut in_col: Vec<usize> = m.iter().map(|row| row[v]).collect();
            out_row.sort_unstable();
            in_col.sort_unstable();
            Signature { loops: m[v][v], out_row, in_col }
        })
        .collect()
}

/// Lexicographically least vertex bijection `π` with
/// `|u → v|_1 = |π(u) → π(v)|_2` for all `u, v`, if one exists.
pub fn graphs_isomorphic(g1: &Multigraph, g2: &Multigraph) -> Result<Option<Vec<Vertex>>, AmalgamationError> {
    let n = g1.vertex_count();
    for g in [g1, g2] {
        if g.vertex_count() > MAX_ISOMORPHISM_VERTICES {
            return Err(AmalgamationError::TooLarge(g.vertex_count()));
        }
    }
    if n != g2.vertex_count() || g1.edges().len() != g2.edges().len() {
        return Ok(None);
    }
    let (m1, m2) = (g1.multiplicities(), g2.multiplicities());
    let (s1, s2) = (signatures(&m1), signatures(&m2));
    let mut sorted1: Vec<&Signature> = s1.iter().collect();
    let mut sorted2: Vec<&Signature> = s2.iter().collect();
    sorted1.sort();
    sorted2.sort();
    if sorted1 != sorted2 {
        return Ok(None);
    }

    fn extend(
        i: usize,
        perm: &mut Vec<Vertex>,
        used: &mut [bool],
        ctx: &(Counts, Counts, Vec<Signature>, Vec<Signature>),
    ) -> bool {
        let (m1, m2, s1, s2) = ctx;
        if i == m1.len() {
            return true;
        }
        for j in 0..m1.len() {
            if used[j] || s1[i] != s2[j] {
                continue;
            }
            let consistent = perm
                .iter()
                .enumerate()
                .all(|(a, &pa)| m1[i][a] == m2[j][pa] && m1[a][i] == m2[pa][j]);
            if !consistent || m1[i][i] != m2[j][j] {
                continue;
            }
            perm.push(j);
            used[j] = true;
            if extend(i + 1, perm, used, ctx) {
                return true;
            }
            perm.pop();
            used[j] = false;
        }
        false
    }

    let ctx = (m1, m2, s1, s2);
    let mut perm = Vec::with_capacity(n);
    let mut used = vec![false; n];
    Ok(extend(0, &mut perm, &mut used, &ctx).then_some(perm))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Conjugate,
    NotConjugate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecisionReport {
    pub verdict: Verdict,
    pub terminal_a: GraphSummary,
    pub terminal_b: GraphSummary,
    pub moves_a: Vec<MoveRecord>,
    pub moves_b: Vec<MoveRecord>,
    /// 1-based: vertex `i + 1` of `terminal_a` goes to `bijection[i]` of `terminal_b`.
    pub bijection: Option<Vec<usize>>,
    /// Whether reversing the merge order produced isomorphic terminal graphs for both inputs.
    pub merge_order_consistent: bool,
}

/// Decides one-sided conjugacy of the edge shifts of `g1` and `g2`.
pub fn decide_one_sided_conjugacy(g1: &Multigraph, g2: &Multigraph) -> Result<DecisionReport, AmalgamationError> {
    let (t1, moves_a) = total_amalgamation(g1);
    let (t2, moves_b) = total_amalgamation(g2);
    let bijection = graphs_isomorphic(&t1, &t2)?;
    let mut merge_order_consistent = true;
    for (g, t) in [(g1, &t1), (g2, &t2)] {
        let (alt, _) = total_amalgamation_with(g, MergeOrder::Last);
        merge_order_consistent &= graphs_isomorphic(t, &alt)?.is_some();
    }
    Ok(DecisionReport {
        verdict: if bijection.is_some() { Verdict::Conjugate } else { Verdict::NotConjugate },
        terminal_a: GraphSummary::from(&t1),
        terminal_b: GraphSummary::from(&t2),
        moves_a,
        moves_b,
        bijection: bijection.map(|p| p.into_iter().map(|v| v + 1).collect()),
        merge_order_consistent,
    })
}

/// Result of an out-split, with the conjugacy between the two edge shifts.
#[derive(Debug, Clone)]
pub struct OutSplit {
    pub graph: Multigraph,
    /// Vertex indices of the copies, part by part; the first is the split vertex itself.
    pub copies: Vec<Vertex>,
    /// `X_G -> X_{G'}`: anticipation 1, recording which copy the next edge leaves from.
    pub conjugacy: Conjugacy,
}

fn fresh_id(taken: &mut std::collections::HashSet<String>, base: &str, copy: usize) -> String {
    let mut id = format!("{base}~{copy}");
    while taken.contains(&id) {
        id.push('~');
    }
    taken.insert(id.clone());
    id
}

/// Splits `vertex` by a partition of its out-edges (edge indices). Part `i`
/// becomes copy `i` carrying those out-edges; every in-edge of `vertex` is
/// duplicated into each copy.
pub fn out_split(g: &Multigraph, vertex: Vertex, partition: &[Vec<usize>]) -> Result<Multigraph, AmalgamationError> {
    out_split_with_conjugacy(g, vertex, partition).map(|s| s.graph)
}

pub fn out_split_with_conjugacy(
    g: &Multigraph,
    vertex: Vertex,
    partition: &[Vec<usize>],
) -> Result<OutSplit, AmalgamationError> {
    if vertex >= g.vertex_count() {
        return Err(AmalgamationError::UnknownVertex(vertex + 1));
    }
    if partition.iter().any(Vec::is_empty) {
        return Err(AmalgamationError::EmptyPart);
    }
    let mut part_of = BTreeMap::new();
    for (p, part) in partition.iter().enumerate() {
        for &e in part {
            if g.edges().get(e).map(|edge| edge.source) != Some(vertex) || part_of.insert(e, p).is_some() {
                return Err(AmalgamationError::InvalidPartition(vertex + 1));
            }
        }
    }
    if part_of.len() != g.out_edges(vertex).count() {
        return Err(AmalgamationError::InvalidPartition(vertex + 1));
    }
    let n = g.vertex_count();
    let copies: Vec<Vertex> = std::iter::once(vertex).chain(n..n + partition.len() - 1).collect();
    let mut taken: std::collections::HashSet<String> = g.edges().iter().map(|e| e.id.clone()).collect();
    let mut edges = Vec::new();
    // (original edge, copy of the range) for each new edge
    let mut origin: Vec<(usize, usize)> = Vec::new();
    // new edge index for (original edge, copy of the range)
    let mut index = BTreeMap::new();
    for (i, e) in g.edges().iter().enumerate() {
        let source = if e.source == vertex { copies[part_of[&i]] } else { e.source };
        let targets: Vec<usize> = if e.range == vertex { (0..copies.len()).collect() } else { vec![0] };
        for c in targets {
            let id = if c == 0 { e.id.clone() } else { fresh_id(&mut taken, &e.id, c + 1) };
            let range = if e.range == vertex { copies[c] } else { e.range };
            index.insert((i, c), edges.len());
            origin.push((i, c));
            edges.push(Edge { id, source, range });
        }
    }
    let split = Multigraph::from_parts_unchecked(n + partition.len() - 1, edges);
    let old = Arc::new(g.edge_matrix());
    let new = Arc::new(split.edge_matrix());
    let forward = SlidingBlockCode::from_fn(
        "split",
        old.clone(),
        new.clone(),
        0,
        1,
        |w| {
            let copy = if g.edges()[w[0]].range == vertex { part_of[&w[1]] } else { 0 };
            index[&(w[0], copy)]
        },
        |_, _| unreachable!(),
    )
    .expect("split recoding is total");
    let backward =
        SlidingBlockCode::from_fn("merge", new, old, 0, 0, |w| origin[w[0]].0, |_, _| unreachable!())
            .expect("merge recoding is total");
    let conjugacy = ConjugacyWitness::new(forward, backward)
        .into_conjugacy()
        .expect("out-splitting is a one-sided conjugacy");
    Ok(OutSplit { graph: split, copies, conjugacy })
}
