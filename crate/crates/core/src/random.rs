//! Seeded generators for graphs, matrices, points, groupoid elements and
//! algebra elements. Everything is driven by a caller-supplied RNG so that
//! runs are reproducible from a seed.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{coeff, AlgebraElement};
use crate::amalgamation::{out_split_with_conjugacy, OutSplit};
use crate::graph::{Edge, Multigraph};
use crate::groupoid::GroupoidElement;
use crate::matrix::{Letter, Matrix01};
use crate::point::EPPoint;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A graph with `1..=max_vertices` vertices and edge multiplicities in
/// `0..=max_multiplicity`, resampled until every vertex has in- and out-edges.
pub fn random_graph(rng: &mut impl Rng, max_vertices: usize, max_multiplicity: usize) -> Multigraph {
    assert!(max_vertices >= 1 && max_multiplicity >= 1);
    let n = rng.gen_range(1..=max_vertices);
    loop {
        let counts: Vec<Vec<usize>> = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| if rng.gen_bool(0.5) { rng.gen_range(1..=max_multiplicity) } else { 0 })
                    .collect()
            })
            .collect();
        let rows_ok = counts.iter().all(|r| r.iter().any(|&c| c > 0));
        let cols_ok = (0..n).all(|j| counts.iter().any(|r| r[j] > 0));
        if !rows_ok || !cols_ok {
            continue;
        }
        let mut edges = Vec::new();
        for (u, row) in counts.iter().enumerate() {
            for (v, &c) in row.iter().enumerate() {
                for _ in 0..c {
                    edges.push(Edge { id: format!("e{}", edges.len() + 1), source: u, range: v });
                }
            }
        }
        return Multigraph::new(n, edges).expect("rows and columns are nonempty");
    }
}

/// Splits a random vertex by a random partition of its out-edges into at
/// least two parts when it has two or more out-edges.
pub fn random_out_split(rng: &mut impl Rng, g: &Multigraph) -> OutSplit {
    let candidates: Vec<usize> = (0..g.vertex_count()).filter(|&v| g.out_edges(v).count() >= 2).collect();
    let vertex = candidates.choose(rng).copied().unwrap_or(0);
    let mut out: Vec<usize> = g.out_edges(vertex).map(|(i, _)| i).collect();
    out.shuffle(rng);
    let parts_wanted = if out.len() >= 2 { rng.gen_range(2..=out.len().min(3)) } else { 1 };
    let mut parts: Vec<Vec<usize>> = out[..parts_wanted].iter().map(|&e| vec![e]).collect();
    for &e in &out[parts_wanted..] {
        let p = rng.gen_range(0..parts_wanted);
        parts[p].push(e);
    }
    for p in &mut parts {
        p.sort_unstable();
    }
    out_split_with_conjugacy(g, vertex, &parts).expect("partition of out-edges")
}

/// A square 0/1 matrix of size `1..=max_size` with no zero rows or columns.
pub fn random_matrix(rng: &mut impl Rng, max_size: usize) -> Matrix01 {
    let n = rng.gen_range(1..=max_size);
    loop {
        let grid: Vec<Vec<u32>> = (0..n).map(|_| (0..n).map(|_| rng.gen_bool(0.5) as u32).collect()).collect();
        if let Ok(m) = crate::matrix::validate_matrix(&grid) {
            return m;
        }
    }
}

/// `w · x` with `w` a random backward walk of length `len` into `x_0`.
fn extend_backwards(rng: &mut impl Rng, matrix: &Matrix01, point: &EPPoint, len: usize) -> EPPoint {
    let mut word = Vec::with_capacity(len);
    let mut first = point.letter_at(0);
    for _ in 0..len {
        let prev = *matrix.predecessors(first).choose(rng).expect("no zero columns");
        word.push(prev);
        first = prev;
    }
    word.reverse();
    point.prepend(matrix, &word).expect("backward walk is admissible")
}

/// A random eventually periodic point: a forward walk until a letter
/// repeats gives the cycle, then a random backward walk gives the prefix.
pub fn random_point(rng: &mut impl Rng, matrix: &Matrix01) -> EPPoint {
    let mut walk: Vec<Letter> = vec![rng.gen_range(0..matrix.size())];
    let start = loop {
        let last = *walk.last().unwrap();
        let next = *matrix.followers(last).choose(rng).expect("no zero rows");
        if let Some(pos) = walk.iter().position(|&x| x == next) {
            break pos;
        }
        walk.push(next);
    };
    let cycle = EPPoint::new(matrix, walk[..start].to_vec(), walk[start..].to_vec()).expect("walk is admissible");
    let extra = rng.gen_range(0..=3);
    extend_backwards(rng, matrix, &cycle, extra)
}

/// `(x, k - l, y)` with `y` obtained by replacing the first `k` letters of
/// `x` with a random `l`-letter walk.
pub fn random_element(rng: &mut impl Rng, matrix: &Matrix01) -> GroupoidElement {
    let x = random_point(rng, matrix);
    random_element_from(rng, matrix, x)
}

/// A random element whose range is the unit at `x`.
pub fn random_element_from(rng: &mut impl Rng, matrix: &Matrix01, x: EPPoint) -> GroupoidElement {
    let k = rng.gen_range(0..=3);
    let l = rng.gen_range(0..=3);
    let y = extend_backwards(rng, matrix, &x.shift(k), l);
    GroupoidElement::new(x, k, l, y).expect("tails agree by construction")
}

/// `(g, h)` with `source(g) = range(h)`.
pub fn random_composable_pair(rng: &mut impl Rng, matrix: &Matrix01) -> (GroupoidElement, GroupoidElement) {
    let g = random_element(rng, matrix);
    let h = random_element_from(rng, matrix, g.y().clone());
    (g, h)
}

/// Random admissible word of length `0..=max_len`.
pub fn random_word(rng: &mut impl Rng, matrix: &Matrix01, max_len: usize) -> Vec<Letter> {
    let len = rng.gen_range(0..=max_len);
    random_word_of_len(rng, matrix, len)
}

/// Admissible word of exactly `len` letters.
pub fn random_word_of_len(rng: &mut impl Rng, matrix: &Matrix01, len: usize) -> Vec<Letter> {
    let mut w: Vec<Letter> = Vec::with_capacity(len);
    for i in 0..len {
        let next = if i == 0 {
            rng.gen_range(0..matrix.size())
        } else {
            *matrix.followers(w[i - 1]).choose(rng).expect("no zero rows")
        };
        w.push(next);
    }
    w
}

/// A sum of up to `max_terms` monomials `c · s_α s_β^*` with small integer
/// coefficients and words of length at most `max_len`.
pub fn random_algebra_element(
    rng: &mut impl Rng,
    matrix: &Arc<Matrix01>,
    max_terms: usize,
    max_len: usize,
) -> AlgebraElement {
    let count = rng.gen_range(1..=max_terms);
    let terms: Vec<_> = (0..count)
        .map(|_| {
            let alpha = random_word(rng, matrix, max_len);
            let beta = random_word(rng, matrix, max_len);
            let c = rng.gen_range(-3..=3);
            (alpha, beta, coeff(c))
        })
        .collect();
    AlgebraElement::from_raw(matrix.clone(), terms).expect("random words are admissible")
}
