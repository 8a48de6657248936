//! Exhaustive search for small conjugacies, independent of amalgamation.
//!
//! Only codes with memory 0 and no boundary rules are tried, in both
//! directions, with anticipation below the window bound. A forward code is
//! a map from admissible windows to target letters that respects
//! transitions; the backward code is then forced, window by window, and the
//! pair is checked with [`verify_conjugacy`].

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use thiserror::Error;

use crate::code::{SlidingBlockCode, WindowTable};
use crate::graph::Multigraph;
use crate::matrix::{admissible_words, Letter, Matrix01};
use crate::witness::{verify_conjugacy, ConjugacyWitness};

pub const MAX_WINDOW: usize = 3;

/// Periodic points up to this period must have distinct images.
const PERIODIC_PRUNE_PERIOD: usize = 6;

/// Default cap on backtracking nodes per search.
pub const DEFAULT_NODE_BUDGET: u64 = 20_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("window bound {0} exceeds {MAX_WINDOW}")]
    WindowTooLarge(usize),
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub witness: Option<ConjugacyWitness>,
    /// False when the node budget ran out before the space was exhausted.
    pub complete: bool,
    pub nodes: u64,
    /// Set when periodic point counts already rule out a conjugacy.
    pub invariant_mismatch: Option<usize>,
}

/// Searches for a conjugacy between the edge shifts of two graphs.
pub fn brute_force_conjugacy_search(
    g1: &Multigraph,
    g2: &Multigraph,
    window: usize,
) -> Result<Option<ConjugacyWitness>, SearchError> {
    let a = Arc::new(g1.edge_matrix());
    let b = Arc::new(g2.edge_matrix());
    Ok(search_matrices(&a, &b, window, DEFAULT_NODE_BUDGET)?.witness)
}

/// First period `p ≤ limit` at which the shifts have different numbers of
/// points of period `p`.
pub fn periodic_point_mismatch(a: &Matrix01, b: &Matrix01, limit: usize) -> Option<usize> {
    (1..=limit).find(|&p| a.periodic_points(p) != b.periodic_points(p))
}

pub fn search_matrices(
    a: &Arc<Matrix01>,
    b: &Arc<Matrix01>,
    window: usize,
    budget: u64,
) -> Result<SearchOutcome, SearchError> {
    if window > MAX_WINDOW {
        return Err(SearchError::WindowTooLarge(window));
    }
    let mut outcome = SearchOutcome { witness: None, complete: true, nodes: 0, invariant_mismatch: None };
    if let Some(p) = periodic_point_mismatch(a, b, 8) {
        outcome.invariant_mismatch = Some(p);
        return Ok(outcome);
    }
    for af in 0..window {
        let mut s = Search::new(a, b, af, window, budget.saturating_sub(outcome.nodes));
        let found = s.run();
        outcome.nodes += s.nodes;
        outcome.complete &= !s.exhausted;
        if found.is_some() {
            outcome.witness = found;
            return Ok(outcome);
        }
    }
    Ok(outcome)
}

/// Reorders windows so that each one overlaps an earlier one where possible,
/// which lets transition constraints bite immediately.
fn breadth_first_order(a: &Matrix01, windows: Vec<Vec<Letter>>) -> Vec<Vec<Letter>> {
    let index: HashMap<&[Letter], usize> = windows.iter().enumerate().map(|(i, w)| (w.as_slice(), i)).collect();
    let n = windows.len();
    let mut neighbours = vec![Vec::new(); n];
    for (i, w) in windows.iter().enumerate() {
        for &next in a.followers(w[w.len() - 1]) {
            let mut v = w[1..].to_vec();
            v.push(next);
            let j = index[v.as_slice()];
            neighbours[i].push(j);
            neighbours[j].push(i);
        }
    }
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(i) = queue.pop_front() {
            order.push(i);
            for &j in &neighbours[i] {
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }
    order.into_iter().map(|i| windows[i].clone()).collect()
}

struct Search<'a> {
    a: &'a Arc<Matrix01>,
    b: &'a Arc<Matrix01>,
    af: usize,
    window: usize,
    windows: Vec<Vec<Letter>>,
    /// Windows adjacent to `i` that come earlier in the assignment order,
    /// with whether they precede (`true`) or follow `i`.
    earlier: Vec<Vec<(usize, bool)>>,
    assignment: Vec<Letter>,
    uses: Vec<usize>,
    /// Periodic points, as window indices by rotation, grouped by the
    /// assignment step at which their image becomes known.
    points_at: Vec<Vec<Vec<usize>>>,
    images: HashSet<Vec<Letter>>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl<'a> Search<'a> {
    fn new(a: &'a Arc<Matrix01>, b: &'a Arc<Matrix01>, af: usize, window: usize, budget: u64) -> Self {
        let windows = breadth_first_order(a, admissible_words(a, af + 1).into_iter().map(|w| w.into_letters()).collect());
        let index: HashMap<&[Letter], usize> = windows.iter().enumerate().map(|(i, w)| (w.as_slice(), i)).collect();
        let mut earlier = vec![Vec::new(); windows.len()];
        for (i, w) in windows.iter().enumerate() {
            for &next in a.followers(w[af]) {
                let mut v = w[1..].to_vec();
                v.push(next);
                let j = index[v.as_slice()];
                if j <= i {
                    earlier[i].push((j, false));
                }
                if i <= j {
                    earlier[j].push((i, true));
                }
            }
        }
        let mut points_at = vec![Vec::new(); windows.len()];
        for p in 1..=PERIODIC_PRUNE_PERIOD {
            for w in admissible_words(a, p) {
                let w = w.letters();
                if !a.allows(w[p - 1], w[0]) {
                    continue;
                }
                let rotations: Vec<usize> = (0..p)
                    .map(|k| {
                        let v: Vec<Letter> = (0..=af).map(|t| w[(k + t) % p]).collect();
                        index[v.as_slice()]
                    })
                    .collect();
                let last = *rotations.iter().max().unwrap();
                points_at[last].push(rotations);
            }
        }
        Search {
            a,
            b,
            af,
            window,
            assignment: Vec::with_capacity(windows.len()),
            uses: vec![0; b.size()],
            windows,
            earlier,
            points_at,
            images: HashSet::new(),
            nodes: 0,
            budget,
            exhausted: false,
        }
    }

    fn run(&mut self) -> Option<ConjugacyWitness> {
        if self.windows.len() < self.b.size() {
            return None;
        }
        self.extend()
    }

    fn extend(&mut self) -> Option<ConjugacyWitness> {
        let i = self.assignment.len();
        if i == self.windows.len() {
            return self.complete();
        }
        let uncovered = self.uses.iter().filter(|&&u| u == 0).count();
        if uncovered > self.windows.len() - i {
            return None;
        }
        for y in 0..self.b.size() {
            let fits = self.earlier[i].iter().all(|&(j, before)| {
                let other = if j == i { y } else { self.assignment[j] };
                if before { self.b.allows(other, y) } else { self.b.allows(y, other) }
            });
            if !fits {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                self.exhausted = true;
                return None;
            }
            self.assignment.push(y);
            let mut added = Vec::new();
            let injective = self.points_at[i].iter().all(|point| {
                let image: Vec<Letter> = point.iter().map(|&j| self.assignment[j]).collect();
                let fresh = self.images.insert(image.clone());
                if fresh {
                    added.push(image);
                }
                fresh
            });
            self.uses[y] += 1;
            let found = if injective { self.extend() } else { None };
            self.uses[y] -= 1;
            for image in added {
                self.images.remove(&image);
            }
            self.assignment.pop();
            if found.is_some() || self.exhausted {
                return found;
            }
        }
        None
    }

    fn complete(&self) -> Option<ConjugacyWitness> {
        let table: WindowTable = self.windows.iter().cloned().zip(self.assignment.iter().copied()).collect();
        let forward =
            SlidingBlockCode::new("search", self.a.clone(), self.b.clone(), 0, self.af, table, Vec::new()).ok()?;
        'lag: for ab in 0..self.window {
            let mut inverse = WindowTable::new();
            for u in admissible_words(self.a, self.af + ab + 1) {
                let u = u.letters();
                let v: Vec<Letter> = (0..=ab).map(|k| forward.stationary()[&u[k..k + self.af + 1]]).collect();
                if *inverse.entry(v).or_insert(u[0]) != u[0] {
                    continue 'lag;
                }
            }
            if inverse.len() != admissible_words(self.b, ab + 1).len() {
                continue;
            }
            let Ok(backward) =
                SlidingBlockCode::new("search-inverse", self.b.clone(), self.a.clone(), 0, ab, inverse, Vec::new())
            else {
                continue;
            };
            let w = ConjugacyWitness::new(forward.clone(), backward);
            if verify_conjugacy(&w).map(|v| v.passed).unwrap_or(false) {
                return Some(w);
            }
        }
        None
    }
}
