//! Sliding block codes with explicit boundary rules.
//!
//! A code with memory `m` and anticipation `a` computes output coordinate `n`
//! from the input window `x[n-m..=n+a]` once `n >= m`. The first `m`
//! coordinates have no full window to the left, so each of them has its own
//! rule on the prefix `x[0..=n+a]`.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::matrix::{admissible_words, Letter, Matrix01, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("input word of length {len} is shorter than the {needed} letters the code needs")]
    WordTooShort { len: usize, needed: usize },
    #[error("{table} table has no entry for window {window:?}")]
    MissingWindow { table: String, window: Vec<Letter> },
    #[error("{table} table has an entry for inadmissible window {window:?}")]
    InadmissibleWindow { table: String, window: Vec<Letter> },
    #[error("window {window:?} maps to letter {letter}, outside the target alphabet")]
    LetterOutOfRange { window: Vec<Letter>, letter: Letter },
    #[error("expected {expected} boundary tables for memory {expected}, got {got}")]
    BoundaryCount { expected: usize, got: usize },
    #[error("input is not admissible at window {0:?}")]
    InadmissibleInput(Vec<Letter>),
    #[error("output {output:?} is not admissible in the target shift")]
    InadmissibleOutput { output: Vec<Letter> },
    #[error("source and target matrices do not line up")]
    MatrixMismatch,
}

pub type WindowTable = BTreeMap<Vec<Letter>, Letter>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlidingBlockCode {
    name: String,
    source: Arc<Matrix01>,
    target: Arc<Matrix01>,
    memory: usize,
    anticipation: usize,
    stationary: WindowTable,
    boundary: Vec<WindowTable>,
}

fn check_table(
    table_name: &str,
    table: &WindowTable,
    source: &Matrix01,
    target: &Matrix01,
    window_len: usize,
) -> Result<(), CodeError> {
    for (window, &letter) in table {
        if window.len() != window_len || !source.is_admissible(window) {
            return Err(CodeError::InadmissibleWindow { table: table_name.into(), window: window.clone() });
        }
        if letter >= target.size() {
            return Err(CodeError::LetterOutOfRange { window: window.clone(), letter });
        }
    }
    for w in admissible_words(source, window_len) {
        if !table.contains_key(w.letters()) {
            return Err(CodeError::MissingWindow { table: table_name.into(), window: w.into_letters() });
        }
    }
    Ok(())
}

impl SlidingBlockCode {
    /// Builds a code from explicit tables; partial or inadmissible tables are rejected.
    pub fn new(
        name: impl Into<String>,
        source: Arc<Matrix01>,
        target: Arc<Matrix01>,
        memory: usize,
        anticipation: usize,
        stationary: WindowTable,
        boundary: Vec<WindowTable>,
    ) -> Result<Self, CodeError> {
        if boundary.len() != memory {
            return Err(CodeError::BoundaryCount { expected: memory, got: boundary.len() });
        }
        check_table("stationary", &stationary, &source, &target, memory + 1 + anticipation)?;
        for (n, table) in boundary.iter().enumerate() {
            check_table(&format!("boundary {n}"), table, &source, &target, n + 1 + anticipation)?;
        }
        Ok(SlidingBlockCode { name: name.into(), source, target, memory, anticipation, stationary, boundary })
    }

    /// Tabulates `stationary` on every admissible window and `boundary(n, prefix)`
    /// on every admissible prefix window for `n < memory`.
    pub fn from_fn(
        name: impl Into<String>,
        source: Arc<Matrix01>,
        target: Arc<Matrix01>,
        memory: usize,
        anticipation: usize,
        stationary: impl Fn(&[Letter]) -> Letter,
        boundary: impl Fn(usize, &[Letter]) -> Letter,
    ) -> Result<Self, CodeError> {
        Self::try_from_fn(
            name,
            source,
            target,
            memory,
            anticipation,
            |w| Ok(stationary(w)),
            |n, w| Ok(boundary(n, w)),
        )
    }

    pub fn try_from_fn(
        name: impl Into<String>,
        source: Arc<Matrix01>,
        target: Arc<Matrix01>,
        memory: usize,
        anticipation: usize,
        stationary: impl Fn(&[Letter]) -> Result<Letter, CodeError>,
        boundary: impl Fn(usize, &[Letter]) -> Result<Letter, CodeError>,
    ) -> Result<Self, CodeError> {
        let mut table = WindowTable::new();
        for w in admissible_words(&source, memory + 1 + anticipation) {
            let out = stationary(w.letters())?;
            table.insert(w.into_letters(), out);
        }
        let mut boundary_tables = Vec::with_capacity(memory);
        for n in 0..memory {
            let mut t = WindowTable::new();
            for w in admissible_words(&source, n + 1 + anticipation) {
                let out = boundary(n, w.letters())?;
                t.insert(w.into_letters(), out);
            }
            boundary_tables.push(t);
        }
        Self::new(name, source, target, memory, anticipation, table, boundary_tables)
    }

    pub fn identity(matrix: Arc<Matrix01>) -> Self {
        Self::from_fn("id", matrix.clone(), matrix, 0, 0, |w| w[0], |_, _| unreachable!())
            .expect("identity code is total")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn source(&self) -> &Arc<Matrix01> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Matrix01> {
        &self.target
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    pub fn anticipation(&self) -> usize {
        self.anticipation
    }

    pub fn stationary(&self) -> &WindowTable {
        &self.stationary
    }

    pub fn boundary(&self) -> &[WindowTable] {
        &self.boundary
    }

    /// Output letter at coordinate `k` of any point starting with `prefix`.
    /// Needs `prefix.len() > k + anticipation`.
    pub fn output_at(&self, prefix: &[Letter], k: usize) -> Result<Letter, CodeError> {
        let end = k + self.anticipation + 1;
        if prefix.len() < end {
            return Err(CodeError::WordTooShort { len: prefix.len(), needed: end });
        }
        let (table, window) = if k < self.memory {
            (&self.boundary[k], &prefix[..end])
        } else {
            (&self.stationary, &prefix[k - self.memory..end])
        };
        table.get(window).copied().ok_or_else(|| CodeError::InadmissibleInput(window.to_vec()))
    }

    /// The stationary rule on a single window of length `memory + 1 + anticipation`.
    pub fn apply_window(&self, window: &[Letter]) -> Result<Letter, CodeError> {
        self.stationary.get(window).copied().ok_or_else(|| CodeError::InadmissibleInput(window.to_vec()))
    }

    /// Images of coordinates `0..len - anticipation` of a prefix of any length.
    /// The output is not checked for admissibility.
    pub fn apply_prefix(&self, prefix: &[Letter]) -> Result<Vec<Letter>, CodeError> {
        let count = prefix.len().saturating_sub(self.anticipation);
        (0..count).map(|k| self.output_at(prefix, k)).collect()
    }

    /// Inputs of length `m + a + 2`, enough to see every output transition.
    pub fn well_definedness_window(&self) -> usize {
        self.memory + self.anticipation + 2
    }

    /// First admissible input (in lexicographic order) whose image contains a
    /// forbidden transition of the target shift.
    pub fn ill_defined_at(&self) -> Option<(Vec<Letter>, Vec<Letter>)> {
        for w in admissible_words(&self.source, self.well_definedness_window()) {
            let out = self.apply_prefix(w.letters()).expect("tables are total");
            if !self.target.is_admissible(&out) {
                return Some((w.into_letters(), out));
            }
        }
        None
    }

    /// `second ∘ first`, with memory and anticipation adding up.
    pub fn compose(second: &SlidingBlockCode, first: &SlidingBlockCode) -> Result<Self, CodeError> {
        if *first.target != *second.source {
            return Err(CodeError::MatrixMismatch);
        }
        let memory = first.memory + second.memory;
        let anticipation = first.anticipation + second.anticipation;
        let first_len = first.memory + 1 + first.anticipation;
        let stationary = |letters: &[Letter]| -> Result<Letter, CodeError> {
            let mid = (0..second.memory + 1 + second.anticipation)
                .map(|i| first.apply_window(&letters[i..i + first_len]))
                .collect::<Result<Vec<_>, _>>()?;
            second.apply_window(&mid)
        };
        let boundary = |n: usize, prefix: &[Letter]| -> Result<Letter, CodeError> {
            let mid = first.apply_prefix(prefix)?;
            second.output_at(&mid, n)
        };
        let name = format!("{}*{}", second.name, first.name);
        Self::try_from_fn(name, first.source.clone(), second.target.clone(), memory, anticipation, stationary, boundary)
    }
}

/// Applies a code to an admissible word of length at least `m + a + 1`,
/// producing the first `|w| - a` output letters.
pub fn apply_code(code: &SlidingBlockCode, word: &Word) -> Result<Word, CodeError> {
    let needed = code.memory + code.anticipation + 1;
    if word.len() < needed {
        return Err(CodeError::WordTooShort { len: word.len(), needed });
    }
    let out = code.apply_prefix(word.letters())?;
    if !code.target.is_admissible(&out) {
        return Err(CodeError::InadmissibleOutput { output: out });
    }
    Ok(Word::from_trusted(out))
}

/// The `n`-block presentation of a shift together with the recoding into it.
#[derive(Debug, Clone)]
pub struct HigherBlock {
    pub matrix: Arc<Matrix01>,
    /// Anticipation `n - 1`: `x ↦ (x[k..k+n])_k`.
    pub forward: SlidingBlockCode,
    /// One-block code taking each block to its first letter.
    pub backward: SlidingBlockCode,
}

pub fn higher_block(matrix: &Arc<Matrix01>, n: usize) -> HigherBlock {
    assert!(n >= 1, "block length must be positive");
    if n == 1 {
        return HigherBlock {
            matrix: matrix.clone(),
            forward: SlidingBlockCode::identity(matrix.clone()),
            backward: SlidingBlockCode::identity(matrix.clone()),
        };
    }
    let blocks = admissible_words(matrix, n);
    let size = blocks.len();
    let mut entries = vec![false; size * size];
    for (i, u) in blocks.iter().enumerate() {
        for (j, v) in blocks.iter().enumerate() {
            entries[i * size + j] = u.letters()[1..] == v.letters()[..n - 1];
        }
    }
    let single = matrix.labels().iter().all(|l| l.chars().count() == 1);
    let labels = blocks
        .iter()
        .map(|b| {
            let parts: Vec<&str> = b.letters().iter().map(|&l| matrix.label(l)).collect();
            format!("[{}]", parts.join(if single { "" } else { "~" }))
        })
        .collect();
    let block_matrix = Arc::new(
        Matrix01::from_entries(size, entries, labels).expect("higher block of a valid matrix is valid"),
    );
    let index: BTreeMap<&[Letter], Letter> =
        blocks.iter().enumerate().map(|(i, b)| (b.letters(), i)).collect();
    let forward = SlidingBlockCode::from_fn(
        format!("block{n}"),
        matrix.clone(),
        block_matrix.clone(),
        0,
        n - 1,
        |w| index[w],
        |_, _| unreachable!(),
    )
    .expect("recoding is total");
    let backward = SlidingBlockCode::from_fn(
        format!("unblock{n}"),
        block_matrix.clone(),
        matrix.clone(),
        0,
        0,
        |w| blocks[w[0]].letters()[0],
        |_, _| unreachable!(),
    )
    .expect("first-letter code is total");
    HigherBlock { matrix: block_matrix, forward, backward }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counterexample;
    use crate::matrix::validate_matrix;

    #[test]
    fn example_code_on_short_words() {
        let h = counterexample::code_h();
        let e = h.source().clone();
        let f = h.target().clone();
        let out = apply_code(&h, &Word::parse(&e, "ca").unwrap()).unwrap();
        assert_eq!(out.display(&f), "c'.a'");
        let out = apply_code(&h, &Word::parse(&e, "eb").unwrap()).unwrap();
        assert_eq!(out.display(&f), "e'.a'");
        assert_eq!(
            apply_code(&h, &Word::parse(&e, "e").unwrap()),
            Err(CodeError::WordTooShort { len: 1, needed: 2 })
        );
    }

    #[test]
    fn identity_is_identity() {
        let m = Arc::new(validate_matrix(&[vec![1, 1], vec![1, 0]]).unwrap());
        let id = SlidingBlockCode::identity(m.clone());
        for w in admissible_words(&m, 4) {
            assert_eq!(apply_code(&id, &w).unwrap(), w);
        }
    }

    #[test]
    fn higher_block_one_is_identity() {
        let m = Arc::new(validate_matrix(&[vec![1, 1], vec![1, 0]]).unwrap());
        let hb = higher_block(&m, 1);
        assert_eq!(*hb.matrix, *m);
        assert_eq!(hb.forward, SlidingBlockCode::identity(m.clone()));
    }

    #[test]
    fn higher_block_of_example_graph() {
        let e = Arc::new(counterexample::graph_e().edge_matrix());
        let hb = higher_block(&e, 2);
        assert_eq!(hb.matrix.size(), 12);
        assert!(hb.forward.ill_defined_at().is_none());
        assert!(hb.backward.ill_defined_at().is_none());
        let w = Word::parse(&e, "caeb").unwrap();
        let blocks = apply_code(&hb.forward, &w).unwrap();
        assert_eq!(blocks.display(&hb.matrix), "[ca].[ae].[eb]");
        let back = apply_code(&hb.backward, &blocks).unwrap();
        assert_eq!(back.letters(), &w.letters()[..3]);
    }

    #[test]
    fn partial_tables_are_rejected() {
        let m = Arc::new(validate_matrix(&[vec![1, 1], vec![1, 1]]).unwrap());
        let mut table = WindowTable::new();
        table.insert(vec![0], 0);
        let err = SlidingBlockCode::new("p", m.clone(), m.clone(), 0, 0, table.clone(), vec![]).unwrap_err();
        assert!(matches!(err, CodeError::MissingWindow { .. }));
        table.insert(vec![1], 5);
        let err = SlidingBlockCode::new("p", m.clone(), m.clone(), 0, 0, table, vec![]).unwrap_err();
        assert!(matches!(err, CodeError::LetterOutOfRange { .. }));
        let err = SlidingBlockCode::new("p", m.clone(), m, 1, 0, WindowTable::new(), vec![]).unwrap_err();
        assert_eq!(err, CodeError::BoundaryCount { expected: 1, got: 0 });
    }

    #[test]
    fn composition_matches_sequential_application() {
        let h = counterexample::code_h();
        let hinv = counterexample::code_h_inverse();
        let both = SlidingBlockCode::compose(&hinv, &h).unwrap();
        assert_eq!(both.memory(), 2);
        for w in admissible_words(h.source(), 6) {
            let direct = apply_code(&both, &w).unwrap();
            let stepwise = apply_code(&hinv, &apply_code(&h, &w).unwrap()).unwrap();
            assert_eq!(direct, stepwise);
            assert_eq!(direct, w);
        }
        assert_eq!(SlidingBlockCode::compose(&h, &h).unwrap_err(), CodeError::MatrixMismatch);
    }
}
