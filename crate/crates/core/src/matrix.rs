//! 0/1 transition matrices, admissible words and cylinders.
//!
//! Letters are dense indices `0..N`. Every matrix carries a label table so that
//! words can be printed and parsed in the vocabulary of the presentation it
//! came from (edge ids for edge shifts, `1..N` for plain matrices).

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Index of a letter in the alphabet of a [`Matrix01`].
pub type Letter = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("matrix is not square (row {row} has {len} entries, expected {expected})")]
    NonSquare { row: usize, len: usize, expected: usize },
    #[error("matrix is empty")]
    Empty,
    #[error("entry ({row}, {col}) is {value}, expected 0 or 1")]
    NotBinary { row: usize, col: usize, value: u32 },
    #[error("row {0} is zero")]
    ZeroRow(usize),
    #[error("column {0} is zero")]
    ZeroColumn(usize),
    #[error("label table has {labels} entries for {size} letters")]
    LabelCount { labels: usize, size: usize },
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("invalid label `{0}`")]
    InvalidLabel(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("letter {0} is outside the alphabet")]
    UnknownLetter(Letter),
    #[error("transition {0} -> {1} is not allowed")]
    Inadmissible(Letter, Letter),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
}

/// Characters that separate tokens in the textual syntaxes and therefore cannot
/// appear inside a label.
const RESERVED: &[char] = &['.', ':', '(', ')', '|', '+', '*', ',', '#', '-', '>'];

/// A validated square 0/1 matrix with no zero rows and no zero columns.
#[derive(Clone, PartialEq, Eq, Serialize)]
pub struct Matrix01 {
    size: usize,
    entries: Vec<bool>,
    labels: Vec<String>,
    #[serde(skip)]
    followers: Vec<Vec<Letter>>,
    #[serde(skip)]
    predecessors: Vec<Vec<Letter>>,
}

impl fmt::Debug for Matrix01 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix01({}) [{}]", self.size, self.labels.join(" "))?;
        for i in 0..self.size {
            let row: Vec<&str> = (0..self.size)
                .map(|j| if self.allows(i, j) { "1" } else { "0" })
                .collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Validates a raw grid. Labels default to `1..N`.
pub fn validate_matrix(grid: &[Vec<u32>]) -> Result<Matrix01, MatrixError> {
    let labels = (1..=grid.len()).map(|i| i.to_string()).collect();
    Matrix01::with_labels(grid, labels)
}

impl Matrix01 {
    pub fn with_labels(grid: &[Vec<u32>], labels: Vec<String>) -> Result<Self, MatrixError> {
        let size = grid.len();
        if size == 0 {
            return Err(MatrixError::Empty);
        }
        let mut entries = Vec::with_capacity(size * size);
        for (row, cells) in grid.iter().enumerate() {
            if cells.len() != size {
                return Err(MatrixError::NonSquare { row, len: cells.len(), expected: size });
            }
            for (col, &value) in cells.iter().enumerate() {
                match value {
                    0 => entries.push(false),
                    1 => entries.push(true),
                    _ => return Err(MatrixError::NotBinary { row, col, value }),
                }
            }
        }
        Self::from_entries(size, entries, labels)
    }

    pub(crate) fn from_entries(
        size: usize,
        entries: Vec<bool>,
        labels: Vec<String>,
    ) -> Result<Self, MatrixError> {
        if size == 0 {
            return Err(MatrixError::Empty);
        }
        if labels.len() != size {
            return Err(MatrixError::LabelCount { labels: labels.len(), size });
        }
        let mut seen = HashMap::new();
        for label in &labels {
            if !label_is_valid(label) {
                return Err(MatrixError::InvalidLabel(label.clone()));
            }
            if seen.insert(label.as_str(), ()).is_some() {
                return Err(MatrixError::DuplicateLabel(label.clone()));
            }
        }
        for i in 0..size {
            if !(0..size).any(|j| entries[i * size + j]) {
                return Err(MatrixError::ZeroRow(i));
            }
        }
        for j in 0..size {
            if !(0..size).any(|i| entries[i * size + j]) {
                return Err(MatrixError::ZeroColumn(j));
            }
        }
        let followers = (0..size)
            .map(|i| (0..size).filter(|&j| entries[i * size + j]).collect())
            .collect();
        let predecessors = (0..size)
            .map(|j| (0..size).filter(|&i| entries[i * size + j]).collect())
            .collect();
        Ok(Matrix01 { size, entries, labels, followers, predecessors })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn allows(&self, from: Letter, to: Letter) -> bool {
        self.entries[from * self.size + to]
    }

    /// Letters `j` with `A(i, j) = 1`, ascending.
    pub fn followers(&self, i: Letter) -> &[Letter] {
        &self.followers[i]
    }

    /// Letters `i` with `A(i, j) = 1`, ascending.
    pub fn predecessors(&self, j: Letter) -> &[Letter] {
        &self.predecessors[j]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, letter: Letter) -> &str {
        &self.labels[letter]
    }

    pub fn letter(&self, label: &str) -> Option<Letter> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        (0..self.size)
            .map(|i| (0..self.size).map(|j| self.allows(i, j) as u32).collect())
            .collect()
    }

    /// Same matrix with a different label table.
    pub fn relabeled(&self, labels: Vec<String>) -> Result<Self, MatrixError> {
        Self::from_entries(self.size, self.entries.clone(), labels)
    }

    pub fn is_admissible(&self, letters: &[Letter]) -> bool {
        letters.iter().all(|&l| l < self.size) && letters.windows(2).all(|w| self.allows(w[0], w[1]))
    }

    /// Number of fixed points of `σ^p`, i.e. the trace of `A^p`.
    pub fn periodic_points(&self, period: usize) -> u128 {
        let n = self.size;
        // counts[i][j] = number of paths of the current length from i to j
        let mut counts: Vec<Vec<u128>> =
            (0..n).map(|i| (0..n).map(|j| (i == j) as u128).collect()).collect();
        for _ in 0..period {
            let mut next = vec![vec![0u128; n]; n];
            for (i, row) in counts.iter().enumerate() {
                for (k, &c) in row.iter().enumerate() {
                    if c == 0 {
                        continue;
                    }
                    for &j in self.followers(k) {
                        next[i][j] += c;
                    }
                }
            }
            counts = next;
        }
        (0..n).map(|i| counts[i][i]).sum()
    }

    /// Splits `text` into letters. Dots separate letters explicitly; inside a
    /// dot-free run the longest matching label is taken greedily.
    pub fn parse_letters(&self, text: &str) -> Result<Vec<Letter>, WordError> {
        let mut out = Vec::new();
        for chunk in text.split('.') {
            let mut rest = chunk.trim();
            while !rest.is_empty() {
                let best = self
                    .labels
                    .iter()
                    .enumerate()
                    .filter(|(_, l)| rest.starts_with(l.as_str()))
                    .max_by_key(|(_, l)| l.len());
                match best {
                    Some((letter, label)) => {
                        out.push(letter);
                        rest = &rest[label.len()..];
                    }
                    None => return Err(WordError::UnknownSymbol(rest.to_string())),
                }
            }
        }
        Ok(out)
    }

    /// Renders letters; labels are joined by dots unless every label is one character.
    pub fn format_letters(&self, letters: &[Letter]) -> String {
        let sep = if self.labels.iter().all(|l| l.chars().count() == 1) { "" } else { "." };
        letters.iter().map(|&l| self.label(l)).collect::<Vec<_>>().join(sep)
    }
}

pub(crate) fn label_is_valid(label: &str) -> bool {
    !label.is_empty() && !label.chars().any(|c| c.is_whitespace() || RESERVED.contains(&c))
}

/// An admissible finite word. The empty word is allowed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(matrix: &Matrix01, letters: Vec<Letter>) -> Result<Self, WordError> {
        if let Some(&bad) = letters.iter().find(|&&l| l >= matrix.size()) {
            return Err(WordError::UnknownLetter(bad));
        }
        if let Some(w) = letters.windows(2).find(|w| !matrix.allows(w[0], w[1])) {
            return Err(WordError::Inadmissible(w[0], w[1]));
        }
        Ok(Word(letters))
    }

    pub fn parse(matrix: &Matrix01, text: &str) -> Result<Self, WordError> {
        Word::new(matrix, matrix.parse_letters(text)?)
    }

    /// Wraps letters already known to be admissible.
    pub(crate) fn from_trusted(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    /// Concatenation, if the junction is allowed.
    pub fn concat(&self, matrix: &Matrix01, other: &Word) -> Option<Word> {
        match (self.last(), other.first()) {
            (Some(a), Some(b)) if !matrix.allows(a, b) => None,
            _ => {
                let mut letters = self.0.clone();
                letters.extend_from_slice(&other.0);
                Some(Word(letters))
            }
        }
    }

    pub fn display(&self, matrix: &Matrix01) -> String {
        matrix.format_letters(&self.0)
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }
}

/// The cylinder set `Z_α` of points starting with `α`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cylinder {
    base: Word,
}

impl Cylinder {
    pub fn new(base: Word) -> Self {
        Cylinder { base }
    }

    pub fn base(&self) -> &Word {
        &self.base
    }

    pub fn contains_prefix(&self, letters: &[Letter]) -> bool {
        letters.len() >= self.base.len() && letters[..self.base.len()] == self.base.0[..]
    }

    /// Splits `Z_α` into the cylinders `Z_{αj}`.
    pub fn refine(&self, matrix: &Matrix01) -> Vec<Cylinder> {
        let next: Vec<Letter> = match self.base.last() {
            Some(a) => matrix.followers(a).to_vec(),
            None => (0..matrix.size()).collect(),
        };
        next.into_iter()
            .map(|j| {
                let mut letters = self.base.0.clone();
                letters.push(j);
                Cylinder { base: Word(letters) }
            })
            .collect()
    }
}

/// All admissible words of length `n`, in lexicographic order.
pub fn admissible_words(matrix: &Matrix01, n: usize) -> Vec<Word> {
    let mut words = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(words.len() * 2);
        for w in &words {
            let choices: &[Letter] = match w.last() {
                Some(&a) => matrix.followers(a),
                None => &[],
            };
            if w.is_empty() {
                for j in 0..matrix.size() {
                    next.push(vec![j]);
                }
            } else {
                for &j in choices {
                    let mut v = w.clone();
                    v.push(j);
                    next.push(v);
                }
            }
        }
        words = next;
    }
    words.into_iter().map(Word).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full(n: usize) -> Matrix01 {
        validate_matrix(&vec![vec![1; n]; n]).unwrap()
    }

    #[test]
    fn accepts_full_shift() {
        let m = full(2);
        assert_eq!(m.size(), 2);
        assert_eq!(m.followers(0), &[0, 1]);
    }

    #[test]
    fn rejects_bad_grids() {
        assert_eq!(validate_matrix(&[vec![1, 1], vec![0, 0]]), Err(MatrixError::ZeroRow(1)));
        assert_eq!(validate_matrix(&[vec![1, 0], vec![1, 0]]), Err(MatrixError::ZeroColumn(1)));
        assert!(matches!(
            validate_matrix(&[vec![1, 1], vec![1]]),
            Err(MatrixError::NonSquare { row: 1, .. })
        ));
        assert!(matches!(validate_matrix(&[vec![2]]), Err(MatrixError::NotBinary { .. })));
        assert_eq!(validate_matrix(&[]), Err(MatrixError::Empty));
    }

    #[test]
    fn empty_word_only_at_length_zero() {
        let m = full(3);
        assert_eq!(admissible_words(&m, 0), vec![Word::empty()]);
        assert_eq!(admissible_words(&m, 2).len(), 9);
    }

    #[test]
    fn words_are_lexicographic() {
        let m = validate_matrix(&[vec![1, 1], vec![1, 0]]).unwrap();
        let words: Vec<Vec<Letter>> =
            admissible_words(&m, 3).into_iter().map(Word::into_letters).collect();
        assert_eq!(words, vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0], vec![1, 0, 1]]);
    }

    #[test]
    fn word_checks_admissibility() {
        let m = validate_matrix(&[vec![1, 1], vec![1, 0]]).unwrap();
        assert_eq!(Word::new(&m, vec![1, 1]), Err(WordError::Inadmissible(1, 1)));
        assert_eq!(Word::new(&m, vec![2]), Err(WordError::UnknownLetter(2)));
        let w = Word::new(&m, vec![0, 1]).unwrap();
        assert!(w.concat(&m, &Word::new(&m, vec![1]).unwrap()).is_none());
        assert_eq!(w.concat(&m, &Word::empty()), Some(w.clone()));
    }

    #[test]
    fn greedy_label_parsing() {
        let labels = ["a", "a'", "b"].iter().map(|s| s.to_string()).collect();
        let m = Matrix01::with_labels(&vec![vec![1; 3]; 3], labels).unwrap();
        assert_eq!(m.parse_letters("a'ab").unwrap(), vec![1, 0, 2]);
        assert_eq!(m.parse_letters("a.a'.b").unwrap(), vec![0, 1, 2]);
        assert!(m.parse_letters("c").is_err());
        assert_eq!(m.format_letters(&[1, 0]), "a'.a");
    }

    #[test]
    fn periodic_point_counts() {
        assert_eq!(full(2).periodic_points(3), 8);
        let golden = validate_matrix(&[vec![1, 1], vec![1, 0]]).unwrap();
        // Lucas numbers
        assert_eq!(golden.periodic_points(1), 1);
        assert_eq!(golden.periodic_points(2), 3);
        assert_eq!(golden.periodic_points(5), 11);
    }

    #[test]
    fn cylinder_refinement_covers_followers() {
        let m = validate_matrix(&[vec![1, 1], vec![1, 0]]).unwrap();
        let z = Cylinder::new(Word::new(&m, vec![1]).unwrap());
        let parts = z.refine(&m);
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].base().letters(), &[1, 0]);
        assert!(z.contains_prefix(&[1, 0, 0]));
        assert!(!z.contains_prefix(&[0, 1]));
    }
}
