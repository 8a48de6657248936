//! Eventually periodic points `prefix · cycle^∞`.
//!
//! Points are kept in a canonical form so that equality is structural:
//! the cycle is primitive (not a proper power) and the prefix is as short as
//! possible, i.e. its last letter differs from the last letter of the cycle.
//! A shorter prefix pins down the rotation of the cycle, so no further
//! rotation choice is needed.

use thiserror::Error;

use crate::code::{CodeError, SlidingBlockCode};
use crate::matrix::{Letter, Matrix01, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PointError {
    #[error("cycle must be nonempty")]
    EmptyCycle,
    #[error("point is not admissible: {0}")]
    Inadmissible(#[from] WordError),
    #[error("cannot parse point `{0}`")]
    Syntax(String),
    #[error(transparent)]
    Code(#[from] CodeError),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EPPoint {
    prefix: Vec<Letter>,
    cycle: Vec<Letter>,
}

/// Length of the shortest period of `word` that divides its length.
fn primitive_period(word: &[Letter]) -> usize {
    let n = word.len();
    (1..=n)
        .find(|&p| n.is_multiple_of(p) && (p..n).all(|i| word[i] == word[i - p]))
        .unwrap_or(n)
}

impl EPPoint {
    pub fn new(matrix: &Matrix01, prefix: Vec<Letter>, cycle: Vec<Letter>) -> Result<Self, PointError> {
        if cycle.is_empty() {
            return Err(PointError::EmptyCycle);
        }
        let mut probe = prefix.clone();
        probe.extend_from_slice(&cycle);
        probe.push(cycle[0]);
        crate::matrix::Word::new(matrix, probe)?;
        Ok(Self::normalized(prefix, cycle))
    }

    pub fn periodic(matrix: &Matrix01, cycle: Vec<Letter>) -> Result<Self, PointError> {
        Self::new(matrix, Vec::new(), cycle)
    }

    /// Canonical form of `prefix · cycle^∞`. Inputs are assumed admissible.
    pub(crate) fn normalized(mut prefix: Vec<Letter>, mut cycle: Vec<Letter>) -> Self {
        let p = primitive_period(&cycle);
        cycle.truncate(p);
        while prefix.last().is_some() && prefix.last() == cycle.last() {
            prefix.pop();
            cycle.rotate_right(1);
        }
        EPPoint { prefix, cycle }
    }

    pub fn prefix(&self) -> &[Letter] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[Letter] {
        &self.cycle
    }

    pub fn letter_at(&self, n: usize) -> Letter {
        if n < self.prefix.len() {
            self.prefix[n]
        } else {
            self.cycle[(n - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// The first `len` coordinates.
    pub fn first_letters(&self, len: usize) -> Vec<Letter> {
        (0..len).map(|n| self.letter_at(n)).collect()
    }

    /// `σ^t` of the point.
    pub fn shift(&self, t: usize) -> EPPoint {
        let drop = t.min(self.prefix.len());
        let mut cycle = self.cycle.clone();
        cycle.rotate_left((t - drop) % self.cycle.len());
        Self::normalized(self.prefix[drop..].to_vec(), cycle)
    }

    /// `w · x` for a word `w` whose last letter may precede `x_0`.
    pub fn prepend(&self, matrix: &Matrix01, word: &[Letter]) -> Result<EPPoint, PointError> {
        let mut prefix = word.to_vec();
        prefix.extend_from_slice(&self.prefix);
        Self::new(matrix, prefix, self.cycle.clone())
    }

    pub fn is_periodic(&self) -> bool {
        self.prefix.is_empty()
    }

    /// Accepts `prefix:(cycle)`, `prefix:cycle` or `(cycle)`.
    pub fn parse(matrix: &Matrix01, text: &str) -> Result<Self, PointError> {
        let text = text.trim();
        let (prefix, cycle) = match text.split_once(':') {
            Some((p, c)) => (p, c),
            None => ("", text),
        };
        let cycle = cycle.trim();
        let cycle = cycle.strip_prefix('(').and_then(|c| c.strip_suffix(')')).unwrap_or(cycle);
        if cycle.contains(['(', ')', ':']) {
            return Err(PointError::Syntax(text.to_string()));
        }
        let prefix = matrix.parse_letters(prefix)?;
        let cycle = matrix.parse_letters(cycle)?;
        Self::new(matrix, prefix, cycle)
    }

    pub fn display(&self, matrix: &Matrix01) -> String {
        format!("{}:({})", matrix.format_letters(&self.prefix), matrix.format_letters(&self.cycle))
    }
}

impl SlidingBlockCode {
    /// Image of an eventually periodic point. Past coordinate
    /// `|prefix| + memory` every input window is periodic, so the image has
    /// prefix length at most `|prefix| + memory` and the same cycle length.
    pub fn apply_to_point(&self, point: &EPPoint) -> Result<EPPoint, PointError> {
        let start = point.prefix.len() + self.memory();
        let period = point.cycle.len();
        let input = point.first_letters(start + period + self.anticipation());
        let out = self.apply_prefix(&input)?;
        let (prefix, cycle) = out.split_at(start);
        let mut probe = out.clone();
        probe.push(cycle[0]);
        if !self.target().is_admissible(&probe) {
            return Err(CodeError::InadmissibleOutput { output: probe }.into());
        }
        Ok(EPPoint::normalized(prefix.to_vec(), cycle.to_vec()))
    }
}

/// Image of an eventually periodic point under a sliding block code.
pub fn apply_to_ep_point(code: &SlidingBlockCode, point: &EPPoint) -> Result<EPPoint, PointError> {
    code.apply_to_point(point)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counterexample;

    fn e() -> Matrix01 {
        counterexample::graph_e().edge_matrix()
    }

    #[test]
    fn normalization_is_canonical() {
        let m = e();
        let a = EPPoint::parse(&m, "ca:(eb)").unwrap();
        let b = EPPoint::parse(&m, "caeb:(ebeb)").unwrap();
        let c = EPPoint::parse(&m, "cae:(be)").unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(a.display(&m), "ca:(eb)");
        assert_eq!(EPPoint::parse(&m, "e:(be)").unwrap(), EPPoint::parse(&m, "(eb)").unwrap());
    }

    #[test]
    fn shifting() {
        let m = e();
        let p = EPPoint::parse(&m, "(eb)").unwrap();
        assert_eq!(p.shift(1), EPPoint::parse(&m, "(be)").unwrap());
        assert_eq!(p.shift(2), p);
        let q = EPPoint::parse(&m, "ca:(eb)").unwrap();
        assert_eq!(q.shift(1), EPPoint::parse(&m, "a:(eb)").unwrap());
        assert_eq!(q.shift(2), p);
        assert_eq!(q.shift(2), q.shift(1).shift(1));
    }

    #[test]
    fn rejects_bad_points() {
        let m = e();
        assert!(matches!(EPPoint::parse(&m, "(ab)"), Err(PointError::Inadmissible(_))));
        assert!(matches!(EPPoint::parse(&m, "c:(eb)"), Err(PointError::Inadmissible(_))));
        assert_eq!(EPPoint::new(&m, vec![0], vec![]), Err(PointError::EmptyCycle));
    }

    #[test]
    fn example_code_on_points() {
        let h = counterexample::code_h();
        let (em, fm) = (h.source().clone(), h.target().clone());
        let p = EPPoint::parse(&em, "(eb)").unwrap();
        assert_eq!(h.apply_to_point(&p).unwrap(), EPPoint::parse(&fm, "(e'a')").unwrap());
        let q = EPPoint::parse(&em, "ca:(eb)").unwrap();
        assert_eq!(h.apply_to_point(&q).unwrap(), EPPoint::parse(&fm, "c'a':(e'a')").unwrap());
        let id = SlidingBlockCode::identity(em.clone());
        assert_eq!(id.apply_to_point(&q).unwrap(), q);
    }

    #[test]
    fn image_agrees_with_word_application() {
        let h = counterexample::code_h();
        let m = h.source().clone();
        let q = EPPoint::parse(&m, "fbc:(adaf bc)".replace(' ', "").as_str()).unwrap();
        let img = h.apply_to_point(&q).unwrap();
        let direct = h.apply_prefix(&q.first_letters(30)).unwrap();
        assert_eq!(img.first_letters(30), direct);
    }
}
