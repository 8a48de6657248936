//! The Deaconu-Renault groupoid of a one-sided shift, restricted to
//! eventually periodic points.
//!
//! An element is a triple `(x, n, y)` such that `σ^k(x) = σ^l(y)` for some
//! `k, l ≥ 0` with `k - l = n`. The stored witness `(k, l)` is the least such
//! pair, so two elements are equal exactly when their legs and `n` agree.

use std::sync::Arc;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::matrix::{Matrix01, Word};
use crate::point::{EPPoint, PointError};
use crate::witness::Conjugacy;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupoidError {
    #[error("σ^{k}(x) and σ^{l}(y) differ")]
    NotComposablePair { k: usize, l: usize },
    #[error("no k - l = {n} brings the two points together")]
    NotInGroupoid { n: i64 },
    #[error("source of the first element is not the range of the second")]
    NotComposable,
    #[error("bisection words must both be empty or end in the same letter")]
    FinalLetterMismatch,
    #[error(transparent)]
    Point(#[from] PointError),
    #[error("cannot parse element `{0}`")]
    Syntax(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupoidElement {
    x: EPPoint,
    n: i64,
    y: EPPoint,
    k: usize,
    l: usize,
}

/// Least `(k, l)` with `k - l = n` and `σ^k(x) = σ^l(y)`.
///
/// Once `k` and `l` exceed both prefixes, the two shifted points are rotations
/// of the cycles and move in lockstep, so one more cycle length of candidates
/// decides the question.
fn least_witness(x: &EPPoint, n: i64, y: &EPPoint) -> Option<(usize, usize)> {
    let start = n.max(0) as usize;
    let bound = start + x.prefix().len() + y.prefix().len() + x.cycle().len().max(y.cycle().len());
    let mut sx = x.shift(start);
    let mut sy = y.shift((start as i64 - n) as usize);
    for k in start..=bound {
        if sx == sy {
            return Some((k, (k as i64 - n) as usize));
        }
        sx = sx.shift(1);
        sy = sy.shift(1);
    }
    None
}

impl GroupoidElement {
    /// `(x, k - l, y)`, provided `σ^k(x) = σ^l(y)`.
    pub fn new(x: EPPoint, k: usize, l: usize, y: EPPoint) -> Result<Self, GroupoidError> {
        if x.shift(k) != y.shift(l) {
            return Err(GroupoidError::NotComposablePair { k, l });
        }
        let n = k as i64 - l as i64;
        let (k, l) = least_witness(&x, n, &y).expect("a witness exists");
        Ok(GroupoidElement { x, n, y, k, l })
    }

    /// `(x, n, y)` if it lies in the groupoid.
    pub fn from_points(x: EPPoint, n: i64, y: EPPoint) -> Result<Self, GroupoidError> {
        let (k, l) = least_witness(&x, n, &y).ok_or(GroupoidError::NotInGroupoid { n })?;
        Ok(GroupoidElement { x, n, y, k, l })
    }

    pub fn unit(x: EPPoint) -> Self {
        GroupoidElement { y: x.clone(), x, n: 0, k: 0, l: 0 }
    }

    pub fn x(&self) -> &EPPoint {
        &self.x
    }

    pub fn y(&self) -> &EPPoint {
        &self.y
    }

    pub fn witness(&self) -> (usize, usize) {
        (self.k, self.l)
    }

    /// The canonical cocycle `c(x, n, y) = n`.
    pub fn cocycle(&self) -> i64 {
        self.n
    }

    pub fn is_unit(&self) -> bool {
        self.n == 0 && self.x == self.y
    }

    pub fn range(&self) -> GroupoidElement {
        GroupoidElement::unit(self.x.clone())
    }

    pub fn source(&self) -> GroupoidElement {
        GroupoidElement::unit(self.y.clone())
    }

    pub fn inverse(&self) -> GroupoidElement {
        GroupoidElement { x: self.y.clone(), n: -self.n, y: self.x.clone(), k: self.l, l: self.k }
    }

    /// `(x, n, y)(y, n', y') = (x, n + n', y')`.
    pub fn compose(&self, other: &GroupoidElement) -> Result<GroupoidElement, GroupoidError> {
        if self.y != other.x {
            return Err(GroupoidError::NotComposable);
        }
        let n = self.n + other.n;
        Ok(GroupoidElement::from_points(self.x.clone(), n, other.y.clone()).expect("products stay in the groupoid"))
    }

    /// `ε(x, n, y) = (σx, n, σy)`.
    pub fn epsilon(&self) -> GroupoidElement {
        GroupoidElement::from_points(self.x.shift(1), self.n, self.y.shift(1)).expect("ε preserves the tail relation")
    }

    /// Accepts `(<point>, k, l, <point>)`.
    pub fn parse(matrix: &Matrix01, text: &str) -> Result<Self, GroupoidError> {
        let bad = || GroupoidError::Syntax(text.to_string());
        let inner = text.trim().strip_prefix('(').and_then(|t| t.strip_suffix(')')).ok_or_else(bad)?;
        // points contain parentheses but no commas
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        let [x, k, l, y] = parts.as_slice() else { return Err(bad()) };
        let k = k.parse().map_err(|_| bad())?;
        let l = l.parse().map_err(|_| bad())?;
        GroupoidElement::new(EPPoint::parse(matrix, x)?, k, l, EPPoint::parse(matrix, y)?)
    }

    pub fn display(&self, matrix: &Matrix01) -> String {
        format!("({}, {}, {}, {})", self.x.display(matrix), self.k, self.l, self.y.display(matrix))
    }
}

/// `ε_A` on an element.
pub fn epsilon(g: &GroupoidElement) -> GroupoidElement {
    g.epsilon()
}

/// `c_A` on an element.
pub fn cocycle(g: &GroupoidElement) -> i64 {
    g.cocycle()
}

/// The compact open bisection `Z(α, β)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisBisection {
    alpha: Word,
    beta: Word,
}

impl BasisBisection {
    pub fn new(alpha: Word, beta: Word) -> Result<Self, GroupoidError> {
        if alpha.last() != beta.last() {
            return Err(GroupoidError::FinalLetterMismatch);
        }
        Ok(BasisBisection { alpha, beta })
    }

    pub fn alpha(&self) -> &Word {
        &self.alpha
    }

    pub fn beta(&self) -> &Word {
        &self.beta
    }

    /// `x ∈ Z_α`, `y ∈ Z_β`, `n = |α| - |β|` and `σ^{|α|}x = σ^{|β|}y`.
    pub fn contains(&self, g: &GroupoidElement) -> bool {
        let (a, b) = (self.alpha.len(), self.beta.len());
        g.x.first_letters(a) == self.alpha.letters()
            && g.y.first_letters(b) == self.beta.letters()
            && g.n == a as i64 - b as i64
            && g.x.shift(a) == g.y.shift(b)
    }
}

pub fn in_bisection(g: &GroupoidElement, z: &BasisBisection) -> bool {
    z.contains(g)
}

/// The isomorphism `(x, n, y) ↦ (h(x), n, h(y))` induced by a conjugacy `h`.
#[derive(Debug, Clone)]
pub struct InducedGroupoidMap {
    conjugacy: Conjugacy,
}

impl InducedGroupoidMap {
    pub fn new(conjugacy: Conjugacy) -> Self {
        InducedGroupoidMap { conjugacy }
    }

    pub fn source(&self) -> &Arc<Matrix01> {
        self.conjugacy.forward().source()
    }

    pub fn target(&self) -> &Arc<Matrix01> {
        self.conjugacy.forward().target()
    }

    pub fn apply(&self, g: &GroupoidElement) -> Result<GroupoidElement, GroupoidError> {
        let h = self.conjugacy.forward();
        let x = h.apply_to_point(&g.x)?;
        let y = h.apply_to_point(&g.y)?;
        GroupoidElement::from_points(x, g.n, y)
    }

    pub fn apply_point(&self, p: &EPPoint) -> Result<EPPoint, GroupoidError> {
        Ok(self.conjugacy.forward().apply_to_point(p)?)
    }
}

pub fn induced_phi(w: &Conjugacy, g: &GroupoidElement) -> Result<GroupoidElement, GroupoidError> {
    InducedGroupoidMap::new(w.clone()).apply(g)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub passed: bool,
    pub trials: usize,
    pub checks: usize,
    pub failures: Vec<String>,
}

/// Associativity, inverses, units, range/source of products, cocycle
/// additivity and multiplicativity of `ε` on `trials` random triples
/// `(x, y, z)` with `s(x) = r(y)` and `s(y) = r(z)`.
pub fn verify_groupoid_axioms(matrix: &Matrix01, trials: usize, rng: &mut impl Rng) -> AxiomReport {
    let mut report = AxiomReport { passed: true, trials, checks: 0, failures: Vec::new() };
    for t in 0..trials {
        let (x, y) = crate::random::random_composable_pair(rng, matrix);
        let z = crate::random::random_element_from(rng, matrix, y.y().clone());
        let mut check = |ok: bool, what: &str| {
            report.checks += 1;
            if !ok {
                report.passed = false;
                if report.failures.len() < 20 {
                    report.failures.push(format!(
                        "trial {t}: {what} at x = {}, y = {}, z = {}",
                        x.display(matrix),
                        y.display(matrix),
                        z.display(matrix)
                    ));
                }
            }
        };
        let (xy, yz) = match (x.compose(&y), y.compose(&z)) {
            (Ok(xy), Ok(yz)) => (xy, yz),
            _ => {
                check(false, "composable pair rejected");
                continue;
            }
        };
        check(xy.compose(&z).ok() == x.compose(&yz).ok(), "associativity");
        check(x.compose(&x.inverse()).ok() == Some(x.range()), "x x^-1 = r(x)");
        check(x.inverse().compose(&x).ok() == Some(x.source()), "x^-1 x = s(x)");
        check(x.range().compose(&x).ok().as_ref() == Some(&x), "r(x) x = x");
        check(x.compose(&x.source()).ok().as_ref() == Some(&x), "x s(x) = x");
        check(xy.range() == x.range() && xy.source() == y.source(), "range and source of xy");
        check(xy.cocycle() == x.cocycle() + y.cocycle(), "c(xy) = c(x) + c(y)");
        check(x.epsilon().compose(&y.epsilon()).ok() == Some(xy.epsilon()), "ε(x) ε(y) = ε(xy)");
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counterexample;

    fn setup() -> (Matrix01, EPPoint, EPPoint) {
        let m = counterexample::graph_e().edge_matrix();
        let eb = EPPoint::parse(&m, "(eb)").unwrap();
        let be = EPPoint::parse(&m, "(be)").unwrap();
        (m, eb, be)
    }

    #[test]
    fn make_element_checks_tails() {
        let (_, eb, be) = setup();
        let g = GroupoidElement::new(eb.clone(), 1, 0, be.clone()).unwrap();
        assert_eq!(g.cocycle(), 1);
        assert!(GroupoidElement::new(eb.clone(), 0, 0, eb.clone()).unwrap().is_unit());
        assert_eq!(
            GroupoidElement::new(eb.clone(), 0, 0, be.clone()),
            Err(GroupoidError::NotComposablePair { k: 0, l: 0 })
        );
    }

    #[test]
    fn witness_is_minimal() {
        let (_, eb, be) = setup();
        let g = GroupoidElement::new(eb.clone(), 5, 4, be.clone()).unwrap();
        assert_eq!(g.witness(), (1, 0));
        assert_eq!(g, GroupoidElement::new(eb, 1, 0, be).unwrap());
    }

    #[test]
    fn composition_and_inverse() {
        let (_, eb, be) = setup();
        let g = GroupoidElement::new(eb.clone(), 1, 0, be.clone()).unwrap();
        let h = GroupoidElement::new(be.clone(), 1, 0, eb.clone()).unwrap();
        let gh = g.compose(&h).unwrap();
        assert_eq!(gh, GroupoidElement::from_points(eb.clone(), 2, eb.clone()).unwrap());
        assert_eq!(g.compose(&g.inverse()).unwrap(), GroupoidElement::unit(eb.clone()));
        assert_eq!(g.compose(&g), Err(GroupoidError::NotComposable));
        assert_eq!(gh.cocycle(), g.cocycle() + h.cocycle());
    }

    #[test]
    fn epsilon_shifts_both_legs() {
        let (m, eb, be) = setup();
        let g = GroupoidElement::new(eb.clone(), 1, 0, be.clone()).unwrap();
        let expected = GroupoidElement::from_points(be.clone(), 1, eb.clone()).unwrap();
        assert_eq!(g.epsilon(), expected);
        let x = EPPoint::parse(&m, "ca:(eb)").unwrap();
        assert_eq!(GroupoidElement::unit(x.clone()).epsilon(), GroupoidElement::unit(x.shift(1)));
    }

    #[test]
    fn bisection_membership() {
        let (m, eb, be) = setup();
        let w = |s: &str| Word::parse(&m, s).unwrap();
        let unit = GroupoidElement::unit(eb.clone());
        assert!(BasisBisection::new(w("e"), w("e")).unwrap().contains(&unit));
        let g = GroupoidElement::new(eb.clone(), 1, 0, be).unwrap();
        assert!(BasisBisection::new(w("eb"), w("b")).unwrap().contains(&g));
        assert!(!BasisBisection::new(w("eb"), w("b")).unwrap().contains(&unit));
        assert_eq!(BasisBisection::new(w("e"), w("b")), Err(GroupoidError::FinalLetterMismatch));
    }

    #[test]
    fn element_syntax_round_trip() {
        let (m, eb, be) = setup();
        let g = GroupoidElement::new(eb, 1, 0, be).unwrap();
        let text = g.display(&m);
        assert_eq!(text, "(:(eb), 1, 0, :(be))");
        assert_eq!(GroupoidElement::parse(&m, &text).unwrap(), g);
        assert!(GroupoidElement::parse(&m, "(:(eb), 1, :(be))").is_err());
    }

    #[test]
    fn induced_maps() {
        let (m, eb, be) = setup();
        let m = std::sync::Arc::new(m);
        let id = crate::witness::ConjugacyWitness::identity(m.clone()).into_conjugacy().unwrap();
        let g = GroupoidElement::new(eb.clone(), 1, 0, be).unwrap();
        assert_eq!(induced_phi(&id, &g).unwrap(), g);

        let hb = crate::code::higher_block(&m, 2);
        let w = crate::witness::ConjugacyWitness::new(hb.forward.clone(), hb.backward.clone());
        let phi = InducedGroupoidMap::new(w.into_conjugacy().unwrap());
        let unit = phi.apply(&GroupoidElement::unit(eb.clone())).unwrap();
        let recoded = EPPoint::parse(&hb.matrix, "([eb].[be])").unwrap();
        assert_eq!(unit, GroupoidElement::unit(recoded));
        let image = phi.apply(&g).unwrap();
        assert_eq!(image.cocycle(), 1);
        assert_eq!(phi.apply(&g.epsilon()).unwrap(), image.epsilon());
    }

    #[test]
    fn axiom_suite_is_seeded() {
        let m = counterexample::graph_f().edge_matrix();
        let a = verify_groupoid_axioms(&m, 200, &mut crate::random::seeded(3));
        let b = verify_groupoid_axioms(&m, 200, &mut crate::random::seeded(3));
        assert!(a.passed, "{:?}", a.failures);
        assert_eq!(a, b);
        assert_eq!(a.checks, 200 * 8);
    }
}
