//! The dense *-subalgebra of the Cuntz-Krieger algebra `O_A`, spanned by the
//! monomials `s_α s_β^*`.
//!
//! A monomial with `α`, `β` ending in the same letter (or both empty) is the
//! indicator of a compact open bisection of the groupoid, and the row
//! relation `s_i^* s_i = Σ_j A(i,j) s_j s_j^*` says that a bisection is the
//! disjoint union of its one-letter refinements. Elements are stored in the
//! coarsest such form: keys never nest, and no complete set of refinements
//! with a common coefficient is left unmerged. Two elements are equal as
//! operators iff their stored forms are equal.

mod maps;
mod syntax;
mod verify;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num::complex::Complex;
use num::{BigInt, BigRational, One, Zero};
use thiserror::Error;

use crate::code::CodeError;
use crate::matrix::{Letter, Matrix01, WordError};

pub use maps::{
    expectation_d, gauge_act, gauge_degree_split, induced_psi, phi, tau, InducedPsi,
};
pub use verify::{verify_ck_relations, verify_ck_relations_with, verify_diagonal_expectation, RelationReport};

/// Exact complex rational coefficient.
pub type Coeff = Complex<BigRational>;

pub fn coeff(re: i64) -> Coeff {
    Complex::new(BigRational::from_integer(BigInt::from(re)), BigRational::zero())
}

pub fn coeff_ratio(num: i64, den: i64) -> Coeff {
    Complex::new(BigRational::new(num.into(), den.into()), BigRational::zero())
}

pub fn coeff_complex(re: BigRational, im: BigRational) -> Coeff {
    Complex::new(re, im)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error(transparent)]
    InadmissibleWord(#[from] WordError),
    #[error("elements live over different matrices")]
    MatrixMismatch,
    #[error("words `{0:?}` and `{1:?}` do not end in the same letter")]
    NotNormalized(Vec<Letter>, Vec<Letter>),
    #[error("cannot parse element: {0}")]
    Syntax(String),
    #[error("witness failure: {0}")]
    Witness(#[from] CodeError),
    #[error("witness does not verify")]
    Unverified,
}

/// `(α, β)` with the same final letter, or both empty.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NormalizedPair {
    alpha: Vec<Letter>,
    beta: Vec<Letter>,
}

impl NormalizedPair {
    pub fn new(matrix: &Matrix01, alpha: Vec<Letter>, beta: Vec<Letter>) -> Result<Self, AlgebraError> {
        for w in [&alpha, &beta] {
            crate::matrix::Word::new(matrix, w.clone())?;
        }
        if alpha.last() != beta.last() {
            return Err(AlgebraError::NotNormalized(alpha, beta));
        }
        Ok(NormalizedPair { alpha, beta })
    }

    pub fn unit() -> Self {
        NormalizedPair { alpha: Vec::new(), beta: Vec::new() }
    }

    pub(crate) fn trusted(alpha: Vec<Letter>, beta: Vec<Letter>) -> Self {
        debug_assert_eq!(alpha.last(), beta.last());
        NormalizedPair { alpha, beta }
    }

    pub fn alpha(&self) -> &[Letter] {
        &self.alpha
    }

    pub fn beta(&self) -> &[Letter] {
        &self.beta
    }

    pub fn is_unit(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn is_diagonal(&self) -> bool {
        self.alpha == self.beta
    }

    /// `|α| - |β|`.
    pub fn degree(&self) -> i64 {
        self.alpha.len() as i64 - self.beta.len() as i64
    }

    pub fn swapped(&self) -> Self {
        NormalizedPair { alpha: self.beta.clone(), beta: self.alpha.clone() }
    }

    fn parent(&self) -> Option<NormalizedPair> {
        let (a, b) = (self.alpha.split_last()?.1, self.beta.split_last()?.1);
        (a.last() == b.last()).then(|| NormalizedPair { alpha: a.to_vec(), beta: b.to_vec() })
    }

    fn children(&self, matrix: &Matrix01) -> Vec<NormalizedPair> {
        match self.alpha.last() {
            None => (0..matrix.size()).map(|i| NormalizedPair { alpha: vec![i], beta: vec![i] }).collect(),
            Some(&x) => matrix
                .followers(x)
                .iter()
                .map(|&j| {
                    let mut alpha = self.alpha.clone();
                    let mut beta = self.beta.clone();
                    alpha.push(j);
                    beta.push(j);
                    NormalizedPair { alpha, beta }
                })
                .collect(),
        }
    }
}

/// Finite linear combination of basis monomials over a fixed matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraElement {
    matrix: Arc<Matrix01>,
    terms: BTreeMap<NormalizedPair, Coeff>,
}

/// `s_α s_β^*` rewritten over keys: one key if it already is one, otherwise
/// the sum over one-letter extensions that both legs allow.
fn expand_raw(matrix: &Matrix01, alpha: &[Letter], beta: &[Letter], c: &Coeff, out: &mut Vec<(NormalizedPair, Coeff)>) {
    match (alpha.last(), beta.last()) {
        (None, None) => out.push((NormalizedPair::unit(), c.clone())),
        (Some(a), Some(b)) if a == b => out.push((NormalizedPair::trusted(alpha.to_vec(), beta.to_vec()), c.clone())),
        (a, b) => {
            for j in 0..matrix.size() {
                let ok = a.is_none_or(|&a| matrix.allows(a, j)) && b.is_none_or(|&b| matrix.allows(b, j));
                if ok {
                    let mut alpha = alpha.to_vec();
                    let mut beta = beta.to_vec();
                    alpha.push(j);
                    beta.push(j);
                    out.push((NormalizedPair::trusted(alpha, beta), c.clone()));
                }
            }
        }
    }
}

fn add_into(terms: &mut BTreeMap<NormalizedPair, Coeff>, key: NormalizedPair, c: Coeff) {
    let slot = terms.entry(key).or_insert_with(Coeff::zero);
    *slot = &*slot + c;
}

fn canonicalize(matrix: &Matrix01, mut terms: BTreeMap<NormalizedPair, Coeff>) -> BTreeMap<NormalizedPair, Coeff> {
    terms.retain(|_, c| !c.is_zero());
    // push every key that contains another key down to its children
    loop {
        let mut nested = BTreeSet::new();
        for k in terms.keys() {
            let mut p = k.parent();
            while let Some(q) = p {
                if terms.contains_key(&q) {
                    nested.insert(q.clone());
                }
                p = q.parent();
            }
        }
        if nested.is_empty() {
            break;
        }
        for q in nested {
            if let Some(c) = terms.remove(&q) {
                for ch in q.children(matrix) {
                    add_into(&mut terms, ch, c.clone());
                }
            }
        }
        terms.retain(|_, c| !c.is_zero());
    }
    // merge complete sibling sets with equal coefficients, deepest first
    loop {
        let mut keys: Vec<NormalizedPair> = terms.keys().cloned().collect();
        keys.sort_by_key(|k| std::cmp::Reverse(k.alpha.len() + k.beta.len()));
        let mut tried = BTreeSet::new();
        let mut changed = false;
        for k in keys {
            let Some(c) = terms.get(&k).cloned() else { continue };
            let Some(p) = k.parent() else { continue };
            if !tried.insert(p.clone()) {
                continue;
            }
            let children = p.children(matrix);
            if children.iter().all(|ch| terms.get(ch) == Some(&c)) {
                for ch in &children {
                    terms.remove(ch);
                }
                terms.insert(p, c);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    terms
}

impl AlgebraElement {
    pub fn zero(matrix: Arc<Matrix01>) -> Self {
        AlgebraElement { matrix, terms: BTreeMap::new() }
    }

    pub fn unit(matrix: Arc<Matrix01>) -> Self {
        Self::monomial(matrix, NormalizedPair::unit())
    }

    pub fn monomial(matrix: Arc<Matrix01>, key: NormalizedPair) -> Self {
        Self::from_keys(matrix, [(key, coeff(1))])
    }

    /// Sum of keyed terms, brought to canonical form.
    pub fn from_keys(matrix: Arc<Matrix01>, terms: impl IntoIterator<Item = (NormalizedPair, Coeff)>) -> Self {
        let mut map = BTreeMap::new();
        for (k, c) in terms {
            add_into(&mut map, k, c);
        }
        let terms = canonicalize(&matrix, map);
        AlgebraElement { matrix, terms }
    }

    /// Sum of `c · s_α s_β^*` for arbitrary admissible `α`, `β`.
    pub fn from_raw(
        matrix: Arc<Matrix01>,
        terms: impl IntoIterator<Item = (Vec<Letter>, Vec<Letter>, Coeff)>,
    ) -> Result<Self, AlgebraError> {
        let mut keyed = Vec::new();
        for (alpha, beta, c) in terms {
            for w in [&alpha, &beta] {
                crate::matrix::Word::new(&matrix, w.clone())?;
            }
            expand_raw(&matrix, &alpha, &beta, &c, &mut keyed);
        }
        Ok(Self::from_keys(matrix, keyed))
    }

    /// Trusted variant of [`from_raw`](Self::from_raw) for words produced internally.
    pub(crate) fn from_raw_trusted(
        matrix: Arc<Matrix01>,
        terms: impl IntoIterator<Item = (Vec<Letter>, Vec<Letter>, Coeff)>,
    ) -> Self {
        let mut keyed = Vec::new();
        for (alpha, beta, c) in terms {
            expand_raw(&matrix, &alpha, &beta, &c, &mut keyed);
        }
        Self::from_keys(matrix, keyed)
    }

    /// `s_i`.
    pub fn generator(matrix: Arc<Matrix01>, i: Letter) -> Result<Self, AlgebraError> {
        Self::from_raw(matrix, [(vec![i], Vec::new(), coeff(1))])
    }

    /// `s_α`.
    pub fn word(matrix: Arc<Matrix01>, alpha: Vec<Letter>) -> Result<Self, AlgebraError> {
        Self::from_raw(matrix, [(alpha, Vec::new(), coeff(1))])
    }

    pub fn matrix(&self) -> &Arc<Matrix01> {
        &self.matrix
    }

    pub fn terms(&self) -> &BTreeMap<NormalizedPair, Coeff> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Whether every key is of the form `(α, α)`.
    pub fn is_diagonal(&self) -> bool {
        self.terms.keys().all(NormalizedPair::is_diagonal)
    }

    /// Degrees `|α| - |β|` present in the element.
    pub fn degrees(&self) -> BTreeSet<i64> {
        self.terms.keys().map(NormalizedPair::degree).collect()
    }

    /// Keys refined until both legs have length at least `depth`.
    pub fn refined_terms(&self, depth: usize) -> BTreeMap<NormalizedPair, Coeff> {
        let mut out = BTreeMap::new();
        let mut stack: Vec<(NormalizedPair, Coeff)> = self.terms.iter().map(|(k, c)| (k.clone(), c.clone())).collect();
        while let Some((k, c)) = stack.pop() {
            if k.alpha.len().min(k.beta.len()) >= depth {
                add_into(&mut out, k, c);
            } else {
                stack.extend(k.children(&self.matrix).into_iter().map(|ch| (ch, c.clone())));
            }
        }
        out
    }

    fn same_matrix(&self, other: &AlgebraElement) -> Result<(), AlgebraError> {
        if Arc::ptr_eq(&self.matrix, &other.matrix) || self.matrix == other.matrix {
            Ok(())
        } else {
            Err(AlgebraError::MatrixMismatch)
        }
    }

    pub fn try_add(&self, other: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        self.same_matrix(other)?;
        let terms = self.terms.iter().chain(other.terms.iter()).map(|(k, c)| (k.clone(), c.clone()));
        Ok(Self::from_keys(self.matrix.clone(), terms))
    }

    pub fn scale(&self, c: &Coeff) -> AlgebraElement {
        Self::from_keys(self.matrix.clone(), self.terms.iter().map(|(k, v)| (k.clone(), v * c)))
    }

    pub fn map_keys(&self, f: impl Fn(&NormalizedPair) -> AlgebraElement) -> AlgebraElement {
        let mut out = BTreeMap::new();
        for (k, c) in &self.terms {
            for (k2, c2) in f(k).terms {
                add_into(&mut out, k2, c2 * c);
            }
        }
        let terms = canonicalize(&self.matrix, out);
        AlgebraElement { matrix: self.matrix.clone(), terms }
    }
}

/// `s_α s_β^*` in canonical form; mismatched final letters are expanded
/// over common followers, and an empty leg over all letters.
pub fn normalize(matrix: &Arc<Matrix01>, alpha: &[Letter], beta: &[Letter]) -> Result<AlgebraElement, AlgebraError> {
    AlgebraElement::from_raw(matrix.clone(), [(alpha.to_vec(), beta.to_vec(), coeff(1))])
}

/// Product of two keys: `(αγ', δ)` if `γ = βγ'`, `(α, δβ')` if `β = γβ'`, else zero.
pub fn multiply_keys(p: &NormalizedPair, q: &NormalizedPair) -> Option<NormalizedPair> {
    let (alpha, beta, gamma, delta) = (&p.alpha, &p.beta, &q.alpha, &q.beta);
    if let Some(rest) = gamma.strip_prefix(beta.as_slice()) {
        let mut a = alpha.clone();
        a.extend_from_slice(rest);
        Some(NormalizedPair::trusted(a, delta.clone()))
    } else if let Some(rest) = beta.strip_prefix(gamma.as_slice()) {
        let mut d = delta.clone();
        d.extend_from_slice(rest);
        Some(NormalizedPair::trusted(alpha.clone(), d))
    } else {
        None
    }
}

pub fn multiply(u: &AlgebraElement, v: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
    multiply_with(u, v, multiply_keys)
}

/// Bilinear extension of an arbitrary rule on keys.
pub fn multiply_with(
    u: &AlgebraElement,
    v: &AlgebraElement,
    rule: impl Fn(&NormalizedPair, &NormalizedPair) -> Option<NormalizedPair>,
) -> Result<AlgebraElement, AlgebraError> {
    u.same_matrix(v)?;
    let mut terms = Vec::new();
    for (p, c) in &u.terms {
        for (q, d) in &v.terms {
            if let Some(r) = rule(p, q) {
                terms.push((r, c * d));
            }
        }
    }
    Ok(AlgebraElement::from_keys(u.matrix.clone(), terms))
}

/// Swaps every key and conjugates its coefficient.
pub fn adjoint(u: &AlgebraElement) -> AlgebraElement {
    AlgebraElement::from_keys(u.matrix.clone(), u.terms.iter().map(|(k, c)| (k.swapped(), c.conj())))
}

impl std::ops::Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, other: &AlgebraElement) -> AlgebraElement {
        self.try_add(other).expect("operands over the same matrix")
    }
}

impl std::ops::Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, other: &AlgebraElement) -> AlgebraElement {
        self + &-other
    }
}

impl std::ops::Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        self.scale(&-Coeff::one())
    }
}

impl std::ops::Mul for &AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, other: &AlgebraElement) -> AlgebraElement {
        multiply(self, other).expect("operands over the same matrix")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counterexample::graph_e;

    fn e() -> Arc<Matrix01> {
        Arc::new(graph_e().edge_matrix())
    }

    fn m(a: &Arc<Matrix01>, alpha: &str, beta: &str) -> AlgebraElement {
        normalize(a, &a.parse_letters(alpha).unwrap(), &a.parse_letters(beta).unwrap()).unwrap()
    }

    #[test]
    fn normalize_examples() {
        let a = e();
        let aa = m(&a, "a", "a");
        assert_eq!(aa.terms().len(), 1);
        assert_eq!(m(&a, "", ""), AlgebraElement::unit(a.clone()));
        assert!(m(&a, "c", "e").is_zero());
        // s_a s_a^* is already a key and stays one
        assert!(aa.terms().contains_key(&NormalizedPair::new(&a, vec![0], vec![0]).unwrap()));
        assert!(matches!(normalize(&a, &[0, 1], &[]), Err(AlgebraError::InadmissibleWord(_))));
    }

    #[test]
    fn multiply_examples() {
        let a = e();
        let aa = m(&a, "a", "a");
        assert_eq!(&aa * &aa, aa);
        let sa = AlgebraElement::word(a.clone(), a.parse_letters("a").unwrap()).unwrap();
        let expected = [m(&a, "c", "c"), m(&a, "d", "d"), m(&a, "e", "e"), m(&a, "f", "f")]
            .iter()
            .fold(AlgebraElement::zero(a.clone()), |acc, t| &acc + t);
        assert_eq!(&adjoint(&sa) * &sa, expected);
        assert!((&aa * &m(&a, "b", "b")).is_zero());
    }

    #[test]
    fn range_projections_sum_to_unit() {
        let a = e();
        let sum = (0..a.size()).fold(AlgebraElement::zero(a.clone()), |acc, i| {
            let s = AlgebraElement::generator(a.clone(), i).unwrap();
            &acc + &(&s * &adjoint(&s))
        });
        assert_eq!(sum, AlgebraElement::unit(a));
    }

    #[test]
    fn canonical_form_merges_and_splits() {
        let a = e();
        // s_c s_c^* = s_ca s_ca^* since a is the only follower of c
        assert_eq!(m(&a, "c", "c"), m(&a, "ca", "ca"));
        let diff = &m(&a, "c", "c") - &m(&a, "ca", "ca");
        assert!(diff.is_zero());
        // a key containing another one is split before merging
        let mixed = &m(&a, "a", "a") + &m(&a, "ac", "ac");
        assert_eq!(mixed.terms().len(), 4);
        assert_eq!(&mixed - &m(&a, "ac", "ac"), m(&a, "a", "a"));
    }

    #[test]
    fn adjoint_examples() {
        let a = e();
        let ab = m(&a, "ac", "bc");
        assert_eq!(adjoint(&ab), m(&a, "bc", "ac"));
        let i = coeff_complex(BigRational::zero(), BigRational::one());
        assert_eq!(adjoint(&ab.scale(&i)), m(&a, "bc", "ac").scale(&-i));
    }

    #[test]
    fn mismatched_matrices() {
        let a = e();
        let b = Arc::new(crate::counterexample::graph_f().edge_matrix());
        let x = AlgebraElement::unit(a);
        let y = AlgebraElement::unit(b);
        assert_eq!(multiply(&x, &y), Err(AlgebraError::MatrixMismatch));
        assert_eq!(x.try_add(&y), Err(AlgebraError::MatrixMismatch));
    }
}
