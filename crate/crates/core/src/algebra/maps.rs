use std::collections::{BTreeMap, HashMap};

use num::{One, Zero};

use super::{coeff, AlgebraElement, AlgebraError, Coeff, NormalizedPair};
use crate::code::{CodeError, SlidingBlockCode};
use crate::matrix::{Letter, Matrix01};
use crate::witness::{Conjugacy, ConjugacyWitness};

/// Letters `j` with `A(j, w_0) = 1`, or every letter when `w` is empty.
fn extenders(matrix: &Matrix01, w: &[Letter]) -> Vec<Letter> {
    match w.first() {
        Some(&x) => matrix.predecessors(x).to_vec(),
        None => (0..matrix.size()).collect(),
    }
}

fn prepend(j: Letter, w: &[Letter]) -> Vec<Letter> {
    let mut v = Vec::with_capacity(w.len() + 1);
    v.push(j);
    v.extend_from_slice(w);
    v
}

/// `τ_A(y) = s y s^*` with `s = Σ_i s_i`.
pub fn tau(u: &AlgebraElement) -> AlgebraElement {
    let m = u.matrix().clone();
    u.map_keys(|k| {
        let mut raw = Vec::new();
        for j in extenders(&m, k.alpha()) {
            for i in extenders(&m, k.beta()) {
                raw.push((prepend(j, k.alpha()), prepend(i, k.beta()), coeff(1)));
            }
        }
        AlgebraElement::from_raw_trusted(m.clone(), raw)
    })
}

/// `φ_A(y) = Σ_i s_i y s_i^*`.
pub fn phi(u: &AlgebraElement) -> AlgebraElement {
    let m = u.matrix().clone();
    u.map_keys(|k| {
        let raw = (0..m.size())
            .filter(|&i| {
                k.alpha().first().is_none_or(|&a| m.allows(i, a)) && k.beta().first().is_none_or(|&b| m.allows(i, b))
            })
            .map(|i| (prepend(i, k.alpha()), prepend(i, k.beta()), coeff(1)));
        AlgebraElement::from_raw_trusted(m.clone(), raw)
    })
}

/// The conditional expectation onto the diagonal: keeps the `(α, α)` terms.
pub fn expectation_d(u: &AlgebraElement) -> AlgebraElement {
    let kept = u.terms().iter().filter(|(k, _)| k.is_diagonal()).map(|(k, c)| (k.clone(), c.clone()));
    AlgebraElement::from_keys(u.matrix().clone(), kept)
}

/// Homogeneous components by degree `|α| - |β|`.
pub fn gauge_degree_split(u: &AlgebraElement) -> BTreeMap<i64, AlgebraElement> {
    let mut parts: BTreeMap<i64, Vec<(NormalizedPair, Coeff)>> = BTreeMap::new();
    for (k, c) in u.terms() {
        parts.entry(k.degree()).or_default().push((k.clone(), c.clone()));
    }
    parts.into_iter().map(|(d, t)| (d, AlgebraElement::from_keys(u.matrix().clone(), t))).collect()
}

/// `γ_z(u)`: scales each degree-`d` component by `z^d`. `z` must be nonzero.
pub fn gauge_act(u: &AlgebraElement, z: &Coeff) -> AlgebraElement {
    assert!(!z.is_zero(), "gauge parameter must be nonzero");
    let zinv = Coeff::one() / z;
    let power = |d: i64| {
        let base = if d < 0 { &zinv } else { z };
        (0..d.unsigned_abs()).fold(Coeff::one(), |acc, _| acc * base)
    };
    let terms = u.terms().iter().map(|(k, c)| (k.clone(), c * power(k.degree())));
    AlgebraElement::from_keys(u.matrix().clone(), terms)
}

/// Preimage words grouped by their last letters.
type ByTail = BTreeMap<Vec<Letter>, Vec<Vec<Letter>>>;

/// The *-isomorphism `Ψ(f) = f ∘ Φ^{-1}` induced by a conjugacy `h`.
///
/// `Φ^{-1}(x', n, y')` lies in `Z(α, β)` iff `h^{-1}x' ∈ Z_α`, `h^{-1}y' ∈ Z_β`
/// and `σ^{|α|}x' = σ^{|β|}y'`. The first two conditions only read the first
/// `|α| + a` and `|β| + a` letters, `a` the anticipation of `h^{-1}`, so the
/// image is a sum of monomials `s_P s_Q^*` over such prefixes `P`, `Q` that
/// share their last `a` letters.
#[derive(Debug, Clone)]
pub struct InducedPsi {
    conjugacy: Conjugacy,
}

impl InducedPsi {
    pub fn new(conjugacy: Conjugacy) -> Self {
        InducedPsi { conjugacy }
    }

    pub fn conjugacy(&self) -> &Conjugacy {
        &self.conjugacy
    }

    pub fn apply(&self, u: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        self.image_of_terms(u, u.terms().iter().map(|(k, c)| (k.clone(), c.clone())).collect())
    }

    /// Same map, computed after refining every key until both legs have at
    /// least `depth` letters. The result does not depend on `depth`.
    pub fn apply_refined(&self, u: &AlgebraElement, depth: usize) -> Result<AlgebraElement, AlgebraError> {
        self.image_of_terms(u, u.refined_terms(depth).into_iter().collect())
    }

    fn image_of_terms(&self, u: &AlgebraElement, terms: Vec<(NormalizedPair, Coeff)>) -> Result<AlgebraElement, AlgebraError> {
        let fwd = self.conjugacy.forward();
        if **u.matrix() != **fwd.source() {
            return Err(AlgebraError::MatrixMismatch);
        }
        let target = fwd.target().clone();
        let inverse = self.conjugacy.backward();
        let lag = inverse.anticipation();
        let mut cache: HashMap<Vec<Letter>, ByTail> = HashMap::new();
        let mut by_tail = |w: &[Letter]| -> Result<ByTail, AlgebraError> {
            if let Some(hit) = cache.get(w) {
                return Ok(hit.clone());
            }
            let mut found = Vec::new();
            preimages(inverse, &target, w, &mut Vec::new(), &mut found)?;
            let mut grouped: BTreeMap<Vec<Letter>, Vec<Vec<Letter>>> = BTreeMap::new();
            for p in found {
                grouped.entry(p[p.len() - lag..].to_vec()).or_default().push(p);
            }
            cache.insert(w.to_vec(), grouped.clone());
            Ok(grouped)
        };
        let mut raw = Vec::new();
        for (k, c) in &terms {
            let ps = by_tail(k.alpha())?;
            let qs = by_tail(k.beta())?;
            for (tail, ps) in &ps {
                let Some(qs) = qs.get(tail) else { continue };
                for p in ps {
                    for q in qs {
                        raw.push((p.clone(), q.clone(), c.clone()));
                    }
                }
            }
        }
        Ok(AlgebraElement::from_raw_trusted(target, raw))
    }
}

/// Admissible words `P` of length `|α| + a` whose image under `g` begins with `α`.
fn preimages(
    g: &SlidingBlockCode,
    target: &Matrix01,
    alpha: &[Letter],
    current: &mut Vec<Letter>,
    out: &mut Vec<Vec<Letter>>,
) -> Result<(), CodeError> {
    let len = alpha.len() + g.anticipation();
    if current.len() == len {
        out.push(current.clone());
        return Ok(());
    }
    let candidates: Vec<Letter> = match current.last() {
        Some(&x) => target.followers(x).to_vec(),
        None => (0..target.size()).collect(),
    };
    for y in candidates {
        current.push(y);
        let ok = match (current.len() - 1).checked_sub(g.anticipation()) {
            Some(k) if k < alpha.len() => g.output_at(current, k)? == alpha[k],
            _ => true,
        };
        if ok {
            preimages(g, target, alpha, current, out)?;
        }
        current.pop();
    }
    Ok(())
}

/// `Ψ(u)` for a witness that must verify first.
pub fn induced_psi(w: &ConjugacyWitness, u: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
    let c = w.clone().into_conjugacy().map_err(|_| AlgebraError::Unverified)?;
    InducedPsi::new(c).apply(u)
}
