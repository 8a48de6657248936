use std::sync::Arc;

use serde::Serialize;

use super::{adjoint, expectation_d, multiply_keys, multiply_with, normalize, phi, tau, AlgebraElement, NormalizedPair};
use crate::matrix::{admissible_words, Matrix01};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationReport {
    pub passed: bool,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl RelationReport {
    fn new() -> Self {
        RelationReport { passed: true, checks: 0, failures: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.passed = false;
            if self.failures.len() < 20 {
                self.failures.push(what());
            }
        }
    }
}

pub fn verify_ck_relations(matrix: &Arc<Matrix01>, max_len: usize) -> RelationReport {
    verify_ck_relations_with(matrix, max_len, multiply_keys)
}

/// For all words `α ≠ β` of equal length `≤ max_len`: `s_α^* s_β = 0` and
/// `s_α^* s_α = Σ_j A(last α, j) s_j s_j^*`; and `Σ_i s_i s_i^* = 1`. The
/// product rule on keys is a parameter so that a broken rule can be shown
/// to fail.
pub fn verify_ck_relations_with(
    matrix: &Arc<Matrix01>,
    max_len: usize,
    rule: impl Fn(&NormalizedPair, &NormalizedPair) -> Option<NormalizedPair> + Copy,
) -> RelationReport {
    let mut report = RelationReport::new();
    let mul = |u: &AlgebraElement, v: &AlgebraElement| multiply_with(u, v, rule).expect("same matrix");
    let show = |w: &[usize]| matrix.format_letters(w);
    for len in 1..=max_len.max(1) {
        let words = admissible_words(matrix, len);
        let s: Vec<AlgebraElement> = words
            .iter()
            .map(|w| AlgebraElement::word(matrix.clone(), w.letters().to_vec()).expect("admissible"))
            .collect();
        for (x, sx) in words.iter().zip(&s) {
            for (y, sy) in words.iter().zip(&s) {
                let product = mul(&adjoint(sx), sy);
                if x == y {
                    let last = x.last().expect("nonempty");
                    let range = matrix
                        .followers(last)
                        .iter()
                        .map(|&j| normalize(matrix, &[j], &[j]).expect("letter"))
                        .fold(AlgebraElement::zero(matrix.clone()), |acc, t| &acc + &t);
                    report.check(product == range, || {
                        format!("s_{0}^* s_{0} is not the range projection of {0}", show(x.letters()))
                    });
                } else {
                    report.check(product.is_zero(), || {
                        format!("s_{}^* s_{} is nonzero", show(x.letters()), show(y.letters()))
                    });
                }
            }
        }
    }
    let total = (0..matrix.size()).fold(AlgebraElement::zero(matrix.clone()), |acc, i| {
        let si = AlgebraElement::generator(matrix.clone(), i).expect("letter");
        &acc + &mul(&si, &adjoint(&si))
    });
    report.check(total == AlgebraElement::unit(matrix.clone()), || "Σ_i s_i s_i^* is not the unit".to_string());
    report
}

/// `d_A(τ_A(f)) = φ_A(f)` for `f = 1` and every `f = s_α s_α^*` with `|α| ≤ max_len`.
pub fn verify_diagonal_expectation(matrix: &Arc<Matrix01>, max_len: usize) -> RelationReport {
    let mut report = RelationReport::new();
    let one = AlgebraElement::unit(matrix.clone());
    report.check(expectation_d(&tau(&one)) == phi(&one), || "d(τ(1)) differs from φ(1)".to_string());
    for len in 1..=max_len.max(1) {
        for w in admissible_words(matrix, len) {
            let f = normalize(matrix, w.letters(), w.letters()).expect("admissible");
            report.check(expectation_d(&tau(&f)) == phi(&f), || {
                format!("d(τ(f)) differs from φ(f) at α = {}", matrix.format_letters(w.letters()))
            });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counterexample::{graph_e, graph_f};

    #[test]
    fn relations_hold() {
        for g in [graph_e(), graph_f()] {
            let m = Arc::new(g.edge_matrix());
            let r = verify_ck_relations(&m, 2);
            assert!(r.passed, "{:?}", r.failures);
            assert!(r.checks > 12);
        }
        let one = Arc::new(crate::matrix::validate_matrix(&[vec![1]]).unwrap());
        assert!(verify_ck_relations(&one, 3).passed);
        let s = AlgebraElement::generator(one.clone(), 0).unwrap();
        assert_eq!(&adjoint(&s) * &s, AlgebraElement::unit(one.clone()));
        assert_eq!(&s * &adjoint(&s), AlgebraElement::unit(one));
    }

    #[test]
    fn broken_rule_is_caught() {
        let m = Arc::new(graph_e().edge_matrix());
        // pairs that neither extend each other still multiply when their outer letters agree
        let leaky = |p: &NormalizedPair, q: &NormalizedPair| {
            multiply_keys(p, q).or_else(|| {
                (p.alpha().last() == q.beta().last())
                    .then(|| NormalizedPair::trusted(p.alpha().to_vec(), q.beta().to_vec()))
            })
        };
        let r = verify_ck_relations_with(&m, 1, leaky);
        assert!(!r.passed);
        assert!(!r.failures.is_empty());
    }

    #[test]
    fn diagonal_expectation_holds() {
        for g in [graph_e(), graph_f()] {
            let m = Arc::new(g.edge_matrix());
            let r = verify_diagonal_expectation(&m, 3);
            assert!(r.passed, "{:?}", r.failures);
        }
    }
}
