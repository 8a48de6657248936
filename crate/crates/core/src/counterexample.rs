//! Two edge shifts, `X_E` and `X_F`, that are eventually conjugate but not
//! conjugate, with the explicit witness `h` and its inverse.
//!
//! `h` primes every letter, except that the letter following an `e` becomes
//! `a'`. It has memory 1 and a special rule at coordinate 0.

use std::sync::Arc;

use crate::code::SlidingBlockCode;
use crate::format::{parse_presentation, Presentation};
use crate::graph::Multigraph;
use crate::matrix::{Letter, Matrix01};
use crate::witness::EventualConjugacyWitness;

pub const GRAPH_E: &str = include_str!("../data/E.graph");
pub const GRAPH_F: &str = include_str!("../data/F.graph");
pub const WITNESS_EF: &str = include_str!("../data/EF.witness");

fn graph(text: &str) -> Multigraph {
    match parse_presentation(text).expect("embedded graph parses") {
        Presentation::Graph { graph, .. } => graph,
        Presentation::Matrix { .. } => unreachable!("embedded data is a graph"),
    }
}

pub fn graph_e() -> Multigraph {
    graph(GRAPH_E)
}

pub fn graph_f() -> Multigraph {
    graph(GRAPH_F)
}

fn shifts() -> (Arc<Matrix01>, Arc<Matrix01>) {
    (Arc::new(graph_e().edge_matrix()), Arc::new(graph_f().edge_matrix()))
}

fn primed(e: &Matrix01, f: &Matrix01, x: Letter) -> Letter {
    f.letter(&format!("{}'", e.label(x))).expect("F labels are primed E labels")
}

fn unprimed(f: &Matrix01, e: &Matrix01, y: Letter) -> Letter {
    e.letter(f.label(y).trim_end_matches('\'')).expect("F labels are primed E labels")
}

/// `y_0 = x_0'`, and for `n > 0`: `y_n = a'` if `x_{n-1} = e`, else `x_n'`.
pub fn code_h() -> SlidingBlockCode {
    let (e, f) = shifts();
    let (le, la) = (e.letter("e").unwrap(), f.letter("a'").unwrap());
    SlidingBlockCode::from_fn(
        "h",
        e.clone(),
        f.clone(),
        1,
        0,
        |w| if w[0] == le { la } else { primed(&e, &f, w[1]) },
        |_, w| primed(&e, &f, w[0]),
    )
    .expect("h is total")
}

/// `x_0 = unprime(y_0)`, and for `n > 0`: `x_n = b` if `y_{n-1} = e'`, else `unprime(y_n)`.
pub fn code_h_inverse() -> SlidingBlockCode {
    let (e, f) = shifts();
    let (le, lb) = (f.letter("e'").unwrap(), e.letter("b").unwrap());
    SlidingBlockCode::from_fn(
        "hinv",
        f.clone(),
        e.clone(),
        1,
        0,
        |w| if w[0] == le { lb } else { unprimed(&f, &e, w[1]) },
        |_, w| unprimed(&f, &e, w[0]),
    )
    .expect("h inverse is total")
}

/// Drops the primes letter by letter. Not well defined: `e'a'` maps to `ea`.
pub fn code_unprime() -> SlidingBlockCode {
    let (e, f) = shifts();
    SlidingBlockCode::from_fn("unprime", f.clone(), e.clone(), 0, 0, |w| unprimed(&f, &e, w[0]), |_, _| unreachable!())
        .expect("unprime is total")
}

/// `(h, h^{-1})` with lag 1.
pub fn eventual_witness() -> EventualConjugacyWitness {
    EventualConjugacyWitness::new(code_h(), code_h_inverse(), 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::{parse_witness, write_code, ParsedWitness};

    #[test]
    fn shipped_witness_file_matches_construction() {
        let (e, f) = shifts();
        let parsed = parse_witness(WITNESS_EF, &[("E", e), ("F", f)]).unwrap();
        match parsed.witness {
            ParsedWitness::Eventual(w) => assert_eq!(w, eventual_witness()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn shipped_witness_file_is_serialized_form() {
        let mut text = String::from("# Eventual conjugacy X_E -> X_F with lag 1.\n");
        text.push_str(&write_code(&code_h(), "E", "F"));
        text.push_str(&write_code(&code_h_inverse(), "F", "E"));
        text.push_str("witness eventual h hinv lag 1\n");
        assert_eq!(text, WITNESS_EF);
    }
}
