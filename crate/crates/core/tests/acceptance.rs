//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits non-zero if any failed. All comparisons are exact;
//! the sizes below are the only knobs and are fixed here.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use sftkit::algebra::{
    expectation_d, phi, tau, verify_ck_relations, verify_diagonal_expectation, AlgebraElement, InducedPsi, NormalizedPair,
};
use sftkit::amalgamation::{
    decide_one_sided_conjugacy, graphs_isomorphic, total_amalgamation, total_amalgamation_with, MergeOrder, Verdict,
};
use sftkit::counterexample::{eventual_witness, graph_e, graph_f};
use sftkit::groupoid::{verify_groupoid_axioms, InducedGroupoidMap};
use sftkit::random::*;
use sftkit::search::{search_matrices, DEFAULT_NODE_BUDGET};
use sftkit::{admissible_words, verify_conjugacy, verify_eventual_conjugacy, Conjugacy, Matrix01, Multigraph};

const SEED: u64 = 20_240_601;
/// Criteria 3 and 4: random matrices of size at most 5.
const RANDOM_MATRICES: usize = 50;
const MAX_MATRIX_SIZE: usize = 5;
const DIAGONAL_WORD_LEN: usize = 3;
const RELATION_WORD_LEN: usize = 3;
/// Criterion 5.
const ROUND_TRIP_GRAPHS: usize = 20;
const ROUND_TRIP_ELEMENTS: usize = 500;
const ROUND_TRIP_WORD_LEN: usize = 3;
/// Criterion 5 and 6 graphs stay small enough for exhaustive checks.
const SMALL_GRAPH_VERTICES: usize = 3;
const SMALL_GRAPH_MULTIPLICITY: usize = 2;
const SMALL_GRAPH_EDGES: usize = 8;
/// Criterion 6.
const ORACLE_PAIRS: usize = 30;
const ORACLE_WINDOW: usize = 3;
const ORACLE_GRAPH_EDGES: usize = 6;
/// Criterion 7.
const ORDER_GRAPHS: usize = 200;
const ORDER_VERTICES: usize = 6;
const ORDER_MULTIPLICITY: usize = 3;
/// Criterion 8.
const GROUPOID_ELEMENTS: usize = 10_000;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn small_graph(rng: &mut impl Rng, max_edges: usize) -> Multigraph {
    loop {
        let g = random_graph(rng, SMALL_GRAPH_VERTICES, SMALL_GRAPH_MULTIPLICITY);
        if g.edges().len() <= max_edges {
            return g;
        }
    }
}

/// `G` followed by one or two random out-splits, with the composed conjugacy.
fn split_pair(rng: &mut impl Rng, g: &Multigraph) -> (Multigraph, Conjugacy) {
    let first = random_out_split(rng, g);
    if rng.gen_bool(0.5) {
        let second = random_out_split(rng, &first.graph);
        let c = first.conjugacy.then(&second.conjugacy).expect("composable splits");
        (second.graph, c)
    } else {
        (first.graph, first.conjugacy)
    }
}

fn matrix_corpus() -> Vec<Arc<Matrix01>> {
    let mut rng = seeded(SEED);
    let mut corpus = vec![Arc::new(graph_e().edge_matrix()), Arc::new(graph_f().edge_matrix())];
    corpus.extend((0..RANDOM_MATRICES).map(|_| Arc::new(random_matrix(&mut rng, MAX_MATRIX_SIZE))));
    corpus
}

fn criterion_1() -> Outcome {
    let (e, f) = (graph_e(), graph_f());
    let report = decide_one_sided_conjugacy(&e, &f).map_err(|err| err.to_string())?;
    ensure(report.verdict == Verdict::NotConjugate, || "E and F reported conjugate".into())?;
    let (te, _) = total_amalgamation(&e);
    ensure(te.vertex_count() == 2 && te.edges().len() == 4, || format!("E terminal graph {:?}", te.multiplicities()))?;
    ensure(te.multiplicities() == vec![vec![0, 2], vec![2, 0]], || "E terminal graph is not 2 each way".into())?;
    let (tf, log) = total_amalgamation(&f);
    ensure(tf == f && log.is_empty(), || "F is not its own total amalgamation".into())?;
    Ok("E amalgamates to 2 vertices / 4 edges, F is terminal, verdict not-conjugate".into())
}

fn criterion_2() -> Outcome {
    let w = eventual_witness();
    let ok = verify_eventual_conjugacy(&w).map_err(|e| e.to_string())?;
    ensure(ok.passed, || format!("lag 1 failed: {:?}", ok.counterexample))?;
    let bad = verify_eventual_conjugacy(&w.with_lag(0)).map_err(|e| e.to_string())?;
    let cx = bad.counterexample.as_ref().filter(|_| !bad.passed).ok_or("lag 0 unexpectedly passed")?;
    ensure(!cx.word.is_empty(), || "empty counterexample word".into())?;
    Ok(format!("lag 1 passes ({} words); lag 0 fails on `{}` ({:?})", ok.words_checked, cx.word, cx.check))
}

fn criterion_3(corpus: &[Arc<Matrix01>]) -> Outcome {
    let mut checks = 0;
    for (i, m) in corpus.iter().enumerate() {
        let r = verify_diagonal_expectation(m, DIAGONAL_WORD_LEN);
        ensure(r.passed, || format!("matrix #{i}: {:?}", r.failures))?;
        checks += r.checks;
    }
    Ok(format!("{checks} diagonal monomials over {} matrices", corpus.len()))
}

fn criterion_4(corpus: &[Arc<Matrix01>]) -> Outcome {
    let mut checks = 0;
    for (i, m) in corpus.iter().enumerate() {
        let r = verify_ck_relations(m, RELATION_WORD_LEN);
        ensure(r.passed, || format!("matrix #{i}: {:?}", r.failures))?;
        checks += r.checks;
    }
    Ok(format!("{checks} relation instances over {} matrices", corpus.len()))
}

/// Every key `(α, β)` with `|α|, |β| ≤ len`.
fn basis(m: &Arc<Matrix01>, len: usize) -> Vec<NormalizedPair> {
    let words: Vec<Vec<usize>> = (1..=len).flat_map(|n| admissible_words(m, n)).map(|w| w.into_letters()).collect();
    let mut keys = vec![NormalizedPair::unit()];
    for a in &words {
        for b in &words {
            if a.last() == b.last() {
                keys.push(NormalizedPair::new(m, a.clone(), b.clone()).expect("admissible"));
            }
        }
    }
    keys
}

fn criterion_5() -> Outcome {
    let mut rng = seeded(SEED + 5);
    let (mut elements, mut monomials) = (0, 0);
    for t in 0..ROUND_TRIP_GRAPHS {
        let g = small_graph(&mut rng, SMALL_GRAPH_EDGES);
        let (split, c) = split_pair(&mut rng, &g);
        let report = decide_one_sided_conjugacy(&g, &split).map_err(|e| e.to_string())?;
        ensure(report.verdict == Verdict::Conjugate, || format!("graph #{t}: split reported not conjugate"))?;
        let v = verify_conjugacy(c.witness()).map_err(|e| e.to_string())?;
        ensure(v.passed, || format!("graph #{t}: split witness fails {:?}", v.counterexample))?;

        let a = c.forward().source().clone();
        let phi_map = InducedGroupoidMap::new(c.clone());
        for _ in 0..ROUND_TRIP_ELEMENTS {
            let x = random_element(&mut rng, &a);
            let y = phi_map.apply(&x).map_err(|e| e.to_string())?;
            ensure(y.cocycle() == x.cocycle(), || format!("graph #{t}: cocycle changed"))?;
            let lhs = phi_map.apply(&x.epsilon()).map_err(|e| e.to_string())?;
            ensure(lhs == y.epsilon(), || format!("graph #{t}: Φ∘ε ≠ ε∘Φ"))?;
            elements += 1;
        }

        let psi = InducedPsi::new(c.clone());
        let p = |u: &AlgebraElement| psi.apply(u).map_err(|e| e.to_string());
        for key in basis(&a, ROUND_TRIP_WORD_LEN) {
            let u = AlgebraElement::monomial(a.clone(), key.clone());
            let pu = p(&u)?;
            ensure(p(&tau(&u))? == tau(&pu), || format!("graph #{t}: Ψ∘τ ≠ τ∘Ψ at {}", u.display()))?;
            ensure(pu.degrees().iter().all(|&d| d == key.degree()), || {
                format!("graph #{t}: degree not preserved at {}", u.display())
            })?;
            ensure(p(&expectation_d(&u))? == expectation_d(&pu), || format!("graph #{t}: Ψ∘d ≠ d∘Ψ"))?;
            if key.is_diagonal() {
                ensure(pu.is_diagonal(), || format!("graph #{t}: Ψ({}) not diagonal", u.display()))?;
                ensure(p(&phi(&u))? == phi(&pu), || format!("graph #{t}: Ψ∘φ ≠ φ∘Ψ at {}", u.display()))?;
            }
            monomials += 1;
        }
    }
    Ok(format!(
        "{ROUND_TRIP_GRAPHS} split pairs conjugate; Φ checked on {elements} elements, Ψ on {monomials} monomials"
    ))
}

fn criterion_6() -> Outcome {
    let mut rng = seeded(SEED + 6);
    let (mut found, mut incomplete, mut conjugate_verdicts) = (0, 0, 0);
    for t in 0..ORACLE_PAIRS {
        let g1 = small_graph(&mut rng, ORACLE_GRAPH_EDGES);
        let g2 = if t % 2 == 0 { split_pair(&mut rng, &g1).0 } else { small_graph(&mut rng, ORACLE_GRAPH_EDGES) };
        let report = decide_one_sided_conjugacy(&g1, &g2).map_err(|e| e.to_string())?;
        if report.verdict == Verdict::Conjugate {
            conjugate_verdicts += 1;
        }
        if t % 2 == 0 {
            ensure(report.verdict == Verdict::Conjugate, || format!("pair #{t}: split reported not conjugate"))?;
        }
        let (a, b) = (Arc::new(g1.edge_matrix()), Arc::new(g2.edge_matrix()));
        let out = search_matrices(&a, &b, ORACLE_WINDOW, DEFAULT_NODE_BUDGET).map_err(|e| e.to_string())?;
        if !out.complete {
            incomplete += 1;
        }
        if let Some(w) = out.witness {
            found += 1;
            ensure(verify_conjugacy(&w).map(|v| v.passed).unwrap_or(false), || format!("pair #{t}: bad witness"))?;
            ensure(report.verdict == Verdict::Conjugate, || format!("pair #{t}: oracle contradicts decision"))?;
        }
    }
    Ok(format!(
        "{found} oracle witnesses, all with verdict conjugate ({conjugate_verdicts} conjugate verdicts of {ORACLE_PAIRS}; {incomplete} searches hit the node budget)"
    ))
}

fn criterion_7() -> Outcome {
    let mut rng = seeded(SEED + 7);
    for t in 0..ORDER_GRAPHS {
        let g = random_graph(&mut rng, ORDER_VERTICES, ORDER_MULTIPLICITY);
        let (first, _) = total_amalgamation_with(&g, MergeOrder::First);
        let (last, _) = total_amalgamation_with(&g, MergeOrder::Last);
        let same = graphs_isomorphic(&first, &last).map_err(|e| e.to_string())?.is_some();
        ensure(same, || format!("graph #{t}: merge orders disagree"))?;
    }
    Ok(format!("{ORDER_GRAPHS} graphs, first-pair and last-pair orders agree"))
}

fn criterion_8() -> Outcome {
    let mut rng = seeded(SEED + 8);
    let one = Multigraph::from_triples(1, &[("x", 1, 1)]).expect("loop");
    let mut checks = 0;
    for (name, g) in [("E", graph_e()), ("F", graph_f()), ("1-loop", one)] {
        let r = verify_groupoid_axioms(&g.edge_matrix(), GROUPOID_ELEMENTS, &mut rng);
        ensure(r.passed, || format!("{name}: {:?}", r.failures))?;
        checks += r.checks;
    }
    Ok(format!("{GROUPOID_ELEMENTS} random triples per graph on E, F, 1-loop ({checks} checks)"))
}

fn main() -> ExitCode {
    let corpus = matrix_corpus();
    let criteria: Vec<Criterion> = vec![
        ("non-conjugacy of E and F", Box::new(criterion_1)),
        ("eventual conjugacy witness", Box::new(criterion_2)),
        ("d∘τ = φ on the diagonal", Box::new(|| criterion_3(&corpus))),
        ("Cuntz-Krieger relations", Box::new(|| criterion_4(&corpus))),
        ("induced Φ and Ψ on out-splits", Box::new(criterion_5)),
        ("oracle agreement", Box::new(criterion_6)),
        ("merge order invariance", Box::new(criterion_7)),
        ("groupoid axioms and ε", Box::new(criterion_8)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} PASS: {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL: {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
