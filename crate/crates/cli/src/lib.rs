//! Command logic for the `sftkit` binary. Every command returns a
//! [`RunReport`]; `main` only parses arguments, renders and sets the exit code.

use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use sftkit::algebra::{verify_ck_relations, verify_diagonal_expectation};
use sftkit::amalgamation::{total_amalgamation_with, MergeOrder, Verdict};
use sftkit::counterexample::{GRAPH_E, GRAPH_F, WITNESS_EF};
use sftkit::format::{parse_presentation, parse_witness, write_graph, ParseError, ParsedWitness, Presentation};
use sftkit::graph::GraphSummary;
use sftkit::random::seeded;
use sftkit::{
    decide_one_sided_conjugacy, verify_conjugacy, verify_eventual_conjugacy, verify_groupoid_axioms,
    DecisionReport, EventualConjugacyWitness, Matrix01, Verification,
};

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_MAX_WORD_LEN: usize = 3;
pub const DEFAULT_TRIALS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputFile {
    pub path: String,
    pub sha256: String,
}

impl InputFile {
    fn new(path: impl Into<String>, bytes: &[u8]) -> Self {
        InputFile { path: path.into(), sha256: hex::encode(Sha256::digest(bytes)) }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub seed: u64,
    pub inputs: Vec<InputFile>,
    pub passed: bool,
    pub verdict: String,
    pub payload: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u128>,
    /// Human-readable body for `--format text`.
    #[serde(skip)]
    pub lines: Vec<String>,
}

impl RunReport {
    fn new(command: &str, seed: u64, inputs: Vec<InputFile>) -> Self {
        RunReport {
            command: command.to_string(),
            seed,
            inputs,
            passed: false,
            verdict: String::new(),
            payload: Value::Null,
            wall_time_ms: None,
            lines: Vec::new(),
        }
    }

    fn finish(mut self, passed: bool, verdict: &str, payload: Value) -> Self {
        self.passed = passed;
        self.verdict = verdict.to_string();
        self.payload = payload;
        self
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("command: {}\nseed: {}\n", self.command, self.seed);
        for i in &self.inputs {
            out.push_str(&format!("input: {} sha256={}\n", i.path, i.sha256));
        }
        for l in &self.lines {
            out.push_str(l);
            out.push('\n');
        }
        out.push_str(&format!("verdict: {}\n", self.verdict));
        if let Some(ms) = self.wall_time_ms {
            out.push_str(&format!("wall time: {ms} ms\n"));
        }
        out
    }
}

/// Runs `f` and records the wall time when `timing` is set. Reports stay
/// byte-stable without it.
pub fn timed(timing: bool, f: impl FnOnce() -> Result<RunReport>) -> Result<RunReport> {
    let start = Instant::now();
    let mut report = f()?;
    if timing {
        report.wall_time_ms = Some(start.elapsed().as_millis());
    }
    Ok(report)
}

pub struct Loaded {
    pub input: InputFile,
    pub text: String,
}

pub fn load(path: &Path) -> Result<Loaded> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let input = InputFile::new(path.display().to_string(), &bytes);
    let text = String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))?;
    Ok(Loaded { input, text })
}

fn embedded(name: &str, text: &str) -> Loaded {
    Loaded { input: InputFile::new(format!("embedded:{name}"), text.as_bytes()), text: text.to_string() }
}

fn presentation(file: &Loaded) -> Result<Presentation> {
    parse_presentation(&file.text).map_err(|e| anyhow!("{}: {e}", file.input.path))
}

fn describe(p: &Presentation) -> Vec<String> {
    match p {
        Presentation::Graph { name, graph } => {
            vec![format!("graph {name}: {} vertices, {} edges", graph.vertex_count(), graph.edges().len())]
        }
        Presentation::Matrix { name, matrix } => vec![format!("matrix {name}: {0}x{0}", matrix.size())],
    }
}

pub fn cmd_validate(path: &Path, seed: u64) -> Result<RunReport> {
    let file = load(path)?;
    let report = RunReport::new("validate", seed, vec![file.input.clone()]);
    match parse_presentation(&file.text) {
        Ok(p) => {
            let m = p.shift_matrix();
            let payload = match &p {
                Presentation::Graph { name, graph } => json!({
                    "kind": "graph",
                    "name": name,
                    "graph": GraphSummary::from(graph),
                    "letters": m.size(),
                }),
                Presentation::Matrix { name, matrix } => json!({
                    "kind": "matrix",
                    "name": name,
                    "size": matrix.size(),
                    "rows": matrix.rows(),
                }),
            };
            let mut r = report.finish(true, "valid", payload);
            r.lines = describe(&p);
            Ok(r)
        }
        Err(e @ (ParseError::Graph(_) | ParseError::Matrix(_))) => {
            let mut r = report.finish(false, "invalid", json!({ "error": e.to_string() }));
            r.lines.push(format!("error: {e}"));
            Ok(r)
        }
        Err(e) => Err(anyhow!("{}: {e}", file.input.path)),
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Conjugate => "conjugate",
        Verdict::NotConjugate => "not-conjugate",
    }
}

fn decision_lines(d: &DecisionReport) -> Vec<String> {
    let mut lines = Vec::new();
    for (label, t, moves) in [("A", &d.terminal_a, &d.moves_a), ("B", &d.terminal_b, &d.moves_b)] {
        lines.push(format!(
            "{label}: {} merges, terminal graph has {} vertices and {} edges {:?}",
            moves.len(),
            t.vertices,
            t.edge_count,
            t.multiplicities
        ));
        for m in moves {
            lines.push(format!(
                "  merge {} into {} (dropped {}) -> {} vertices",
                m.merged.1,
                m.merged.0,
                m.dropped_edges.join(","),
                m.vertices_after
            ));
        }
    }
    match &d.bijection {
        Some(b) => lines.push(format!("isomorphism of terminal graphs: {b:?}")),
        None => lines.push("terminal graphs are not isomorphic".to_string()),
    }
    lines
}

fn conjugacy_of(a: &Loaded, b: &Loaded) -> Result<DecisionReport> {
    let (pa, pb) = (presentation(a)?, presentation(b)?);
    Ok(decide_one_sided_conjugacy(&pa.edge_graph(), &pb.edge_graph())?)
}

pub fn cmd_conjugacy(a: &Path, b: &Path, seed: u64) -> Result<RunReport> {
    let (a, b) = (load(a)?, load(b)?);
    let d = conjugacy_of(&a, &b)?;
    let report = RunReport::new("conjugacy", seed, vec![a.input, b.input]);
    let mut r = report.finish(d.verdict == Verdict::Conjugate, verdict_name(d.verdict), serde_json::to_value(&d)?);
    r.lines = decision_lines(&d);
    Ok(r)
}

/// Shifts known to a witness file, by presentation name.
fn witness_shifts(a: &Presentation, b: &Presentation, names: Option<(&str, &str)>) -> Result<Vec<(String, Arc<Matrix01>)>> {
    let (ma, mb) = (Arc::new(a.shift_matrix()), Arc::new(b.shift_matrix()));
    let (na, nb) = names.unwrap_or((a.name(), b.name()));
    if na == nb && ma != mb {
        bail!("both shifts are named `{na}` but differ");
    }
    Ok(vec![(na.to_string(), ma), (nb.to_string(), mb)])
}

enum Checked {
    Eventual(Verification),
    Conjugacy(Verification),
}

fn check_witness(
    a: &Presentation,
    b: &Presentation,
    witness: &Loaded,
    names: Option<(&str, &str)>,
    lag: Option<usize>,
) -> Result<Checked> {
    let shifts = witness_shifts(a, b, names)?;
    let refs: Vec<(&str, Arc<Matrix01>)> = shifts.iter().map(|(n, m)| (n.as_str(), m.clone())).collect();
    let parsed = parse_witness(&witness.text, &refs).map_err(|e| anyhow!("{}: {e}", witness.input.path))?;
    let (fwd, bwd) = match &parsed.witness {
        ParsedWitness::Conjugacy(w) => (&w.forward, &w.backward),
        ParsedWitness::Eventual(w) => (&w.forward, &w.backward),
    };
    if fwd.source() != &shifts[0].1 || fwd.target() != &shifts[1].1 {
        bail!("forward code `{}` does not map {} to {}", fwd.name(), shifts[0].0, shifts[1].0);
    }
    if bwd.source() != &shifts[1].1 || bwd.target() != &shifts[0].1 {
        bail!("backward code `{}` does not map {} to {}", bwd.name(), shifts[1].0, shifts[0].0);
    }
    Ok(match (parsed.witness, lag) {
        (ParsedWitness::Conjugacy(w), None) => Checked::Conjugacy(verify_conjugacy(&w)?),
        (ParsedWitness::Conjugacy(w), Some(l)) => {
            Checked::Eventual(verify_eventual_conjugacy(&EventualConjugacyWitness::new(w.forward, w.backward, l))?)
        }
        (ParsedWitness::Eventual(w), l) => {
            let l = l.unwrap_or(w.lag);
            Checked::Eventual(verify_eventual_conjugacy(&w.with_lag(l))?)
        }
    })
}

fn verification_lines(v: &Verification) -> Vec<String> {
    let mut lines = vec![format!("lag {}: {} words checked", v.lag.unwrap_or(0), v.words_checked)];
    if let Some(cx) = &v.counterexample {
        let mut l = format!("counterexample: {:?} on `{}`", cx.check, cx.word);
        if let Some(c) = cx.coordinate {
            l.push_str(&format!(" at coordinate {c}"));
        }
        if let (Some(e), Some(f)) = (&cx.expected, &cx.found) {
            l.push_str(&format!(", expected `{e}`, found `{f}`"));
        }
        lines.push(l);
    }
    lines
}

fn checked_verdict(c: &Checked) -> (&Verification, &'static str) {
    match c {
        Checked::Eventual(v) if v.passed => (v, "eventually-conjugate"),
        Checked::Conjugacy(v) if v.passed => (v, "conjugate"),
        Checked::Eventual(v) | Checked::Conjugacy(v) => (v, "witness-rejected"),
    }
}

pub fn cmd_eventual(a: &Path, b: &Path, witness: &Path, lag: Option<usize>, seed: u64) -> Result<RunReport> {
    let (a, b, w) = (load(a)?, load(b)?, load(witness)?);
    let (pa, pb) = (presentation(&a)?, presentation(&b)?);
    let checked = check_witness(&pa, &pb, &w, None, lag)?;
    let (v, verdict) = checked_verdict(&checked);
    let report = RunReport::new("eventual-check", seed, vec![a.input, b.input, w.input]);
    let mut r = report.finish(v.passed, verdict, serde_json::to_value(v)?);
    r.lines = verification_lines(v);
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Order {
    First,
    Last,
}

pub fn cmd_amalgamate(path: &Path, order: Order, seed: u64) -> Result<RunReport> {
    let file = load(path)?;
    let p = presentation(&file)?;
    let order = match order {
        Order::First => MergeOrder::First,
        Order::Last => MergeOrder::Last,
    };
    let (terminal, moves) = total_amalgamation_with(&p.edge_graph(), order);
    let text = write_graph(&format!("{}_terminal", p.name()), &terminal);
    let payload = json!({
        "moves": moves,
        "terminal": GraphSummary::from(&terminal),
        "terminal_file": text,
    });
    let report = RunReport::new("amalgamate", seed, vec![file.input]);
    let mut r = report.finish(true, "amalgamated", payload);
    r.lines.push(format!("{} merges", moves.len()));
    for m in &moves {
        r.lines.push(format!("  merge {} into {} -> {} vertices", m.merged.1, m.merged.0, m.vertices_after));
    }
    r.lines.extend(text.lines().map(str::to_string));
    Ok(r)
}

pub fn cmd_groupoid_verify(path: &Path, trials: usize, seed: u64) -> Result<RunReport> {
    let file = load(path)?;
    let p = presentation(&file)?;
    let axioms = verify_groupoid_axioms(&p.shift_matrix(), trials, &mut seeded(seed));
    let report = RunReport::new("groupoid-check", seed, vec![file.input]);
    let verdict = if axioms.passed { "pass" } else { "fail" };
    let mut r = report.finish(axioms.passed, verdict, serde_json::to_value(&axioms)?);
    r.lines.push(format!("{} trials, {} checks", axioms.trials, axioms.checks));
    r.lines.extend(axioms.failures.iter().cloned());
    Ok(r)
}

pub fn cmd_ck_verify(path: &Path, max_word_len: usize, seed: u64) -> Result<RunReport> {
    let file = load(path)?;
    let p = presentation(&file)?;
    let m = Arc::new(p.shift_matrix());
    let relations = verify_ck_relations(&m, max_word_len);
    let diagonal = verify_diagonal_expectation(&m, max_word_len);
    let passed = relations.passed && diagonal.passed;
    let payload = json!({ "max_word_len": max_word_len, "relations": relations, "diagonal": diagonal });
    let report = RunReport::new("ck-check", seed, vec![file.input]);
    let mut r = report.finish(passed, if passed { "pass" } else { "fail" }, payload);
    r.lines.push(format!("relations: {} checks, passed {}", relations.checks, relations.passed));
    r.lines.push(format!("d∘τ = φ on the diagonal: {} checks, passed {}", diagonal.checks, diagonal.passed));
    r.lines.extend(relations.failures.iter().chain(&diagonal.failures).cloned());
    Ok(r)
}

/// `E` and `F` from the embedded data unless overridden, with the embedded
/// witness. Passes when the pair is eventually conjugate but not conjugate.
pub fn cmd_ef_example(graph_e: Option<&Path>, graph_f: Option<&Path>, seed: u64) -> Result<RunReport> {
    let e = match graph_e {
        Some(p) => load(p)?,
        None => embedded("E.graph", GRAPH_E),
    };
    let f = match graph_f {
        Some(p) => load(p)?,
        None => embedded("F.graph", GRAPH_F),
    };
    let w = embedded("EF.witness", WITNESS_EF);
    let d = conjugacy_of(&e, &f)?;
    let (pe, pf) = (presentation(&e)?, presentation(&f)?);
    let eventual = check_witness(&pe, &pf, &w, Some(("E", "F")), None);

    let mut lines = vec![format!("conjugacy: {}", verdict_name(d.verdict))];
    lines.extend(decision_lines(&d).into_iter().map(|l| format!("  {l}")));
    let (eventual_verdict, eventual_payload) = match &eventual {
        Ok(c) => {
            let (v, verdict) = checked_verdict(c);
            lines.push(format!("eventual conjugacy witness: {verdict}"));
            lines.extend(verification_lines(v).into_iter().map(|l| format!("  {l}")));
            (verdict, serde_json::to_value(v)?)
        }
        Err(err) => {
            lines.push(format!("eventual conjugacy witness: unusable ({err})"));
            ("witness-rejected", json!({ "error": err.to_string() }))
        }
    };
    let passed = d.verdict == Verdict::NotConjugate && eventual_verdict == "eventually-conjugate";
    let conclusion = if passed {
        "eventually conjugate but not conjugate".to_string()
    } else {
        format!("{} and {eventual_verdict}", verdict_name(d.verdict))
    };
    lines.push(format!("conclusion: {conclusion}"));
    let payload = json!({
        "conjugacy": d,
        "eventual": eventual_payload,
        "verdicts": [verdict_name(d.verdict), eventual_verdict],
        "conclusion": conclusion,
    });
    let report = RunReport::new("paper-example", seed, vec![e.input, f.input, w.input]);
    let mut r = report.finish(passed, &conclusion, payload);
    r.lines = lines;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_report_lists_inputs_and_verdict() {
        let r = RunReport::new("x", 7, vec![InputFile::new("a", b"abc")]).finish(true, "ok", Value::Null);
        let t = r.to_text();
        assert!(t.contains("seed: 7"));
        assert!(t.contains("sha256=ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"));
        assert!(t.ends_with("verdict: ok\n"));
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn wall_time_only_with_timing() {
        let make = || Ok(RunReport::new("x", 0, vec![]).finish(false, "no", Value::Null));
        assert!(timed(false, make).unwrap().wall_time_ms.is_none());
        let r = timed(true, make).unwrap();
        assert!(r.to_json().contains("wall_time_ms"));
        assert_eq!(r.exit_code(), 1);
    }

    #[test]
    fn embedded_example_passes() {
        let r = cmd_ef_example(None, None, 0).unwrap();
        assert!(r.passed, "{}", r.to_text());
        assert_eq!(r.payload["verdicts"], json!(["not-conjugate", "eventually-conjugate"]));
        assert_eq!(r.payload["conjugacy"]["terminal_a"]["vertices"], 2);
        assert_eq!(r.payload["conjugacy"]["terminal_b"]["vertices"], 3);
    }
}
