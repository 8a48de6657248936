//! Line-based text formats for presentations and witnesses.
//!
//! ```text
//! graph <name> <V>
//! edge <id> <source> <range>        # vertices are 1-based
//!
//! matrix <name> <N>
//! <N rows of space-separated 0/1>
//!
//! code <name> from <shift> to <shift> memory <m> anticipation <a>
//! map <window> -> <letter>
//! boundary <n> <prefix-window> -> <letter>
//! witness conjugacy <fwd> <bwd>
//! witness eventual <fwd> <bwd> lag <L>
//! ```
//!
//! `#` starts a comment. Windows are words in the shift's labels, either
//! dot-separated or written together when tokenization is unambiguous.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::code::{CodeError, SlidingBlockCode, WindowTable};
use crate::graph::{Edge, GraphError, Multigraph};
use crate::matrix::{Matrix01, MatrixError};
use crate::witness::{ConjugacyWitness, EventualConjugacyWitness};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid graph: {0}")]
    Graph(#[from] GraphError),
    #[error("invalid matrix: {0}")]
    Matrix(#[from] MatrixError),
    #[error("code `{name}`: {source}")]
    Code { name: String, source: CodeError },
    #[error("missing {0}")]
    Missing(&'static str),
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, message: message.into() }
}

/// Non-empty, comment-stripped lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn parse_usize(line: usize, token: &str, what: &str) -> Result<usize, ParseError> {
    token.parse().map_err(|_| syntax(line, format!("expected {what}, found `{token}`")))
}

/// A shift presented either by a graph (edge shift) or by a 0/1 matrix (vertex shift).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Presentation {
    Graph { name: String, graph: Multigraph },
    Matrix { name: String, matrix: Matrix01 },
}

impl Presentation {
    pub fn name(&self) -> &str {
        match self {
            Presentation::Graph { name, .. } | Presentation::Matrix { name, .. } => name,
        }
    }

    /// Transition matrix of the presented shift: the edge matrix for graphs.
    pub fn shift_matrix(&self) -> Matrix01 {
        match self {
            Presentation::Graph { graph, .. } => graph.edge_matrix(),
            Presentation::Matrix { matrix, .. } => matrix.clone(),
        }
    }

    /// A graph whose edge shift is conjugate to the presented shift.
    pub fn edge_graph(&self) -> Multigraph {
        match self {
            Presentation::Graph { graph, .. } => graph.clone(),
            Presentation::Matrix { matrix, .. } => Multigraph::from_vertex_shift(matrix),
        }
    }
}

pub fn parse_presentation(text: &str) -> Result<Presentation, ParseError> {
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or(ParseError::Missing("`graph` or `matrix` header"))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    match tokens.as_slice() {
        ["graph", name, count] => {
            let vertex_count = parse_usize(line, count, "vertex count")?;
            let mut edges = Vec::new();
            for (line, body) in lines {
                let t: Vec<&str> = body.split_whitespace().collect();
                match t.as_slice() {
                    ["edge", id, s, r] => {
                        let source = parse_usize(line, s, "source vertex")?;
                        let range = parse_usize(line, r, "range vertex")?;
                        if source == 0 || range == 0 {
                            return Err(syntax(line, "vertices are numbered from 1"));
                        }
                        edges.push(Edge { id: id.to_string(), source: source - 1, range: range - 1 });
                    }
                    _ => return Err(syntax(line, format!("expected `edge <id> <source> <range>`, found `{body}`"))),
                }
            }
            let graph = Multigraph::new(vertex_count, edges)?;
            Ok(Presentation::Graph { name: name.to_string(), graph })
        }
        ["matrix", name, size] => {
            let size = parse_usize(line, size, "matrix size")?;
            let mut grid = Vec::new();
            for (line, body) in lines {
                let row = body
                    .split_whitespace()
                    .map(|t| t.parse::<u32>().map_err(|_| syntax(line, format!("expected 0 or 1, found `{t}`"))))
                    .collect::<Result<Vec<_>, _>>()?;
                grid.push(row);
            }
            if grid.len() != size {
                return Err(syntax(line, format!("header says {size} rows, found {}", grid.len())));
            }
            let matrix = crate::matrix::validate_matrix(&grid)?;
            Ok(Presentation::Matrix { name: name.to_string(), matrix })
        }
        _ => Err(syntax(line, format!("expected `graph <name> <V>` or `matrix <name> <N>`, found `{header}`"))),
    }
}

/// Serializes a graph in the format read by [`parse_presentation`].
pub fn write_graph(name: &str, graph: &Multigraph) -> String {
    let mut out = format!("graph {name} {}\n", graph.vertex_count());
    for e in graph.edges() {
        let _ = writeln!(out, "edge {} {} {}", e.id, e.source + 1, e.range + 1);
    }
    out
}

#[derive(Debug, Clone)]
pub enum ParsedWitness {
    Conjugacy(ConjugacyWitness),
    Eventual(EventualConjugacyWitness),
}

#[derive(Debug, Clone)]
pub struct WitnessFile {
    pub codes: BTreeMap<String, SlidingBlockCode>,
    pub witness: ParsedWitness,
}

struct PendingCode {
    name: String,
    source: Arc<Matrix01>,
    target: Arc<Matrix01>,
    memory: usize,
    anticipation: usize,
    stationary: WindowTable,
    boundary: Vec<WindowTable>,
}

impl PendingCode {
    fn finish(self) -> Result<SlidingBlockCode, ParseError> {
        let name = self.name.clone();
        SlidingBlockCode::new(
            self.name,
            self.source,
            self.target,
            self.memory,
            self.anticipation,
            self.stationary,
            self.boundary,
        )
        .map_err(|source| ParseError::Code { name, source })
    }
}

/// Parses a witness file against named shifts.
pub fn parse_witness(text: &str, shifts: &[(&str, Arc<Matrix01>)]) -> Result<WitnessFile, ParseError> {
    let lookup = |line: usize, name: &str| {
        shifts
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, m)| m.clone())
            .ok_or_else(|| syntax(line, format!("unknown shift `{name}`")))
    };
    let mut codes = BTreeMap::new();
    let mut pending: Option<PendingCode> = None;
    let mut witness_line: Option<(usize, Vec<String>)> = None;

    for (line, body) in content_lines(text) {
        let tokens: Vec<&str> = body.split_whitespace().collect();
        match tokens.as_slice() {
            ["code", name, "from", src, "to", dst, "memory", m, "anticipation", a] => {
                if let Some(p) = pending.take() {
                    let code = p.finish()?;
                    codes.insert(code.name().to_string(), code);
                }
                let memory = parse_usize(line, m, "memory")?;
                pending = Some(PendingCode {
                    name: name.to_string(),
                    source: lookup(line, src)?,
                    target: lookup(line, dst)?,
                    memory,
                    anticipation: parse_usize(line, a, "anticipation")?,
                    stationary: WindowTable::new(),
                    boundary: vec![WindowTable::new(); memory],
                });
            }
            ["map", window, "->", letter] => {
                let p = pending.as_mut().ok_or_else(|| syntax(line, "`map` outside a code block"))?;
                let w = p.source.parse_letters(window).map_err(|e| syntax(line, e.to_string()))?;
                let l = p.target.letter(letter).ok_or_else(|| syntax(line, format!("unknown letter `{letter}`")))?;
                if p.stationary.insert(w, l).is_some() {
                    return Err(syntax(line, format!("window `{window}` mapped twice")));
                }
            }
            ["boundary", n, window, "->", letter] => {
                let p = pending.as_mut().ok_or_else(|| syntax(line, "`boundary` outside a code block"))?;
                let n = parse_usize(line, n, "boundary coordinate")?;
                if n >= p.memory {
                    return Err(syntax(line, format!("boundary coordinate {n} needs memory > {n}")));
                }
                let w = p.source.parse_letters(window).map_err(|e| syntax(line, e.to_string()))?;
                let l = p.target.letter(letter).ok_or_else(|| syntax(line, format!("unknown letter `{letter}`")))?;
                if p.boundary[n].insert(w, l).is_some() {
                    return Err(syntax(line, format!("boundary window `{window}` mapped twice")));
                }
            }
            ["witness", ..] => {
                if witness_line.is_some() {
                    return Err(syntax(line, "more than one witness line"));
                }
                witness_line = Some((line, tokens.iter().map(|s| s.to_string()).collect()));
            }
            _ => return Err(syntax(line, format!("unrecognized line `{body}`"))),
        }
    }
    if let Some(p) = pending.take() {
        let code = p.finish()?;
        codes.insert(code.name().to_string(), code);
    }
    let (line, tokens) = witness_line.ok_or(ParseError::Missing("`witness` line"))?;
    let get = |name: &str| codes.get(name).cloned().ok_or_else(|| syntax(line, format!("unknown code `{name}`")));
    let tokens: Vec<&str> = tokens.iter().map(String::as_str).collect();
    let witness = match tokens.as_slice() {
        ["witness", "conjugacy", f, b] => ParsedWitness::Conjugacy(ConjugacyWitness::new(get(f)?, get(b)?)),
        ["witness", "eventual", f, b, "lag", l] => ParsedWitness::Eventual(EventualConjugacyWitness::new(
            get(f)?,
            get(b)?,
            parse_usize(line, l, "lag")?,
        )),
        _ => return Err(syntax(line, "expected `witness conjugacy <fwd> <bwd>` or `witness eventual <fwd> <bwd> lag <L>`")),
    };
    Ok(WitnessFile { codes, witness })
}

/// Serializes one code block; `source_name`/`target_name` are the shift names.
pub fn write_code(code: &SlidingBlockCode, source_name: &str, target_name: &str) -> String {
    let src = code.source();
    let dst = code.target();
    let word = |w: &[usize]| w.iter().map(|&l| src.label(l)).collect::<Vec<_>>().join(".");
    let mut out = format!(
        "code {} from {source_name} to {target_name} memory {} anticipation {}\n",
        code.name(),
        code.memory(),
        code.anticipation()
    );
    for (n, table) in code.boundary().iter().enumerate() {
        for (w, &l) in table {
            let _ = writeln!(out, "boundary {n} {} -> {}", word(w), dst.label(l));
        }
    }
    for (w, &l) in code.stationary() {
        let _ = writeln!(out, "map {} -> {}", word(w), dst.label(l));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_graph_with_comments() {
        let p = parse_presentation("# loop\ngraph L 1\nedge x 1 1 # the only edge\n").unwrap();
        assert_eq!(p.name(), "L");
        assert_eq!(p.shift_matrix().rows(), vec![vec![1]]);
    }

    #[test]
    fn parses_matrix() {
        let p = parse_presentation("matrix G 2\n1 1\n1 0\n").unwrap();
        assert_eq!(p.shift_matrix().rows(), vec![vec![1, 1], vec![1, 0]]);
        assert_eq!(p.edge_graph().edges().len(), 3);
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_presentation("graph G 1\n\nedge x 1\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 3, .. }), "{err}");
        let err = parse_presentation("matrix M 2\n1 1\n1 x\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 3, .. }), "{err}");
        assert!(matches!(parse_presentation(""), Err(ParseError::Missing(_))));
    }

    #[test]
    fn isolated_vertex_is_invalid() {
        let err = parse_presentation("graph G 2\nedge x 1 1\n").unwrap_err();
        assert_eq!(err, ParseError::Graph(GraphError::NoOutgoingEdge(2)));
        let err = parse_presentation("matrix M 2\n1 0\n0 0\n").unwrap_err();
        assert_eq!(err, ParseError::Matrix(MatrixError::ZeroRow(1)));
    }

    #[test]
    fn graph_round_trip() {
        let g = crate::counterexample::graph_f();
        let text = write_graph("F", &g);
        match parse_presentation(&text).unwrap() {
            Presentation::Graph { graph, .. } => assert_eq!(graph, g),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn witness_errors() {
        let m = Arc::new(crate::matrix::validate_matrix(&[vec![1, 1], vec![1, 1]]).unwrap());
        let shifts = [("M", m)];
        let text = "code id from M to M memory 0 anticipation 0\nmap 1 -> 1\nwitness conjugacy id id\n";
        assert!(matches!(parse_witness(text, &shifts), Err(ParseError::Code { .. })));
        let text = "code id from X to M memory 0 anticipation 0\n";
        assert!(matches!(parse_witness(text, &shifts), Err(ParseError::Syntax { line: 1, .. })));
        let text = "code id from M to M memory 0 anticipation 0\nmap 1 -> 1\nmap 2 -> 2\n";
        assert_eq!(parse_witness(text, &shifts).unwrap_err(), ParseError::Missing("`witness` line"));
    }
}
