//! Edit scripts over a graph: `AV | DV id | AE u v | DE id`, one per line,
//! with `#` comments.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EditOp {
    AddVertex,
    DeleteVertex(i64),
    AddEdge(i64, i64),
    DeleteEdge(i64),
}

impl fmt::Display for EditOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EditOp::AddVertex => write!(f, "AV"),
            EditOp::DeleteVertex(v) => write!(f, "DV {v}"),
            EditOp::AddEdge(u, v) => write!(f, "AE {u} {v}"),
            EditOp::DeleteEdge(e) => write!(f, "DE {e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ScriptError {
    pub line: usize,
    pub message: String,
}

pub fn parse_script(text: &str) -> Result<Vec<EditOp>, ScriptError> {
    let mut ops = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| ScriptError { line: i + 1, message };
        let words: Vec<&str> = line.split_whitespace().collect();
        let num = |s: &str| s.parse::<i64>().map_err(|_| err(format!("expected integer, found '{s}'")));
        ops.push(match words[..] {
            ["AV"] => EditOp::AddVertex,
            ["DV", v] => EditOp::DeleteVertex(num(v)?),
            ["AE", u, v] => EditOp::AddEdge(num(u)?, num(v)?),
            ["DE", e] => EditOp::DeleteEdge(num(e)?),
            _ => return Err(err(format!("unrecognized operation '{line}'"))),
        });
    }
    Ok(ops)
}

pub fn format_script(ops: &[EditOp]) -> String {
    ops.iter().map(|op| format!("{op}\n")).collect()
}

/// Host mirror of the corpus `Graph` id discipline: vertex and edge ids are
/// assigned from 0 upwards and never reused.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GraphModel {
    next_vertex: i64,
    next_edge: i64,
    pub vertices: Vec<i64>,
    pub edges: BTreeMap<i64, (i64, i64)>,
}

impl GraphModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn edge_pairs(&self) -> Vec<(i64, i64)> {
        self.edges.values().copied().collect()
    }

    pub fn is_valid(&self, op: EditOp) -> bool {
        match op {
            EditOp::AddVertex => true,
            EditOp::DeleteVertex(v) => self.vertices.contains(&v),
            EditOp::AddEdge(u, v) => u != v && self.vertices.contains(&u) && self.vertices.contains(&v),
            EditOp::DeleteEdge(e) => self.edges.contains_key(&e),
        }
    }

    /// Applies a valid operation; returns the new id for additions.
    pub fn apply(&mut self, op: EditOp) -> Option<i64> {
        debug_assert!(self.is_valid(op), "invalid op {op}");
        match op {
            EditOp::AddVertex => {
                let v = self.next_vertex;
                self.next_vertex += 1;
                self.vertices.push(v);
                Some(v)
            }
            EditOp::DeleteVertex(v) => {
                self.edges.retain(|_, &mut (a, b)| a != v && b != v);
                self.vertices.retain(|&x| x != v);
                None
            }
            EditOp::AddEdge(u, v) => {
                let e = self.next_edge;
                self.next_edge += 1;
                self.edges.insert(e, (u, v));
                Some(e)
            }
            EditOp::DeleteEdge(e) => {
                self.edges.remove(&e);
                None
            }
        }
    }
}

/// Random valid script keeping at most `max_vertices` live vertices.
pub fn random_script<R: Rng>(rng: &mut R, len: usize, max_vertices: usize) -> Vec<EditOp> {
    let mut model = GraphModel::new();
    let mut ops = Vec::with_capacity(len);
    while ops.len() < len {
        let n = model.vertices.len();
        let roll = rng.random_range(0..100);
        let op = if n < 2 || (roll < 25 && n < max_vertices) {
            EditOp::AddVertex
        } else if roll < 65 {
            let u = model.vertices[rng.random_range(0..n)];
            let v = model.vertices[rng.random_range(0..n)];
            if u == v {
                continue;
            }
            EditOp::AddEdge(u, v)
        } else if roll < 88 {
            if model.edges.is_empty() {
                continue;
            }
            let idx = rng.random_range(0..model.edges.len());
            EditOp::DeleteEdge(*model.edges.keys().nth(idx).expect("index in range"))
        } else {
            EditOp::DeleteVertex(model.vertices[rng.random_range(0..n)])
        };
        model.apply(op);
        ops.push(op);
    }
    ops
}
