//! Helpers shared by the integration tests: host-side oracles written
//! independently of the library code, and a driver for corpus graphs.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use eco_core::interpreter::{Interpreter, IntTree, Unwind, Value};
use eco_core::runtime::ObjId;
use eco_core::stdlib::library_interpreter;
use eco_core::stdlib::script::EditOp;

/// Planarity by exhaustive search over rotation systems: a graph is planar
/// iff some rotation system traces V - E + F = 2 faces per component.
pub fn planar_by_rotations(edges: &[(i64, i64)]) -> bool {
    let edges: Vec<(i64, i64)> = edges
        .iter()
        .filter(|(u, v)| u != v)
        .map(|&(u, v)| (u.min(v), u.max(v)))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let verts: BTreeSet<i64> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
    let (n, m) = (verts.len(), edges.len());
    if n >= 3 && m > 3 * n - 6 {
        return false;
    }
    let idx: BTreeMap<i64, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    // dart 2i runs u -> v, dart 2i+1 runs v -> u
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut head = vec![0usize; 2 * m];
    for (i, &(u, v)) in edges.iter().enumerate() {
        out[idx[&u]].push(2 * i);
        out[idx[&v]].push(2 * i + 1);
        head[2 * i] = idx[&v];
        head[2 * i + 1] = idx[&u];
    }
    let components = count_components(n, &edges, &idx);
    let choices: Vec<Vec<Vec<usize>>> = out.iter().map(|darts| cyclic_orders(darts)).collect();
    let mut pick = vec![0usize; n];
    let mut succ = vec![0usize; 2 * m];
    loop {
        for x in 0..n {
            let order = &choices[x][pick[x]];
            for k in 0..order.len() {
                succ[order[k]] = order[(k + 1) % order.len()];
            }
        }
        let faces = count_faces(&succ);
        if n as i64 - m as i64 + faces as i64 == 2 * components as i64 {
            return true;
        }
        // odometer step
        let mut x = 0;
        loop {
            if x == n {
                return false;
            }
            pick[x] += 1;
            if pick[x] < choices[x].len() {
                break;
            }
            pick[x] = 0;
            x += 1;
        }
    }
}

fn count_components(n: usize, edges: &[(i64, i64)], idx: &BTreeMap<i64, usize>) -> usize {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[idx[&u]].push(idx[&v]);
        adj[idx[&v]].push(idx[&u]);
    }
    let mut seen = vec![false; n];
    let mut count = 0;
    for s in 0..n {
        if seen[s] {
            continue;
        }
        count += 1;
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    count
}

/// Every cyclic order of `darts`, first element fixed.
fn cyclic_orders(darts: &[usize]) -> Vec<Vec<usize>> {
    if darts.len() <= 2 {
        return vec![darts.to_vec()];
    }
    let mut out = Vec::new();
    let mut rest = darts[1..].to_vec();
    permute(&mut rest, 0, &mut |p| {
        let mut o = vec![darts[0]];
        o.extend_from_slice(p);
        out.push(o);
    });
    out
}

fn permute(xs: &mut [usize], k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == xs.len() {
        f(xs);
        return;
    }
    for i in k..xs.len() {
        xs.swap(k, i);
        permute(xs, k + 1, f);
        xs.swap(k, i);
    }
}

/// Faces of the embedding: orbits of d -> succ(reverse(d)).
fn count_faces(succ: &[usize]) -> usize {
    let mut seen = vec![false; succ.len()];
    let mut faces = 0;
    for d in 0..succ.len() {
        if seen[d] {
            continue;
        }
        faces += 1;
        let mut x = d;
        while !seen[x] {
            seen[x] = true;
            x = succ[x ^ 1];
        }
    }
    faces
}

/// Component count by union-find, independent of the BFS oracle.
pub fn union_find_count(vertices: &[i64], edges: &[(i64, i64)]) -> usize {
    let idx: BTreeMap<i64, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut parent: Vec<usize> = (0..vertices.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    let mut count = vertices.len();
    for &(u, v) in edges {
        let (a, b) = (find(&mut parent, idx[&u]), find(&mut parent, idx[&v]));
        if a != b {
            parent[a] = b;
            count -= 1;
        }
    }
    count
}

pub fn complete(n: i64) -> Vec<(i64, i64)> {
    (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
}

pub fn k33() -> Vec<(i64, i64)> {
    (0..3).flat_map(|u| (3..6).map(move |v| (u, v))).collect()
}

pub fn petersen() -> Vec<(i64, i64)> {
    let mut e = Vec::new();
    for i in 0..5 {
        e.push((i, (i + 1) % 5));
        e.push((i, i + 5));
        e.push((i + 5, (i + 2) % 5 + 5));
    }
    e
}

/// A corpus `Graph` driven from the host.
pub struct GraphDriver {
    pub interp: Interpreter,
    pub g: Value,
}

impl GraphDriver {
    pub fn new() -> Self {
        Self::with(library_interpreter())
    }

    pub fn with(mut interp: Interpreter) -> Self {
        let g = interp.instantiate("Graph", vec![]).expect("graph constructs");
        GraphDriver { interp, g }
    }

    /// Replaces the graph with a fresh one in the same interpreter.
    pub fn reset(&mut self) {
        self.g = self.interp.instantiate("Graph", vec![]).expect("graph constructs");
    }

    pub fn id(&self) -> ObjId {
        self.g.as_obj().unwrap()
    }

    pub fn call(&mut self, method: &str, args: Vec<Value>) -> Result<Value, Unwind> {
        let g = self.g.clone();
        self.interp.call_method(&g, method, args)
    }

    pub fn add_vertex(&mut self) -> i64 {
        self.call("AddVertex", vec![]).unwrap().as_int().unwrap()
    }

    pub fn add_edge(&mut self, u: i64, v: i64) -> Result<i64, Unwind> {
        self.call("AddEdge", vec![Value::Int(u), Value::Int(v)]).map(|e| e.as_int().unwrap())
    }

    pub fn apply(&mut self, op: EditOp) -> Result<Value, Unwind> {
        match op {
            EditOp::AddVertex => self.call("AddVertex", vec![]),
            EditOp::DeleteVertex(v) => self.call("DeleteVertex", vec![Value::Int(v)]),
            EditOp::AddEdge(u, v) => self.call("AddEdge", vec![Value::Int(u), Value::Int(v)]),
            EditOp::DeleteEdge(e) => self.call("DeleteEdge", vec![Value::Int(e)]),
        }
    }

    pub fn make(&mut self, classer: &str) -> Result<Value, Unwind> {
        let g = self.g.clone();
        self.interp.call_static(classer, "Make", vec![g])
    }

    pub fn attach(&mut self, extender: &str) -> Value {
        let g = self.g.clone();
        self.interp.instantiate(extender, vec![g]).expect("extender attaches")
    }

    pub fn has(&self, classer: &str) -> bool {
        self.interp.runtime().classer_present(self.id(), classer)
    }

    pub fn classer(&self, classer: &str) -> Value {
        Value::Obj(self.interp.runtime().classer_get(self.id(), classer).expect("classer present"))
    }

    pub fn field(&self, name: &str) -> Value {
        self.interp.field(&self.g, name).unwrap()
    }

    pub fn vertices(&self) -> Vec<i64> {
        match self.field("vertices").to_int_tree().unwrap() {
            IntTree::List(items) => items
                .into_iter()
                .map(|t| match t {
                    IntTree::Int(v) => v,
                    other => panic!("vertex id {other:?}"),
                })
                .collect(),
            other => panic!("vertices {other:?}"),
        }
    }

    /// Live edges as (id, u, v).
    pub fn edges(&self) -> Vec<(i64, i64, i64)> {
        triples(&self.field("edges"))
    }

    pub fn edge_pairs(&self) -> Vec<(i64, i64)> {
        self.edges().into_iter().map(|(_, u, v)| (u, v)).collect()
    }

    /// Serialized vertex and edge lists, for before/after comparison.
    pub fn snapshot(&self) -> String {
        format!("{}|{}", self.field("vertices"), self.field("edges"))
    }
}

pub fn pairs(v: &Value) -> Vec<(i64, i64)> {
    let IntTree::List(items) = v.to_int_tree().expect("integer lists") else { panic!("not a list") };
    items
        .into_iter()
        .map(|t| match t {
            IntTree::List(p) => match p[..] {
                [IntTree::Int(a), IntTree::Int(b)] => (a, b),
                _ => panic!("not a pair"),
            },
            _ => panic!("not a pair"),
        })
        .collect()
}

pub fn triples(v: &Value) -> Vec<(i64, i64, i64)> {
    let IntTree::List(items) = v.to_int_tree().expect("integer lists") else { panic!("not a list") };
    items
        .into_iter()
        .map(|t| match t {
            IntTree::List(p) => match p[..] {
                [IntTree::Int(a), IntTree::Int(b), IntTree::Int(c)] => (a, b, c),
                _ => panic!("not a triple"),
            },
            _ => panic!("not a triple"),
        })
        .collect()
}
