//! Host-side planarity test backing `builtin_is_planar`.
//!
//! Cheap checks first (few edges, forests, edge-count bound); otherwise the
//! graph is reduced (leaves pruned, degree-2 vertices smoothed) and searched
//! exhaustively for a subdivision of K5 or K3,3.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

/// Largest vertex count the exhaustive stage accepts.
pub const MAX_VERTICES: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanarityError {
    #[error("planarity test limited to {MAX_VERTICES} vertices, graph has {0}")]
    TooManyVertices(usize),
}

/// True iff the undirected graph with these edges is planar. Self-loops and
/// parallel edges are ignored; isolated vertices do not appear.
pub fn is_planar(edges: &[(i64, i64)]) -> Result<bool, PlanarityError> {
    let edges: BTreeSet<(i64, i64)> = edges
        .iter()
        .filter(|(u, v)| u != v)
        .map(|&(u, v)| (u.min(v), u.max(v)))
        .collect();
    let m = edges.len();
    if m <= 8 || is_forest(&edges) {
        return Ok(true);
    }
    let vertices: BTreeSet<i64> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
    let n = vertices.len();
    if m > 3 * n - 6 {
        return Ok(false);
    }
    if n > MAX_VERTICES {
        return Err(PlanarityError::TooManyVertices(n));
    }
    let index: BTreeMap<i64, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut adj = vec![0u32; n];
    for (u, v) in &edges {
        let (a, b) = (index[u], index[v]);
        adj[a] |= 1 << b;
        adj[b] |= 1 << a;
    }
    reduce(&mut adj);
    Ok(!has_kuratowski_subdivision(&adj))
}

fn is_forest(edges: &BTreeSet<(i64, i64)>) -> bool {
    let mut parent: BTreeMap<i64, i64> = BTreeMap::new();
    fn find(parent: &mut BTreeMap<i64, i64>, x: i64) -> i64 {
        let p = *parent.entry(x).or_insert(x);
        if p == x {
            return x;
        }
        let r = find(parent, p);
        parent.insert(x, r);
        r
    }
    for &(u, v) in edges {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a == b {
            return false;
        }
        parent.insert(a, b);
    }
    true
}

/// Removes vertices of degree at most 1 and smooths degree-2 vertices until
/// neither applies. Both preserve planarity.
fn reduce(adj: &mut [u32]) {
    loop {
        let mut changed = false;
        for x in 0..adj.len() {
            let deg = adj[x].count_ones();
            if deg == 0 {
                continue;
            }
            if deg == 1 {
                let y = adj[x].trailing_zeros() as usize;
                adj[y] &= !(1 << x);
                adj[x] = 0;
                changed = true;
            } else if deg == 2 {
                let a = adj[x].trailing_zeros() as usize;
                let b = (adj[x] & !(1 << a)).trailing_zeros() as usize;
                adj[a] = (adj[a] & !(1 << x)) | (1 << b);
                adj[b] = (adj[b] & !(1 << x)) | (1 << a);
                adj[x] = 0;
                changed = true;
            }
        }
        if !changed {
            return;
        }
    }
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn go(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, k, 0, &mut Vec::new(), &mut out);
    out
}

fn has_kuratowski_subdivision(adj: &[u32]) -> bool {
    let deg_at_least = |d: u32| -> Vec<usize> { (0..adj.len()).filter(|&x| adj[x].count_ones() >= d).collect() };

    for branch in combinations(&deg_at_least(4), 5) {
        let mut pairs = Vec::new();
        for i in 0..5 {
            for j in i + 1..5 {
                pairs.push((branch[i], branch[j]));
            }
        }
        if disjoint_paths(adj, &pairs, mask(&branch)) {
            return true;
        }
    }

    for six in combinations(&deg_at_least(3), 6) {
        // fix six[0] on side A to skip mirrored splits
        for rest in combinations(&six[1..], 2) {
            let a = [six[0], rest[0], rest[1]];
            let b: Vec<usize> = six.iter().copied().filter(|x| !a.contains(x)).collect();
            let pairs: Vec<(usize, usize)> = a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y))).collect();
            if disjoint_paths(adj, &pairs, mask(&six)) {
                return true;
            }
        }
    }
    false
}

fn mask(vs: &[usize]) -> u32 {
    vs.iter().fold(0, |m, &v| m | (1 << v))
}

/// Backtracking search for internally vertex-disjoint paths joining every
/// pair, with interiors avoiding `blocked` (the branch vertices).
fn disjoint_paths(adj: &[u32], pairs: &[(usize, usize)], blocked: u32) -> bool {
    fn route(adj: &[u32], pairs: &[(usize, usize)], used: u32) -> bool {
        let Some(&(a, b)) = pairs.first() else {
            return true;
        };
        extend(adj, pairs, a, b, used, 0)
    }
    // `interior` holds the vertices of the current partial path beyond `a`.
    fn extend(adj: &[u32], pairs: &[(usize, usize)], at: usize, b: usize, used: u32, interior: u32) -> bool {
        if adj[at] & (1 << b) != 0 && route(adj, &pairs[1..], used | interior) {
            return true;
        }
        let mut options = adj[at] & !used & !interior;
        while options != 0 {
            let next = options.trailing_zeros() as usize;
            options &= options - 1;
            if extend(adj, pairs, next, b, used, interior | (1 << next)) {
                return true;
            }
        }
        false
    }
    route(adj, pairs, blocked)
}
