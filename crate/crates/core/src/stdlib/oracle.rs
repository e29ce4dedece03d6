//! Brute-force connectivity oracle for checking `ConnCompSet`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// Connected components by breadth-first search from every unvisited
/// vertex. Blocks are sorted, and sorted by their smallest member.
pub fn oracle_connected(edges: &[(i64, i64)], vertices: &[i64]) -> Vec<Vec<i64>> {
    let mut adj: BTreeMap<i64, Vec<i64>> = vertices.iter().map(|&v| (v, Vec::new())).collect();
    for &(u, v) in edges {
        adj.entry(u).or_default().push(v);
        adj.entry(v).or_default().push(u);
    }
    let mut seen = BTreeSet::new();
    let mut blocks = Vec::new();
    for &start in adj.keys() {
        if !seen.insert(start) {
            continue;
        }
        let mut block = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for &y in &adj[&x] {
                if seen.insert(y) {
                    block.push(y);
                    queue.push_back(y);
                }
            }
        }
        block.sort_unstable();
        blocks.push(block);
    }
    blocks.sort();
    blocks
}

/// Normalizes a vertex → component-label map into the same block form as
/// [`oracle_connected`].
pub fn partition_from_labels(labels: &[(i64, i64)]) -> Vec<Vec<i64>> {
    let mut by_label: BTreeMap<i64, Vec<i64>> = BTreeMap::new();
    for &(v, c) in labels {
        by_label.entry(c).or_default().push(v);
    }
    let mut blocks: Vec<Vec<i64>> = by_label
        .into_values()
        .map(|mut b| {
            b.sort_unstable();
            b
        })
        .collect();
    blocks.sort();
    blocks
}
