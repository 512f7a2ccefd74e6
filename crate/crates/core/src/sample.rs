//! Random and exhaustive tree generation for tests and cross-checks.

use std::collections::BTreeSet;

use rand::Rng;

use crate::error::{Error, Result};
use crate::tree::MetricTree;

/// Builds a tree on vertices `v0..` from an undirected edge list.
pub fn tree_from_pairs(n: usize, pairs: &[(usize, usize)], weights: &[f64]) -> Result<MetricTree> {
    let vertices = (0..n).map(|i| format!("v{i}")).collect();
    let edges = pairs
        .iter()
        .zip(weights)
        .map(|(&(u, v), &w)| (format!("v{u}"), format!("v{v}"), w))
        .collect();
    MetricTree::from_parts(vertices, edges, None)
}

/// Uniformly random labeled tree shape on `n` vertices.
pub fn random_pairs<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<(usize, usize)> {
    let code: Vec<usize> = (0..n.saturating_sub(2)).map(|_| rng.random_range(0..n)).collect();
    pruefer_pairs(n, &code)
}

/// Edges of the labeled tree on `0..n` with Pruefer code `code`
/// (`n - 2` entries below `n`).
pub fn pruefer_pairs(n: usize, code: &[usize]) -> Vec<(usize, usize)> {
    if n < 2 {
        return Vec::new();
    }
    assert_eq!(code.len(), n - 2, "Pruefer code length");
    let mut degree = vec![1usize; n];
    for &c in code {
        degree[c] += 1;
    }
    let mut pairs = Vec::with_capacity(n - 1);
    for &c in code {
        let leaf = (0..n).find(|&v| degree[v] == 1).expect("a leaf remains");
        pairs.push((leaf, c));
        degree[leaf] -= 1;
        degree[c] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    pairs.push((rest[0], rest[1]));
    pairs
}

/// Random tree on `n` vertices; edge weights uniform in `weights`, or unit
/// weights when `None`.
pub fn random_tree<R: Rng + ?Sized>(rng: &mut R, n: usize, weights: Option<(f64, f64)>) -> Result<MetricTree> {
    if n == 0 {
        return Err(Error::EmptyVertexSet);
    }
    let pairs = random_pairs(rng, n);
    let w: Vec<f64> = match weights {
        Some((lo, hi)) => pairs.iter().map(|_| rng.random_range(lo..=hi)).collect(),
        None => vec![1.0; pairs.len()],
    };
    tree_from_pairs(n, &pairs, &w)
}

fn adjacency(n: usize, pairs: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in pairs {
        adj[u].push(v);
        adj[v].push(u);
    }
    adj
}

fn rooted_code(adj: &[Vec<usize>], v: usize, parent: usize) -> String {
    let mut parts: Vec<String> = adj[v]
        .iter()
        .filter(|&&c| c != parent)
        .map(|&c| rooted_code(adj, c, v))
        .collect();
    parts.sort();
    format!("({})", parts.concat())
}

/// Isomorphism-invariant code of an unlabeled tree: the smallest rooted
/// code over the tree's centres.
pub fn canonical_code(n: usize, pairs: &[(usize, usize)]) -> String {
    let adj = adjacency(n, pairs);
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut layer: Vec<usize> = (0..n).filter(|&v| degree[v] <= 1).collect();
    let mut remaining = n;
    while remaining > 2 {
        remaining -= layer.len();
        let mut next = Vec::new();
        for &v in &layer {
            for &u in &adj[v] {
                degree[u] -= 1;
                if degree[u] == 1 {
                    next.push(u);
                }
            }
        }
        layer = next;
    }
    layer
        .iter()
        .map(|&c| rooted_code(&adj, c, usize::MAX))
        .min()
        .unwrap_or_default()
}

/// Every unlabeled tree on `n` vertices, as edge lists over `0..n`, by
/// attaching a leaf to each vertex of every tree on `n - 1` vertices.
pub fn free_trees(n: usize) -> Vec<Vec<(usize, usize)>> {
    if n == 0 {
        return Vec::new();
    }
    let mut level: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
    for size in 2..=n {
        let mut seen = BTreeSet::new();
        let mut next = Vec::new();
        for pairs in &level {
            for v in 0..size - 1 {
                let mut grown = pairs.clone();
                grown.push((v, size - 1));
                if seen.insert(canonical_code(size, &grown)) {
                    next.push(grown);
                }
            }
        }
        level = next;
    }
    level
}
