//! The generic labeling and weighting of a tree and the closed-form gap.
//!
//! The generic labeling 2-colors the whole tree by level parity (level 0 is
//! the a-team). For `delta > 0` the generic algorithm assigns weights level
//! by level so that every edge `e` carries an imbalance of exactly
//! `delta / |e|`; the root's weight balances its team to 1. With
//! `delta = (sum_e 1/|e|)^-1` the result is normalized and attains the gap.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::simplex::{gap_by_edges, NormalizedLoadVector, Parity, Simplex};
use crate::tree::{MetricTree, VertexId};

/// Closed-form gap of a tree together with the configuration attaining it.
#[derive(Clone, Debug)]
pub struct GapReport {
    pub gamma: f64,
    pub delta_star: f64,
    pub generic_simplex: Simplex,
    pub generic_weights: NormalizedLoadVector,
    /// Gap of the generic simplex under the generic weights, by edge sums.
    pub witness_gap: f64,
}

fn parity_of_level(level: usize) -> Parity {
    if level.is_multiple_of(2) {
        Parity::A
    } else {
        Parity::B
    }
}

/// Even-level vertices in the a-team, odd-level vertices in the b-team.
pub fn generic_labeling(tree: &MetricTree) -> Result<Simplex> {
    generic_labeling_arc(Arc::new(tree.clone()))
}

pub(crate) fn generic_labeling_arc(tree: Arc<MetricTree>) -> Result<Simplex> {
    if tree.len() < 2 {
        return Err(Error::TooFewVertices);
    }
    let levels = tree.level_assignment()?;
    let (a, b): (Vec<VertexId>, Vec<VertexId>) =
        tree.vertices().partition(|&v| parity_of_level(levels.level(v)) == Parity::A);
    Simplex::new(tree, &a, &b)
}

/// True when every vertex of the minimal subtree belongs to the simplex and
/// every edge of the minimal subtree joins opposite teams.
pub fn is_generically_labeled(simplex: &Simplex) -> bool {
    let Ok(edges) = simplex.span_edges() else {
        return false;
    };
    let sub = simplex.minimal_subtree().expect("tree host");
    let tree = simplex.tree().expect("tree host");
    let covers = sub
        .labels()
        .iter()
        .all(|l| tree.id(l).map(|v| simplex.parity_of(v).is_some()).unwrap_or(false));
    covers
        && edges.iter().all(|e| {
            matches!(
                (simplex.parity_of(e.left), simplex.parity_of(e.right)),
                (Some(x), Some(y)) if x != y
            )
        })
}

/// Runs the generic algorithm for `delta`, returning one weight per vertex
/// (indexed by vertex id). Weights below the top level are positive; the
/// root's balancing weight may not be.
pub fn generic_algorithm(tree: &MetricTree, delta: f64) -> Result<Vec<f64>> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    let levels = tree.level_assignment()?;
    let n = tree.len();
    let mut order: Vec<VertexId> = tree.vertices().collect();
    order.sort_by_key(|&v| levels.level(v));

    let mut weight = vec![0.0; n];
    // a- and b-weight in the subtree below each vertex, the vertex included
    let mut below_a = vec![0.0; n];
    let mut below_b = vec![0.0; n];
    let root = tree.root();
    for &v in &order {
        if v == root {
            continue;
        }
        let e = tree.edge_of(v).expect("non-root vertex has an edge");
        let strict_a: f64 = tree.children(v).map(|c| below_a[c.index()]).sum();
        let strict_b: f64 = tree.children(v).map(|c| below_b[c.index()]).sum();
        let i = v.index();
        match parity_of_level(levels.level(v)) {
            Parity::A => {
                weight[i] = strict_b - strict_a + delta / e.weight;
                below_a[i] = strict_a + weight[i];
                below_b[i] = strict_b;
            }
            Parity::B => {
                weight[i] = strict_a - strict_b + delta / e.weight;
                below_a[i] = strict_a;
                below_b[i] = strict_b + weight[i];
            }
        }
    }
    let root_parity = parity_of_level(levels.k0);
    let team_rest: f64 = tree
        .vertices()
        .filter(|&v| v != root && parity_of_level(levels.level(v)) == root_parity)
        .map(|v| weight[v.index()])
        .sum();
    weight[root.index()] = 1.0 - team_rest;
    Ok(weight)
}

/// `(sum_e 1/|e|)^-1`, the only `delta` for which the generic weights are
/// normalized.
pub fn generic_delta(tree: &MetricTree) -> Result<f64> {
    if tree.edge_count() == 0 {
        return Err(Error::NoEdges);
    }
    Ok(1.0 / tree.edges().iter().map(|e| 1.0 / e.weight).sum::<f64>())
}

/// `(sum over edges except the root edge of 1/|e|)^-1`: the generic weights
/// are all positive exactly for `delta` below this. Infinite for one edge.
pub fn positivity_threshold(tree: &MetricTree) -> Result<f64> {
    if tree.edge_count() == 0 {
        return Err(Error::NoEdges);
    }
    let root = tree.root();
    let s: f64 = tree
        .edges()
        .iter()
        .filter(|e| e.right != root)
        .map(|e| 1.0 / e.weight)
        .sum();
    Ok(if s == 0.0 { f64::INFINITY } else { 1.0 / s })
}

/// Packs per-vertex weights into a load vector over the generic simplex.
fn pack(simplex: &Simplex, weight: &[f64]) -> Result<NormalizedLoadVector> {
    let m = simplex.a_team().iter().map(|v| weight[v.index()]).collect();
    let n = simplex.b_team().iter().map(|v| weight[v.index()]).collect();
    NormalizedLoadVector::new(m, n)
}

/// The 1-negative type gap of `tree`, with its generic witness.
pub fn gamma_t(tree: &MetricTree) -> Result<GapReport> {
    let delta = generic_delta(tree)?;
    let simplex = generic_labeling(tree)?;
    let weights = generic_algorithm(tree, delta)?;
    let load = pack(&simplex, &weights)?;
    let witness_gap = gap_by_edges(&simplex, &load)?;
    Ok(GapReport {
        gamma: delta,
        delta_star: delta,
        generic_simplex: simplex,
        generic_weights: load,
        witness_gap,
    })
}

/// The configuration attaining the gap: the whole tree, generically labeled
/// and generically weighted.
pub fn equality_witness(tree: &MetricTree) -> Result<(Simplex, NormalizedLoadVector)> {
    let r = gamma_t(tree)?;
    Ok((r.generic_simplex, r.generic_weights))
}
