//! Edge contraction toward a generically labeled simplex.
//!
//! An edge of the minimal subtree is prunable when its endpoints share a team
//! or one endpoint is outside the simplex. Contracting it merges the two
//! endpoints (adding their weights) and lowers the gap by exactly that edge's
//! term `(alpha_L - beta_L)^2 |e|`; every other edge keeps its partition sums.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::simplex::{Host, NormalizedLoadVector, Parity, Simplex};
use crate::tree::{MetricTree, OrientedEdge, VertexId};

/// Gap decreases at or below this are reported as zero-decrease steps.
pub const ZERO_DECREASE_TOL: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub struct PruneStep {
    /// Endpoint labels of the contracted edge, deleted vertex first.
    pub contracted: (String, String),
    pub weight: f64,
    pub gap_decrease: f64,
    /// Label of the vertex that survives the contraction.
    pub merged_vertex: String,
}

impl PruneStep {
    pub fn is_zero_decrease(&self) -> bool {
        self.gap_decrease <= ZERO_DECREASE_TOL
    }
}

#[derive(Clone, Debug)]
pub struct PruneOutcome {
    pub simplex: Simplex,
    pub load: NormalizedLoadVector,
    pub steps: Vec<PruneStep>,
}

impl PruneOutcome {
    pub fn total_decrease(&self) -> f64 {
        self.steps.iter().map(|s| s.gap_decrease).sum()
    }
}

fn is_prunable(simplex: &Simplex, e: &OrientedEdge) -> bool {
    match (simplex.parity_of(e.left), simplex.parity_of(e.right)) {
        (Some(x), Some(y)) => x == y,
        _ => true,
    }
}

/// Edges of the minimal subtree that may be contracted; empty exactly when
/// the simplex is generically labeled.
pub fn prunable_edges(simplex: &Simplex) -> Result<Vec<OrientedEdge>> {
    Ok(simplex
        .span_edges()?
        .into_iter()
        .filter(|e| is_prunable(simplex, e))
        .collect())
}

/// Contracts `edge` (given by its host endpoints, either orientation).
///
/// The host vertex nearer the host root survives; the other is deleted and
/// its weight, if any, moves onto the survivor.
pub fn prune(
    simplex: &Simplex,
    load: &NormalizedLoadVector,
    edge: &OrientedEdge,
) -> Result<(Simplex, NormalizedLoadVector, PruneStep)> {
    let tree = simplex.tree().ok_or(Error::NotATreeHost)?;
    let name = |v: VertexId| tree.label(v).to_string();
    let span_edge = simplex
        .span_edges()?
        .into_iter()
        .find(|e| {
            (e.left == edge.left && e.right == edge.right) || (e.left == edge.right && e.right == edge.left)
        })
        .ok_or_else(|| Error::EdgeNotInMinimalSubtree(name(edge.left), name(edge.right)))?;
    if !is_prunable(simplex, &span_edge) {
        return Err(Error::NotPrunable(name(edge.left), name(edge.right)));
    }
    let sums = crate::simplex::partition_sums(simplex, load.as_load(), &span_edge)?;
    let gap_decrease = (sums.alpha_l - sums.beta_l).powi(2) * span_edge.weight;

    let host_edge = tree
        .find_edge(span_edge.left, span_edge.right)
        .expect("span edges are host edges");
    let (x, y) = (host_edge.left, host_edge.right);
    let contracted = contract(tree, x, y)?;
    let new_id = |v: VertexId| contracted.id(tree.label(if v == x { y } else { v }));

    // x maps onto y; a shared team slot accumulates both weights
    let mut a: Vec<(VertexId, f64)> = Vec::new();
    let mut b: Vec<(VertexId, f64)> = Vec::new();
    let members = simplex
        .a_team()
        .iter()
        .zip(load.m())
        .map(|(&v, &w)| (v, w, Parity::A))
        .chain(simplex.b_team().iter().zip(load.n()).map(|(&v, &w)| (v, w, Parity::B)));
    for (v, w, parity) in members {
        let team = match parity {
            Parity::A => &mut a,
            Parity::B => &mut b,
        };
        let target = new_id(v)?;
        match team.iter_mut().find(|(u, _)| *u == target) {
            Some((_, acc)) => *acc += w,
            None => team.push((target, w)),
        }
    }
    let host = Arc::new(contracted);
    let (a_ids, m): (Vec<VertexId>, Vec<f64>) = a.into_iter().unzip();
    let (b_ids, n): (Vec<VertexId>, Vec<f64>) = b.into_iter().unzip();
    let new_simplex = Simplex::new(Host::Tree(host), &a_ids, &b_ids)?;
    let new_load = NormalizedLoadVector::new(m, n)?;
    let step = PruneStep {
        contracted: (name(x), name(y)),
        weight: host_edge.weight,
        gap_decrease,
        merged_vertex: name(y),
    };
    Ok((new_simplex, new_load, step))
}

/// `tree` with the edge `x -> y` contracted onto `y`.
fn contract(tree: &MetricTree, x: VertexId, y: VertexId) -> Result<MetricTree> {
    let vertices: Vec<String> = tree
        .vertices()
        .filter(|&v| v != x)
        .map(|v| tree.label(v).to_string())
        .collect();
    let edges: Vec<(String, String, f64)> = tree
        .edges()
        .into_iter()
        .filter(|e| e.left != x)
        .map(|e| {
            let right = if e.right == x { y } else { e.right };
            (tree.label(e.left).to_string(), tree.label(right).to_string(), e.weight)
        })
        .collect();
    let root = tree.label(tree.root()).to_string();
    match MetricTree::from_parts(vertices.clone(), edges.clone(), Some(root)) {
        Err(Error::RootNotLeaf(_)) => MetricTree::from_parts(vertices, edges, None),
        other => other,
    }
}

/// Repeatedly contracts the deepest prunable edge until none remain.
pub fn prune_to_generic(simplex: &Simplex, load: &NormalizedLoadVector) -> Result<PruneOutcome> {
    let mut current = simplex.clone();
    let mut weights = load.clone();
    let mut steps = Vec::new();
    loop {
        let tree = current.tree().ok_or(Error::NotATreeHost)?;
        let pick = prunable_edges(&current)?.into_iter().max_by(|e, f| {
            let key = |e: &OrientedEdge| {
                let deeper = if tree.hop_depth(e.left) >= tree.hop_depth(e.right) { e.left } else { e.right };
                (tree.hop_depth(deeper), std::cmp::Reverse(tree.label(deeper).to_string()))
            };
            key(e).cmp(&key(f))
        });
        let Some(edge) = pick else { break };
        let (s, w, step) = prune(&current, &weights, &edge)?;
        current = s;
        weights = w;
        steps.push(step);
    }
    Ok(PruneOutcome {
        simplex: current,
        load: weights,
        steps,
    })
}
