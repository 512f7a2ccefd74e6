//! `(q,t)`-simplexes, load vectors and the simplex gap.
//!
//! A simplex splits `q + t` distinct points into an a-team and a b-team. On a
//! tree host the simplex also carries its minimal subtree `T_D`, oriented
//! toward the host root when that root lies in `T_D` and toward the smallest
//! leaf of `T_D` otherwise. Edges handed out by a simplex use host vertex ids.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::metric::FiniteMetric;
use crate::tree::{MetricTree, OrientedEdge, VertexId};

/// Team sums of a normalized load must be within this of 1.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Metric space a simplex lives in.
#[derive(Clone, Debug)]
pub enum Host {
    Tree(Arc<MetricTree>),
    Metric(Arc<FiniteMetric>),
}

impl Host {
    pub fn len(&self) -> usize {
        match self {
            Host::Tree(t) => t.len(),
            Host::Metric(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn label(&self, v: VertexId) -> &str {
        match self {
            Host::Tree(t) => t.label(v),
            Host::Metric(m) => m.label(v),
        }
    }

    pub fn distance(&self, u: VertexId, v: VertexId) -> f64 {
        match self {
            Host::Tree(t) => t.distance(u, v),
            Host::Metric(m) => m.distance(u, v),
        }
    }

    pub fn as_tree(&self) -> Option<&MetricTree> {
        match self {
            Host::Tree(t) => Some(t),
            Host::Metric(_) => None,
        }
    }
}

impl From<MetricTree> for Host {
    fn from(t: MetricTree) -> Self {
        Host::Tree(Arc::new(t))
    }
}

impl From<Arc<MetricTree>> for Host {
    fn from(t: Arc<MetricTree>) -> Self {
        Host::Tree(t)
    }
}

impl From<FiniteMetric> for Host {
    fn from(m: FiniteMetric) -> Self {
        Host::Metric(Arc::new(m))
    }
}

impl From<Arc<FiniteMetric>> for Host {
    fn from(m: Arc<FiniteMetric>) -> Self {
        Host::Metric(m)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    A,
    B,
}

impl Parity {
    pub fn flip(self) -> Parity {
        match self {
            Parity::A => Parity::B,
            Parity::B => Parity::A,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub(crate) struct Slot {
    pub parity: Parity,
    pub pos: usize,
}

#[derive(Clone, Debug)]
pub(crate) struct Span {
    pub tree: MetricTree,
    // span vertex -> host vertex
    pub host_ids: Vec<VertexId>,
    // span vertex -> team membership
    pub slots: Vec<Option<Slot>>,
}

#[derive(Clone, Debug)]
pub struct Simplex {
    host: Host,
    a_team: Vec<VertexId>,
    b_team: Vec<VertexId>,
    span: Option<Span>,
}

impl Simplex {
    pub fn new(host: impl Into<Host>, a_team: &[VertexId], b_team: &[VertexId]) -> Result<Self> {
        let host = host.into();
        if a_team.is_empty() || b_team.is_empty() {
            return Err(Error::EmptyTeam);
        }
        let mut used = vec![false; host.len()];
        for &v in a_team.iter().chain(b_team) {
            if v.index() >= host.len() {
                return Err(Error::UnknownVertex(v.to_string()));
            }
            if std::mem::replace(&mut used[v.index()], true) {
                return Err(Error::DuplicateVertex(host.label(v).to_string()));
            }
        }
        let span = match &host {
            Host::Tree(t) => Some(build_span(t, a_team, b_team)?),
            Host::Metric(_) => None,
        };
        Ok(Simplex {
            host,
            a_team: a_team.to_vec(),
            b_team: b_team.to_vec(),
            span,
        })
    }

    /// Builds a simplex from vertex labels of a tree.
    pub fn from_labels(tree: impl Into<Arc<MetricTree>>, a_team: &[&str], b_team: &[&str]) -> Result<Self> {
        let tree = tree.into();
        let a = tree.ids(a_team)?;
        let b = tree.ids(b_team)?;
        Simplex::new(tree, &a, &b)
    }

    pub fn host(&self) -> &Host {
        &self.host
    }

    pub fn tree(&self) -> Option<&MetricTree> {
        self.host.as_tree()
    }

    pub fn a_team(&self) -> &[VertexId] {
        &self.a_team
    }

    pub fn b_team(&self) -> &[VertexId] {
        &self.b_team
    }

    pub fn q(&self) -> usize {
        self.a_team.len()
    }

    pub fn t(&self) -> usize {
        self.b_team.len()
    }

    pub fn len(&self) -> usize {
        self.q() + self.t()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Team membership of a host vertex.
    pub fn parity_of(&self, v: VertexId) -> Option<Parity> {
        if self.a_team.contains(&v) {
            Some(Parity::A)
        } else if self.b_team.contains(&v) {
            Some(Parity::B)
        } else {
            None
        }
    }

    /// The minimal subtree `T_D` (tree hosts only).
    pub fn minimal_subtree(&self) -> Option<&MetricTree> {
        self.span.as_ref().map(|s| &s.tree)
    }

    pub(crate) fn span(&self) -> Result<&Span> {
        self.span.as_ref().ok_or(Error::NotATreeHost)
    }

    /// Oriented edges of `T_D`, expressed with host vertex ids.
    pub fn span_edges(&self) -> Result<Vec<OrientedEdge>> {
        let span = self.span()?;
        Ok(span
            .tree
            .edges()
            .into_iter()
            .map(|e| OrientedEdge {
                left: span.host_ids[e.left.index()],
                right: span.host_ids[e.right.index()],
                weight: e.weight,
            })
            .collect())
    }

    /// Display form `[a, b; m]`.
    pub fn describe(&self) -> String {
        let names = |vs: &[VertexId]| {
            vs.iter()
                .map(|&v| self.host.label(v).to_string())
                .collect::<Vec<_>>()
                .join(", ")
        };
        format!("[{}; {}]", names(&self.a_team), names(&self.b_team))
    }

    fn check_len(&self, m: &[f64], n: &[f64]) -> Result<()> {
        if m.len() != self.q() || n.len() != self.t() {
            return Err(Error::LoadLength {
                expected: self.len(),
                got: m.len() + n.len(),
            });
        }
        Ok(())
    }

    /// Per-edge partition sums for arbitrary (even unnormalized or zero) weights.
    pub(crate) fn edge_terms(&self, m: &[f64], n: &[f64]) -> Result<Vec<EdgeTerm>> {
        let span = self.span()?;
        let tree = &span.tree;
        let own = |s: usize| -> (f64, f64) {
            match span.slots[s] {
                Some(Slot { parity: Parity::A, pos }) => (m[pos], 0.0),
                Some(Slot { parity: Parity::B, pos }) => (0.0, n[pos]),
                None => (0.0, 0.0),
            }
        };
        let total_m: f64 = m.iter().sum();
        let total_n: f64 = n.iter().sum();
        let mut acc_a = vec![0.0; tree.len()];
        let mut acc_b = vec![0.0; tree.len()];
        let mut terms = Vec::with_capacity(tree.edge_count());
        for v in tree.top_down().rev() {
            let s = v.index();
            let (wa, wb) = own(s);
            acc_a[s] += wa;
            acc_b[s] += wb;
            if let Some(e) = tree.edge_of(v) {
                let p = e.right.index();
                acc_a[p] += acc_a[s];
                acc_b[p] += acc_b[s];
                let (ra, rb) = own(p);
                terms.push(EdgeTerm {
                    edge: OrientedEdge {
                        left: span.host_ids[s],
                        right: span.host_ids[p],
                        weight: e.weight,
                    },
                    sums: PartitionSums {
                        alpha_l: acc_a[s],
                        beta_l: acc_b[s],
                        alpha_r: total_m - acc_a[s],
                        beta_r: total_n - acc_b[s],
                        alpha_l_strict: acc_a[s] - wa,
                        beta_l_strict: acc_b[s] - wb,
                        alpha_r_strict: total_m - acc_a[s] - ra,
                        beta_r_strict: total_n - acc_b[s] - rb,
                    },
                });
            }
        }
        Ok(terms)
    }
}

fn build_span(tree: &MetricTree, a_team: &[VertexId], b_team: &[VertexId]) -> Result<Span> {
    let members: Vec<VertexId> = a_team.iter().chain(b_team).copied().collect();
    let sub = tree.minimal_subtree(&members)?;
    let host_ids: Vec<VertexId> = sub
        .labels()
        .iter()
        .map(|l| tree.id(l))
        .collect::<Result<_>>()?;
    let mut slots = vec![None; sub.len()];
    for (s, h) in host_ids.iter().enumerate() {
        if let Some(pos) = a_team.iter().position(|v| v == h) {
            slots[s] = Some(Slot { parity: Parity::A, pos });
        } else if let Some(pos) = b_team.iter().position(|v| v == h) {
            slots[s] = Some(Slot { parity: Parity::B, pos });
        }
    }
    Ok(Span {
        tree: sub,
        host_ids,
        slots,
    })
}

#[derive(Clone, Debug)]
pub(crate) struct EdgeTerm {
    pub edge: OrientedEdge,
    pub sums: PartitionSums,
}

/// Positive weights `m` on the a-team and `n` on the b-team.
#[derive(Clone, Debug, PartialEq)]
pub struct LoadVector {
    m: Vec<f64>,
    n: Vec<f64>,
}

impl LoadVector {
    pub fn new(m: Vec<f64>, n: Vec<f64>) -> Result<Self> {
        if m.is_empty() || n.is_empty() {
            return Err(Error::EmptyTeam);
        }
        if m.iter().chain(&n).any(|&w| !(w.is_finite() && w > 0.0)) {
            return Err(Error::NonPositiveLoad);
        }
        Ok(LoadVector { m, n })
    }

    pub fn m(&self) -> &[f64] {
        &self.m
    }

    pub fn n(&self) -> &[f64] {
        &self.n
    }

    /// Rescales each team to sum to one.
    pub fn normalized(&self) -> NormalizedLoadVector {
        let sm: f64 = self.m.iter().sum();
        let sn: f64 = self.n.iter().sum();
        NormalizedLoadVector(LoadVector {
            m: self.m.iter().map(|x| x / sm).collect(),
            n: self.n.iter().map(|x| x / sn).collect(),
        })
    }
}

/// A load vector whose team sums are both 1 (to [`NORMALIZATION_TOL`]).
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedLoadVector(LoadVector);

impl NormalizedLoadVector {
    pub fn new(m: Vec<f64>, n: Vec<f64>) -> Result<Self> {
        Self::try_from(LoadVector::new(m, n)?)
    }

    pub fn uniform(q: usize, t: usize) -> Self {
        NormalizedLoadVector(LoadVector {
            m: vec![1.0 / q as f64; q],
            n: vec![1.0 / t as f64; t],
        })
    }

    pub fn m(&self) -> &[f64] {
        &self.0.m
    }

    pub fn n(&self) -> &[f64] {
        &self.0.n
    }

    pub fn as_load(&self) -> &LoadVector {
        &self.0
    }
}

impl TryFrom<LoadVector> for NormalizedLoadVector {
    type Error = Error;

    fn try_from(load: LoadVector) -> Result<Self> {
        let sm: f64 = load.m.iter().sum();
        let sn: f64 = load.n.iter().sum();
        if (sm - 1.0).abs() > NORMALIZATION_TOL || (sn - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized(sm, sn));
        }
        Ok(NormalizedLoadVector(load))
    }
}

/// Team weight on each side of an edge; `_strict` variants exclude the
/// edge's own endpoint.
#[derive(Copy, Clone, Debug, PartialEq, Default)]
pub struct PartitionSums {
    pub alpha_l: f64,
    pub alpha_r: f64,
    pub beta_l: f64,
    pub beta_r: f64,
    pub alpha_l_strict: f64,
    pub alpha_r_strict: f64,
    pub beta_l_strict: f64,
    pub beta_r_strict: f64,
}

impl PartitionSums {
    fn reversed(self) -> Self {
        PartitionSums {
            alpha_l: self.alpha_r,
            alpha_r: self.alpha_l,
            beta_l: self.beta_r,
            beta_r: self.beta_l,
            alpha_l_strict: self.alpha_r_strict,
            alpha_r_strict: self.alpha_l_strict,
            beta_l_strict: self.beta_r_strict,
            beta_r_strict: self.beta_l_strict,
        }
    }
}

/// Partition sums of `load` across `edge`, an edge of the minimal subtree
/// given by its host endpoints. The left side is the side of `edge.left`.
pub fn partition_sums(simplex: &Simplex, load: &LoadVector, edge: &OrientedEdge) -> Result<PartitionSums> {
    simplex.check_len(load.m(), load.n())?;
    let terms = simplex.edge_terms(load.m(), load.n())?;
    find_term(simplex, &terms, edge)
}

fn find_term(simplex: &Simplex, terms: &[EdgeTerm], edge: &OrientedEdge) -> Result<PartitionSums> {
    for t in terms {
        if t.edge.left == edge.left && t.edge.right == edge.right {
            return Ok(t.sums);
        }
        if t.edge.left == edge.right && t.edge.right == edge.left {
            return Ok(t.sums.reversed());
        }
    }
    let name = |v: VertexId| {
        if v.index() < simplex.host.len() {
            simplex.host.label(v).to_string()
        } else {
            v.to_string()
        }
    };
    Err(Error::EdgeNotInMinimalSubtree(name(edge.left), name(edge.right)))
}

/// Cross-team weighted distance sum minus the within-team sums, with every
/// distance raised to `p`.
pub fn gap_direct(simplex: &Simplex, load: &NormalizedLoadVector, p: f64) -> Result<f64> {
    if p.is_nan() || p < 0.0 {
        return Err(Error::InvalidExponent(p));
    }
    simplex.check_len(load.m(), load.n())?;
    Ok(gap_direct_raw(simplex, load.m(), load.n(), p))
}

pub(crate) fn gap_direct_raw(simplex: &Simplex, m: &[f64], n: &[f64], p: f64) -> f64 {
    let h = &simplex.host;
    let dp = |u: VertexId, v: VertexId| {
        let d = h.distance(u, v);
        if p == 1.0 {
            d
        } else {
            d.powf(p)
        }
    };
    let (a, b) = (&simplex.a_team, &simplex.b_team);
    let mut cross = 0.0;
    for (j, &x) in a.iter().enumerate() {
        for (i, &y) in b.iter().enumerate() {
            cross += m[j] * n[i] * dp(x, y);
        }
    }
    let mut within = 0.0;
    for j1 in 0..a.len() {
        for j2 in j1 + 1..a.len() {
            within += m[j1] * m[j2] * dp(a[j1], a[j2]);
        }
    }
    for i1 in 0..b.len() {
        for i2 in i1 + 1..b.len() {
            within += n[i1] * n[i2] * dp(b[i1], b[i2]);
        }
    }
    cross - within
}

/// Gap as the sum over edges of the minimal subtree of
/// `(alpha_L - beta_L)^2 |e|`. Tree hosts, exponent 1.
pub fn gap_by_edges(simplex: &Simplex, load: &NormalizedLoadVector) -> Result<f64> {
    simplex.check_len(load.m(), load.n())?;
    let terms = simplex.edge_terms(load.m(), load.n())?;
    Ok(terms
        .iter()
        .map(|t| (t.sums.alpha_l - t.sums.beta_l).powi(2) * t.edge.weight)
        .sum())
}

/// The single-edge term `(alpha_L - beta_L)^2 |e|` of [`gap_by_edges`].
pub fn edge_contribution(simplex: &Simplex, load: &NormalizedLoadVector, edge: &OrientedEdge) -> Result<f64> {
    simplex.check_len(load.m(), load.n())?;
    let terms = simplex.edge_terms(load.m(), load.n())?;
    let s = find_term(simplex, &terms, edge)?;
    let w = terms
        .iter()
        .find(|t| {
            (t.edge.left == edge.left && t.edge.right == edge.right)
                || (t.edge.left == edge.right && t.edge.right == edge.left)
        })
        .map(|t| t.edge.weight)
        .unwrap_or_default();
    Ok((s.alpha_l - s.beta_l).powi(2) * w)
}

/// Left/right symmetric extension of the gap to unnormalized loads:
/// `sum_e ((alpha_L - beta_L)^2 + (alpha_R - beta_R)^2) |e| / 2`.
pub fn extended_gap(simplex: &Simplex, load: &LoadVector) -> Result<f64> {
    simplex.check_len(load.m(), load.n())?;
    extended_gap_raw(simplex, load.m(), load.n())
}

pub(crate) fn extended_gap_raw(simplex: &Simplex, m: &[f64], n: &[f64]) -> Result<f64> {
    let terms = simplex.edge_terms(m, n)?;
    Ok(terms
        .iter()
        .map(|t| {
            let s = &t.sums;
            ((s.alpha_l - s.beta_l).powi(2) + (s.alpha_r - s.beta_r).powi(2)) * t.edge.weight / 2.0
        })
        .sum())
}

/// Converts a mean-zero weighting of distinct points into a normalized
/// simplex: positive entries form the a-team, negative entries the b-team and
/// exact zeros are dropped. Also returns `alpha = sum|eta| / 2`.
pub fn eta_to_simplex(
    host: impl Into<Host>,
    points: &[VertexId],
    eta: &[f64],
) -> Result<(Simplex, NormalizedLoadVector, f64)> {
    if points.len() != eta.len() {
        return Err(Error::InvalidArgument(format!(
            "{} points but {} weights",
            points.len(),
            eta.len()
        )));
    }
    if eta.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("non-finite weight".into()));
    }
    let abs_sum: f64 = eta.iter().map(|x| x.abs()).sum();
    if abs_sum == 0.0 {
        return Err(Error::ZeroVector);
    }
    let sum: f64 = eta.iter().sum();
    if sum.abs() > 1e-12 * abs_sum {
        return Err(Error::NonZeroSum(sum));
    }
    let alpha = abs_sum / 2.0;
    let (mut a, mut b, mut m, mut n) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (&v, &x) in points.iter().zip(eta) {
        if x > 0.0 {
            a.push(v);
            m.push(x);
        } else if x < 0.0 {
            b.push(v);
            n.push(-x);
        }
    }
    let simplex = Simplex::new(host, &a, &b)?;
    let load = LoadVector::new(m, n)?.normalized();
    Ok((simplex, load, alpha))
}

/// Inverse of [`eta_to_simplex`]: a-team first with `alpha * m_j`, then the
/// b-team with `-alpha * n_i`.
pub fn simplex_to_eta(simplex: &Simplex, load: &NormalizedLoadVector, alpha: f64) -> (Vec<VertexId>, Vec<f64>) {
    let points = simplex.a_team.iter().chain(&simplex.b_team).copied().collect();
    let eta = load
        .m()
        .iter()
        .map(|x| alpha * x)
        .chain(load.n().iter().map(|x| -alpha * x))
        .collect();
    (points, eta)
}

/// Value of the quadratic form `sum_{i,j} d(x_i, x_j)^p eta_i eta_j`.
pub fn eta_form(host: &Host, points: &[VertexId], eta: &[f64], p: f64) -> f64 {
    let mut total = 0.0;
    for (i, &x) in points.iter().enumerate() {
        for (j, &y) in points.iter().enumerate() {
            if i != j {
                total += host.distance(x, y).powf(p) * eta[i] * eta[j];
            }
        }
    }
    total
}

/// One edge's derivative-nesting residual: the central-difference value of
/// `d/dm_j + d/dn_i` of the extended gap against `±2 (alpha_L - beta_L) |e|`.
#[derive(Clone, Debug)]
pub struct NestingResidual {
    pub edge: OrientedEdge,
    pub finite_difference: f64,
    pub predicted: f64,
}

/// For every edge of `T_D` joining an a-vertex and a b-vertex, compares the
/// summed partial derivatives of the extended gap with twice the signed edge
/// imbalance. `h` is the central-difference step.
pub fn derivative_nesting(simplex: &Simplex, load: &NormalizedLoadVector, h: f64) -> Result<Vec<NestingResidual>> {
    simplex.check_len(load.m(), load.n())?;
    let terms = simplex.edge_terms(load.m(), load.n())?;
    let (m0, n0) = (load.m().to_vec(), load.n().to_vec());
    let mut out = Vec::new();
    for t in &terms {
        let (left, right) = (simplex.parity_of(t.edge.left), simplex.parity_of(t.edge.right));
        let (j, i, sign) = match (left, right) {
            (Some(Parity::A), Some(Parity::B)) => (pos_of(&simplex.a_team, t.edge.left), pos_of(&simplex.b_team, t.edge.right), 1.0),
            (Some(Parity::B), Some(Parity::A)) => (pos_of(&simplex.a_team, t.edge.right), pos_of(&simplex.b_team, t.edge.left), -1.0),
            _ => continue,
        };
        let dm = partial(simplex, &m0, &n0, Some(j), None, h)?;
        let dn = partial(simplex, &m0, &n0, None, Some(i), h)?;
        out.push(NestingResidual {
            edge: t.edge,
            finite_difference: dm + dn,
            predicted: sign * 2.0 * (t.sums.alpha_l - t.sums.beta_l) * t.edge.weight,
        });
    }
    Ok(out)
}

fn pos_of(team: &[VertexId], v: VertexId) -> usize {
    team.iter().position(|&x| x == v).expect("vertex belongs to team")
}

/// Central difference of the extended gap in one coordinate.
pub(crate) fn partial(
    simplex: &Simplex,
    m: &[f64],
    n: &[f64],
    mj: Option<usize>,
    ni: Option<usize>,
    h: f64,
) -> Result<f64> {
    let shifted = |delta: f64| -> Result<f64> {
        let mut m = m.to_vec();
        let mut n = n.to_vec();
        if let Some(j) = mj {
            m[j] += delta;
        }
        if let Some(i) = ni {
            n[i] += delta;
        }
        extended_gap_raw(simplex, &m, &n)
    };
    Ok((shifted(h)? - shifted(-h)?) / (2.0 * h))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_edge() -> Arc<MetricTree> {
        Arc::new(MetricTree::build(&["a", "b"], &[("a", "b", 1.0)], Some("b")).unwrap())
    }

    fn path(w1: f64, w2: f64) -> Arc<MetricTree> {
        Arc::new(MetricTree::build(&["a", "m", "b"], &[("a", "m", w1), ("m", "b", w2)], Some("b")).unwrap())
    }

    fn edge(t: &MetricTree, l: &str, r: &str) -> OrientedEdge {
        let (l, r) = (t.id(l).unwrap(), t.id(r).unwrap());
        t.find_edge(l, r)
            .map(|e| OrientedEdge { left: l, right: r, weight: e.weight })
            .unwrap()
    }

    fn half_half_one() -> NormalizedLoadVector {
        NormalizedLoadVector::new(vec![0.5, 0.5], vec![1.0]).unwrap()
    }

    #[test]
    fn make_simplex_examples() {
        let s = Simplex::from_labels(single_edge(), &["a"], &["b"]).unwrap();
        assert_eq!((s.q(), s.t()), (1, 1));
        let s = Simplex::from_labels(path(1.0, 1.0), &["a", "b"], &["m"]).unwrap();
        assert_eq!(s.describe(), "[a, b; m]");
        assert_eq!(s.minimal_subtree().unwrap().len(), 3);
        assert!(matches!(
            Simplex::from_labels(path(1.0, 1.0), &["a", "m"], &["m"]),
            Err(Error::DuplicateVertex(_))
        ));
        assert_eq!(Simplex::from_labels(path(1.0, 1.0), &[], &["m"]).unwrap_err(), Error::EmptyTeam);
    }

    #[test]
    fn partition_sum_examples() {
        let t = single_edge();
        let s = Simplex::from_labels(t.clone(), &["a"], &["b"]).unwrap();
        let load = LoadVector::new(vec![1.0], vec![1.0]).unwrap();
        let ps = partition_sums(&s, &load, &edge(&t, "a", "b")).unwrap();
        assert_eq!((ps.alpha_l, ps.beta_l, ps.alpha_r, ps.beta_r), (1.0, 0.0, 0.0, 1.0));

        let t = path(1.0, 1.0);
        let s = Simplex::from_labels(t.clone(), &["a", "b"], &["m"]).unwrap();
        let w = half_half_one();
        let ps = partition_sums(&s, w.as_load(), &edge(&t, "a", "m")).unwrap();
        assert_eq!((ps.alpha_l, ps.beta_l), (0.5, 0.0));
        let ps = partition_sums(&s, w.as_load(), &edge(&t, "m", "b")).unwrap();
        assert_eq!((ps.alpha_l, ps.beta_l), (0.5, 1.0));
        assert_eq!((ps.alpha_l_strict, ps.beta_l_strict), (0.5, 0.0));
        assert_eq!(ps.alpha_l + ps.alpha_r, 1.0);
        assert_eq!(ps.beta_l + ps.beta_r, 1.0);

        let bogus = OrientedEdge { left: t.id("a").unwrap(), right: t.id("b").unwrap(), weight: 1.0 };
        assert!(matches!(
            partition_sums(&s, w.as_load(), &bogus),
            Err(Error::EdgeNotInMinimalSubtree(..))
        ));
    }

    #[test]
    fn gap_direct_examples() {
        let s = Simplex::from_labels(single_edge(), &["a"], &["b"]).unwrap();
        let w = NormalizedLoadVector::new(vec![1.0], vec![1.0]).unwrap();
        assert_eq!(gap_direct(&s, &w, 1.0).unwrap(), 1.0);

        let s = Simplex::from_labels(path(1.0, 1.0), &["a", "b"], &["m"]).unwrap();
        assert!((gap_direct(&s, &half_half_one(), 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((gap_direct(&s, &half_half_one(), 0.0).unwrap() - 0.75).abs() < 1e-15);
        assert_eq!(gap_direct(&s, &half_half_one(), -1.0).unwrap_err(), Error::InvalidExponent(-1.0));
    }

    #[test]
    fn gap_by_edges_examples() {
        let s = Simplex::from_labels(single_edge(), &["a"], &["b"]).unwrap();
        let w = NormalizedLoadVector::new(vec![1.0], vec![1.0]).unwrap();
        assert_eq!(gap_by_edges(&s, &w).unwrap(), 1.0);

        let s = Simplex::from_labels(path(1.0, 1.0), &["a", "b"], &["m"]).unwrap();
        assert_eq!(gap_by_edges(&s, &half_half_one()).unwrap(), 0.5);

        let s = Simplex::from_labels(path(1.0, 2.0), &["a", "b"], &["m"]).unwrap();
        assert_eq!(gap_by_edges(&s, &half_half_one()).unwrap(), 0.75);
        assert!((gap_direct(&s, &half_half_one(), 1.0).unwrap() - 0.75).abs() < 1e-15);

        let metric = FiniteMetric::discrete(2);
        let s = Simplex::new(metric, &[VertexId::new(0)], &[VertexId::new(1)]).unwrap();
        assert_eq!(gap_by_edges(&s, &w).unwrap_err(), Error::NotATreeHost);
        assert_eq!(gap_direct(&s, &w, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn edge_contribution_examples() {
        let t = single_edge();
        let s = Simplex::from_labels(t.clone(), &["a"], &["b"]).unwrap();
        let w = NormalizedLoadVector::new(vec![1.0], vec![1.0]).unwrap();
        assert_eq!(edge_contribution(&s, &w, &edge(&t, "a", "b")).unwrap(), 1.0);

        let t = path(1.0, 1.0);
        let s = Simplex::from_labels(t.clone(), &["a", "b"], &["m"]).unwrap();
        assert_eq!(edge_contribution(&s, &half_half_one(), &edge(&t, "a", "m")).unwrap(), 0.25);
        assert_eq!(edge_contribution(&s, &half_half_one(), &edge(&t, "m", "b")).unwrap(), 0.25);
    }

    #[test]
    fn extended_gap_examples() {
        let s = Simplex::from_labels(single_edge(), &["a"], &["b"]).unwrap();
        assert_eq!(extended_gap(&s, &LoadVector::new(vec![1.0], vec![1.0]).unwrap()).unwrap(), 1.0);
        assert_eq!(extended_gap(&s, &LoadVector::new(vec![2.0], vec![2.0]).unwrap()).unwrap(), 4.0);
        let s = Simplex::from_labels(path(1.0, 1.0), &["a", "b"], &["m"]).unwrap();
        assert_eq!(extended_gap(&s, half_half_one().as_load()).unwrap(), 0.5);
    }

    #[test]
    fn load_validation() {
        assert_eq!(LoadVector::new(vec![0.0], vec![1.0]).unwrap_err(), Error::NonPositiveLoad);
        assert!(matches!(
            NormalizedLoadVector::new(vec![0.5], vec![1.0]),
            Err(Error::NotNormalized(..))
        ));
        let s = Simplex::from_labels(path(1.0, 1.0), &["a", "b"], &["m"]).unwrap();
        let w = NormalizedLoadVector::new(vec![1.0], vec![1.0]).unwrap();
        assert!(matches!(gap_direct(&s, &w, 1.0), Err(Error::LoadLength { .. })));
    }

    #[test]
    fn eta_conversion_examples() {
        let t = single_edge();
        let pts = t.ids(&["a", "b"]).unwrap();
        let (s, w, alpha) = eta_to_simplex(t.clone(), &pts, &[1.0, -1.0]).unwrap();
        assert_eq!(s.describe(), "[a; b]");
        assert_eq!((w.m(), w.n(), alpha), (&[1.0][..], &[1.0][..], 1.0));
        let (p2, eta) = simplex_to_eta(&s, &w, 1.0);
        assert_eq!((p2, eta), (pts.clone(), vec![1.0, -1.0]));
        assert_eq!(simplex_to_eta(&s, &w, 2.0).1, vec![2.0, -2.0]);

        let t = path(1.0, 1.0);
        let pts = t.ids(&["a", "m", "b"]).unwrap();
        let (s, w, alpha) = eta_to_simplex(t.clone(), &pts, &[0.5, -1.0, 0.5]).unwrap();
        assert_eq!(s.describe(), "[a, b; m]");
        assert_eq!((w.m(), w.n(), alpha), (&[0.5, 0.5][..], &[1.0][..], 1.0));
        let (s4, w4, alpha4) = eta_to_simplex(t.clone(), &pts, &[2.0, -4.0, 2.0]).unwrap();
        assert_eq!((s4.describe(), w4, alpha4), (s.describe(), w.clone(), 4.0));

        let (_, w0, _) = eta_to_simplex(t.clone(), &pts, &[1.0, -1.0, 0.0]).unwrap();
        assert_eq!(w0.m().len() + w0.n().len(), 2);

        assert_eq!(eta_to_simplex(t.clone(), &pts, &[0.0; 3]).unwrap_err(), Error::ZeroVector);
        assert!(matches!(eta_to_simplex(t, &pts, &[1.0, -0.5, 0.0]), Err(Error::NonZeroSum(_))));
    }

    #[test]
    fn eta_form_is_minus_two_alpha_squared_gap() {
        let t = path(1.0, 2.0);
        let pts = t.ids(&["a", "m", "b"]).unwrap();
        let eta = [0.7, -1.9, 1.2];
        let host = Host::from(t.clone());
        let form = eta_form(&host, &pts, &eta, 1.0);
        let (s, w, alpha) = eta_to_simplex(t, &pts, &eta).unwrap();
        let gap = gap_direct(&s, &w, 1.0).unwrap();
        assert!((form + 2.0 * alpha * alpha * gap).abs() < 1e-12);
    }

    #[test]
    fn nesting_on_unit_path() {
        let s = Simplex::from_labels(path(1.0, 1.0), &["a", "b"], &["m"]).unwrap();
        let res = derivative_nesting(&s, &half_half_one(), 1e-6).unwrap();
        assert_eq!(res.len(), 2);
        for r in res {
            assert!((r.finite_difference - r.predicted).abs() < 1e-6, "{r:?}");
        }
    }
}
