//! Rooted, edge-weighted finite trees.
//!
//! A [`MetricTree`] is rooted at a leaf and every edge is stored oriented
//! toward that root: the left vertex of an edge is the one further from the
//! root. Every non-root vertex `v` is the left vertex of exactly one edge,
//! written `e(v)` and returned by [`MetricTree::edge_of`].

use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// Index of a vertex inside one particular tree or metric.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(usize);

impl VertexId {
    pub(crate) fn new(index: usize) -> Self {
        VertexId(index)
    }

    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// An edge `(left, right)` where `right` is one hop closer to the root.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct OrientedEdge {
    pub left: VertexId,
    pub right: VertexId,
    pub weight: f64,
}

/// Hop-count levels: `level(v) = k0 - hops(v, root)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelAssignment {
    pub k0: usize,
    levels: Vec<usize>,
}

impl LevelAssignment {
    pub fn level(&self, v: VertexId) -> usize {
        self.levels[v.0]
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }
}

/// The two sides of an edge: `left` holds every vertex nearer the edge's left
/// endpoint, `right` every vertex nearer its right endpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeSides {
    pub left: Vec<VertexId>,
    pub right: Vec<VertexId>,
    pub strict_left: Vec<VertexId>,
    pub strict_right: Vec<VertexId>,
}

#[derive(Clone, Debug)]
pub struct MetricTree {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    root: usize,
    parent: Vec<Option<usize>>,
    // weight of the edge from a vertex to its parent; 0 for the root
    up_weight: Vec<f64>,
    children: Vec<Vec<usize>>,
    depth: Vec<usize>,
    // vertices in breadth-first order from the root
    order: Vec<usize>,
}

impl MetricTree {
    /// Builds a tree from vertex labels and undirected weighted edges.
    ///
    /// Without an explicit root the lexicographically smallest leaf is used.
    pub fn build(vertices: &[&str], edges: &[(&str, &str, f64)], root: Option<&str>) -> Result<Self> {
        Self::from_parts(
            vertices.iter().map(|s| s.to_string()).collect(),
            edges
                .iter()
                .map(|&(u, v, w)| (u.to_string(), v.to_string(), w))
                .collect(),
            root.map(str::to_string),
        )
    }

    pub fn from_parts(
        vertices: Vec<String>,
        edges: Vec<(String, String, f64)>,
        root: Option<String>,
    ) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::EmptyVertexSet);
        }
        let mut index = HashMap::with_capacity(vertices.len());
        for (i, label) in vertices.iter().enumerate() {
            if index.insert(label.clone(), i).is_some() {
                return Err(Error::DuplicateVertex(label.clone()));
            }
        }
        let n = vertices.len();
        let lookup = |s: &str| index.get(s).copied().ok_or_else(|| Error::UnknownVertex(s.to_string()));

        let mut uf = UnionFind::new(n);
        let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (u, v, w) in &edges {
            let (iu, iv) = (lookup(u)?, lookup(v)?);
            if !(w.is_finite() && *w > 0.0) {
                return Err(Error::NonPositiveWeight(u.clone(), v.clone(), *w));
            }
            if !uf.union(iu, iv) {
                return Err(Error::CycleDetected(u.clone(), v.clone()));
            }
            adjacency[iu].push((iv, *w));
            adjacency[iv].push((iu, *w));
        }
        if edges.len() + 1 != n {
            return Err(Error::Disconnected);
        }

        let root = match root {
            Some(r) => {
                let ir = lookup(&r)?;
                if n > 1 && adjacency[ir].len() != 1 {
                    return Err(Error::RootNotLeaf(r));
                }
                ir
            }
            None => (0..n)
                .filter(|&i| n == 1 || adjacency[i].len() == 1)
                .min_by(|&a, &b| vertices[a].cmp(&vertices[b]))
                .expect("a tree with at least two vertices has leaves"),
        };

        let mut parent = vec![None; n];
        let mut up_weight = vec![0.0; n];
        let mut children = vec![Vec::new(); n];
        let mut depth = vec![0; n];
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(x) = queue.pop_front() {
            order.push(x);
            let mut nbrs = adjacency[x].clone();
            nbrs.sort_by_key(|&(y, _)| y);
            for (y, w) in nbrs {
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some(x);
                    up_weight[y] = w;
                    depth[y] = depth[x] + 1;
                    children[x].push(y);
                    queue.push_back(y);
                }
            }
        }

        Ok(MetricTree {
            labels: vertices,
            index,
            root,
            parent,
            up_weight,
            children,
            depth,
            order,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v.0]
    }

    pub fn id(&self, label: &str) -> Result<VertexId> {
        self.index
            .get(label)
            .map(|&i| VertexId(i))
            .ok_or_else(|| Error::UnknownVertex(label.to_string()))
    }

    pub fn ids(&self, labels: &[&str]) -> Result<Vec<VertexId>> {
        labels.iter().map(|l| self.id(l)).collect()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.labels.len()).map(VertexId)
    }

    pub fn root(&self) -> VertexId {
        VertexId(self.root)
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.parent[v.0].map(VertexId)
    }

    pub fn children(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.children[v.0].iter().map(|&c| VertexId(c))
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.children[v.0].len() + usize::from(self.parent[v.0].is_some())
    }

    pub fn is_leaf(&self, v: VertexId) -> bool {
        self.degree(v) == 1
    }

    pub fn leaves(&self) -> Vec<VertexId> {
        self.vertices().filter(|&v| self.is_leaf(v)).collect()
    }

    /// Hop distance from the root.
    pub fn hop_depth(&self, v: VertexId) -> usize {
        self.depth[v.0]
    }

    /// Vertices ordered so every vertex comes after its parent.
    pub fn top_down(&self) -> impl DoubleEndedIterator<Item = VertexId> + '_ {
        self.order.iter().map(|&i| VertexId(i))
    }

    pub fn edge_count(&self) -> usize {
        self.labels.len() - 1
    }

    /// The edge `e(v)` whose left vertex is `v`; `None` for the root.
    pub fn edge_of(&self, v: VertexId) -> Option<OrientedEdge> {
        self.parent[v.0].map(|p| OrientedEdge {
            left: v,
            right: VertexId(p),
            weight: self.up_weight[v.0],
        })
    }

    /// All oriented edges, ordered by left vertex.
    pub fn edges(&self) -> Vec<OrientedEdge> {
        self.vertices().filter_map(|v| self.edge_of(v)).collect()
    }

    /// The oriented edge joining `u` and `v`, in either order.
    pub fn find_edge(&self, u: VertexId, v: VertexId) -> Option<OrientedEdge> {
        if self.parent[u.0] == Some(v.0) {
            self.edge_of(u)
        } else if self.parent[v.0] == Some(u.0) {
            self.edge_of(v)
        } else {
            None
        }
    }

    pub fn is_unweighted(&self) -> bool {
        self.edges().iter().all(|e| e.weight == 1.0)
    }

    pub fn total_length(&self) -> f64 {
        self.edges().iter().map(|e| e.weight).sum()
    }

    /// Geodesic vertex sequence from `u` to `v`, both included.
    pub fn path(&self, u: VertexId, v: VertexId) -> Vec<VertexId> {
        let (mut a, mut b) = (u.0, v.0);
        let mut head = Vec::new();
        let mut tail = Vec::new();
        while self.depth[a] > self.depth[b] {
            head.push(a);
            a = self.parent[a].unwrap();
        }
        while self.depth[b] > self.depth[a] {
            tail.push(b);
            b = self.parent[b].unwrap();
        }
        while a != b {
            head.push(a);
            tail.push(b);
            a = self.parent[a].unwrap();
            b = self.parent[b].unwrap();
        }
        head.push(a);
        head.extend(tail.into_iter().rev());
        head.into_iter().map(VertexId).collect()
    }

    /// Sum of edge weights along the geodesic between `u` and `v`.
    pub fn distance(&self, u: VertexId, v: VertexId) -> f64 {
        let (mut a, mut b) = (u.0, v.0);
        let mut total = 0.0;
        while self.depth[a] > self.depth[b] {
            total += self.up_weight[a];
            a = self.parent[a].unwrap();
        }
        while self.depth[b] > self.depth[a] {
            total += self.up_weight[b];
            b = self.parent[b].unwrap();
        }
        while a != b {
            total += self.up_weight[a] + self.up_weight[b];
            a = self.parent[a].unwrap();
            b = self.parent[b].unwrap();
        }
        total
    }

    pub fn path_distance(&self, u: &str, v: &str) -> Result<f64> {
        Ok(self.distance(self.id(u)?, self.id(v)?))
    }

    /// Full distance matrix indexed by vertex id.
    #[allow(clippy::needless_range_loop)]
    pub fn distance_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        let mut d = vec![vec![0.0; n]; n];
        for s in 0..n {
            // walk outward from s over the undirected tree
            let mut stack = vec![(s, usize::MAX)];
            while let Some((x, from)) = stack.pop() {
                let nbrs = self.children[x]
                    .iter()
                    .map(|&c| (c, self.up_weight[c]))
                    .chain(self.parent[x].map(|p| (p, self.up_weight[x])));
                for (y, w) in nbrs {
                    if y != from {
                        d[s][y] = d[s][x] + w;
                        stack.push((y, x));
                    }
                }
            }
        }
        // the two walks may round differently
        for i in 0..n {
            for j in 0..i {
                d[i][j] = d[j][i];
            }
        }
        d
    }

    /// Vertices of the subtree hanging below `v`, `v` included.
    pub fn subtree(&self, v: VertexId) -> Vec<VertexId> {
        let mut out = Vec::new();
        let mut stack = vec![v.0];
        while let Some(x) = stack.pop() {
            out.push(VertexId(x));
            stack.extend(self.children[x].iter().rev());
        }
        out.sort();
        out
    }

    /// Partition of the vertices by the edge joining `edge.left` and
    /// `edge.right`; the left side is the one containing `edge.left`.
    pub fn left_right_sets(&self, edge: &OrientedEdge) -> Result<EdgeSides> {
        let e = self
            .find_edge(edge.left, edge.right)
            .ok_or_else(|| self.unknown_edge(edge))?;
        let below = self.subtree(e.left);
        let mut in_below = vec![false; self.len()];
        for v in &below {
            in_below[v.0] = true;
        }
        let above: Vec<VertexId> = self.vertices().filter(|v| !in_below[v.0]).collect();
        let (left, right) = if e.left == edge.left { (below, above) } else { (above, below) };
        let strict_left = left.iter().copied().filter(|&v| v != edge.left).collect();
        let strict_right = right.iter().copied().filter(|&v| v != edge.right).collect();
        Ok(EdgeSides {
            left,
            right,
            strict_left,
            strict_right,
        })
    }

    pub(crate) fn unknown_edge(&self, edge: &OrientedEdge) -> Error {
        let name = |v: VertexId| {
            self.labels
                .get(v.0)
                .cloned()
                .unwrap_or_else(|| v.to_string())
        };
        Error::UnknownEdge(name(edge.left), name(edge.right))
    }

    pub fn level_assignment(&self) -> Result<LevelAssignment> {
        if self.len() < 2 {
            return Err(Error::NoEdges);
        }
        let k0 = *self.depth.iter().max().unwrap();
        Ok(LevelAssignment {
            k0,
            levels: self.depth.iter().map(|&h| k0 - h).collect(),
        })
    }

    /// Smallest subtree containing `set`, with inherited weights.
    ///
    /// The result keeps this tree's root when the root lies in the subtree,
    /// and otherwise is rooted at its lexicographically smallest leaf.
    pub fn minimal_subtree(&self, set: &[VertexId]) -> Result<MetricTree> {
        let keep = self.span_mask(set)?;
        let kept: Vec<usize> = (0..self.len()).filter(|&i| keep[i]).collect();
        let vertices = kept.iter().map(|&i| self.labels[i].clone()).collect();
        let edges = kept
            .iter()
            .filter_map(|&i| match self.parent[i] {
                Some(p) if keep[p] => Some((self.labels[i].clone(), self.labels[p].clone(), self.up_weight[i])),
                _ => None,
            })
            .collect();
        let root = keep[self.root].then(|| self.labels[self.root].clone());
        MetricTree::from_parts(vertices, edges, root)
    }

    /// Membership mask of the minimal subtree spanned by `set`.
    pub(crate) fn span_mask(&self, set: &[VertexId]) -> Result<Vec<bool>> {
        let first = *set.first().ok_or(Error::EmptyVertexSet)?;
        for v in set {
            if v.0 >= self.len() {
                return Err(Error::UnknownVertex(v.to_string()));
            }
        }
        let mut keep = vec![false; self.len()];
        for &v in set {
            for x in self.path(first, v) {
                keep[x.0] = true;
            }
        }
        Ok(keep)
    }

    /// Same tree rooted at a different leaf.
    pub fn rerooted(&self, root: VertexId) -> Result<MetricTree> {
        let (vertices, edges) = self.undirected_parts();
        MetricTree::from_parts(vertices, edges, Some(self.labels[root.0].clone()))
    }

    pub fn undirected_parts(&self) -> (Vec<String>, Vec<(String, String, f64)>) {
        let edges = self
            .edges()
            .iter()
            .map(|e| (self.labels[e.left.0].clone(), self.labels[e.right.0].clone(), e.weight))
            .collect();
        (self.labels.clone(), edges)
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_amb(w1: f64, w2: f64) -> MetricTree {
        MetricTree::build(&["a", "m", "b"], &[("a", "m", w1), ("m", "b", w2)], Some("b")).unwrap()
    }

    fn star3() -> MetricTree {
        MetricTree::build(
            &["r", "l1", "l2", "l3"],
            &[("r", "l1", 1.0), ("r", "l2", 1.0), ("r", "l3", 1.0)],
            Some("l1"),
        )
        .unwrap()
    }

    fn edge_names(t: &MetricTree) -> Vec<(String, String)> {
        let mut v: Vec<_> = t
            .edges()
            .iter()
            .map(|e| (t.label(e.left).to_string(), t.label(e.right).to_string()))
            .collect();
        v.sort();
        v
    }

    fn names(t: &MetricTree, vs: &[VertexId]) -> Vec<String> {
        let mut v: Vec<String> = vs.iter().map(|&x| t.label(x).to_string()).collect();
        v.sort();
        v
    }

    #[test]
    fn single_edge_orientation() {
        let t = MetricTree::build(&["a", "b"], &[("a", "b", 1.0)], Some("b")).unwrap();
        assert_eq!(edge_names(&t), vec![("a".into(), "b".into())]);
        assert_eq!(t.path_distance("a", "b").unwrap(), 1.0);
    }

    #[test]
    fn path_orientation_and_distance() {
        let t = path_amb(1.0, 2.0);
        assert_eq!(edge_names(&t), vec![("a".into(), "m".into()), ("m".into(), "b".into())]);
        assert_eq!(t.path_distance("a", "b").unwrap(), 3.0);
        assert_eq!(t.path_distance("b", "b").unwrap(), 0.0);
    }

    #[test]
    fn star_orients_toward_chosen_leaf() {
        let t = star3();
        assert_eq!(
            edge_names(&t),
            vec![
                ("l2".into(), "r".into()),
                ("l3".into(), "r".into()),
                ("r".into(), "l1".into())
            ]
        );
        assert_eq!(t.path_distance("l1", "l2").unwrap(), 2.0);
        assert_eq!(t.path_distance("l1", "r").unwrap(), 1.0);
    }

    #[test]
    fn default_root_is_smallest_leaf() {
        let t = MetricTree::build(&["z", "m", "c"], &[("z", "m", 1.0), ("m", "c", 1.0)], None).unwrap();
        assert_eq!(t.label(t.root()), "c");
        let single = MetricTree::build(&["x"], &[], None).unwrap();
        assert_eq!(single.label(single.root()), "x");
        assert_eq!(single.edge_count(), 0);
    }

    #[test]
    fn build_errors() {
        assert!(matches!(
            MetricTree::build(&["a", "b", "c"], &[("a", "b", 1.0), ("b", "a", 1.0)], None),
            Err(Error::CycleDetected(..))
        ));
        assert!(matches!(
            MetricTree::build(&["a", "b", "c"], &[("a", "b", 1.0)], None),
            Err(Error::Disconnected)
        ));
        assert!(matches!(
            MetricTree::build(&["a", "b"], &[("a", "b", 0.0)], None),
            Err(Error::NonPositiveWeight(..))
        ));
        assert!(matches!(
            MetricTree::build(&["a", "m", "b"], &[("a", "m", 1.0), ("m", "b", 1.0)], Some("m")),
            Err(Error::RootNotLeaf(_))
        ));
        assert!(matches!(
            MetricTree::build(&["a", "a"], &[], None),
            Err(Error::DuplicateVertex(_))
        ));
        assert!(matches!(
            MetricTree::build(&["a", "b"], &[("a", "q", 1.0)], None),
            Err(Error::UnknownVertex(_))
        ));
        assert!(matches!(path_amb(1.0, 1.0).path_distance("a", "zz"), Err(Error::UnknownVertex(_))));
    }

    #[test]
    fn minimal_subtrees() {
        let t = path_amb(1.0, 1.0);
        let sub = t.minimal_subtree(&t.ids(&["a", "b"]).unwrap()).unwrap();
        assert_eq!(sub.len(), 3);

        let s = star3();
        let sub = s.minimal_subtree(&s.ids(&["l1", "l2"]).unwrap()).unwrap();
        assert_eq!(sub.labels(), &["r", "l1", "l2"]);
        assert_eq!(sub.edge_count(), 2);
        assert_eq!(sub.path_distance("l1", "l2").unwrap(), 2.0);

        let whole = s.minimal_subtree(&s.leaves()).unwrap();
        assert_eq!(whole.len(), s.len());

        let one = s.minimal_subtree(&[s.id("r").unwrap()]).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(s.minimal_subtree(&[]).unwrap_err(), Error::EmptyVertexSet);
    }

    #[test]
    fn levels() {
        let t = MetricTree::build(&["a", "b"], &[("a", "b", 1.0)], Some("b")).unwrap();
        let l = t.level_assignment().unwrap();
        assert_eq!((l.k0, l.level(t.id("a").unwrap()), l.level(t.id("b").unwrap())), (1, 0, 1));

        let t = path_amb(1.0, 1.0);
        let l = t.level_assignment().unwrap();
        assert_eq!(l.k0, 2);
        let lv: Vec<usize> = t.ids(&["a", "m", "b"]).unwrap().iter().map(|&v| l.level(v)).collect();
        assert_eq!(lv, vec![0, 1, 2]);

        let s = star3();
        let l = s.level_assignment().unwrap();
        assert_eq!(l.k0, 2);
        let lv: Vec<usize> = s.ids(&["r", "l2", "l3", "l1"]).unwrap().iter().map(|&v| l.level(v)).collect();
        assert_eq!(lv, vec![1, 0, 0, 2]);

        let single = MetricTree::build(&["x"], &[], None).unwrap();
        assert_eq!(single.level_assignment().unwrap_err(), Error::NoEdges);
    }

    #[test]
    fn edge_sides() {
        let t = MetricTree::build(&["a", "b"], &[("a", "b", 1.0)], Some("b")).unwrap();
        let e = t.edges()[0];
        let s = t.left_right_sets(&e).unwrap();
        assert_eq!(names(&t, &s.left), vec!["a"]);
        assert_eq!(names(&t, &s.right), vec!["b"]);
        assert!(s.strict_left.is_empty() && s.strict_right.is_empty());

        let t = path_amb(1.0, 1.0);
        let e = t.edge_of(t.id("m").unwrap()).unwrap();
        let s = t.left_right_sets(&e).unwrap();
        assert_eq!(names(&t, &s.left), vec!["a", "m"]);
        assert_eq!(names(&t, &s.right), vec!["b"]);
        assert_eq!(names(&t, &s.strict_left), vec!["a"]);

        let st = star3();
        let e = st.edge_of(st.id("r").unwrap()).unwrap();
        let s = st.left_right_sets(&e).unwrap();
        assert_eq!(names(&st, &s.left), vec!["l2", "l3", "r"]);
        assert_eq!(names(&st, &s.right), vec!["l1"]);

        let bogus = OrientedEdge {
            left: st.id("l2").unwrap(),
            right: st.id("l3").unwrap(),
            weight: 1.0,
        };
        assert!(matches!(st.left_right_sets(&bogus), Err(Error::UnknownEdge(..))));
    }

    #[test]
    fn distance_matrix_matches_pairwise() {
        let s = star3();
        let d = s.distance_matrix();
        for u in s.vertices() {
            for v in s.vertices() {
                assert_eq!(d[u.index()][v.index()], s.distance(u, v));
            }
        }
    }
}
