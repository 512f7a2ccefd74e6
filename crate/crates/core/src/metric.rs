use crate::error::{Error, Result};
use crate::tree::{MetricTree, VertexId};

/// A finite metric space given by its distance matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMetric {
    labels: Vec<String>,
    dist: Vec<Vec<f64>>,
}

const TRIANGLE_SLACK: f64 = 1e-12;

impl FiniteMetric {
    /// Validates zero diagonal, symmetry, positive off-diagonal entries and
    /// the triangle inequality (to `1e-12` times the largest distance).
    pub fn new(labels: Vec<String>, dist: Vec<Vec<f64>>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::EmptyVertexSet);
        }
        if dist.len() != n || dist.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidMetric(format!("matrix is not {n}x{n}")));
        }
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l) {
                return Err(Error::DuplicateVertex(l.clone()));
            }
        }
        let scale = dist.iter().flatten().fold(0.0f64, |m, &x| m.max(x.abs()));
        for i in 0..n {
            if dist[i][i] != 0.0 {
                return Err(Error::InvalidMetric(format!("non-zero diagonal at {}", labels[i])));
            }
            for j in 0..n {
                let d = dist[i][j];
                if !d.is_finite() {
                    return Err(Error::InvalidMetric(format!("non-finite distance at ({i}, {j})")));
                }
                if i != j && d <= 0.0 {
                    return Err(Error::InvalidMetric(format!(
                        "non-positive distance between {} and {}",
                        labels[i], labels[j]
                    )));
                }
                if d != dist[j][i] {
                    return Err(Error::InvalidMetric(format!("asymmetric at ({i}, {j})")));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if dist[i][k] > dist[i][j] + dist[j][k] + TRIANGLE_SLACK * scale {
                        return Err(Error::InvalidMetric(format!(
                            "triangle inequality fails for {}, {}, {}",
                            labels[i], labels[j], labels[k]
                        )));
                    }
                }
            }
        }
        Ok(FiniteMetric { labels, dist })
    }

    /// Path metric of `tree`, restricted to `subset` when given.
    pub fn from_tree(tree: &MetricTree, subset: Option<&[VertexId]>) -> Result<Self> {
        let all: Vec<VertexId>;
        let points = match subset {
            Some(s) => {
                for v in s {
                    if v.index() >= tree.len() {
                        return Err(Error::UnknownVertex(v.to_string()));
                    }
                }
                s
            }
            None => {
                all = tree.vertices().collect();
                &all
            }
        };
        let full = tree.distance_matrix();
        let labels = points.iter().map(|&v| tree.label(v).to_string()).collect();
        let dist = points
            .iter()
            .map(|&u| points.iter().map(|&v| full[u.index()][v.index()]).collect())
            .collect();
        FiniteMetric::new(labels, dist)
    }

    /// All off-diagonal distances equal to 1.
    pub fn discrete(n: usize) -> Self {
        let labels = (0..n).map(|i| format!("x{i}")).collect();
        let dist = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 0.0 } else { 1.0 }).collect())
            .collect();
        FiniteMetric { labels, dist }
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
        &self.labels[v.index()]
    }

    pub fn id(&self, label: &str) -> Result<VertexId> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(VertexId::new)
            .ok_or_else(|| Error::UnknownVertex(label.to_string()))
    }

    pub fn distance(&self, u: VertexId, v: VertexId) -> f64 {
        self.dist[u.index()][v.index()]
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.dist
    }

    /// Shortest and longest non-zero distances; `None` for a single point.
    pub fn distance_range(&self) -> Option<(f64, f64)> {
        let off = self
            .dist
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().enumerate().filter(move |&(j, _)| j != i).map(|(_, &d)| d));
        off.fold(None, |acc, d| match acc {
            None => Some((d, d)),
            Some((lo, hi)) => Some((lo.min(d), hi.max(d))),
        })
    }

    /// The same space with every distance multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        FiniteMetric {
            labels: self.labels.clone(),
            dist: self
                .dist
                .iter()
                .map(|row| row.iter().map(|d| d * factor).collect())
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_matrices() {
        let l = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        let asym = vec![vec![0.0, 1.0, 1.0], vec![2.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]];
        assert!(matches!(FiniteMetric::new(l.clone(), asym), Err(Error::InvalidMetric(_))));
        let tri = vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]];
        assert!(matches!(FiniteMetric::new(l.clone(), tri), Err(Error::InvalidMetric(_))));
        let zero = vec![vec![0.0, 0.0, 1.0], vec![0.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]];
        assert!(matches!(FiniteMetric::new(l.clone(), zero), Err(Error::InvalidMetric(_))));
        let diag = vec![vec![1.0, 1.0, 1.0], vec![1.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]];
        assert!(matches!(FiniteMetric::new(l, diag), Err(Error::InvalidMetric(_))));
    }

    #[test]
    fn from_tree_examples() {
        let t = MetricTree::build(&["a", "b"], &[("a", "b", 1.0)], None).unwrap();
        let m = FiniteMetric::from_tree(&t, None).unwrap();
        assert_eq!(m.matrix(), &[vec![0.0, 1.0], vec![1.0, 0.0]]);

        let star = MetricTree::build(
            &["r", "l1", "l2", "l3"],
            &[("r", "l1", 1.0), ("r", "l2", 1.0), ("r", "l3", 1.0)],
            None,
        )
        .unwrap();
        let m = FiniteMetric::from_tree(&star, None).unwrap();
        assert_eq!(m.len(), 4);
        assert!(m.matrix().iter().flatten().all(|&d| d == 0.0 || d == 1.0 || d == 2.0));
        assert_eq!(m.distance_range(), Some((1.0, 2.0)));

        let p = MetricTree::build(&["a", "m", "b"], &[("a", "m", 1.0), ("m", "b", 2.0)], None).unwrap();
        let sub = FiniteMetric::from_tree(&p, Some(&p.ids(&["a", "b"]).unwrap())).unwrap();
        assert_eq!(sub.matrix()[0][1], 3.0);
    }
}
