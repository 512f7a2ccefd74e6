//! Negative type tests for finite metric spaces.
//!
//! A space has p-negative type when `sum_{i,j} d(x_i, x_j)^p eta_i eta_j <= 0`
//! for every mean-zero `eta`. The test restricts the power matrix `d^p` to
//! the mean-zero hyperplane through an orthonormal basis and inspects the
//! largest eigenvalue of the restricted form.

use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::generic::{gamma_t, generic_labeling};
use crate::metric::FiniteMetric;
use crate::simplex::{eta_form, eta_to_simplex, Host, Parity};
use crate::tree::{MetricTree, VertexId};

/// Default relative width of the undecided band around zero.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Largest exponent tried before giving up on finding a failure.
pub const MAX_EXPONENT: f64 = 64.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Strict,
    /// One restricted eigenvalue sits in the band around zero.
    NonStrict,
    Fails,
    /// Several restricted eigenvalues sit in the band around zero.
    Marginal,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Strict => "strict",
            Status::NonStrict => "non_strict",
            Status::Fails => "fails",
            Status::Marginal => "marginal",
        }
    }

    /// True unless the inequality is violated beyond tolerance.
    pub fn holds(self) -> bool {
        self != Status::Fails
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NegTypeVerdict {
    pub status: Status,
    /// Largest eigenvalue of the power matrix restricted to the mean-zero
    /// hyperplane.
    pub lambda_max: f64,
    /// Unit mean-zero vector attaining `lambda_max`; absent when strict.
    pub certificate: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaxPEstimate {
    pub p_star: f64,
    pub bracket_width: f64,
    /// Largest exponent known to hold.
    pub lower: f64,
    /// Smallest exponent known to fail.
    pub upper: f64,
    pub verdict_at_p_star: NegTypeVerdict,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoundnessCheck {
    pub holds: bool,
    /// Smallest `cross - within` over all samples.
    pub worst_margin: f64,
    pub worst_a: Vec<VertexId>,
    pub worst_b: Vec<VertexId>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnhancedCheck {
    /// `-(gamma/2 (sum|eta|)^2 + sum d eta eta)`; never negative beyond rounding.
    pub margin: f64,
    /// Magnitude the margin is compared against.
    pub scale: f64,
    /// The margin vanishes within `1e-9 * scale`.
    pub equality: bool,
    /// `eta` is a multiple of the generic whole-tree weighting (either sign).
    pub generic_witness: bool,
}

pub fn metric_from_tree(tree: &MetricTree, subset: Option<&[VertexId]>) -> Result<FiniteMetric> {
    FiniteMetric::from_tree(tree, subset)
}

fn check_exponent(p: f64) -> Result<()> {
    if p >= 0.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidExponent(p))
    }
}

/// `d^p` with a zero diagonal for every `p`.
pub fn power_matrix(metric: &FiniteMetric, p: f64) -> DMatrix<f64> {
    let n = metric.len();
    let d = metric.matrix();
    DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { d[i][j].powf(p) })
}

/// Orthonormal basis of the mean-zero hyperplane in `R^n` as columns
/// (Helmert contrasts).
pub fn hyperplane_basis(n: usize) -> DMatrix<f64> {
    let mut q = DMatrix::zeros(n, n.saturating_sub(1));
    for k in 1..n {
        let norm = ((k * (k + 1)) as f64).sqrt();
        for i in 0..k {
            q[(i, k - 1)] = 1.0 / norm;
        }
        q[(k, k - 1)] = -(k as f64) / norm;
    }
    q
}

/// Eigenvalue test of p-negative type. `tol` is relative to the largest
/// entry of `d^p`.
pub fn has_p_negative_type(metric: &FiniteMetric, p: f64, tol: f64) -> Result<NegTypeVerdict> {
    check_exponent(p)?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let n = metric.len();
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    let m = power_matrix(metric, p);
    let scale = m.max();
    let q = hyperplane_basis(n);
    let restricted = q.transpose() * &m * &q;
    let eigen = SymmetricEigen::new(restricted);
    let (top, &lambda_max) = eigen
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("at least one eigenvalue");
    let band = tol * scale;
    let in_band = eigen.eigenvalues.iter().filter(|l| l.abs() <= band).count();
    let status = if lambda_max > band {
        Status::Fails
    } else if lambda_max < -band {
        Status::Strict
    } else if in_band > 1 {
        Status::Marginal
    } else {
        Status::NonStrict
    };
    let certificate = (status != Status::Strict).then(|| {
        let mut eta: Vec<f64> = (&q * eigen.eigenvectors.column(top)).iter().copied().collect();
        if eta.iter().find(|x| x.abs() > 1e-12).is_some_and(|&x| x < 0.0) {
            eta.iter_mut().for_each(|x| *x = -*x);
        }
        eta
    });
    Ok(NegTypeVerdict {
        status,
        lambda_max,
        certificate,
    })
}

pub fn has_strict_p_negative_type(metric: &FiniteMetric, p: f64, tol: f64) -> Result<bool> {
    Ok(has_p_negative_type(metric, p, tol)?.status == Status::Strict)
}

/// `sum_{i,j} d(a_i, b_j)^p - sum_{i<j} (d(a_i, a_j)^p + d(b_i, b_j)^p)` for
/// two equal-size point families (repetitions allowed).
pub fn roundness_margin(metric: &FiniteMetric, p: f64, a: &[VertexId], b: &[VertexId]) -> Result<f64> {
    check_exponent(p)?;
    if a.len() != b.len() {
        return Err(Error::InvalidArgument(format!(
            "families of sizes {} and {}",
            a.len(),
            b.len()
        )));
    }
    if let Some(v) = a.iter().chain(b).find(|v| v.index() >= metric.len()) {
        return Err(Error::UnknownVertex(v.to_string()));
    }
    let dp = |x: VertexId, y: VertexId| if x == y { 0.0 } else { metric.distance(x, y).powf(p) };
    let cross: f64 = a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y))).map(|(x, y)| dp(x, y)).sum();
    let mut within = 0.0;
    for fam in [a, b] {
        for i in 0..fam.len() {
            for j in i + 1..fam.len() {
                within += dp(fam[i], fam[j]);
            }
        }
    }
    Ok(cross - within)
}

/// Randomized generalized-roundness check: draws `trials` pairs of point
/// families and reports the worst margin. Each family is sampled from its own
/// random weighting of the points, so that repeated points are common.
pub fn generalized_roundness_check(metric: &FiniteMetric, p: f64, trials: usize, seed: u64) -> Result<RoundnessCheck> {
    check_exponent(p)?;
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let n = metric.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<RoundnessCheck> = None;
    let mut holds = true;
    for _ in 0..trials {
        let k = rng.random_range(1..=2 * n);
        let a = sample_family(&mut rng, n, k);
        let b = sample_family(&mut rng, n, k);
        let margin = roundness_margin(metric, p, &a, &b)?;
        let magnitude = (k * k) as f64 * metric.distance_range().map_or(1.0, |(_, w)| w.powf(p));
        if margin < -1e-12 * magnitude {
            holds = false;
        }
        if best.as_ref().is_none_or(|c| margin < c.worst_margin) {
            best = Some(RoundnessCheck {
                holds: true,
                worst_margin: margin,
                worst_a: a,
                worst_b: b,
            });
        }
    }
    let mut out = best.expect("at least one trial");
    out.holds = holds;
    Ok(out)
}

fn sample_family(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<VertexId> {
    let mut weights: Vec<f64> = (0..n)
        .map(|_| if rng.random_bool(0.5) { -rng.random::<f64>().ln() } else { 0.0 })
        .collect();
    if weights.iter().all(|&w| w == 0.0) {
        weights[rng.random_range(0..n)] = 1.0;
    }
    let dist = WeightedIndex::new(&weights).expect("positive total weight");
    (0..k).map(|_| VertexId::new(dist.sample(rng))).collect()
}

/// Brackets the largest exponent with p-negative type. The upper end starts
/// at 2 and doubles until the test fails, then bisection shrinks the bracket
/// to at most `tol`.
pub fn max_negative_type(metric: &FiniteMetric, tol: f64) -> Result<MaxPEstimate> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let holds = |p: f64| -> Result<bool> { Ok(has_p_negative_type(metric, p, DEFAULT_TOL)?.status.holds()) };
    let (mut lo, mut hi) = (0.0, 2.0);
    while holds(hi)? {
        if hi >= MAX_EXPONENT {
            return Err(Error::CapReached(MAX_EXPONENT));
        }
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if holds(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let p_star = 0.5 * (lo + hi);
    Ok(MaxPEstimate {
        p_star,
        bracket_width: hi - lo,
        lower: lo,
        upper: hi,
        verdict_at_p_star: has_p_negative_type(metric, p_star, DEFAULT_TOL)?,
    })
}

/// Half-width of an interval around 1 of exponents with strict negative type,
/// from the 1-negative type gap `gamma`. The metric is rescaled so its
/// shortest distance is 1 first.
pub fn zeta_lower_bound(metric: &FiniteMetric, gamma: f64) -> Result<f64> {
    let n = metric.len();
    if n < 3 {
        return Err(Error::TooFewPoints { needed: 3, got: n });
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidArgument(format!("gap must be positive, got {gamma}")));
    }
    let (s, w) = metric.distance_range().expect("at least three points");
    if w - s <= 1e-12 * w {
        return Err(Error::DegenerateMetric);
    }
    let (gamma, w) = (gamma / s, w / s);
    let k = ((n - 1) * (n - 2)) as f64;
    Ok((gamma / (2.0 * w * k)).ln_1p() / w.ln())
}

/// Lower bound on the maximal negative type of any unweighted tree with `n`
/// vertices.
pub fn tree_maxp_lower_bound(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::TooFewPoints { needed: 3, got: n });
    }
    let m = (n - 1) as f64;
    Ok(1.0 + (1.0 / (m.powi(3) * (m - 1.0))).ln_1p() / m.ln())
}

/// Maximal negative type of the unweighted star with `n` leaves.
pub fn star_max_p(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::TooFewLeaves(n));
    }
    Ok(1.0 + (1.0 / (n - 1) as f64).ln_1p() / std::f64::consts::LN_2)
}

/// Unweighted star: centre `r`, leaves `l1..ln`, rooted at `l1`.
pub fn build_star(n: usize) -> Result<MetricTree> {
    if n < 2 {
        return Err(Error::TooFewLeaves(n));
    }
    let mut vertices = vec!["r".to_string()];
    let mut edges = Vec::new();
    for k in 1..=n {
        vertices.push(format!("l{k}"));
        edges.push(("r".to_string(), format!("l{k}"), 1.0));
    }
    MetricTree::from_parts(vertices, edges, Some("l1".into()))
}

/// Stars with 2..=`n_max` leaves whose centres `r2, r3, ...` are chained by
/// unit edges; leaves of star `k` are `r{k}_l1..`.
pub fn build_necklace(n_max: usize) -> Result<MetricTree> {
    if n_max < 2 {
        return Err(Error::TooSmall(n_max));
    }
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    for n in 2..=n_max {
        let centre = format!("r{n}");
        vertices.push(centre.clone());
        for k in 1..=n {
            let leaf = format!("r{n}_l{k}");
            vertices.push(leaf.clone());
            edges.push((centre.clone(), leaf, 1.0));
        }
        if n > 2 {
            edges.push((format!("r{}", n - 1), centre, 1.0));
        }
    }
    MetricTree::from_parts(vertices, edges, Some("r2_l1".into()))
}

/// Evaluates the enhanced 1-negative type inequality of a tree for a
/// mean-zero weighting of distinct vertices.
pub fn verify_enhanced_inequality(tree: &MetricTree, points: &[VertexId], eta: &[f64]) -> Result<EnhancedCheck> {
    if let Some(v) = points.iter().find(|v| v.index() >= tree.len()) {
        return Err(Error::UnknownVertex(v.to_string()));
    }
    let host = Arc::new(tree.clone());
    // validates lengths, distinctness and the zero sum
    let (simplex, load, _) = eta_to_simplex(host.clone(), points, eta)?;
    let report = gamma_t(tree)?;
    let abs_sum: f64 = eta.iter().map(|x| x.abs()).sum();
    let form = eta_form(&Host::Tree(host), points, eta, 1.0);
    let margin = -(report.gamma / 2.0 * abs_sum * abs_sum + form);
    let diameter = tree
        .distance_matrix()
        .iter()
        .flatten()
        .fold(report.gamma, |a, &b| a.max(b));
    let scale = abs_sum * abs_sum * diameter;

    let generic = generic_labeling(tree)?;
    let weight_of = |v: VertexId, parity: Parity| -> f64 {
        let (team, w) = match parity {
            Parity::A => (generic.a_team(), report.generic_weights.m()),
            Parity::B => (generic.b_team(), report.generic_weights.n()),
        };
        team.iter().position(|&u| u == v).map_or(0.0, |i| w[i])
    };
    let generic_witness = simplex.len() == tree.len()
        && [false, true].iter().any(|&swap| {
            let matches = |team: &[VertexId], w: &[f64], parity: Parity| {
                let parity = if swap { parity.flip() } else { parity };
                team.iter().zip(w).all(|(&v, &x)| {
                    generic.parity_of(v) == Some(parity) && (x - weight_of(v, parity)).abs() <= 1e-9
                })
            };
            matches(simplex.a_team(), load.m(), Parity::A) && matches(simplex.b_team(), load.n(), Parity::B)
        });
    Ok(EnhancedCheck {
        margin,
        scale,
        equality: margin.abs() <= 1e-9 * scale,
        generic_witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_path() -> MetricTree {
        MetricTree::build(&["a", "m", "b"], &[("a", "m", 1.0), ("m", "b", 1.0)], Some("b")).unwrap()
    }

    fn path_metric() -> FiniteMetric {
        metric_from_tree(&unit_path(), None).unwrap()
    }

    fn ids(t: &MetricTree, l: &[&str]) -> Vec<VertexId> {
        t.ids(l).unwrap()
    }

    #[test]
    fn basis_is_orthonormal_and_mean_zero() {
        let q = hyperplane_basis(6);
        let gram = q.transpose() * &q;
        assert!((gram - DMatrix::identity(5, 5)).amax() < 1e-14);
        for c in q.column_iter() {
            assert!(c.sum().abs() < 1e-14);
        }
    }

    #[test]
    fn verdict_examples() {
        let two = FiniteMetric::new(vec!["x".into(), "y".into()], vec![vec![0.0, 3.0], vec![3.0, 0.0]]).unwrap();
        for p in [0.0, 1.0, 5.0] {
            let v = has_p_negative_type(&two, p, DEFAULT_TOL).unwrap();
            assert_eq!(v.status, Status::Strict);
            assert!((v.lambda_max + 3f64.powf(p)).abs() < 1e-12);
        }

        let m = path_metric();
        let v = has_p_negative_type(&m, 2.0, DEFAULT_TOL).unwrap();
        assert_eq!(v.status, Status::NonStrict);
        let eta = v.certificate.unwrap();
        let expected = [1.0, -2.0, 1.0].map(|x: f64| x / 6f64.sqrt());
        // vertex order of the metric is a, m, b
        for (x, y) in eta.iter().zip(expected) {
            assert!((x - y).abs() < 1e-9, "{eta:?}");
        }
        assert_eq!(has_p_negative_type(&m, 2.5, DEFAULT_TOL).unwrap().status, Status::Fails);
        assert_eq!(has_p_negative_type(&m, -1.0, DEFAULT_TOL).unwrap_err(), Error::InvalidExponent(-1.0));
    }

    #[test]
    fn strictness_examples() {
        assert!(has_strict_p_negative_type(&path_metric(), 1.0, DEFAULT_TOL).unwrap());
        assert!(!has_strict_p_negative_type(&path_metric(), 2.0, DEFAULT_TOL).unwrap());
        assert!(has_strict_p_negative_type(&FiniteMetric::discrete(4), 1.0, DEFAULT_TOL).unwrap());
    }

    #[test]
    fn roundness_examples() {
        let m = path_metric();
        let (a, mid, b) = (VertexId::new(0), VertexId::new(1), VertexId::new(2));
        assert_eq!(roundness_margin(&m, 1.0, &[a], &[b]).unwrap(), 2.0);
        // leaves against the midpoint, twice
        assert_eq!(roundness_margin(&m, 3.0, &[a, b], &[mid, mid]).unwrap(), 4.0 - 8.0);
        let r = generalized_roundness_check(&m, 1.0, 500, 7).unwrap();
        assert!(r.holds && r.worst_margin >= 0.0);
        let r = generalized_roundness_check(&m, 3.0, 500, 7).unwrap();
        assert!(!r.holds && r.worst_margin < 0.0);
    }

    #[test]
    fn max_p_examples() {
        let two = FiniteMetric::new(vec!["x".into(), "y".into()], vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(max_negative_type(&two, 1e-6).unwrap_err(), Error::CapReached(MAX_EXPONENT));

        let e = max_negative_type(&path_metric(), 1e-6).unwrap();
        assert!((e.p_star - 2.0).abs() <= 1e-6 && e.bracket_width <= 1e-6);

        let star = metric_from_tree(&build_star(4).unwrap(), None).unwrap();
        let e = max_negative_type(&star, 1e-6).unwrap();
        assert!((e.p_star - (1.0 + (4.0f64 / 3.0).ln() / 2f64.ln())).abs() < 1e-5);
    }

    #[test]
    fn zeta_examples() {
        let z = zeta_lower_bound(&path_metric(), 0.5).unwrap();
        assert!((z - 1.0625f64.ln() / 2f64.ln()).abs() < 1e-15);
        assert!((z - 0.08746).abs() < 1e-5);
        let scaled = path_metric().scaled(10.0);
        assert!((zeta_lower_bound(&scaled, 5.0).unwrap() - z).abs() < 1e-15);
        assert_eq!(zeta_lower_bound(&FiniteMetric::discrete(4), 1.0).unwrap_err(), Error::DegenerateMetric);
        let two = FiniteMetric::discrete(2);
        assert!(matches!(zeta_lower_bound(&two, 1.0), Err(Error::TooFewPoints { .. })));
    }

    #[test]
    fn closed_form_bounds() {
        assert!((tree_maxp_lower_bound(3).unwrap() - 1.169925).abs() < 1e-6);
        assert!((tree_maxp_lower_bound(4).unwrap() - 1.016702).abs() < 1e-6);
        assert!(matches!(tree_maxp_lower_bound(2), Err(Error::TooFewPoints { .. })));
        assert_eq!(star_max_p(2).unwrap(), 2.0);
        assert!((star_max_p(3).unwrap() - 1.584963).abs() < 1e-6);
        assert_eq!(star_max_p(1).unwrap_err(), Error::TooFewLeaves(1));
        let mut prev = f64::INFINITY;
        for n in 2..=64 {
            let p = star_max_p(n).unwrap();
            assert!(p < prev && p > 1.0);
            prev = p;
        }
    }

    #[test]
    fn builders() {
        let y2 = build_star(2).unwrap();
        assert_eq!((y2.len(), y2.edge_count()), (3, 2));
        let y3 = metric_from_tree(&build_star(3).unwrap(), None).unwrap();
        assert_eq!(y3.distance_range(), Some((1.0, 2.0)));
        for n in 2..=8 {
            let g = gamma_t(&build_star(n).unwrap()).unwrap().gamma;
            assert!((g - 1.0 / n as f64).abs() < 1e-15);
        }
        assert_eq!(build_star(1).unwrap_err(), Error::TooFewLeaves(1));

        let n2 = build_necklace(2).unwrap();
        assert_eq!((n2.len(), n2.edge_count()), (3, 2));
        let n3 = build_necklace(3).unwrap();
        assert_eq!((n3.len(), n3.edge_count()), (7, 6));
        assert_eq!(n3.path_distance("r2_l1", "r3_l3").unwrap(), 3.0);
        assert_eq!(build_necklace(1).unwrap_err(), Error::TooSmall(1));
    }

    #[test]
    fn enhanced_examples() {
        let t = unit_path();
        let pts = ids(&t, &["a", "m", "b"]);
        let c = verify_enhanced_inequality(&t, &pts, &[0.5, -1.0, 0.5]).unwrap();
        assert!(c.margin.abs() < 1e-15 && c.equality && c.generic_witness);
        let c = verify_enhanced_inequality(&t, &pts, &[-0.5, 1.0, -0.5]).unwrap();
        assert!(c.equality && c.generic_witness);

        let c = verify_enhanced_inequality(&t, &pts, &[1.0, -1.0, 0.0]).unwrap();
        assert!((c.margin - 1.0).abs() < 1e-15 && !c.equality && !c.generic_witness);

        let c = verify_enhanced_inequality(&t, &pts, &[1.0, 1.0, -2.0]).unwrap();
        // gap form: 1/2 * 16 / 2 = 4; sum d eta eta = 2(1 - 4 - 2) = -10
        assert!((c.margin - 6.0).abs() < 1e-12);

        assert!(matches!(
            verify_enhanced_inequality(&t, &pts, &[1.0, 0.0, 0.0]),
            Err(Error::NonZeroSum(_))
        ));
    }
}
