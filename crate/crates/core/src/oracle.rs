//! Brute-force and optimization oracles for the closed forms.
//!
//! On a simplex of a tree the extended gap is the quadratic `x^T H x / 2`
//! in the stacked weights `x = (m, n)`, with
//! `H = sum_e |e| (u_e u_e^T + v_e v_e^T)` where `u_e` (resp. `v_e`) holds
//! `+1` for a-members and `-1` for b-members left (resp. right) of `e`. The
//! oracle builds `H` from the subtree structure alone and minimizes it over
//! the product of two closed probability simplexes with accelerated
//! projected gradient.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::generic::gamma_t;
use crate::metric::FiniteMetric;
use crate::simplex::{Host, Parity, Simplex};
use crate::tree::{MetricTree, VertexId};

pub const GRADIENT_TOL: f64 = 1e-11;
pub const MAX_ITERATIONS: usize = 1_000_000;
pub const DEFAULT_MAX_VERTICES: usize = 9;
/// Largest space accepted by [`gamma_p_estimate`].
pub const MAX_ESTIMATE_POINTS: usize = 8;
/// Iteration cap per start in [`gamma_p_estimate`].
const ESTIMATE_ITERATIONS: usize = 20_000;

#[derive(Clone, Debug, PartialEq)]
pub struct MinimizationResult {
    pub value: f64,
    /// Minimizing a-team weights (may contain zeros).
    pub m: Vec<f64>,
    /// Minimizing b-team weights (may contain zeros).
    pub n: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KktReport {
    pub lambda1: f64,
    pub lambda2: f64,
    /// Largest difference between two a-team partial derivatives.
    pub spread_m: f64,
    /// Largest difference between two b-team partial derivatives.
    pub spread_n: f64,
    pub gamma: f64,
    pub holds: bool,
}

/// `x^T H x / 2` over a product of two probability simplexes of sizes `q`
/// and `len - q`.
struct BoxedQuadratic {
    h: DMatrix<f64>,
    q: usize,
}

impl BoxedQuadratic {
    fn value(&self, x: &DVector<f64>) -> f64 {
        0.5 * x.dot(&(&self.h * x))
    }

    fn project(&self, x: &mut DVector<f64>) {
        let len = x.len();
        project_to_simplex(&mut x.as_mut_slice()[..self.q]);
        project_to_simplex(&mut x.as_mut_slice()[self.q..len]);
    }

    fn step_size(&self) -> f64 {
        let l = SymmetricEigen::new(self.h.clone())
            .eigenvalues
            .iter()
            .fold(0.0f64, |a, &b| a.max(b.abs()));
        if l > 0.0 {
            1.0 / l
        } else {
            1.0
        }
    }

    /// Accelerated projected gradient with function-value restarts.
    fn minimize(&self, start: DVector<f64>, max_iter: usize) -> (DVector<f64>, usize, bool) {
        let step = self.step_size();
        let mut x = start;
        self.project(&mut x);
        let mut fx = self.value(&x);
        let mut y = x.clone();
        let mut t = 1.0f64;
        for it in 1..=max_iter {
            let mut next = &y - (&self.h * &y) * step;
            self.project(&mut next);
            let f_next = self.value(&next);
            if f_next > fx && t > 1.0 {
                // momentum overshot: restart from the current point
                y = x.clone();
                t = 1.0;
                continue;
            }
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            y = &next + (&next - &x) * ((t - 1.0) / t_next);
            x = next;
            fx = f_next;
            t = t_next;
            if self.gradient_mapping_norm(&x, step) <= GRADIENT_TOL {
                return (x, it, true);
            }
        }
        let done = self.gradient_mapping_norm(&x, step) <= GRADIENT_TOL;
        (x, max_iter, done)
    }

    fn gradient_mapping_norm(&self, x: &DVector<f64>, step: f64) -> f64 {
        let mut p = x - (&self.h * x) * step;
        self.project(&mut p);
        (x - p).norm() / step
    }
}

/// Euclidean projection onto `{x >= 0, sum x = 1}` by sorting.
pub fn project_to_simplex(x: &mut [f64]) {
    let mut u = x.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        acc += uj;
        let candidate = (acc - 1.0) / (j + 1) as f64;
        if uj - candidate > 0.0 {
            theta = candidate;
        }
    }
    for v in x.iter_mut() {
        *v = (*v - theta).max(0.0);
    }
}

/// Hessian of the extended gap of a tree-hosted simplex in the stacked
/// coordinates `(m, n)`.
fn extended_gap_hessian(simplex: &Simplex) -> Result<DMatrix<f64>> {
    let tree = simplex.tree().ok_or(Error::NotATreeHost)?;
    let (q, len) = (simplex.q(), simplex.len());
    let coordinate = |v: VertexId| -> Option<(usize, f64)> {
        let team_pos = |team: &[VertexId]| team.iter().position(|&u| u == v);
        match simplex.parity_of(v)? {
            Parity::A => team_pos(simplex.a_team()).map(|j| (j, 1.0)),
            Parity::B => team_pos(simplex.b_team()).map(|i| (q + i, -1.0)),
        }
    };
    let mut h = DMatrix::zeros(len, len);
    for e in simplex.span_edges()? {
        let sides = tree.left_right_sets(&e)?;
        for side in [&sides.left, &sides.right] {
            let mut u = DVector::zeros(len);
            for &v in side.iter() {
                if let Some((k, sign)) = coordinate(v) {
                    u[k] = sign;
                }
            }
            h += &u * u.transpose() * e.weight;
        }
    }
    Ok(h)
}

fn stack(m: &[f64], n: &[f64]) -> DVector<f64> {
    DVector::from_iterator(m.len() + n.len(), m.iter().chain(n).copied())
}

fn barycenter(q: usize, t: usize) -> DVector<f64> {
    stack(&vec![1.0 / q as f64; q], &vec![1.0 / t as f64; t])
}

/// Minimum of the extended gap of `simplex` over nonnegative normalized
/// weights, started from the barycenter.
pub fn minimize_gap_over_loads(simplex: &Simplex) -> Result<MinimizationResult> {
    let (q, t) = (simplex.q(), simplex.t());
    minimize_gap_from(simplex, &vec![1.0 / q as f64; q], &vec![1.0 / t as f64; t])
}

/// As [`minimize_gap_over_loads`] from a given start (projected first).
pub fn minimize_gap_from(simplex: &Simplex, m0: &[f64], n0: &[f64]) -> Result<MinimizationResult> {
    if m0.len() != simplex.q() || n0.len() != simplex.t() {
        return Err(Error::LoadLength {
            expected: simplex.len(),
            got: m0.len() + n0.len(),
        });
    }
    let quad = BoxedQuadratic {
        h: extended_gap_hessian(simplex)?,
        q: simplex.q(),
    };
    let (x, iterations, converged) = quad.minimize(stack(m0, n0), MAX_ITERATIONS);
    let value = quad.value(&x);
    let q = simplex.q();
    Ok(MinimizationResult {
        value,
        m: x.as_slice()[..q].to_vec(),
        n: x.as_slice()[q..].to_vec(),
        iterations,
        converged,
    })
}

/// Every split of every subset of `0..n` with at least two elements into two
/// nonempty teams, one split per unordered pair (the a-team holds the
/// subset's smallest element). Bit masks, in lexicographic order.
fn labelings(n: usize) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for set in 1u32..(1 << n) {
        if set.count_ones() < 2 {
            continue;
        }
        let low = set & set.wrapping_neg();
        let rest = set ^ low;
        // subsets of `rest` joined to `low` form the a-team
        let mut sub = rest;
        loop {
            let a = low | sub;
            if a != set {
                out.push((a, set ^ a));
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
    out.sort_unstable();
    out
}

fn members(mask: u32) -> Vec<VertexId> {
    (0..32).filter(|i| mask >> i & 1 == 1).map(VertexId::new).collect()
}

/// Minimum over index order: smallest value, earliest labeling on ties.
fn first_min(values: impl IndexedParallelIterator<Item = Result<f64>>) -> Result<f64> {
    let all: Vec<f64> = values.collect::<Result<_>>()?;
    Ok(all.into_iter().fold(f64::INFINITY, f64::min))
}

/// The 1-negative type gap of `tree` by exhaustive minimization over all
/// simplexes.
pub fn brute_force_gamma(tree: &MetricTree, max_vertices: usize) -> Result<f64> {
    let n = tree.len();
    if n > max_vertices {
        return Err(Error::TooLarge { got: n, limit: max_vertices });
    }
    if n < 2 {
        return Err(Error::TooFewVertices);
    }
    let host = Host::from(tree.clone());
    let cases = labelings(n);
    first_min(cases.par_iter().map(|&(a, b)| {
        let s = Simplex::new(host.clone(), &members(a), &members(b))?;
        Ok(minimize_gap_over_loads(&s)?.value)
    }))
}

/// Heuristic upper estimate of the p-negative type gap: multi-start
/// projected gradient of the simplex gap over every labeling, from the
/// barycenter and `restarts` random points of the lattice with spacing
/// `1 / grid_resolution`.
pub fn gamma_p_estimate(
    metric: &FiniteMetric,
    p: f64,
    grid_resolution: usize,
    restarts: usize,
    seed: u64,
) -> Result<f64> {
    let n = metric.len();
    if n > MAX_ESTIMATE_POINTS {
        return Err(Error::TooLarge {
            got: n,
            limit: MAX_ESTIMATE_POINTS,
        });
    }
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    if !(p >= 0.0 && p.is_finite()) {
        return Err(Error::InvalidExponent(p));
    }
    if grid_resolution == 0 {
        return Err(Error::InvalidArgument("grid resolution must be positive".into()));
    }
    let dp = |i: VertexId, j: VertexId| if i == j { 0.0 } else { metric.distance(i, j).powf(p) };
    let cases = labelings(n);
    first_min(cases.par_iter().enumerate().map(|(k, &(a, b))| {
        let (a, b) = (members(a), members(b));
        let (q, t) = (a.len(), b.len());
        let all: Vec<VertexId> = a.iter().chain(&b).copied().collect();
        // cross terms positive, within-team terms negative
        let h = DMatrix::from_fn(q + t, q + t, |i, j| {
            let same = (i < q) == (j < q);
            if same {
                -dp(all[i], all[j])
            } else {
                dp(all[i], all[j])
            }
        });
        let quad = BoxedQuadratic { h, q };
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
        let mut starts = vec![barycenter(q, t)];
        for _ in 0..restarts {
            let m = lattice_point(&mut rng, q, grid_resolution);
            let n = lattice_point(&mut rng, t, grid_resolution);
            starts.push(stack(&m, &n));
        }
        Ok(starts
            .into_iter()
            .map(|s| quad.value(&quad.minimize(s, ESTIMATE_ITERATIONS).0))
            .fold(f64::INFINITY, f64::min))
    }))
}

/// Random point of the probability simplex with coordinates in
/// `(1/res) Z`.
fn lattice_point(rng: &mut ChaCha8Rng, k: usize, res: usize) -> Vec<f64> {
    let mut counts = vec![0usize; k];
    for _ in 0..res {
        counts[rng.random_range(0..k)] += 1;
    }
    counts.into_iter().map(|c| c as f64 / res as f64).collect()
}

/// Checks the Lagrange conditions at the generic weighting: all a-team
/// partial derivatives of the extended gap agree (`lambda1`), all b-team
/// ones agree (`lambda2`), and their mean is the gap. Derivatives are
/// central differences with step `1e-6`.
pub fn kkt_check_generic(tree: &MetricTree) -> Result<KktReport> {
    let report = gamma_t(tree)?;
    let simplex = &report.generic_simplex;
    let quad = BoxedQuadratic {
        h: extended_gap_hessian(simplex)?,
        q: simplex.q(),
    };
    let x0 = stack(report.generic_weights.m(), report.generic_weights.n());
    let h = 1e-6;
    let partials: Vec<f64> = (0..x0.len())
        .map(|k| {
            let mut plus = x0.clone();
            let mut minus = x0.clone();
            plus[k] += h;
            minus[k] -= h;
            (quad.value(&plus) - quad.value(&minus)) / (2.0 * h)
        })
        .collect();
    let (dm, dn) = partials.split_at(simplex.q());
    let spread = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    };
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (lambda1, lambda2) = (mean(dm), mean(dn));
    let (spread_m, spread_n) = (spread(dm), spread(dn));
    let holds = spread_m <= 1e-5 && spread_n <= 1e-5 && ((lambda1 + lambda2) / 2.0 - report.gamma).abs() <= 1e-5;
    Ok(KktReport {
        lambda1,
        lambda2,
        spread_m,
        spread_n,
        gamma: report.gamma,
        holds,
    })
}
