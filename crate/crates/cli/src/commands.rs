//! Command implementations. Each returns the rendered output and whether
//! every cross-check it ran passed.

use serde_json::{json, Map, Value};
use treegap::io::to_edge_list;
use treegap::negtype::{
    build_necklace, build_star, generalized_roundness_check, has_p_negative_type, max_negative_type, metric_from_tree,
    star_max_p, tree_maxp_lower_bound, verify_enhanced_inequality, zeta_lower_bound, MAX_EXPONENT,
};
use treegap::oracle::{brute_force_gamma, gamma_p_estimate, kkt_check_generic, minimize_gap_over_loads, DEFAULT_MAX_VERTICES, MAX_ESTIMATE_POINTS};
use treegap::report::{check_value, max_p_value, report_value, tree_summary, AnalysisReport, Check};
use treegap::{gamma_t, Error, FiniteMetric, GapReport, MaxPEstimate, MetricTree};

use crate::text::{g6, Lines};
use crate::{CliError, CliResult, Input, Output};

/// Default bisection width for maximal-exponent searches.
pub const DEFAULT_BRACKET: f64 = 1e-6;

const ROUNDNESS_TRIALS: usize = 1000;

fn json_text(value: &Value) -> String {
    serde_json::to_string_pretty(value).expect("JSON values always serialize") + "\n"
}

fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

fn gap_checks(tree: &MetricTree, gap: &GapReport) -> CliResult<Vec<Check>> {
    let mut checks = vec![Check::relative("witness_gap", gap.witness_gap, gap.gamma, 1e-10)];
    if tree.len() <= DEFAULT_MAX_VERTICES {
        let brute = brute_force_gamma(tree, DEFAULT_MAX_VERTICES)?;
        checks.push(Check::relative("brute_force_gamma", brute, gap.gamma, 1e-7));
    }
    Ok(checks)
}

fn text_checks(checks: &[Check]) -> String {
    let mut out = String::new();
    if checks.is_empty() {
        return out;
    }
    out.push_str("checks:\n");
    for c in checks {
        out.push_str(&format!(
            "  {} {}: value {} expected {} (tol {})\n",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            g6(c.value),
            g6(c.expected),
            g6(c.tolerance)
        ));
    }
    out
}

fn text_gap(tree: &MetricTree, gap: &GapReport) -> String {
    let mut lines = Lines::default();
    lines
        .push("vertices", tree.len().to_string())
        .push("edges", tree.edge_count().to_string())
        .push("root", tree.label(tree.root()))
        .num("gamma", gap.gamma)
        .num("delta_star", gap.delta_star)
        .num("witness_gap", gap.witness_gap);
    let mut out = lines.render();
    out.push_str("generic weights:\n");
    let s = &gap.generic_simplex;
    let mut rows: Vec<(&str, char, f64)> = s
        .a_team()
        .iter()
        .zip(gap.generic_weights.m())
        .map(|(&v, &w)| (tree.label(v), 'a', w))
        .chain(s.b_team().iter().zip(gap.generic_weights.n()).map(|(&v, &w)| (tree.label(v), 'b', w)))
        .collect();
    rows.sort_by(|x, y| x.0.cmp(y.0));
    let width = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
    for (label, parity, w) in rows {
        out.push_str(&format!("  {label:<width$}  {parity}  {}\n", g6(w)));
    }
    out
}

fn text_max_p(est: &MaxPEstimate) -> String {
    let mut lines = Lines::default();
    lines
        .num("p_star", est.p_star)
        .push("bracket", format!("[{}, {}]", g6(est.lower), g6(est.upper)))
        .push("status_at_p_star", est.verdict_at_p_star.status.as_str());
    lines.render()
}

pub fn gap(tree: &MetricTree, out: Output) -> CliResult<(String, bool)> {
    let gap = gamma_t(tree)?;
    let checks = gap_checks(tree, &gap)?;
    let text = match out {
        Output::Json => json_text(&report_value(&AnalysisReport {
            tree,
            gap: &gap,
            max_p: None,
            checks: &checks,
        })),
        Output::Text => text_gap(tree, &gap) + &text_checks(&checks),
    };
    Ok((text, all_passed(&checks)))
}

/// Bisection estimate, or `None` when negative type still holds at the cap.
fn max_p_or_cap(metric: &FiniteMetric, tol: f64) -> CliResult<Option<MaxPEstimate>> {
    match max_negative_type(metric, tol) {
        Ok(est) => Ok(Some(est)),
        Err(Error::CapReached(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub fn maxp(input: Input, tol: f64, out: Output) -> CliResult<(String, bool)> {
    let (metric, tree) = match input {
        Input::Tree(t) => (metric_from_tree(&t, None)?, Some(t)),
        Input::Metric(m) => (m, None),
    };
    let est = max_p_or_cap(&metric, tol)?;
    let lower_bound = tree
        .as_ref()
        .filter(|t| t.is_unweighted() && t.len() >= 3)
        .map(|t| tree_maxp_lower_bound(t.len()))
        .transpose()?;
    // The interval needs the exact gap, which is only known for trees.
    let zeta = match &tree {
        Some(t) if t.len() >= 3 => {
            let gamma = gamma_t(t)?.gamma;
            match zeta_lower_bound(&metric, gamma) {
                Ok(z) => Some((gamma, z)),
                Err(Error::DegenerateMetric) => None,
                Err(e) => return Err(e.into()),
            }
        }
        _ => None,
    };
    let text = match out {
        Output::Json => json_text(&json!({
            "points": metric.len(),
            "max_p": est.as_ref().map_or(Value::Null, max_p_value),
            "capped": est.is_none(),
            "cap": MAX_EXPONENT,
            "tree_maxp_lower_bound": lower_bound,
            "zeta": zeta.map_or(Value::Null, |(gamma, z)| json!({
                "gamma": gamma,
                "zeta": z,
                "interval": [1.0 - z, 1.0 + z],
            })),
        })),
        Output::Text => {
            let mut s = Lines::default().push("points", metric.len().to_string()).render();
            match &est {
                Some(e) => s.push_str(&text_max_p(e)),
                None => s.push_str(&format!("p_star  >= {} (negative type holds at the cap)\n", g6(MAX_EXPONENT))),
            }
            let mut lines = Lines::default();
            if let Some(b) = lower_bound {
                lines.num("tree_maxp_lower_bound", b);
            }
            if let Some((_, z)) = zeta {
                lines.num("zeta", z).push("strict_interval", format!("({}, {})", g6(1.0 - z), g6(1.0 + z)));
            }
            s + &lines.render()
        }
    };
    Ok((text, true))
}

pub fn check(input: Input, p: f64, tol: f64, out: Output) -> CliResult<(String, bool)> {
    let metric = match input {
        Input::Tree(t) => metric_from_tree(&t, None)?,
        Input::Metric(m) => m,
    };
    let verdict = has_p_negative_type(&metric, p, tol)?;
    let text = match out {
        Output::Json => {
            let certificate = verdict.certificate.as_ref().map_or(Value::Null, |c| {
                let entries: Map<String, Value> =
                    metric.labels().iter().zip(c).map(|(l, &x)| (l.clone(), json!(x))).collect();
                Value::Object(entries)
            });
            json_text(&json!({
                "p": p,
                "tolerance": tol,
                "status": verdict.status.as_str(),
                "lambda_max": verdict.lambda_max,
                "certificate": certificate,
            }))
        }
        Output::Text => {
            let mut s = Lines::default()
                .num("p", p)
                .push("status", verdict.status.as_str())
                .num("lambda_max", verdict.lambda_max)
                .render();
            if let Some(c) = &verdict.certificate {
                s.push_str("certificate:\n");
                let width = metric.labels().iter().map(String::len).max().unwrap_or(0);
                for (l, &x) in metric.labels().iter().zip(c) {
                    s.push_str(&format!("  {l:<width$}  {}\n", g6(x)));
                }
            }
            s
        }
    };
    Ok((text, true))
}

fn constructed(tree: &MetricTree, tol: f64, out: Output, bound_check: impl FnOnce(f64) -> CliResult<Check>) -> CliResult<(String, bool)> {
    let gap = gamma_t(tree)?;
    let est = max_p_or_cap(&metric_from_tree(tree, None)?, tol)?
        .ok_or_else(|| CliError::Internal("negative type held up to the exponent cap".into()))?;
    let mut checks = gap_checks(tree, &gap)?;
    checks.push(Check::relative("gamma_reciprocal_edges", gap.gamma, 1.0 / tree.edge_count() as f64, 1e-12));
    checks.push(bound_check(est.p_star)?);
    let text = match out {
        Output::Json => json_text(&json!({
            "edge_list": to_edge_list(tree),
            "report": report_value(&AnalysisReport {
                tree,
                gap: &gap,
                max_p: Some(&est),
                checks: &checks,
            }),
        })),
        Output::Text => to_edge_list(tree) + &text_gap(tree, &gap) + &text_max_p(&est) + &text_checks(&checks),
    };
    Ok((text, all_passed(&checks)))
}

pub fn star(n: usize, tol: f64, out: Output) -> CliResult<(String, bool)> {
    let tree = build_star(n)?;
    constructed(&tree, tol, out, |p_star| Ok(Check::relative("star_max_p", p_star, star_max_p(n)?, 1e-4)))
}

pub fn necklace(n: usize, tol: f64, out: Output) -> CliResult<(String, bool)> {
    let tree = build_necklace(n)?;
    constructed(&tree, tol, out, |p_star| {
        let bound = star_max_p(n)?;
        Ok(Check {
            name: "below_largest_star".into(),
            passed: p_star <= bound + 1e-4,
            value: p_star,
            expected: bound,
            tolerance: 1e-4,
        })
    })
}

pub fn verify(tree: &MetricTree, weights: &[(String, f64)], out: Output) -> CliResult<(String, bool)> {
    let points = weights.iter().map(|(l, _)| tree.id(l)).collect::<treegap::Result<Vec<_>>>()?;
    let eta: Vec<f64> = weights.iter().map(|w| w.1).collect();
    let check = verify_enhanced_inequality(tree, &points, &eta)?;
    let text = match out {
        Output::Json => json_text(&json!({
            "margin": check.margin,
            "scale": check.scale,
            "equality": check.equality,
            "generic_witness": check.generic_witness,
        })),
        Output::Text => Lines::default()
            .num("margin", check.margin)
            .push("equality", check.equality.to_string())
            .push("generic_witness", check.generic_witness.to_string())
            .render(),
    };
    Ok((text, true))
}

pub fn oracle(tree: &MetricTree, seed: u64, out: Output) -> CliResult<(String, bool)> {
    let gap = gamma_t(tree)?;
    let metric = metric_from_tree(tree, None)?;
    let mut checks = gap_checks(tree, &gap)?;

    let kkt = kkt_check_generic(tree)?;
    checks.push(Check {
        name: "kkt_multipliers".into(),
        passed: kkt.holds,
        value: 0.5 * (kkt.lambda1 + kkt.lambda2),
        expected: gap.gamma,
        tolerance: 1e-5,
    });

    let minimum = minimize_gap_over_loads(&gap.generic_simplex)?;
    checks.push(Check::relative("generic_simplex_minimum", minimum.value, gap.gamma, 1e-8));

    if metric.len() <= MAX_ESTIMATE_POINTS {
        let estimate = gamma_p_estimate(&metric, 1.0, 8, 8, seed)?;
        checks.push(Check::relative("multistart_minimum", estimate, gap.gamma, 1e-6));
    }

    let verdict = has_p_negative_type(&metric, 1.0, treegap::negtype::DEFAULT_TOL)?;
    checks.push(Check {
        name: "eigenvalue_bound".into(),
        passed: verdict.lambda_max <= -gap.gamma / 2.0 + 1e-9,
        value: verdict.lambda_max,
        expected: -gap.gamma / 2.0,
        tolerance: 1e-9,
    });

    let roundness = generalized_roundness_check(&metric, 1.0, ROUNDNESS_TRIALS, seed)?;
    checks.push(Check {
        name: "roundness_one".into(),
        passed: roundness.holds,
        value: roundness.worst_margin,
        expected: 0.0,
        tolerance: 0.0,
    });

    let passed = all_passed(&checks);
    let text = match out {
        Output::Json => json_text(&json!({
            "tree_summary": tree_summary(tree),
            "gamma": gap.gamma,
            "seed": seed,
            "checks": checks.iter().map(check_value).collect::<Vec<_>>(),
            "passed": passed,
        })),
        Output::Text => Lines::default().num("gamma", gap.gamma).render() + &text_checks(&checks),
    };
    Ok((text, passed))
}
