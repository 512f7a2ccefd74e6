//! JSON analysis reports.
//!
//! Keys appear in a fixed order and numbers are written in shortest
//! round-trip form, so a report parses back to the same binary64 values and
//! identical inputs give byte-identical output.

use serde_json::{json, Map, Value};

use crate::generic::GapReport;
use crate::negtype::MaxPEstimate;
use crate::simplex::Parity;
use crate::tree::MetricTree;

/// One named cross-check.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub expected: f64,
    pub tolerance: f64,
}

impl Check {
    /// Passes when `|value - expected| <= tolerance * max(1, |expected|)`.
    pub fn relative(name: impl Into<String>, value: f64, expected: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            passed: (value - expected).abs() <= tolerance * expected.abs().max(1.0),
            value,
            expected,
            tolerance,
        }
    }
}

pub struct AnalysisReport<'a> {
    pub tree: &'a MetricTree,
    pub gap: &'a GapReport,
    pub max_p: Option<&'a MaxPEstimate>,
    pub checks: &'a [Check],
}

pub fn tree_summary(tree: &MetricTree) -> Value {
    let edges: Vec<Value> = tree
        .edges()
        .iter()
        .map(|e| json!({"left": tree.label(e.left), "right": tree.label(e.right), "weight": e.weight}))
        .collect();
    json!({
        "vertices": tree.len(),
        "edge_count": tree.edge_count(),
        "root": tree.label(tree.root()),
        "unweighted": tree.is_unweighted(),
        "total_length": tree.total_length(),
        "edges": edges,
    })
}

pub fn max_p_value(estimate: &MaxPEstimate) -> Value {
    json!({
        "p_star": estimate.p_star,
        "bracket_width": estimate.bracket_width,
        "lower": estimate.lower,
        "upper": estimate.upper,
        "status_at_p_star": estimate.verdict_at_p_star.status.as_str(),
        "lambda_max_at_p_star": estimate.verdict_at_p_star.lambda_max,
    })
}

pub fn check_value(check: &Check) -> Value {
    json!({
        "name": check.name,
        "passed": check.passed,
        "value": check.value,
        "expected": check.expected,
        "tolerance": check.tolerance,
    })
}

pub fn report_value(report: &AnalysisReport) -> Value {
    let s = &report.gap.generic_simplex;
    let mut weights = Map::new();
    let teams = [
        (Parity::A, s.a_team(), report.gap.generic_weights.m()),
        (Parity::B, s.b_team(), report.gap.generic_weights.n()),
    ];
    let mut entries: Vec<(String, Value)> = teams
        .iter()
        .flat_map(|(parity, team, w)| {
            team.iter().zip(w.iter()).map(move |(&v, &x)| {
                let parity = if *parity == Parity::A { "a" } else { "b" };
                (report.tree.label(v).to_string(), json!({"parity": parity, "weight": x}))
            })
        })
        .collect();
    entries.sort_by(|x, y| x.0.cmp(&y.0));
    weights.extend(entries);
    json!({
        "tree_summary": tree_summary(report.tree),
        "gamma": report.gap.gamma,
        "delta_star": report.gap.delta_star,
        "generic_weights": weights,
        "max_p": report.max_p.map_or(Value::Null, max_p_value),
        "checks": report.checks.iter().map(check_value).collect::<Vec<_>>(),
    })
}

/// Pretty-printed JSON report.
pub fn emit_report(report: &AnalysisReport) -> String {
    serde_json::to_string_pretty(&report_value(report)).expect("JSON values always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generic::gamma_t;

    fn report_for(tree: &MetricTree, checks: &[Check]) -> Value {
        let gap = gamma_t(tree).unwrap();
        let text = emit_report(&AnalysisReport {
            tree,
            gap: &gap,
            max_p: None,
            checks,
        });
        serde_json::from_str(&text).unwrap()
    }

    #[test]
    fn report_examples() {
        let e = MetricTree::build(&["a", "b"], &[("a", "b", 1.0)], None).unwrap();
        let v = report_for(&e, &[]);
        assert_eq!(v["gamma"], json!(1.0));
        assert_eq!(v["checks"], json!([]));
        assert_eq!(v["max_p"], Value::Null);

        let p = MetricTree::build(&["a", "m", "b"], &[("a", "m", 1.0), ("m", "b", 1.0)], None).unwrap();
        let v = report_for(&p, &[Check::relative("witness", 0.5, 0.5, 1e-12)]);
        assert_eq!(v["gamma"], json!(0.5));
        assert_eq!(v["generic_weights"]["m"], json!({"parity": "b", "weight": 1.0}));
        assert_eq!(v["checks"][0]["passed"], json!(true));
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["tree_summary", "gamma", "delta_star", "generic_weights", "max_p", "checks"]);
    }

    #[test]
    fn numbers_round_trip() {
        let t = MetricTree::build(&["a", "m", "b"], &[("a", "m", 0.1), ("m", "b", 1.0 / 3.0)], None).unwrap();
        let gap = gamma_t(&t).unwrap();
        let v = report_for(&t, &[]);
        assert_eq!(v["gamma"].as_f64().unwrap(), gap.gamma);
        assert_eq!(v["tree_summary"]["edges"][1]["weight"].as_f64().unwrap().to_bits(), (1.0f64 / 3.0).to_bits());
    }
}
