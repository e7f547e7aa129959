//! Serialisation of results: CSV tables, JSON documents and a companion
//! plotting script for sweeps.
//!
//! Numbers are rounded to a configurable number of significant digits and then
//! written in shortest round-trip form, so re-parsing an output reproduces the
//! written values exactly.

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::bifurcation::{BifurcationDiagram, Classification};
use crate::equilibria::EquilibriumSet;
use crate::error::{Error, Result};
use crate::innovation::SpecKind;
use crate::params::ModelParams;
use crate::thresholds::ThresholdReport;

pub const DEFAULT_PRECISION: usize = 12;

/// Rounds to `digits` significant digits. Non-finite values pass through.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    let digits = digits.clamp(1, 17);
    format!("{:.*e}", digits - 1, x).parse().unwrap_or(x)
}

/// Shortest round-trip text of the rounded value.
pub fn fmt_num(x: f64, digits: usize) -> String {
    let r = round_sig(x, digits);
    if r.is_nan() {
        "NaN".into()
    } else if r != 0.0 && r.is_finite() && !(1e-5..1e16).contains(&r.abs()) {
        // Debug is the same shortest round-trip, in exponent form.
        format!("{r:?}")
    } else {
        r.to_string()
    }
}

fn csv_error(e: impl std::fmt::Display) -> Error {
    Error::Config(format!("csv output failed: {e}"))
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(csv_error)?;
    String::from_utf8(bytes).map_err(csv_error)
}

/// One row per equilibrium: `z_star,kind,stability,residual,derivative`.
pub fn equilibria_csv(set: &EquilibriumSet, digits: usize) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["z_star", "kind", "stability", "residual", "derivative"]).map_err(csv_error)?;
    for e in &set.equilibria {
        w.write_record([
            fmt_num(e.z_star, digits),
            e.kind.to_string(),
            e.stability.to_string(),
            fmt_num(e.residual, digits),
            e.derivative.map(|d| fmt_num(d, digits)).unwrap_or_default(),
        ])
        .map_err(csv_error)?;
    }
    finish(w)
}

/// A value in the flat threshold document.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum FlatValue {
    Num(f64),
    Bool(bool),
    Text(String),
    List(Vec<f64>),
}

impl FlatValue {
    fn text(&self, digits: usize) -> String {
        match self {
            FlatValue::Num(x) => fmt_num(*x, digits),
            FlatValue::Bool(b) => b.to_string(),
            FlatValue::Text(s) => s.clone(),
            FlatValue::List(v) => v.iter().map(|x| fmt_num(*x, digits)).collect::<Vec<_>>().join(";"),
        }
    }
}

/// Flattens a threshold report into ordered key/value pairs.
pub fn threshold_pairs(r: &ThresholdReport) -> Vec<(String, FlatValue)> {
    use FlatValue::*;
    let bp = &r.break_points;
    let mut out: Vec<(&str, FlatValue)> = vec![
        ("z", Num(r.immobile.z)),
        ("b_hat", Num(r.immobile.b_hat)),
        ("b_tilde", Num(r.immobile.b_tilde)),
        ("b_underline", Num(r.immobile.b_underline)),
        ("gamma_c", Num(r.immobile.gamma_c)),
        ("lambda_star_band_lo", Num(r.immobile.band.0)),
        ("lambda_star_band_hi", Num(r.immobile.band.1)),
        ("b_in_lambda_star_band", Bool(r.immobile.b_in_band)),
        ("lambda_star", Num(r.lambda_star.unwrap_or(f64::NAN))),
        ("sustain_value", Num(r.sustain_value)),
        ("sustain_limit", Num(r.sustain_limit)),
        ("phi_plus", Num(r.phi_plus)),
        ("b_s", Num(r.b_s)),
        ("phi_above_lambda_ratio", Bool(r.phi_above_lambda_ratio)),
        ("sustain_points", List(r.sustain_points.clone())),
        ("break_value", Num(r.break_value)),
        ("b_bar", Num(r.b_bar)),
        ("phi_b1", Num(bp.phi_b1.value)),
        ("phi_b1_existence", Text(bp.phi_b1.existence.to_string())),
        ("phi_b2", Num(bp.phi_b2.value)),
        ("phi_b2_existence", Text(bp.phi_b2.existence.to_string())),
        ("b1", Num(bp.certificate.b1)),
        ("b2", Num(bp.certificate.b2)),
        ("gamma_window_lo", Num(bp.certificate.gamma_window.0)),
        ("gamma_window_hi", Num(bp.certificate.gamma_window.1)),
        ("certificate_gamma", Text(bp.certificate.gamma_condition.to_string())),
        ("certificate_b", Text(bp.certificate.b_condition.to_string())),
        ("certificate_phi_b1", Bool(bp.certificate.predicts_phi_b1)),
        ("certificate_phi_b2", Bool(bp.certificate.predicts_phi_b2)),
        ("b_c", Num(r.b_c)),
    ];
    for (key, pf) in [("b1", &r.pitchfork_b1), ("b2", &r.pitchfork_b2)] {
        let (xi, class) = match pf {
            Some(p) => (p.xi, p.class.to_string()),
            None => (f64::NAN, "none".to_string()),
        };
        out.push((if key == "b1" { "xi_b1" } else { "xi_b2" }, Num(xi)));
        out.push((if key == "b1" { "pitchfork_b1" } else { "pitchfork_b2" }, Text(class)));
    }
    let g = &r.general;
    out.extend([
        ("g_half", Num(g.g_half)),
        ("g_prime_half", Num(g.g_prime_half)),
        ("kappa", Num(g.kappa)),
        ("general_phi_b1", Num(g.phi_b1.value)),
        ("general_phi_b1_existence", Text(g.phi_b1.existence.to_string())),
        ("general_phi_b2", Num(g.phi_b2.value)),
        ("general_phi_b2_existence", Text(g.phi_b2.existence.to_string())),
        ("g_b1", Num(g.g_b1)),
        ("g_b2", Num(g.g_b2)),
    ]);
    out.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

pub fn thresholds_csv(r: &ThresholdReport, digits: usize) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["key", "value"]).map_err(csv_error)?;
    for (k, v) in threshold_pairs(r) {
        w.write_record([k, v.text(digits)]).map_err(csv_error)?;
    }
    finish(w)
}

pub fn thresholds_json_results(r: &ThresholdReport) -> Value {
    let mut m = Map::new();
    for (k, v) in threshold_pairs(r) {
        m.insert(k, serde_json::to_value(v).unwrap_or(Value::Null));
    }
    Value::Object(m)
}

/// Sweep rows: `param_value,branch_id,kind,z_star,stable`.
pub fn sweep_csv(d: &BifurcationDiagram, digits: usize) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["param_value", "branch_id", "kind", "z_star", "stable"]).map_err(csv_error)?;
    for br in &d.branches {
        for p in &br.points {
            w.write_record([
                fmt_num(p.param, digits),
                br.id.to_string(),
                br.kind.to_string(),
                fmt_num(p.z, digits),
                if p.stability.is_stable() { "1" } else { "0" }.to_string(),
            ])
            .map_err(csv_error)?;
        }
    }
    finish(w)
}

pub fn sweep_json_results(d: &BifurcationDiagram, classification: Option<&Classification>, unclassified: Option<&str>) -> Value {
    json!({
        "swept": d.swept,
        "grid_size": d.grid.len(),
        "branches": d.branches,
        "events": d.events,
        "warnings": d.warnings,
        "classification": classification,
        "unclassified_sequence": unclassified,
    })
}

/// Rounds every number in a JSON tree.
pub fn round_json(v: &mut Value, digits: usize) {
    match v {
        Value::Number(n) => {
            if n.is_f64() {
                if let Some(x) = n.as_f64() {
                    if let Some(r) = serde_json::Number::from_f64(round_sig(x, digits)) {
                        *n = r;
                    }
                }
            }
        }
        Value::Array(a) => a.iter_mut().for_each(|x| round_json(x, digits)),
        Value::Object(o) => o.values_mut().for_each(|x| round_json(x, digits)),
        _ => {}
    }
}

/// One top-level object per run with `meta` and `results`.
pub fn json_document(command: &str, params: &ModelParams, spec: &SpecKind, results: Value, digits: usize, extra: Value) -> Value {
    let mut meta = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "params": params,
        "spec": spec.to_string(),
        "precision": digits,
    });
    if let (Value::Object(m), Value::Object(x)) = (&mut meta, extra) {
        m.extend(x);
    }
    let mut doc = json!({ "meta": meta, "results": results });
    round_json(&mut doc, digits);
    doc
}

/// A matplotlib script that draws the sweep CSV: solid lines for stable
/// stretches, dashed for unstable ones.
pub fn plot_script(csv_path: &str, param: &str) -> String {
    format!(
        r#"import csv
from collections import defaultdict

import matplotlib.pyplot as plt

rows = defaultdict(list)
with open({csv_path:?}, newline="") as fh:
    for r in csv.DictReader(fh):
        rows[int(r["branch_id"])].append((float(r["param_value"]), float(r["z_star"]), r["stable"] == "1"))

fig, ax = plt.subplots(figsize=(5, 4))
for pts in rows.values():
    run = [pts[0]]
    for p in pts[1:]:
        if p[2] != run[-1][2]:
            ax.plot([q[0] for q in run] + [p[0]], [q[1] for q in run] + [p[1]],
                    "k-" if run[-1][2] else "k--", lw=1.2)
            run = [p]
        else:
            run.append(p)
    ax.plot([q[0] for q in run], [q[1] for q in run], "k-" if run[-1][2] else "k--", lw=1.2)
ax.set_xlabel({param:?})
ax.set_ylabel("z")
ax.set_ylim(-0.02, 1.02)
fig.tight_layout()
fig.savefig({png:?}, dpi=150)
"#,
        png = format!("{}.png", csv_path.trim_end_matches(".csv"))
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::{find_equilibria, DEFAULT_GRID};
    use crate::innovation::InnovationSpec;
    use crate::model::Model;
    use crate::thresholds::threshold_report;

    #[test]
    fn rounding_is_idempotent() {
        for x in [0.1 + 0.2, std::f64::consts::PI, -1.234_567_890_123_456e-7, 5.0 / 9.0] {
            let r = round_sig(x, 12);
            assert_eq!(round_sig(r, 12), r);
            let s = fmt_num(x, 12);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), r.to_bits());
        }
        assert_eq!(fmt_num(0.1 + 0.2, 12), "0.3");
        assert_eq!(fmt_num(8.326_672_684_688_674e-17, 12), "8.32667268469e-17");
        assert_eq!(fmt_num(1.0, 12), "1");
    }

    #[test]
    fn equilibria_table() {
        let m = Model::additive(ModelParams::new(2.0, 1.0, 5.0, 0.342, 0.1).unwrap());
        let s = find_equilibria(&m, DEFAULT_GRID).unwrap();
        let csv = equilibria_csv(&s, 12).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "z_star,kind,stability,residual,derivative");
        assert_eq!(lines.len(), 4);
        assert!(lines[2].starts_with("0.5,symmetric,stable"));
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn threshold_keys() {
        let p = ModelParams::new(2.0, 1.0, 8.0, 0.55, 0.5).unwrap();
        let r = threshold_report(&InnovationSpec::Additive, &p, 0.75).unwrap();
        let pairs = threshold_pairs(&r);
        let get = |k: &str| pairs.iter().find(|(n, _)| n == k).map(|(_, v)| v.clone()).unwrap();
        assert!(matches!(get("b1"), FlatValue::Num(x) if (x - 0.35006).abs() < 1e-5));
        assert!(matches!(get("sustain_points"), FlatValue::List(v) if v.len() == 1));
        let doc = json_document("thresholds", &p, &SpecKind::Additive, thresholds_json_results(&r), 12, json!({}));
        let text = serde_json::to_string(&doc).unwrap();
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back, doc);
    }
}
