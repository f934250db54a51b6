//! Table and JSON renderings of a [`RunOutcome`].

use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use crate::check::Check;
use crate::germ::ReportFormat;
use crate::pipeline::{Classification, RunOutcome, Stage};
use crate::subalgebra::Status;

/// One report line: key, value, status, method.
struct Entry {
    key: &'static str,
    value: Value,
    status: Status,
    method: &'static str,
}

fn entry(key: &'static str, value: Option<Value>, method: &'static str, missing: Status) -> Entry {
    match value {
        Some(v) => Entry {
            key,
            value: v,
            status: Status::Certified,
            method,
        },
        None => Entry {
            key,
            value: Value::Null,
            status: missing,
            method,
        },
    }
}

fn check_json(c: &Check) -> Value {
    json!({ "name": c.name, "passed": c.passed, "detail": c.detail })
}

fn entries(out: &RunOutcome) -> Vec<Entry> {
    let rec = out.record.as_ref();
    let dims = out.cotangent.as_ref();
    let rejected = out.record.is_none();
    let miss = |needed: Stage| {
        if rejected {
            Status::Undetermined
        } else if out.stage < needed {
            Status::NotApplicable
        } else {
            Status::Undetermined
        }
    };
    let smooth = rec.is_some_and(|r| r.is_smooth());
    let mut v = vec![
        entry("branches", Some(json!(out.r)), "input", Status::Certified),
        entry("mult", out.mt.map(|m| json!(m)), "minimal-order", Status::Undetermined),
        entry("delta", rec.map(|r| json!(r.delta)), "conductor-certificate", miss(Stage::Check)),
        entry(
            "conductor_degree",
            rec.map(|r| json!(r.conductor.degree)),
            "conductor-certificate",
            miss(Stage::Check),
        ),
        entry("milnor", rec.map(|r| json!(r.mu)), "2delta-r+1", miss(Stage::Check)),
        entry("m1", rec.map(|r| json!(r.m1)), "liftable-fields", miss(Stage::Check)),
        entry("deligne_e", rec.map(|r| json!(r.e)), "3delta-m1", miss(Stage::Check)),
        entry("gorenstein", rec.map(|r| json!(r.gorenstein)), "c=2delta", miss(Stage::Check)),
    ];
    v.push(match rec {
        Some(r) if r.cm_type.is_none() => entry("cm_type", None, "colon-ideal", Status::NotApplicable),
        _ => entry("cm_type", rec.and_then(|r| r.cm_type).map(|t| json!(t)), "colon-ideal", miss(Stage::Check)),
    });
    v.push(entry(
        "ae_codim",
        dims.map(|d| json!(d.ae_codim_oracle)),
        "tangent-space-quotient",
        miss(Stage::Codim),
    ));
    v.push(entry("le_codim", dims.map(|d| json!(d.le_codim)), "tangent-space-quotient", miss(Stage::Codim)));
    v.push(entry("t1_par_dim", dims.map(|d| json!(d.t1_par)), "equals-ae-codim", miss(Stage::Codim)));
    v.push(entry(
        "t1_xbar_over_x_dim",
        dims.map(|d| json!(d.t1_xbar_over_x)),
        "velocity-ideal-colength",
        miss(Stage::Codim),
    ));
    v.push(match &out.tjurina {
        Some(t) => Entry {
            key: "tjurina",
            value: json!(t.value),
            status: t.status,
            method: t.method,
        },
        None => entry("tjurina", None, "not-available", Status::NotApplicable),
    });
    v.push(match dims {
        Some(_) if smooth => entry("inequality_chain", None, "smooth-germ", Status::NotApplicable),
        Some(d) => Entry {
            key: "inequality_chain",
            value: Value::Array(d.chain.iter().map(check_json).collect()),
            status: Status::Certified,
            method: "certified-invariants",
        },
        None => entry("inequality_chain", None, "certified-invariants", miss(Stage::Codim)),
    });
    let class_status = match out.classification {
        Classification::Undetermined => Status::Undetermined,
        _ => Status::Certified,
    };
    v.push(Entry {
        key: "classification",
        value: json!(out.classification.as_str()),
        status: class_status,
        method: "invariants",
    });
    v.sort_by_key(|e| e.key);
    v
}

fn render_json(out: &RunOutcome) -> String {
    let mut doc = Map::new();
    for e in entries(out) {
        doc.insert(
            e.key.into(),
            json!({ "value": e.value, "status": e.status.as_str(), "method": e.method }),
        );
    }
    doc.insert("finiteness".into(), json!(out.finite()));
    doc.insert("reason".into(), json!(out.reason));
    doc.insert("quasihomogeneous".into(), json!(out.quasihomogeneous));
    if let Some(rec) = &out.record {
        let sgs: Vec<Value> = rec
            .semigroups
            .iter()
            .map(|s| json!({ "elements_below_conductor": s.elements, "conductor": s.conductor, "gaps": s.gaps() }))
            .collect();
        doc.insert("semigroups".into(), Value::Array(sgs));
        doc.insert("conductor".into(), json!(rec.conductor.per_branch));
    }
    if let Some(ci) = &out.ci {
        doc.insert(
            "braid".into(),
            json!({
                "t1_xbar_minus_x": ci.braid.t1_xbar_minus_x,
                "t2_xbar_minus_x": ci.braid.t2_xbar_minus_x,
                "t1_xbar_to_x": ci.braid.t1_xbar_to_x,
                "t2_xbar_to_x": ci.braid.t2_xbar_to_x,
                "t2_xbar_over_x": ci.braid.t2_xbar_over_x,
                "dstar_rank": ci.dstar.rank,
            }),
        );
    }
    if out.cotangent.is_some() {
        doc.insert("t1_xbar_xbar_to_x_over_x".into(), json!("free O_Xbar-module of rank 1"));
    }
    doc.insert("checks".into(), Value::Array(out.checks.iter().map(check_json).collect()));
    doc.insert("observations".into(), Value::Array(out.observations.iter().map(check_json).collect()));
    doc.insert("diagnostics".into(), json!(out.diagnostics));
    doc.insert("exit_code".into(), json!(out.exit_code));
    let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("json");
    s.push('\n');
    s
}

fn plain(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::String(s) => s.clone(),
        Value::Array(items) => {
            let ok = items.iter().all(|c| c["passed"] == json!(true));
            format!("{} links, {}", items.len(), if ok { "all hold" } else { "VIOLATED" })
        }
        other => other.to_string(),
    }
}

fn render_table(out: &RunOutcome) -> String {
    let mut s = String::new();
    let rows: Vec<(String, String, &str, &str)> = entries(out)
        .iter()
        .map(|e| (e.key.to_string(), plain(&e.value), e.status.as_str(), e.method))
        .collect();
    let w0 = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
    let w1 = rows.iter().map(|r| r.1.chars().count()).max().unwrap_or(0);
    let w2 = rows.iter().map(|r| r.2.len()).max().unwrap_or(0);
    for (k, v, st, m) in &rows {
        writeln!(s, "{k:<w0$}  {v:<w1$}  {st:<w2$}  {m}").unwrap();
    }
    if let Some(reason) = &out.reason {
        writeln!(s, "\nreason: {reason}").unwrap();
    }
    if let Some(ci) = &out.ci {
        let b = &ci.braid;
        writeln!(s, "\nT1_{{Xbar\\X}} = {}, T2_{{Xbar\\X}} = {}", b.t1_xbar_minus_x, b.t2_xbar_minus_x).unwrap();
        writeln!(s, "T1_{{Xbar->X}} = {}, T2_{{Xbar->X}} = {}", b.t1_xbar_to_x, b.t2_xbar_to_x).unwrap();
        writeln!(s, "T2_{{Xbar/X}} = {}", b.t2_xbar_over_x).unwrap();
    }
    if !out.checks.is_empty() {
        s.push_str("\nchecks:\n");
        for c in &out.checks {
            writeln!(s, "  {c}").unwrap();
        }
    }
    if !out.observations.is_empty() {
        s.push_str("\nobservations (not asserted):\n");
        for c in &out.observations {
            let verdict = if c.passed { "holds" } else { "fails" };
            writeln!(s, "  {verdict} {}: {}", c.name, c.detail).unwrap();
        }
    }
    writeln!(s, "\nexit code {}", out.exit_code).unwrap();
    s
}

pub fn render_report(out: &RunOutcome, format: ReportFormat) -> String {
    match format {
        ReportFormat::Table => render_table(out),
        ReportFormat::Json => render_json(out),
    }
}
