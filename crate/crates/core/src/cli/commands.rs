//! Command implementations, independent of argument parsing and I/O.

use serde::Deserialize;
use serde_json::{json, Map, Value};

use super::json;
use super::model::{Model, RationalText};
use crate::credal::{
    check_consistency, extend_measure, lower_expectation, upper_expectation, Bound, CheckStatus,
    ConsistencyReport,
};
use crate::error::{Error, Result};
use crate::exactq::{parse_rational, Rational};
use crate::joint::{build_joint, lemma_suite, verify_representation, JointModel, JointOutcome};
use crate::spaces::{IndexTuple, MeasureVector};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CAP: i32 = 3;

pub const DEFAULT_VERTEX_LIMIT: usize = 500;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ResourceCap { .. } => EXIT_CAP,
        Error::EmptyJoint => EXIT_FAIL,
        _ => EXIT_INPUT,
    }
}

/// A machine-readable document, a few human-readable lines, and an exit code.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub exit: i32,
    pub document: Value,
    pub summary: Vec<String>,
}

#[derive(Debug, Clone, Copy)]
pub struct VertexOptions {
    pub emit: bool,
    pub limit: usize,
}

impl Default for VertexOptions {
    fn default() -> Self {
        VertexOptions {
            emit: false,
            limit: DEFAULT_VERTEX_LIMIT,
        }
    }
}

fn header(command: &str, model: &Model) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("tool".into(), json!("credalk"));
    m.insert("version".into(), json!(VERSION));
    m.insert("command".into(), json!(command));
    m.insert("input_sha256".into(), json!(model.digest));
    m
}

fn missing(model: &Model) -> Value {
    let space = model.space();
    Value::Array(
        model
            .collection
            .missing_subsets()
            .iter()
            .map(|t| json::tuple(space, t))
            .collect(),
    )
}

fn consistency_summary(model: &Model, r: &ConsistencyReport) -> Vec<String> {
    let space = model.space();
    r.records
        .iter()
        .map(|x| {
            let mut s = format!("{} {}", x.condition, space.tuple_display(&x.source));
            if let Some(t) = &x.target {
                s.push_str(&format!(" -> {}", space.tuple_display(t)));
            }
            if let Some(d) = x.direction {
                s.push_str(&format!(" {}", d.as_str()));
            }
            s.push_str(&format!(": {}", x.status.as_str()));
            s
        })
        .collect()
}

/// Runs both consistency conditions.
pub fn validate(model: &Model) -> Result<Outcome> {
    let report = check_consistency(&model.collection)?;
    let mut doc = header("validate", model);
    doc.insert("verdict".into(), json!(if report.passed() { "pass" } else { "fail" }));
    doc.insert("consistency".into(), json::consistency(model.space(), &report));
    doc.insert("missing_subsets".into(), missing(model));
    let mut summary = consistency_summary(model, &report);
    summary.push(format!(
        "consistency: {}",
        if report.passed() { "pass" } else { "fail" }
    ));
    Ok(Outcome {
        exit: if report.passed() { EXIT_PASS } else { EXIT_FAIL },
        document: Value::Object(doc),
        summary,
    })
}

fn joint_summary(model: &Model, j: &JointModel, vertices: VertexOptions) -> Result<(Value, Vec<String>)> {
    let space = model.space();
    let mut m = Map::new();
    let mut notes = Vec::new();
    m.insert("empty".into(), json!(false));
    m.insert("dimension".into(), json!(space.omega_dim()));
    m.insert(
        "tuples".into(),
        Value::Array(j.tuples().iter().map(|t| json::tuple(space, t)).collect()),
    );
    match j.region() {
        Some(r) => {
            m.insert("mode".into(), json!("polytope"));
            m.insert("constraints".into(), json!(r.hrep().num_rows()));
            m.insert(
                "hrep".into(),
                json::hrep_rows(space, r.hrep(), &r.ineq_origins, &r.eq_origins),
            );
        }
        None => {
            m.insert("mode".into(), json!("finite"));
            let cells: Vec<Value> = j
                .cells()
                .iter()
                .map(|c| {
                    json!({
                        "selection": c.selection.iter().map(|(t, k)| json!({"tuple": json::tuple(space, t), "member": k})).collect::<Vec<_>>(),
                        "constraints": c.region.hrep().num_rows(),
                    })
                })
                .collect();
            m.insert("constraints".into(), json!(j.cells().iter().map(|c| c.region.hrep().num_rows()).sum::<usize>()));
            m.insert("cells".into(), Value::Array(cells));
        }
    }
    if let Some(p) = j.singleton()? {
        m.insert("single_measure".into(), json::vector(&p));
        notes.push("P is a single measure".to_string());
    }
    if vertices.emit {
        match j.polytope() {
            Some(p) => {
                let vs = p.vertices()?;
                if vs.len() <= vertices.limit {
                    m.insert("vertices".into(), json::vectors(vs));
                } else {
                    notes.push(format!(
                        "P has {} vertices, more than the limit of {}; vertex list omitted",
                        vs.len(),
                        vertices.limit
                    ));
                }
            }
            None => notes.push("vertex lists are not emitted in finite mode".into()),
        }
    }
    Ok((Value::Object(m), notes))
}

fn empty_summary(model: &Model, diags: &[crate::joint::EmptyDiagnosis]) -> (Value, Vec<String>) {
    let space = model.space();
    let mut tuples: Vec<IndexTuple> = Vec::new();
    for d in diags {
        for t in &d.tuples {
            if !tuples.contains(t) {
                tuples.push(t.clone());
            }
        }
    }
    tuples.sort();
    let names: Vec<String> = tuples.iter().map(|t| space.tuple_display(t)).collect();
    let doc = json!({
        "empty": true,
        "dimension": space.omega_dim(),
        "offending_tuples": tuples.iter().map(|t| json::tuple(space, t)).collect::<Vec<_>>(),
        "diagnosis": diags.iter().map(|d| json::diagnosis(space, d)).collect::<Vec<_>>(),
    });
    (doc, vec![format!("P is empty; offending tuples: {}", names.join(" "))])
}

/// Builds `P`. The document carries its constraint rows with provenance,
/// or the Farkas diagnosis when it is empty (exit 1).
pub fn build(model: &Model, vertices: VertexOptions) -> Result<Outcome> {
    let mut doc = header("build", model);
    let (joint, exit, summary) = match build_joint(&model.collection, model.finite_cap)? {
        JointOutcome::Joint(j) => {
            let (v, mut notes) = joint_summary(model, &j, vertices)?;
            notes.insert(0, format!("P built: {} constraints", v["constraints"]));
            (v, EXIT_PASS, notes)
        }
        JointOutcome::Empty(d) => {
            let (v, notes) = empty_summary(model, &d);
            (v, EXIT_FAIL, notes)
        }
    };
    doc.insert("verdict".into(), json!(if exit == EXIT_PASS { "nonempty" } else { "empty" }));
    doc.insert("missing_subsets".into(), missing(model));
    doc.insert("joint".into(), joint);
    Ok(Outcome {
        exit,
        document: Value::Object(doc),
        summary,
    })
}

/// The full pipeline: consistency, joint, representation and lemmas.
/// Exit 0 iff the representation holds for every supplied tuple.
pub fn verify(model: &Model, vertices: VertexOptions) -> Result<Outcome> {
    let space = model.space();
    let consistency = check_consistency(&model.collection)?;
    let mut doc = header("verify", model);
    let mut summary = consistency_summary(model, &consistency);
    let mut notes: Vec<String> = vec![
        "every measure on a finite space is countably additive, so the countably additive part of P is P".into(),
    ];
    let outcome = build_joint(&model.collection, model.finite_cap)?;
    let (verdict, exit, body) = match outcome {
        JointOutcome::Empty(d) => {
            let (v, n) = empty_summary(model, &d);
            summary.extend(n);
            ("fail", EXIT_FAIL, vec![("joint", v)])
        }
        JointOutcome::Joint(j) => {
            let (jv, n) = joint_summary(model, &j, vertices)?;
            notes.extend(n);
            let rep = verify_representation(&model.collection, &j)?;
            for r in &rep.records {
                summary.push(format!(
                    "representation {}: image-in-set {}, set-in-image {}",
                    space.tuple_display(&r.tuple),
                    if r.image_in_set { "pass" } else { "fail" },
                    if r.set_in_image { "pass" } else { "fail" },
                ));
            }
            let lemmas = if consistency.passed() {
                json::lemmas(space, &lemma_suite(&model.collection, &j)?)
            } else {
                json!({ "skipped": "consistency checks failed" })
            };
            let ok = rep.passed();
            (
                if ok { "pass" } else { "fail" },
                if ok { EXIT_PASS } else { EXIT_FAIL },
                vec![
                    ("joint", jv),
                    ("representation", json::representation(space, &rep)),
                    ("lemmas", lemmas),
                ],
            )
        }
    };
    doc.insert("verdict".into(), json!(verdict));
    doc.insert("consistency".into(), json::consistency(space, &consistency));
    doc.insert("missing_subsets".into(), missing(model));
    for (k, v) in body {
        doc.insert(k.into(), v);
    }
    if consistency.records.iter().any(|r| r.status == CheckStatus::Unchecked) {
        notes.push("some supplied tuples have no supplied permutation to compare against".into());
    }
    doc.insert("notes".into(), json!(notes));
    summary.extend(notes);
    summary.push(format!("representation: {verdict}"));
    Ok(Outcome {
        exit,
        document: Value::Object(doc),
        summary,
    })
}

/// Lower or upper expectation of `f` over `V_α`, or over `Φ̂_α(P)` when
/// `joint` is set.
pub fn expect(model: &Model, tuple_labels: &[&str], f: &[Rational], bound: Bound, joint: bool) -> Result<Rational> {
    let space = model.space();
    let alpha = space.tuple(tuple_labels)?;
    if joint {
        let j = build_joint(&model.collection, model.finite_cap)?.into_joint()?;
        return j.expectation(&alpha, f, bound);
    }
    let set = model.collection.get(&alpha)?.ok_or_else(|| {
        Error::InvalidInput(format!("no credal set for {}", space.tuple_display(&alpha)))
    })?;
    match bound {
        Bound::Lower => lower_expectation(&set, f),
        Bound::Upper => upper_expectation(&set, f),
    }
}

/// A function file: a JSON array of rationals, or whitespace-separated rationals.
pub fn parse_function(text: &str) -> Result<Vec<Rational>> {
    if let Ok(xs) = serde_json::from_str::<Vec<RationalText>>(text) {
        return xs.iter().map(RationalText::parse).collect();
    }
    text.split_whitespace().map(parse_rational).collect()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartitionDoc {
    size: usize,
    atoms: Vec<Vec<usize>>,
    masses: Vec<RationalText>,
}

/// Applies the uniform-split extension to a partition file
/// `{"size": n, "atoms": [[...], ...], "masses": [...]}`.
pub fn extend(text: &str) -> Result<MeasureVector> {
    let doc: PartitionDoc =
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("partition file: {e}")))?;
    let masses = doc
        .masses
        .iter()
        .map(RationalText::parse)
        .collect::<Result<_>>()?;
    extend_measure(doc.size, &doc.atoms, &MeasureVector::new(masses)?)
}
