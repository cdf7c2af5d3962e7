//! Exact JSON encodings. Rationals are always strings.

use serde_json::{json, Map, Value};

use crate::credal::{CheckRecord, ConsistencyReport, PointwiseCertificate, Witness};
use crate::error::{Error, Result};
use crate::exactq::{format_rational, parse_rational, QMatrix, QVector, Rational};
use crate::joint::{
    EmptyDiagnosis, LemmaReport, LemmaStatus, RepresentationReport, RepresentationWitness, RowOrigin,
};
use crate::polytope::{HRep, RowRef, SeparationCertificate};
use crate::spaces::{IndexTuple, ProcessSpace};

pub fn rational(q: &Rational) -> Value {
    Value::String(format_rational(q))
}

pub fn vector(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rational).collect())
}

pub fn vectors(vs: &[QVector]) -> Value {
    Value::Array(vs.iter().map(|v| vector(v)).collect())
}

pub fn tuple(space: &ProcessSpace, t: &IndexTuple) -> Value {
    json!(space.tuple_labels(t))
}

pub fn witness(w: &Witness) -> Value {
    match w {
        Witness::Hyperplane(c) => json!({
            "kind": "hyperplane",
            "point": vector(&c.point),
            "functional": vector(&c.functional),
            "gap": rational(&c.gap),
        }),
        Witness::Pointwise(c) => json!({
            "kind": "pointwise",
            "point": vector(&c.point),
            "functionals": vectors(&c.functionals),
            "gap": rational(&c.gap),
        }),
    }
}

fn field<'a>(v: &'a Value, name: &str) -> Result<&'a Value> {
    v.get(name)
        .ok_or_else(|| Error::InvalidInput(format!("missing field \"{name}\"")))
}

pub fn parse_rational_value(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        other => Err(Error::InvalidInput(format!("expected a rational string, got {other}"))),
    }
}

pub fn parse_vector(v: &Value) -> Result<QVector> {
    v.as_array()
        .ok_or_else(|| Error::InvalidInput("expected an array of rationals".into()))?
        .iter()
        .map(parse_rational_value)
        .collect()
}

/// Inverse of [`witness`].
pub fn parse_witness(v: &Value) -> Result<Witness> {
    let point = parse_vector(field(v, "point")?)?;
    let gap = parse_rational_value(field(v, "gap")?)?;
    match field(v, "kind")?.as_str() {
        Some("hyperplane") => Ok(Witness::Hyperplane(SeparationCertificate {
            functional: parse_vector(field(v, "functional")?)?,
            gap,
            point,
        })),
        Some("pointwise") => Ok(Witness::Pointwise(PointwiseCertificate {
            functionals: field(v, "functionals")?
                .as_array()
                .ok_or_else(|| Error::InvalidInput("functionals must be an array".into()))?
                .iter()
                .map(parse_vector)
                .collect::<Result<_>>()?,
            gap,
            point,
        })),
        _ => Err(Error::InvalidInput("unknown witness kind".into())),
    }
}

fn check_record(space: &ProcessSpace, r: &CheckRecord) -> Value {
    let mut m = Map::new();
    m.insert("condition".into(), json!(r.condition.to_string()));
    m.insert("source".into(), tuple(space, &r.source));
    if let Some(t) = &r.target {
        m.insert("target".into(), tuple(space, t));
    }
    if let Some(d) = r.direction {
        m.insert("direction".into(), json!(d.as_str()));
    }
    m.insert("status".into(), json!(r.status.as_str()));
    if let Some(n) = &r.note {
        m.insert("note".into(), json!(n));
    }
    if let Some(w) = &r.witness {
        m.insert("witness".into(), witness(w));
        m.insert("comparison".into(), vectors(&r.comparison));
    }
    Value::Object(m)
}

pub fn consistency(space: &ProcessSpace, r: &ConsistencyReport) -> Value {
    json!({
        "passed": r.passed(),
        "records": r.records.iter().map(|x| check_record(space, x)).collect::<Vec<_>>(),
    })
}

fn representation_witness(w: &RepresentationWitness) -> Value {
    let mut m = Map::new();
    m.insert("direction".into(), json!(w.direction.as_str()));
    m.insert("witness".into(), witness(&w.witness));
    if let Some(l) = &w.lifted {
        m.insert("lifted_functional".into(), vector(l));
    }
    Value::Object(m)
}

pub fn representation(space: &ProcessSpace, r: &RepresentationReport) -> Value {
    let records: Vec<Value> = r
        .records
        .iter()
        .map(|x| {
            json!({
                "tuple": tuple(space, &x.tuple),
                "image_in_set": if x.image_in_set { "pass" } else { "fail" },
                "set_in_image": if x.set_in_image { "pass" } else { "fail" },
                "witnesses": x.witnesses.iter().map(representation_witness).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({ "passed": r.passed(), "records": records })
}

pub fn lemmas(space: &ProcessSpace, r: &LemmaReport) -> Value {
    let records: Vec<Value> = r
        .records
        .iter()
        .map(|x| {
            let mut m = Map::new();
            m.insert("lemma".into(), json!(x.lemma.as_str()));
            m.insert(
                "tuples".into(),
                Value::Array(x.tuples.iter().map(|t| tuple(space, t)).collect()),
            );
            m.insert(
                "status".into(),
                json!(match x.status {
                    LemmaStatus::Holds => "holds",
                    LemmaStatus::Fails => "fails",
                    LemmaStatus::Skipped => "skipped",
                }),
            );
            if let Some(s) = x.strict {
                m.insert("strict".into(), json!(s));
            }
            if let Some(n) = &x.note {
                m.insert("note".into(), json!(n));
            }
            Value::Object(m)
        })
        .collect();
    json!({ "passed": r.passed(), "records": records })
}

pub fn origin(space: &ProcessSpace, o: &RowOrigin) -> Value {
    match o {
        RowOrigin::Simplex => json!({ "kind": "simplex" }),
        RowOrigin::Set { tuple: t, row } => {
            let (kind, i) = match row {
                RowRef::Ineq(i) => ("inequality", i),
                RowRef::Eq(i) => ("equality", i),
            };
            json!({ "kind": "set", "tuple": tuple(space, t), "row_kind": kind, "row": i })
        }
        RowOrigin::Member {
            tuple: t,
            member,
            coordinate,
        } => json!({ "kind": "member", "tuple": tuple(space, t), "member": member, "coordinate": coordinate }),
    }
}

fn rows(space: &ProcessSpace, a: &QMatrix, b: &QVector, sense: &str, origins: &[RowOrigin]) -> Vec<Value> {
    (0..a.rows())
        .map(|i| {
            json!({
                "coeffs": vector(a.row(i)),
                "sense": sense,
                "rhs": rational(&b[i]),
                "origin": origin(space, &origins[i]),
            })
        })
        .collect()
}

/// Rows of `h` with their origins, inequalities first.
pub fn hrep_rows(space: &ProcessSpace, h: &HRep, ineq: &[RowOrigin], eq: &[RowOrigin]) -> Value {
    let mut out = rows(space, &h.ineq, &h.ineq_rhs, "<=", ineq);
    out.extend(rows(space, &h.eq, &h.eq_rhs, "=", eq));
    Value::Array(out)
}

pub fn diagnosis(space: &ProcessSpace, d: &EmptyDiagnosis) -> Value {
    let mut m = Map::new();
    if let Some(sel) = &d.selection {
        m.insert(
            "selection".into(),
            Value::Array(
                sel.iter()
                    .map(|(t, k)| json!({ "tuple": tuple(space, t), "member": k }))
                    .collect(),
            ),
        );
    }
    m.insert(
        "offending_tuples".into(),
        Value::Array(d.tuples.iter().map(|t| tuple(space, t)).collect()),
    );
    let support: Vec<Value> = d
        .certificate
        .support()
        .into_iter()
        .map(|r| {
            let (a, b, mult, o) = match r {
                RowRef::Ineq(i) => (
                    d.hrep.ineq.row(i),
                    &d.hrep.ineq_rhs[i],
                    &d.certificate.ineq_multipliers[i],
                    &d.ineq_origins[i],
                ),
                RowRef::Eq(i) => (
                    d.hrep.eq.row(i),
                    &d.hrep.eq_rhs[i],
                    &d.certificate.eq_multipliers[i],
                    &d.eq_origins[i],
                ),
            };
            json!({
                "coeffs": vector(a),
                "sense": if matches!(r, RowRef::Ineq(_)) { "<=" } else { "=" },
                "rhs": rational(b),
                "multiplier": rational(mult),
                "origin": origin(space, o),
            })
        })
        .collect();
    m.insert("farkas_rows".into(), Value::Array(support));
    m.insert("certificate_verified".into(), json!(d.verify()));
    Value::Object(m)
}
