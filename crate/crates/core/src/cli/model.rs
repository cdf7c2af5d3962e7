//! The JSON model format.

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::credal::{CredalCollection, CredalSet, PermutationPolicy};
use crate::error::{Error, Result};
use crate::exactq::{parse_rational, QMatrix, QVector, Rational, Sense};
use crate::joint::DEFAULT_FINITE_CAP;
use crate::polytope::HRep;
use crate::spaces::{IndexTuple, MeasureVector, ProcessSpace};

/// A rational given as a string (`"-3/4"`) or as a JSON integer.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum RationalText {
    Text(String),
    Int(i64),
}

impl RationalText {
    pub fn parse(&self) -> Result<Rational> {
        match self {
            RationalText::Text(s) => parse_rational(s),
            RationalText::Int(n) => Ok(Rational::from_integer((*n).into())),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum SetMode {
    PolytopeV,
    PolytopeH,
    Finite,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HRowDoc {
    pub coeffs: Vec<RationalText>,
    pub sense: Sense,
    pub rhs: RationalText,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetDoc {
    pub tuple: Vec<String>,
    pub mode: SetMode,
    pub vertices: Option<Vec<Vec<RationalText>>>,
    pub hrep: Option<Vec<HRowDoc>>,
    pub members: Option<Vec<Vec<RationalText>>>,
}

#[derive(Debug, Clone, Copy, Deserialize, Default, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum PolicyDoc {
    #[default]
    Synthesized,
    Supplied,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OptionsDoc {
    #[serde(default)]
    pub permutations: PolicyDoc,
    pub finite_cap: Option<u128>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    #[serde(rename = "Y")]
    pub y: Vec<String>,
    #[serde(rename = "T")]
    pub t: Vec<String>,
    pub credal_sets: Vec<SetDoc>,
    #[serde(default)]
    pub options: OptionsDoc,
}

/// A parsed and validated model.
#[derive(Debug, Clone)]
pub struct Model {
    pub collection: CredalCollection,
    pub finite_cap: u128,
    /// Hex SHA-256 of the input bytes.
    pub digest: String,
}

impl Model {
    pub fn space(&self) -> &ProcessSpace {
        self.collection.space()
    }
}

fn vector(what: &str, xs: &[RationalText]) -> Result<QVector> {
    xs.iter()
        .map(|x| {
            x.parse().map_err(|e| Error::InvalidInput(format!("{what}: {e}")))
        })
        .collect()
}

fn entry_err(i: usize, name: &str, e: Error) -> Error {
    let msg = match e {
        Error::InvalidInput(m) => m,
        other => other.to_string(),
    };
    Error::InvalidInput(format!("credal_sets[{i}] {name}: {msg}"))
}

fn load_set(space: &ProcessSpace, i: usize, doc: &SetDoc) -> Result<CredalSet> {
    let labels: Vec<&str> = doc.tuple.iter().map(String::as_str).collect();
    let tuple: IndexTuple = space
        .tuple(&labels)
        .map_err(|e| entry_err(i, &format!("({})", labels.join(",")), e))?;
    let name = space.tuple_display(&tuple);
    let d = space.product_dim(tuple.len());
    let err = |e: Error| entry_err(i, &name, e);
    let expect_field = |present: bool, field: &str| -> Result<()> {
        if present {
            Ok(())
        } else {
            Err(err(Error::InvalidInput(format!("mode needs a \"{field}\" field"))))
        }
    };
    let stray = [
        ("vertices", doc.vertices.is_some(), SetMode::PolytopeV),
        ("hrep", doc.hrep.is_some(), SetMode::PolytopeH),
        ("members", doc.members.is_some(), SetMode::Finite),
    ];
    for (field, present, mode) in stray {
        if present && mode != doc.mode {
            return Err(err(Error::InvalidInput(format!("field \"{field}\" does not belong to this mode"))));
        }
    }
    let check_len = |what: String, v: &QVector| -> Result<()> {
        if v.dim() != d {
            return Err(err(Error::Dimension(format!("{what} has length {}, expected {d}", v.dim()))));
        }
        Ok(())
    };
    match doc.mode {
        SetMode::PolytopeV => {
            expect_field(doc.vertices.is_some(), "vertices")?;
            let mut vs = Vec::new();
            for (k, v) in doc.vertices.as_ref().unwrap().iter().enumerate() {
                let what = format!("vertices[{k}]");
                let x = vector(&what, v).map_err(err)?;
                check_len(what, &x)?;
                vs.push(x);
            }
            CredalSet::from_vertices(space, tuple, vs).map_err(err)
        }
        SetMode::PolytopeH => {
            expect_field(doc.hrep.is_some(), "hrep")?;
            let mut ineq = Vec::new();
            let mut ineq_rhs = Vec::new();
            let mut eq = Vec::new();
            let mut eq_rhs = Vec::new();
            for (k, row) in doc.hrep.as_ref().unwrap().iter().enumerate() {
                let what = format!("hrep[{k}]");
                let a = vector(&format!("{what}.coeffs"), &row.coeffs).map_err(err)?;
                check_len(format!("{what}.coeffs"), &a)?;
                let b = row
                    .rhs
                    .parse()
                    .map_err(|e| err(Error::InvalidInput(format!("{what}.rhs: {e}"))))?;
                match row.sense {
                    Sense::Le => {
                        ineq.push(a);
                        ineq_rhs.push(b);
                    }
                    Sense::Ge => {
                        ineq.push(a.neg());
                        ineq_rhs.push(-b);
                    }
                    Sense::Eq => {
                        eq.push(a);
                        eq_rhs.push(b);
                    }
                }
            }
            let h = HRep::new(
                QMatrix::from_rows(d, ineq)?,
                QVector::new(ineq_rhs),
                QMatrix::from_rows(d, eq)?,
                QVector::new(eq_rhs),
            )?;
            CredalSet::from_constraints(space, tuple, h).map_err(err)
        }
        SetMode::Finite => {
            expect_field(doc.members.is_some(), "members")?;
            let mut ms = Vec::new();
            for (k, v) in doc.members.as_ref().unwrap().iter().enumerate() {
                let what = format!("members[{k}]");
                let x = vector(&what, v).map_err(err)?;
                check_len(what.clone(), &x)?;
                ms.push(MeasureVector::new(x).map_err(|e| err(Error::InvalidInput(format!("{what}: {e}"))))?);
            }
            CredalSet::finite(space, tuple, ms).map_err(err)
        }
    }
}

/// Parses a model; errors name the line and column for JSON problems and
/// the entry and tuple for structural ones.
pub fn parse_model(text: &str) -> Result<Model> {
    let doc: ModelDocument = serde_json::from_str(text)
        .map_err(|e| Error::InvalidInput(format!("model file: {e}")))?;
    let space = ProcessSpace::new(doc.t.clone(), doc.y.clone())?;
    let policy = match doc.options.permutations {
        PolicyDoc::Synthesized => PermutationPolicy::Synthesized,
        PolicyDoc::Supplied => PermutationPolicy::Supplied,
    };
    let mut collection = CredalCollection::new(space.clone(), policy);
    for (i, entry) in doc.credal_sets.iter().enumerate() {
        let set = load_set(&space, i, entry)?;
        let name = space.tuple_display(set.tuple());
        collection.insert(set).map_err(|e| entry_err(i, &name, e))?;
    }
    Ok(Model {
        collection,
        finite_cap: doc.options.finite_cap.unwrap_or(DEFAULT_FINITE_CAP),
        digest: hex::encode(Sha256::digest(text.as_bytes())),
    })
}
