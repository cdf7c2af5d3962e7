use super::{verify_representation, JointModel};
use crate::credal::CredalCollection;
use crate::error::{Error, Result};
use crate::polytope::{self, Polytope};
use crate::spaces::{IndexTuple, Permutation};

/// `{p ∈ Δ(Ω) : Φ_α p ∈ V_α}`. Polytope sets only.
pub fn preimage_set(coll: &CredalCollection, alpha: &IndexTuple) -> Result<Polytope> {
    let space = coll.space();
    let set = coll
        .get(alpha)?
        .ok_or_else(|| Error::InvalidInput(format!("no set for {}", space.tuple_display(alpha))))?;
    let v = set.as_polytope().ok_or_else(|| {
        Error::InvalidInput(format!(
            "set {} is finite; its preimage is a union of cells",
            space.tuple_display(alpha)
        ))
    })?;
    polytope::linear_preimage(&space.phi_matrix(alpha)?, v, &Polytope::simplex(space.omega_dim()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lemma {
    /// Preimages do not depend on the order of the tuple.
    PermutationInvariance,
    /// `α ≥ β` implies `preimage(α) ⊆ preimage(β)`.
    Monotonicity,
    /// `V_α ⊆ Φ̂_α(P)`.
    Coverage,
    /// `P` equals the preimage of the set on all of `T`.
    FullTuple,
}

impl Lemma {
    pub fn as_str(&self) -> &'static str {
        match self {
            Lemma::PermutationInvariance => "permutation-invariance",
            Lemma::Monotonicity => "monotonicity",
            Lemma::Coverage => "coverage",
            Lemma::FullTuple => "full-tuple",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LemmaStatus {
    Holds,
    Fails,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaRecord {
    pub lemma: Lemma,
    pub tuples: Vec<IndexTuple>,
    pub status: LemmaStatus,
    /// For monotonicity: whether the containment is strict.
    pub strict: Option<bool>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LemmaReport {
    pub records: Vec<LemmaRecord>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.status != LemmaStatus::Fails)
    }

    pub fn for_lemma(&self, l: Lemma) -> impl Iterator<Item = &LemmaRecord> {
        self.records.iter().filter(move |r| r.lemma == l)
    }
}

const MAX_PERMUTATIONS: usize = 24;

fn status(b: bool) -> LemmaStatus {
    if b {
        LemmaStatus::Holds
    } else {
        LemmaStatus::Fails
    }
}

/// Exercises the structural properties of `P` on a collection that passed
/// both consistency checks. Finite-mode collections only get the coverage
/// check; the others need polytope preimages.
pub fn lemma_suite(coll: &CredalCollection, joint: &JointModel) -> Result<LemmaReport> {
    let mut out = LemmaReport::default();
    let rep = verify_representation(coll, joint)?;
    for r in &rep.records {
        out.records.push(LemmaRecord {
            lemma: Lemma::Coverage,
            tuples: vec![r.tuple.clone()],
            status: status(r.set_in_image),
            strict: None,
            note: None,
        });
    }
    if joint.is_finite_mode() {
        for lemma in [Lemma::PermutationInvariance, Lemma::Monotonicity, Lemma::FullTuple] {
            out.records.push(LemmaRecord {
                lemma,
                tuples: Vec::new(),
                status: LemmaStatus::Skipped,
                strict: None,
                note: Some("finite mode".into()),
            });
        }
        return Ok(out);
    }

    let sets: Vec<IndexTuple> = coll.supplied().map(|s| s.tuple().clone()).collect();
    for a in &sets {
        if a.len() < 2 {
            continue;
        }
        let base = preimage_set(coll, a)?;
        for pi in Permutation::all(a.len()).into_iter().skip(1).take(MAX_PERMUTATIONS) {
            let b = a.permuted(&pi)?;
            if coll.get(&b)?.is_none() {
                continue;
            }
            let other = preimage_set(coll, &b)?;
            out.records.push(LemmaRecord {
                lemma: Lemma::PermutationInvariance,
                tuples: vec![a.clone(), b],
                status: status(polytope::equals(&base, &other)?),
                strict: None,
                note: None,
            });
        }
    }

    for a in &sets {
        for b in &sets {
            if b.len() >= a.len() || !a.dominates(b) {
                continue;
            }
            let pa = preimage_set(coll, a)?;
            let pb = preimage_set(coll, b)?;
            let holds = polytope::is_subset(&pa, &pb)?.holds();
            let strict = if holds { Some(!polytope::is_subset(&pb, &pa)?.holds()) } else { None };
            out.records.push(LemmaRecord {
                lemma: Lemma::Monotonicity,
                tuples: vec![a.clone(), b.clone()],
                status: status(holds),
                strict,
                note: None,
            });
        }
    }

    let full = coll.space().full_tuple();
    let rec = if coll.get(&full)?.is_some() {
        let pre = preimage_set(coll, &full)?;
        let p = joint.polytope().expect("polytope mode");
        LemmaRecord {
            lemma: Lemma::FullTuple,
            tuples: vec![full],
            status: status(polytope::equals(p, &pre)?),
            strict: None,
            note: None,
        }
    } else {
        LemmaRecord {
            lemma: Lemma::FullTuple,
            tuples: vec![full],
            status: LemmaStatus::Skipped,
            strict: None,
            note: Some("no set on all of T".into()),
        }
    };
    out.records.push(rec);
    Ok(out)
}
