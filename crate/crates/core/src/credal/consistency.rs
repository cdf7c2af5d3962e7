use std::fmt;

use super::witness::{inclusion, Witness};
use super::{CredalBody, CredalCollection, CredalSet, PermutationPolicy};
use crate::error::Result;
use crate::exactq::{QMatrix, QVector};
use crate::spaces::IndexTuple;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Condition {
    /// Permuted tuples carry permuted sets.
    C1,
    /// Restrictions of larger tuples reproduce the smaller sets.
    C2,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::C1 => "C1",
            Condition::C2 => "C2",
        })
    }
}

/// Which half of a set equality a record covers. The image is the set
/// derived from the source tuple; the target is the set supplied for the
/// target tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InclusionDirection {
    ImageInTarget,
    TargetInImage,
}

impl InclusionDirection {
    pub fn as_str(&self) -> &'static str {
        match self {
            InclusionDirection::ImageInTarget => "image-in-target",
            InclusionDirection::TargetInImage => "target-in-image",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Nothing to compare against.
    Unchecked,
    /// Holds because the sets were derived, not supplied.
    ByConstruction,
}

impl CheckStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Unchecked => "unchecked",
            CheckStatus::ByConstruction => "by-construction",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckRecord {
    pub condition: Condition,
    pub source: IndexTuple,
    pub target: Option<IndexTuple>,
    pub direction: Option<InclusionDirection>,
    pub status: CheckStatus,
    pub witness: Option<Witness>,
    /// Generators of the set the witness point was separated from.
    pub comparison: Vec<QVector>,
    pub note: Option<String>,
}

impl CheckRecord {
    fn plain(condition: Condition, source: IndexTuple, status: CheckStatus, note: String) -> Self {
        CheckRecord {
            condition,
            source,
            target: None,
            direction: None,
            status,
            witness: None,
            comparison: Vec::new(),
            note: Some(note),
        }
    }

    /// Re-checks the witness against `comparison`. True for non-failures.
    pub fn witness_verifies(&self) -> bool {
        match (&self.status, &self.witness) {
            (CheckStatus::Fail, Some(w)) => w.verify_against(&self.comparison),
            (CheckStatus::Fail, None) => false,
            _ => true,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConsistencyReport {
    pub records: Vec<CheckRecord>,
}

impl ConsistencyReport {
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.status != CheckStatus::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| r.status == CheckStatus::Fail)
    }

    pub fn for_condition(&self, c: Condition) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(move |r| r.condition == c)
    }

    pub fn extend(&mut self, other: ConsistencyReport) {
        self.records.extend(other.records);
    }
}

/// Compares `image` (derived from `source`) with the set supplied for
/// `target`, one record per inclusion direction.
fn compare(
    condition: Condition,
    source: &IndexTuple,
    image: &CredalBody,
    target: &CredalSet,
    out: &mut ConsistencyReport,
) -> Result<()> {
    for dir in [InclusionDirection::ImageInTarget, InclusionDirection::TargetInImage] {
        let (a, b) = match dir {
            InclusionDirection::ImageInTarget => (image, target.body()),
            InclusionDirection::TargetInImage => (target.body(), image),
        };
        let witness = inclusion(a, b)?;
        let comparison = match &witness {
            Some(_) => b.generators()?,
            None => Vec::new(),
        };
        out.records.push(CheckRecord {
            condition,
            source: source.clone(),
            target: Some(target.tuple().clone()),
            direction: Some(dir),
            status: if witness.is_some() { CheckStatus::Fail } else { CheckStatus::Pass },
            witness,
            comparison,
            note: None,
        });
    }
    Ok(())
}

/// Permutation consistency.
///
/// Under the synthesized policy every permuted set is derived, so the
/// condition holds by construction. Under the supplied policy each pair of
/// supplied tuples over the same elements is compared both ways, and
/// tuples without a supplied permutation are reported as unchecked.
pub fn check_condition1(coll: &CredalCollection) -> Result<ConsistencyReport> {
    let space = coll.space();
    let mut out = ConsistencyReport::default();
    let sets: Vec<&CredalSet> = coll.supplied().collect();
    if coll.policy() == PermutationPolicy::Synthesized {
        for s in sets.iter().filter(|s| s.tuple().len() >= 2) {
            out.records.push(CheckRecord::plain(
                Condition::C1,
                s.tuple().clone(),
                CheckStatus::ByConstruction,
                "permuted tuples derived by pushforward".into(),
            ));
        }
        return Ok(out);
    }
    for (i, a) in sets.iter().enumerate() {
        let mut partnered = false;
        for (j, b) in sets.iter().enumerate() {
            if i == j || !a.tuple().same_elements(b.tuple()) {
                continue;
            }
            partnered = true;
            if j < i {
                continue;
            }
            let pi = a.tuple().permutation_to(b.tuple())?;
            let m = space.permutation_matrix(a.tuple().len(), &pi)?;
            let image = a.body().image(&m)?;
            compare(Condition::C1, a.tuple(), &image, b, &mut out)?;
        }
        if !partnered && a.tuple().len() >= 2 {
            out.records.push(CheckRecord::plain(
                Condition::C1,
                a.tuple().clone(),
                CheckStatus::Unchecked,
                format!(
                    "no permutation of {} supplied",
                    space.tuple_display(a.tuple())
                ),
            ));
        }
    }
    Ok(out)
}

/// Marginal consistency: for every pair of supplied tuples with `β`'s
/// elements a proper subset of `α`'s, the restriction of `V_α` to `β`
/// equals `V_β`.
pub fn check_condition2(coll: &CredalCollection) -> Result<ConsistencyReport> {
    let space = coll.space();
    let mut out = ConsistencyReport::default();
    let sets: Vec<&CredalSet> = coll.supplied().collect();
    for a in &sets {
        let mut images: Vec<(QMatrix, CredalBody)> = Vec::new();
        for b in &sets {
            if b.tuple().len() >= a.tuple().len() || !a.tuple().dominates(b.tuple()) {
                continue;
            }
            let m = space.restriction_matrix(a.tuple(), b.tuple())?;
            let image = match images.iter().find(|(mm, _)| *mm == m) {
                Some((_, img)) => img.clone(),
                None => {
                    let img = a.body().image(&m)?;
                    images.push((m, img.clone()));
                    img
                }
            };
            compare(Condition::C2, a.tuple(), &image, b, &mut out)?;
        }
    }
    Ok(out)
}

/// Both conditions, permutation records first.
pub fn check_consistency(coll: &CredalCollection) -> Result<ConsistencyReport> {
    let mut r = check_condition1(coll)?;
    r.extend(check_condition2(coll)?);
    Ok(r)
}
