//! The joint credal set `P = ⋂ V_α⁻¹` on `Ω = Y^T` and its pushforwards.
//!
//! In polytope mode `P` is one polytope whose constraint rows remember the
//! tuple they came from. In finite mode `P` is a union of cells, one per
//! selection of members, each the preimage of the selected points.

mod lemmas;
mod verify;

use crate::credal::{Bound, CredalBody, CredalCollection, CredalSet};
use crate::error::{Error, Result};
use crate::exactq::{Direction, QMatrix, QVector, Rational};
use crate::polytope::{self, HOptimum, HRep, HRepFarkas, Polytope, RowRef};
use crate::spaces::{IndexTuple, MeasureVector, ProcessSpace};

pub use lemmas::{lemma_suite, preimage_set, Lemma, LemmaRecord, LemmaReport, LemmaStatus};
pub use verify::{
    verify_representation, RepresentationRecord, RepresentationReport, RepresentationWitness,
};

pub const DEFAULT_FINITE_CAP: u128 = 10_000;

/// Where a constraint row of `P` came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowOrigin {
    /// Nonnegativity or normalisation on `Ω`.
    Simplex,
    /// A row of `V_tuple`'s H-representation pulled back through `Φ_tuple`.
    Set { tuple: IndexTuple, row: RowRef },
    /// Coordinate `coordinate` of `Φ_tuple p = member` (finite mode).
    Member {
        tuple: IndexTuple,
        member: usize,
        coordinate: usize,
    },
}

impl RowOrigin {
    pub fn tuple(&self) -> Option<&IndexTuple> {
        match self {
            RowOrigin::Simplex => None,
            RowOrigin::Set { tuple, .. } | RowOrigin::Member { tuple, .. } => Some(tuple),
        }
    }
}

/// A polytope in H-form with one origin per row.
#[derive(Debug, Clone)]
pub struct Region {
    pub polytope: Polytope,
    pub ineq_origins: Vec<RowOrigin>,
    pub eq_origins: Vec<RowOrigin>,
}

impl Region {
    pub fn hrep(&self) -> &HRep {
        self.polytope.hrep()
    }

    pub fn origin(&self, r: RowRef) -> &RowOrigin {
        match r {
            RowRef::Ineq(i) => &self.ineq_origins[i],
            RowRef::Eq(i) => &self.eq_origins[i],
        }
    }
}

#[derive(Debug, Clone)]
pub struct JointCell {
    /// The chosen member index for each finite tuple.
    pub selection: Vec<(IndexTuple, usize)>,
    pub region: Region,
}

#[derive(Debug, Clone)]
pub enum JointBody {
    Polytope(Region),
    Cells(Vec<JointCell>),
}

/// Why an intersection is empty: a Farkas certificate over the unreduced
/// rows and the tuples its support touches.
#[derive(Debug, Clone)]
pub struct EmptyDiagnosis {
    /// `None` in polytope mode; the selection of the cell in finite mode.
    pub selection: Option<Vec<(IndexTuple, usize)>>,
    pub hrep: HRep,
    pub ineq_origins: Vec<RowOrigin>,
    pub eq_origins: Vec<RowOrigin>,
    pub certificate: HRepFarkas,
    pub tuples: Vec<IndexTuple>,
}

impl EmptyDiagnosis {
    pub fn verify(&self) -> bool {
        self.certificate.verify(&self.hrep)
    }

    pub fn support_origins(&self) -> Vec<(RowRef, &RowOrigin)> {
        self.certificate
            .support()
            .into_iter()
            .map(|r| {
                let o = match r {
                    RowRef::Ineq(i) => &self.ineq_origins[i],
                    RowRef::Eq(i) => &self.eq_origins[i],
                };
                (r, o)
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub enum JointOutcome {
    Joint(JointModel),
    Empty(Vec<EmptyDiagnosis>),
}

impl JointOutcome {
    pub fn joint(&self) -> Option<&JointModel> {
        match self {
            JointOutcome::Joint(j) => Some(j),
            JointOutcome::Empty(_) => None,
        }
    }

    pub fn into_joint(self) -> Result<JointModel> {
        match self {
            JointOutcome::Joint(j) => Ok(j),
            JointOutcome::Empty(_) => Err(Error::EmptyJoint),
        }
    }
}

#[derive(Debug, Clone)]
pub struct JointModel {
    space: ProcessSpace,
    body: JointBody,
    /// Tuples whose sets entered `P`.
    tuples: Vec<IndexTuple>,
}

/// Rows being collected for one region.
struct RowSet {
    h: HRep,
    ineq: Vec<RowOrigin>,
    eq: Vec<RowOrigin>,
}

impl RowSet {
    fn simplex(d: usize) -> Self {
        let h = HRep::simplex(d);
        RowSet {
            ineq: vec![RowOrigin::Simplex; h.ineq.rows()],
            eq: vec![RowOrigin::Simplex; h.eq.rows()],
            h,
        }
    }

    fn push_set(&mut self, space: &ProcessSpace, tuple: &IndexTuple, set: &HRep) -> Result<()> {
        let m = space.phi_matrix(tuple)?;
        self.h = self.h.concat(&set.pullback(&m)?)?;
        self.ineq.extend((0..set.ineq.rows()).map(|i| RowOrigin::Set {
            tuple: tuple.clone(),
            row: RowRef::Ineq(i),
        }));
        self.eq.extend((0..set.eq.rows()).map(|i| RowOrigin::Set {
            tuple: tuple.clone(),
            row: RowRef::Eq(i),
        }));
        Ok(())
    }

    fn push_member(&mut self, space: &ProcessSpace, tuple: &IndexTuple, member: usize, v: &QVector) -> Result<()> {
        let m = space.phi_matrix(tuple)?;
        let rows = HRep::new(QMatrix::zeros(0, m.cols()), QVector::zeros(0), m, v.clone())?;
        self.h = self.h.concat(&rows)?;
        self.eq.extend((0..v.dim()).map(|coordinate| RowOrigin::Member {
            tuple: tuple.clone(),
            member,
            coordinate,
        }));
        Ok(())
    }

    /// Reduced region, or the emptiness diagnosis.
    fn finish(self, selection: Option<Vec<(IndexTuple, usize)>>, reduce: bool) -> Result<std::result::Result<Region, EmptyDiagnosis>> {
        if let Some(certificate) = self.h.infeasibility()? {
            let mut tuples: Vec<IndexTuple> = Vec::new();
            for r in certificate.support() {
                let o = match r {
                    RowRef::Ineq(i) => &self.ineq[i],
                    RowRef::Eq(i) => &self.eq[i],
                };
                if let Some(t) = o.tuple() {
                    if !tuples.contains(t) {
                        tuples.push(t.clone());
                    }
                }
            }
            tuples.sort();
            return Ok(Err(EmptyDiagnosis {
                selection,
                hrep: self.h,
                ineq_origins: self.ineq,
                eq_origins: self.eq,
                certificate,
                tuples,
            }));
        }
        if !reduce {
            return Ok(Ok(Region {
                polytope: Polytope::from_hrep(self.h).with_empty_flag(false),
                ineq_origins: self.ineq,
                eq_origins: self.eq,
            }));
        }
        let (h, ki, ke) = self.h.remove_redundant()?;
        Ok(Ok(Region {
            polytope: Polytope::from_hrep(h).with_empty_flag(false),
            ineq_origins: ki.iter().map(|&i| self.ineq[i].clone()).collect(),
            eq_origins: ke.iter().map(|&i| self.eq[i].clone()).collect(),
        }))
    }
}

/// Builds `P` from one supplied set per subset of `T` (the ascending tuple
/// when supplied). Subsets with no set are unconstrained.
///
/// Finite mode applies when any set is finite; then every set must be
/// finite and the number of selections must not exceed `finite_cap`.
pub fn build_joint(coll: &CredalCollection, finite_cap: u128) -> Result<JointOutcome> {
    let space = coll.space();
    let reps = coll.representatives();
    let tuples: Vec<IndexTuple> = reps.iter().map(|s| s.tuple().clone()).collect();
    let d = space.omega_dim();
    if !coll.is_finite_mode() {
        let mut rows = RowSet::simplex(d);
        for s in &reps {
            let p = s.as_polytope().expect("polytope mode");
            rows.push_set(space, s.tuple(), p.hrep())?;
        }
        return Ok(match rows.finish(None, true)? {
            Ok(region) => JointOutcome::Joint(JointModel {
                space: space.clone(),
                body: JointBody::Polytope(region),
                tuples,
            }),
            Err(diag) => JointOutcome::Empty(vec![diag]),
        });
    }
    if let Some(s) = reps.iter().find(|s| !s.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "set {} is a polytope but others are finite; a joint needs all sets in one mode",
            space.tuple_display(s.tuple())
        )));
    }
    let counts: Vec<usize> = reps.iter().map(|s| s.members().expect("finite").len()).collect();
    let needed = counts
        .iter()
        .fold(1u128, |acc, &c| acc.saturating_mul(c as u128));
    if needed > finite_cap {
        return Err(Error::ResourceCap {
            what: "finite-mode selections".into(),
            needed,
            cap: finite_cap,
        });
    }
    let mut cells = Vec::new();
    let mut empties = Vec::new();
    let mut choice = vec![0usize; reps.len()];
    loop {
        let mut rows = RowSet::simplex(d);
        let mut selection = Vec::with_capacity(reps.len());
        for (s, &c) in reps.iter().zip(&choice) {
            let member = &s.members().expect("finite")[c];
            rows.push_member(space, s.tuple(), c, member.as_vector())?;
            selection.push((s.tuple().clone(), c));
        }
        match rows.finish(Some(selection.clone()), false)? {
            Ok(region) => cells.push(JointCell { selection, region }),
            Err(diag) => empties.push(diag),
        }
        // Odometer over the selections, last tuple fastest.
        let mut k = choice.len();
        loop {
            if k == 0 {
                return Ok(if cells.is_empty() {
                    JointOutcome::Empty(empties)
                } else {
                    JointOutcome::Joint(JointModel {
                        space: space.clone(),
                        body: JointBody::Cells(cells),
                        tuples,
                    })
                });
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < counts[k] {
                break;
            }
            choice[k] = 0;
        }
    }
}

impl JointModel {
    pub fn space(&self) -> &ProcessSpace {
        &self.space
    }

    pub fn body(&self) -> &JointBody {
        &self.body
    }

    pub fn is_finite_mode(&self) -> bool {
        matches!(self.body, JointBody::Cells(_))
    }

    /// The tuples whose sets were intersected.
    pub fn tuples(&self) -> &[IndexTuple] {
        &self.tuples
    }

    pub fn region(&self) -> Option<&Region> {
        match &self.body {
            JointBody::Polytope(r) => Some(r),
            JointBody::Cells(_) => None,
        }
    }

    pub fn polytope(&self) -> Option<&Polytope> {
        self.region().map(|r| &r.polytope)
    }

    pub fn cells(&self) -> &[JointCell] {
        match &self.body {
            JointBody::Polytope(_) => &[],
            JointBody::Cells(c) => c,
        }
    }

    fn regions(&self) -> Vec<&Region> {
        match &self.body {
            JointBody::Polytope(r) => vec![r],
            JointBody::Cells(cs) => cs.iter().map(|c| &c.region).collect(),
        }
    }

    pub fn contains(&self, p: &QVector) -> Result<bool> {
        for r in self.regions() {
            if polytope::contains_point(&r.polytope, p)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// `Φ̂_α(P)`. In finite mode each cell must map to a single point.
    pub fn pushforward(&self, alpha: &IndexTuple) -> Result<CredalSet> {
        let m = self.space.phi_matrix(alpha)?;
        match &self.body {
            JointBody::Polytope(r) => Ok(CredalSet::from_polytope_unchecked(
                alpha.clone(),
                polytope::linear_image(&m, &r.polytope)?,
            )),
            JointBody::Cells(cells) => {
                let mut pts = Vec::with_capacity(cells.len());
                for c in cells {
                    let img = polytope::linear_image(&m, &c.region.polytope)?;
                    match img.vertices()? {
                        [x] => pts.push(MeasureVector::new(x.clone())?),
                        _ => {
                            return Err(Error::InvalidInput(format!(
                                "cell image under {} is not a single point",
                                self.space.tuple_display(alpha)
                            )))
                        }
                    }
                }
                pts.sort();
                pts.dedup();
                Ok(CredalSet::from_body_unchecked(
                    alpha.clone(),
                    m.rows(),
                    CredalBody::Finite(pts),
                ))
            }
        }
    }

    /// The unique element of `P`, if `P` is a single point.
    pub fn singleton(&self) -> Result<Option<QVector>> {
        match self.regions().as_slice() {
            [r] => polytope::single_point(&r.polytope),
            _ => Ok(None),
        }
    }

    /// Lower or upper expectation of `f` on `Y^|α|` over `Φ̂_α(P)`, by LP
    /// over `P` with the lifted objective `Mᵀf`.
    pub fn expectation(&self, alpha: &IndexTuple, f: &[Rational], bound: Bound) -> Result<Rational> {
        let m = self.space.phi_matrix(alpha)?;
        let lifted = m.left_mul_vec(f)?;
        let dir = match bound {
            Bound::Lower => Direction::Minimize,
            Bound::Upper => Direction::Maximize,
        };
        let mut best: Option<Rational> = None;
        for r in self.regions() {
            let v = match r.hrep().optimize(&lifted, dir)? {
                HOptimum::Optimal { value, .. } => value,
                HOptimum::Infeasible(_) => continue,
                HOptimum::Unbounded => return Err(Error::Unbounded),
            };
            best = Some(match (best, bound) {
                (None, _) => v,
                (Some(b), Bound::Lower) => b.min(v),
                (Some(b), Bound::Upper) => b.max(v),
            });
        }
        best.ok_or(Error::EmptyJoint)
    }
}
