//! Credal sets over product simplices and collections of them indexed by
//! tuples of `T`.
//!
//! Two computable classes of closed sets are supported: rational polytopes
//! (given by vertices or by constraints intersected with the simplex) and
//! finite point sets.

mod consistency;
mod expectation;
mod witness;

use std::borrow::Cow;
use std::collections::BTreeMap;

use crate::error::{dim_err, Error, Result};
use crate::exactq::{QMatrix, QVector};
use crate::polytope::{self, HRep, Polytope};
use crate::spaces::{IndexTuple, MeasureVector, Permutation, ProcessSpace};

pub use consistency::{
    check_condition1, check_condition2, check_consistency, CheckRecord, CheckStatus, Condition, ConsistencyReport,
    InclusionDirection,
};
pub use expectation::{extend_measure, lower_expectation, upper_expectation, Bound};
pub use witness::{closedness_witness, inclusion, PointwiseCertificate, Witness};

#[derive(Debug, Clone)]
pub enum CredalBody {
    Polytope(Polytope),
    /// Distinct members in sorted order.
    Finite(Vec<MeasureVector>),
}

impl CredalBody {
    pub fn is_finite(&self) -> bool {
        matches!(self, CredalBody::Finite(_))
    }

    /// Vertices (polytope) or members (finite).
    pub fn generators(&self) -> Result<Vec<QVector>> {
        match self {
            CredalBody::Polytope(p) => Ok(p.vertices()?.to_vec()),
            CredalBody::Finite(ms) => Ok(ms.iter().map(|m| m.as_vector().clone()).collect()),
        }
    }

    pub fn contains(&self, x: &QVector) -> Result<bool> {
        match self {
            CredalBody::Polytope(p) => polytope::contains_point(p, x),
            CredalBody::Finite(ms) => Ok(ms.iter().any(|m| m.as_vector() == x)),
        }
    }

    /// Image under a linear map; vertices of polytopes are mapped and
    /// reduced, members of finite sets are mapped and deduplicated.
    pub fn image(&self, m: &QMatrix) -> Result<CredalBody> {
        Ok(match self {
            CredalBody::Polytope(p) => CredalBody::Polytope(polytope::linear_image(m, p)?),
            CredalBody::Finite(ms) => {
                let mut out = ms.iter().map(|v| v.push(m)).collect::<Result<Vec<_>>>()?;
                out.sort();
                out.dedup();
                CredalBody::Finite(out)
            }
        })
    }
}

/// A nonempty closed set of measures on `Y^|tuple|`, tagged with its tuple.
#[derive(Debug, Clone)]
pub struct CredalSet {
    tuple: IndexTuple,
    dim: usize,
    body: CredalBody,
}

impl CredalSet {
    /// Polytope from generators; every generator must be a measure.
    pub fn from_vertices(space: &ProcessSpace, tuple: IndexTuple, vertices: Vec<QVector>) -> Result<Self> {
        let dim = space.product_dim(tuple.len());
        if vertices.is_empty() {
            return Err(Error::InvalidInput(format!(
                "credal set {} has no vertices",
                space.tuple_display(&tuple)
            )));
        }
        for v in &vertices {
            check_dim(space, &tuple, v.dim(), dim)?;
            MeasureVector::new(v.clone())?;
        }
        let body = CredalBody::Polytope(Polytope::from_points_reduced(dim, vertices)?);
        Ok(CredalSet { tuple, dim, body })
    }

    /// The simplex over `Y^|tuple|` intersected with `constraints`.
    pub fn from_constraints(space: &ProcessSpace, tuple: IndexTuple, constraints: HRep) -> Result<Self> {
        let dim = space.product_dim(tuple.len());
        check_dim(space, &tuple, constraints.dim(), dim)?;
        let h = HRep::simplex(dim).concat(&constraints)?;
        let p = Polytope::from_hrep(h);
        if p.is_empty()? {
            return Err(Error::InvalidInput(format!(
                "credal set {} is empty",
                space.tuple_display(&tuple)
            )));
        }
        Ok(CredalSet {
            tuple,
            dim,
            body: CredalBody::Polytope(p),
        })
    }

    pub fn full_simplex(space: &ProcessSpace, tuple: IndexTuple) -> Self {
        let dim = space.product_dim(tuple.len());
        CredalSet {
            tuple,
            dim,
            body: CredalBody::Polytope(Polytope::simplex(dim)),
        }
    }

    pub fn finite(space: &ProcessSpace, tuple: IndexTuple, mut members: Vec<MeasureVector>) -> Result<Self> {
        let dim = space.product_dim(tuple.len());
        if members.is_empty() {
            return Err(Error::InvalidInput(format!(
                "credal set {} has no members",
                space.tuple_display(&tuple)
            )));
        }
        for m in &members {
            check_dim(space, &tuple, m.dim(), dim)?;
        }
        members.sort();
        members.dedup();
        Ok(CredalSet {
            tuple,
            dim,
            body: CredalBody::Finite(members),
        })
    }

    /// Wraps a polytope already known to lie in the simplex.
    pub(crate) fn from_polytope_unchecked(tuple: IndexTuple, p: Polytope) -> Self {
        CredalSet {
            tuple,
            dim: p.dim(),
            body: CredalBody::Polytope(p),
        }
    }

    pub(crate) fn from_body_unchecked(tuple: IndexTuple, dim: usize, body: CredalBody) -> Self {
        CredalSet { tuple, dim, body }
    }

    pub fn tuple(&self) -> &IndexTuple {
        &self.tuple
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn body(&self) -> &CredalBody {
        &self.body
    }

    pub fn is_finite(&self) -> bool {
        self.body.is_finite()
    }

    pub fn as_polytope(&self) -> Option<&Polytope> {
        match &self.body {
            CredalBody::Polytope(p) => Some(p),
            CredalBody::Finite(_) => None,
        }
    }

    pub fn members(&self) -> Option<&[MeasureVector]> {
        match &self.body {
            CredalBody::Finite(ms) => Some(ms),
            CredalBody::Polytope(_) => None,
        }
    }

    pub fn contains(&self, x: &QVector) -> Result<bool> {
        if x.dim() != self.dim {
            return Err(dim_err(format!(
                "measure of dimension {} against a set of dimension {}",
                x.dim(),
                self.dim
            )));
        }
        self.body.contains(x)
    }

    /// The set for `tuple.permuted(pi)`: its pushforward under `f_π`.
    pub fn permuted(&self, space: &ProcessSpace, pi: &Permutation) -> Result<CredalSet> {
        let tuple = self.tuple.permuted(pi)?;
        let m = space.permutation_matrix(self.tuple.len(), pi)?;
        let body = match &self.body {
            CredalBody::Polytope(p) if !p.has_vrep() => {
                // f_π is a bijection; its inverse matrix is the transpose.
                let h = p.hrep().pullback(&m.transpose())?;
                CredalBody::Polytope(Polytope::from_hrep(h))
            }
            CredalBody::Polytope(p) => {
                let vs = p
                    .vertices()?
                    .iter()
                    .map(|v| m.mul_vec(v))
                    .collect::<Result<Vec<_>>>()?;
                CredalBody::Polytope(Polytope::from_vertices(self.dim, vs)?)
            }
            finite => finite.image(&m)?,
        };
        Ok(CredalSet {
            tuple,
            dim: self.dim,
            body,
        })
    }
}

fn check_dim(space: &ProcessSpace, tuple: &IndexTuple, got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(dim_err(format!(
            "credal set {}: vector of length {got}, expected {want}",
            space.tuple_display(tuple)
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PermutationPolicy {
    /// Only ascending tuples are supplied; permuted variants are derived.
    #[default]
    Synthesized,
    /// Any tuples may be supplied; permuted variants are checked against
    /// each other.
    Supplied,
}

/// The indexed family of credal sets.
#[derive(Debug, Clone)]
pub struct CredalCollection {
    space: ProcessSpace,
    policy: PermutationPolicy,
    sets: BTreeMap<IndexTuple, CredalSet>,
}

impl CredalCollection {
    pub fn new(space: ProcessSpace, policy: PermutationPolicy) -> Self {
        CredalCollection {
            space,
            policy,
            sets: BTreeMap::new(),
        }
    }

    pub fn space(&self) -> &ProcessSpace {
        &self.space
    }

    pub fn policy(&self) -> PermutationPolicy {
        self.policy
    }

    pub fn insert(&mut self, set: CredalSet) -> Result<()> {
        let t = set.tuple().clone();
        let name = self.space.tuple_display(&t);
        if self.policy == PermutationPolicy::Synthesized && !t.is_canonical() {
            return Err(Error::InvalidInput(format!(
                "tuple {name} is not in ascending T order; use the supplied permutation policy to give permuted tuples"
            )));
        }
        if self.sets.contains_key(&t) {
            return Err(Error::InvalidInput(format!("tuple {name} given twice")));
        }
        self.sets.insert(t, set);
        Ok(())
    }

    /// Supplied sets in canonical tuple order.
    pub fn supplied(&self) -> impl Iterator<Item = &CredalSet> {
        self.sets.values()
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn is_finite_mode(&self) -> bool {
        self.sets.values().any(CredalSet::is_finite)
    }

    /// The set for `tuple`: supplied, or derived from the supplied canonical
    /// representative under the synthesized policy.
    pub fn get(&self, tuple: &IndexTuple) -> Result<Option<Cow<'_, CredalSet>>> {
        if let Some(s) = self.sets.get(tuple) {
            return Ok(Some(Cow::Borrowed(s)));
        }
        if self.policy == PermutationPolicy::Synthesized {
            let canon = tuple.canonical();
            if let Some(base) = self.sets.get(&canon) {
                let pi = canon.permutation_to(tuple)?;
                return Ok(Some(Cow::Owned(base.permuted(&self.space, &pi)?)));
            }
        }
        Ok(None)
    }

    /// One supplied set per element subset: the ascending tuple if present,
    /// else the first supplied permutation in canonical order.
    pub fn representatives(&self) -> Vec<&CredalSet> {
        let mut seen = std::collections::BTreeSet::new();
        let mut out: Vec<&CredalSet> = Vec::new();
        let mut by_subset: BTreeMap<IndexTuple, &CredalSet> = BTreeMap::new();
        for s in self.sets.values() {
            let key = s.tuple().canonical();
            let better = match by_subset.get(&key) {
                None => true,
                Some(cur) => !cur.tuple().is_canonical() && s.tuple().is_canonical(),
            };
            if better {
                by_subset.insert(key, s);
            }
        }
        for (k, s) in by_subset {
            if seen.insert(k) {
                out.push(s);
            }
        }
        out
    }

    /// Subsets of `T` with no supplied tuple.
    pub fn missing_subsets(&self) -> Vec<IndexTuple> {
        self.space
            .canonical_tuples()
            .into_iter()
            .filter(|t| !self.sets.keys().any(|s| s.same_elements(t)))
            .collect()
    }
}
