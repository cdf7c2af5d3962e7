use num_traits::{One, Zero};

use super::{CredalBody, CredalSet};
use crate::error::{dim_err, Error, Result};
use crate::exactq::{Direction, Rational, QVector};
use crate::polytope::HOptimum;
use crate::spaces::MeasureVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    Lower,
    Upper,
}

/// `min_{p∈V} Σ f·p`; by LP over the H-representation for polytopes and
/// by enumeration for finite sets.
pub fn lower_expectation(set: &CredalSet, f: &[Rational]) -> Result<Rational> {
    expectation(set, f, Bound::Lower)
}

/// `max_{p∈V} Σ f·p`.
pub fn upper_expectation(set: &CredalSet, f: &[Rational]) -> Result<Rational> {
    expectation(set, f, Bound::Upper)
}

pub(crate) fn expectation(set: &CredalSet, f: &[Rational], bound: Bound) -> Result<Rational> {
    if f.len() != set.dim() {
        return Err(dim_err(format!(
            "function with {} values on a space of size {}",
            f.len(),
            set.dim()
        )));
    }
    match set.body() {
        CredalBody::Polytope(p) => {
            let dir = match bound {
                Bound::Lower => Direction::Minimize,
                Bound::Upper => Direction::Maximize,
            };
            match p.hrep().optimize(f, dir)? {
                HOptimum::Optimal { value, .. } => Ok(value),
                HOptimum::Unbounded => Err(Error::Unbounded),
                HOptimum::Infeasible(_) => Err(Error::InvalidInput("expectation over an empty set".into())),
            }
        }
        CredalBody::Finite(ms) => {
            let vals = ms.iter().map(|m| m.as_vector().dot(f));
            let best = match bound {
                Bound::Lower => vals.min(),
                Bound::Upper => vals.max(),
            };
            best.ok_or_else(|| Error::InvalidInput("expectation over an empty set".into()))
        }
    }
}

/// Spreads each atom's mass uniformly over its points.
///
/// `atoms` must partition `0..size`; `masses[i]` is the mass of `atoms[i]`.
pub fn extend_measure(size: usize, atoms: &[Vec<usize>], masses: &MeasureVector) -> Result<MeasureVector> {
    if masses.dim() != atoms.len() {
        return Err(dim_err(format!(
            "{} masses for {} atoms",
            masses.dim(),
            atoms.len()
        )));
    }
    let mut out = vec![Rational::zero(); size];
    let mut covered = vec![false; size];
    for (atom, mass) in atoms.iter().zip(masses.as_vector().iter()) {
        if atom.is_empty() {
            return Err(Error::InvalidInput("empty atom in partition".into()));
        }
        let share = mass / Rational::from_integer((atom.len() as i64).into());
        for &x in atom {
            if x >= size {
                return Err(Error::InvalidInput(format!("atom point {x} outside 0..{size}")));
            }
            if covered[x] {
                return Err(Error::InvalidInput(format!("point {x} lies in two atoms")));
            }
            covered[x] = true;
            out[x] = share.clone();
        }
    }
    if let Some(x) = covered.iter().position(|c| !c) {
        return Err(Error::InvalidInput(format!("point {x} lies in no atom")));
    }
    let v = QVector::new(out);
    debug_assert!(v.sum() == Rational::one());
    MeasureVector::new(v)
}
