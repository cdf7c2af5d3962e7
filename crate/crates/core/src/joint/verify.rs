use num_traits::Zero;

use super::{JointModel, Region};
use crate::credal::{closedness_witness, CredalBody, CredalCollection, CredalSet, InclusionDirection, Witness};
use crate::error::{Error, Result};
use crate::exactq::{Direction, QMatrix, QVector, Rational};
use crate::polytope::{self, HOptimum, HRep, SeparationCertificate};
use crate::spaces::IndexTuple;

/// A measure on `Y^|α|` on the wrong side of one inclusion.
///
/// `ImageInTarget` means the measure lies in `Φ̂_α(P)` but not in `V_α`;
/// `TargetInImage` means it lies in `V_α` but not in `Φ̂_α(P)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepresentationWitness {
    pub direction: InclusionDirection,
    pub witness: Witness,
    /// `Mᵀg` on `Ω` for hyperplane witnesses: the functional composed with `Φ_α`.
    pub lifted: Option<QVector>,
}

impl RepresentationWitness {
    pub fn measure(&self) -> &QVector {
        self.witness.point()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepresentationRecord {
    pub tuple: IndexTuple,
    /// `Φ̂_α(P) ⊆ V_α`.
    pub image_in_set: bool,
    /// `V_α ⊆ Φ̂_α(P)`.
    pub set_in_image: bool,
    pub witnesses: Vec<RepresentationWitness>,
}

impl RepresentationRecord {
    pub fn passed(&self) -> bool {
        self.image_in_set && self.set_in_image
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RepresentationReport {
    pub records: Vec<RepresentationRecord>,
}

impl RepresentationReport {
    pub fn passed(&self) -> bool {
        self.records.iter().all(RepresentationRecord::passed)
    }

    pub fn record(&self, t: &IndexTuple) -> Option<&RepresentationRecord> {
        self.records.iter().find(|r| &r.tuple == t)
    }

    /// Re-checks every witness exactly: against `P` by LP for witnesses
    /// separating from the image, against the generators of `V_α` otherwise.
    pub fn verify_certificates(&self, coll: &CredalCollection, joint: &JointModel) -> Result<bool> {
        for rec in &self.records {
            let set = coll
                .get(&rec.tuple)?
                .ok_or_else(|| Error::InvalidInput(format!("no set for {}", rec.tuple)))?;
            let m = joint.space().phi_matrix(&rec.tuple)?;
            for w in &rec.witnesses {
                let ok = match w.direction {
                    InclusionDirection::ImageInTarget => w.witness.verify_against(&set.body().generators()?),
                    InclusionDirection::TargetInImage => match (&w.witness, &w.lifted) {
                        (Witness::Hyperplane(c), Some(lifted)) if !joint.is_finite_mode() => {
                            m.left_mul_vec(&c.functional)? == *lifted
                                && lifted_gap_holds(joint.region().expect("polytope mode"), lifted, c)?
                        }
                        _ => {
                            let img = joint.pushforward(&rec.tuple)?;
                            w.witness.verify_against(&img.body().generators()?)
                        }
                    },
                };
                if !ok {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

fn lifted_gap_holds(r: &Region, lifted: &QVector, c: &SeparationCertificate) -> Result<bool> {
    match r.hrep().optimize(lifted, Direction::Maximize)? {
        HOptimum::Optimal { value, .. } => Ok(c.gap > Rational::zero() && c.functional.dot(&c.point) - value >= c.gap),
        HOptimum::Infeasible(_) => Ok(true),
        HOptimum::Unbounded => Ok(false),
    }
}

/// Rescales `g` to entries in `[0, 1]` with minimum 0 and maximum 1. Every
/// compared vector is a measure, so shifting `g` by a constant leaves all
/// gaps unchanged.
fn normalize(c: SeparationCertificate) -> SeparationCertificate {
    let lo = c.functional.iter().min().cloned().unwrap_or_else(Rational::zero);
    let hi = c.functional.iter().max().cloned().unwrap_or_else(Rational::zero);
    let span = &hi - &lo;
    if span.is_zero() {
        return c;
    }
    SeparationCertificate {
        functional: c.functional.iter().map(|g| (g - &lo) / &span).collect(),
        gap: c.gap / span,
        point: c.point,
    }
}

fn hyperplane(m: &QMatrix, direction: InclusionDirection, c: SeparationCertificate) -> Result<RepresentationWitness> {
    let c = normalize(c);
    let lifted = m.left_mul_vec(&c.functional)?;
    Ok(RepresentationWitness {
        direction,
        witness: Witness::Hyperplane(c),
        lifted: Some(lifted),
    })
}

/// `max_{p∈P} (Mᵀg)·p`.
fn sup_over(r: &Region, m: &QMatrix, g: &[Rational], dir: Direction) -> Result<(Rational, QVector)> {
    let lifted = m.left_mul_vec(g)?;
    match r.hrep().optimize(&lifted, dir)? {
        HOptimum::Optimal { value, point } => Ok((value, point)),
        HOptimum::Infeasible(_) => Err(Error::EmptyJoint),
        HOptimum::Unbounded => Err(Error::Unbounded),
    }
}

fn check_polytope(r: &Region, m: &QMatrix, set: &CredalSet) -> Result<RepresentationRecord> {
    let v = set.as_polytope().expect("polytope mode");
    let mut witnesses = Vec::new();

    // V_α ⊆ Φ̂_α(P): each vertex must have a preimage in P.
    let mut set_in_image = true;
    for x in v.vertices()? {
        let fix = HRep::new(QMatrix::zeros(0, m.cols()), QVector::zeros(0), m.clone(), x.clone())?;
        let sys = r.hrep().concat(&fix)?;
        if let Some(cert) = sys.infeasibility()? {
            set_in_image = false;
            // yᵀM p = -(λᵀA + μᵀE) p >= -(λᵀb + μᵀe) > yᵀx on P, so g = -y separates.
            let k = r.hrep().eq.rows();
            let g: QVector = cert.eq_multipliers[k..].iter().map(|y| -y).collect();
            let (sup, _) = sup_over(r, m, &g, Direction::Maximize)?;
            let gap = g.dot(x) - sup;
            let c = SeparationCertificate {
                functional: g,
                gap,
                point: x.clone(),
            };
            witnesses.push(hyperplane(m, InclusionDirection::TargetInImage, c)?);
        }
    }

    // Φ̂_α(P) ⊆ V_α: each facet functional composed with M stays within its bound on P.
    let h = v.hrep();
    let mut probes: Vec<(QVector, Rational)> = (0..h.ineq.rows())
        .map(|i| (h.ineq.row_vec(i), h.ineq_rhs[i].clone()))
        .collect();
    for i in 0..h.eq.rows() {
        probes.push((h.eq.row_vec(i), h.eq_rhs[i].clone()));
        probes.push((h.eq.row_vec(i).neg(), -h.eq_rhs[i].clone()));
    }
    let mut image_in_set = true;
    for (a, b) in probes {
        let (sup, p) = sup_over(r, m, &a, Direction::Maximize)?;
        if sup > b {
            image_in_set = false;
            let x = m.mul_vec(&p)?;
            witnesses.push(hyperplane(m, InclusionDirection::ImageInTarget, polytope::separate(v, &x)?)?);
            break;
        }
    }
    Ok(RepresentationRecord {
        tuple: set.tuple().clone(),
        image_in_set,
        set_in_image,
        witnesses,
    })
}

fn check_finite(joint: &JointModel, m: &QMatrix, set: &CredalSet) -> Result<RepresentationRecord> {
    let img = joint.pushforward(set.tuple())?;
    let members = match set.body() {
        CredalBody::Finite(ms) => ms,
        CredalBody::Polytope(_) => {
            return Err(Error::InvalidInput("polytope set in a finite-mode joint".into()));
        }
    };
    let wrap = |direction, w: Witness| -> Result<RepresentationWitness> {
        Ok(match w {
            Witness::Hyperplane(c) => hyperplane(m, direction, c)?,
            w => RepresentationWitness {
                direction,
                witness: w,
                lifted: None,
            },
        })
    };
    let mut witnesses = Vec::new();
    let mut set_in_image = true;
    for x in members {
        if !img.contains(x.as_vector())? {
            set_in_image = false;
            witnesses.push(wrap(
                InclusionDirection::TargetInImage,
                closedness_witness(&img, x.as_vector())?,
            )?);
        }
    }
    let mut image_in_set = true;
    for x in img.members().expect("finite image") {
        if !set.contains(x.as_vector())? {
            image_in_set = false;
            witnesses.push(wrap(
                InclusionDirection::ImageInTarget,
                closedness_witness(set, x.as_vector())?,
            )?);
        }
    }
    Ok(RepresentationRecord {
        tuple: set.tuple().clone(),
        image_in_set,
        set_in_image,
        witnesses,
    })
}

/// Checks `Φ̂_α(P) = V_α` for every supplied tuple, both inclusions, with
/// witnesses on failure. Witness functionals are normalised to `[0, 1]`.
pub fn verify_representation(coll: &CredalCollection, joint: &JointModel) -> Result<RepresentationReport> {
    let mut out = RepresentationReport::default();
    for set in coll.supplied() {
        let m = joint.space().phi_matrix(set.tuple())?;
        let rec = match joint.region() {
            Some(r) => check_polytope(r, &m, set)?,
            None => check_finite(joint, &m, set)?,
        };
        out.records.push(rec);
    }
    Ok(out)
}
