use num_traits::{Signed, Zero};

use super::{CredalBody, CredalSet};
use crate::error::{Error, Result};
use crate::exactq::{Rational, QVector};
use crate::polytope::{self, Polytope, SeparationCertificate};
use crate::spaces::MeasureVector;

/// A family of functionals `g_1..g_n` and a gap `ε > 0` such that every
/// member `v` of a finite set satisfies `|g_i·point - g_i·v| >= ε` for some
/// `i`. Used when the point lies in the convex hull of a finite set without
/// belonging to it, so no single hyperplane exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointwiseCertificate {
    pub functionals: Vec<QVector>,
    pub gap: Rational,
    pub point: QVector,
}

impl PointwiseCertificate {
    /// `g_j = v_j - point` for each member, with the smallest squared distance as gap.
    pub fn for_members(members: &[QVector], point: &QVector) -> Result<Self> {
        let mut functionals = Vec::with_capacity(members.len());
        let mut gap: Option<Rational> = None;
        for v in members {
            let g = v.sub(point);
            let d = g.dot(&g);
            if d.is_zero() {
                return Err(Error::NotSeparable);
            }
            gap = Some(match gap {
                Some(cur) if cur <= d => cur,
                _ => d,
            });
            functionals.push(g);
        }
        Ok(PointwiseCertificate {
            functionals,
            gap: gap.unwrap_or_else(|| Rational::from_integer(1.into())),
            point: point.clone(),
        })
    }

    pub fn verify_against(&self, members: &[QVector]) -> bool {
        if !self.gap.is_positive() {
            return false;
        }
        members.iter().all(|v| {
            v.dim() == self.point.dim()
                && self.functionals.iter().any(|g| {
                    g.dim() == v.dim() && (g.dot(&self.point) - g.dot(v)).abs() >= self.gap
                })
        })
    }
}

/// Evidence that a measure lies outside a closed set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Hyperplane(SeparationCertificate),
    Pointwise(PointwiseCertificate),
}

impl Witness {
    /// The offending measure.
    pub fn point(&self) -> &QVector {
        match self {
            Witness::Hyperplane(c) => &c.point,
            Witness::Pointwise(c) => &c.point,
        }
    }

    pub fn gap(&self) -> &Rational {
        match self {
            Witness::Hyperplane(c) => &c.gap,
            Witness::Pointwise(c) => &c.gap,
        }
    }

    /// Exact check against the generators (vertices or members) of the set
    /// the point was separated from.
    pub fn verify_against(&self, generators: &[QVector]) -> bool {
        match self {
            Witness::Hyperplane(c) => c.verify_against(generators),
            Witness::Pointwise(c) => c.verify_against(generators),
        }
    }
}

/// Witness for `x` against a finite set: a hyperplane when `x` is outside
/// the hull, the pointwise family otherwise.
fn outside_finite(members: &[MeasureVector], x: &QVector) -> Result<Witness> {
    let pts: Vec<QVector> = members.iter().map(|m| m.as_vector().clone()).collect();
    let hull = Polytope::from_vertices(x.dim(), pts.clone())?;
    match polytope::separate(&hull, x) {
        Ok(c) => Ok(Witness::Hyperplane(c)),
        Err(Error::NotSeparable) => Ok(Witness::Pointwise(PointwiseCertificate::for_members(&pts, x)?)),
        Err(e) => Err(e),
    }
}

fn outside(body: &CredalBody, x: &QVector) -> Result<Witness> {
    match body {
        CredalBody::Polytope(p) => Ok(Witness::Hyperplane(polytope::separate(p, x)?)),
        CredalBody::Finite(ms) => outside_finite(ms, x),
    }
}

/// Decides `a ⊆ b`. `None` when it holds, otherwise a point of `a` with a
/// witness against `b`.
pub fn inclusion(a: &CredalBody, b: &CredalBody) -> Result<Option<Witness>> {
    match a {
        CredalBody::Polytope(pa) => match b {
            CredalBody::Polytope(pb) => Ok(polytope::is_subset(pa, pb)?
                .certificate()
                .cloned()
                .map(Witness::Hyperplane)),
            CredalBody::Finite(ms) => {
                let vs = pa.vertices()?;
                for v in vs {
                    if !b.contains(v)? {
                        return Ok(Some(outside_finite(ms, v)?));
                    }
                }
                if vs.len() < 2 {
                    return Ok(None);
                }
                // A segment holds more distinct points than b has members.
                let dir = vs[1].sub(&vs[0]);
                for j in 0..=ms.len() {
                    let t = Rational::new(1.into(), ((j + 2) as i64).into());
                    let x = vs[0].add(&dir.scale(&t));
                    if !b.contains(&x)? {
                        return Ok(Some(outside_finite(ms, &x)?));
                    }
                }
                unreachable!("finite set contains a segment")
            }
        },
        CredalBody::Finite(ms) => {
            for m in ms {
                if !b.contains(m.as_vector())? {
                    return Ok(Some(outside(b, m.as_vector())?));
                }
            }
            Ok(None)
        }
    }
}

/// A witness that `p0` is not in `set`; errors with `NotSeparable` if it is.
pub fn closedness_witness(set: &CredalSet, p0: &QVector) -> Result<Witness> {
    if set.contains(p0)? {
        return Err(Error::NotSeparable);
    }
    outside(set.body(), p0)
}
