//! Exact convex polytopes with lazily interconverted H- and V-representations,
//! and the geometric predicates built on them: membership, containment,
//! equality, linear images and preimages, intersection and separation.

mod dd;
mod hrep;

use std::fmt;
use std::sync::OnceLock;

use num_traits::Signed;

use crate::error::{dim_err, Error, Result};
use crate::exactq::{
    lp_solve, Direction, LpOutcome, LpProblem, QMatrix, QVector, Rational, Sense, VarBound,
};

pub use hrep::{HOptimum, HRep, HRepFarkas, RowRef};

/// Convex hull generators. Only bounded sets are represented, so there are
/// no rays.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VRep {
    pub vertices: Vec<QVector>,
}

/// A functional `g` and gap `ε > 0` with `g·point - g·v >= ε` for every `v`
/// in the separated set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparationCertificate {
    pub functional: QVector,
    pub gap: Rational,
    pub point: QVector,
}

impl SeparationCertificate {
    /// Exact check against a finite generating set of the separated set.
    pub fn verify_against(&self, vertices: &[QVector]) -> bool {
        if !self.gap.is_positive() {
            return false;
        }
        let gx = self.functional.dot(&self.point);
        vertices
            .iter()
            .all(|v| v.dim() == self.point.dim() && &gx - self.functional.dot(v) >= self.gap)
    }

    /// Exact check against a polytope, by maximising `g` over it.
    pub fn verify_polytope(&self, p: &Polytope) -> Result<bool> {
        if !self.gap.is_positive() || p.dim() != self.point.dim() {
            return Ok(false);
        }
        let gx = self.functional.dot(&self.point);
        Ok(match p.maximize(&self.functional)? {
            None => true,
            Some((sup, _)) => gx - sup >= self.gap,
        })
    }
}

/// Outcome of a containment test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Inclusion {
    Holds,
    Fails(SeparationCertificate),
}

impl Inclusion {
    pub fn holds(&self) -> bool {
        matches!(self, Inclusion::Holds)
    }

    pub fn certificate(&self) -> Option<&SeparationCertificate> {
        match self {
            Inclusion::Holds => None,
            Inclusion::Fails(c) => Some(c),
        }
    }
}

/// A bounded convex set in ℚ^d.
///
/// At least one representation is present; the other is computed on first
/// use and published once (`OnceLock`), so concurrent readers may race to
/// compute it but always observe the same value.
pub struct Polytope {
    dim: usize,
    h: OnceLock<HRep>,
    v: OnceLock<VRep>,
    empty: OnceLock<bool>,
}

impl Clone for Polytope {
    fn clone(&self) -> Self {
        let out = Polytope::blank(self.dim);
        if let Some(h) = self.h.get() {
            let _ = out.h.set(h.clone());
        }
        if let Some(v) = self.v.get() {
            let _ = out.v.set(v.clone());
        }
        if let Some(e) = self.empty.get() {
            let _ = out.empty.set(*e);
        }
        out
    }
}

impl fmt::Debug for Polytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Polytope")
            .field("dim", &self.dim)
            .field("hrep", &self.h.get())
            .field("vrep", &self.v.get())
            .field("empty", &self.empty.get())
            .finish()
    }
}

impl Polytope {
    fn blank(dim: usize) -> Self {
        Polytope {
            dim,
            h: OnceLock::new(),
            v: OnceLock::new(),
            empty: OnceLock::new(),
        }
    }

    pub fn from_hrep(h: HRep) -> Self {
        let p = Polytope::blank(h.dim());
        let _ = p.h.set(h);
        p
    }

    /// Convex hull of `points` (duplicates removed, order canonicalised).
    /// Non-extreme generators are kept; see [`Polytope::from_points_reduced`].
    pub fn from_vertices(dim: usize, mut points: Vec<QVector>) -> Result<Self> {
        if let Some(bad) = points.iter().find(|p| p.dim() != dim) {
            return Err(dim_err(format!(
                "vertex of dimension {} in a {dim}-dimensional polytope",
                bad.dim()
            )));
        }
        points.sort();
        points.dedup();
        let p = Polytope::blank(dim);
        let _ = p.empty.set(points.is_empty());
        let _ = p.v.set(VRep { vertices: points });
        Ok(p)
    }

    /// Convex hull of `points`, keeping exactly the extreme points.
    pub fn from_points_reduced(dim: usize, points: Vec<QVector>) -> Result<Self> {
        let hull = Polytope::from_vertices(dim, points)?;
        let mut pts = hull.v.get().expect("just set").vertices.clone();
        let mut i = 0;
        while i < pts.len() {
            if pts.len() > 1 {
                let others: Vec<QVector> = pts
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != i)
                    .map(|(_, v)| v.clone())
                    .collect();
                if in_hull(&others, &pts[i])?.is_none() {
                    pts.remove(i);
                    continue;
                }
            }
            i += 1;
        }
        Polytope::from_vertices(dim, pts)
    }

    pub fn empty(dim: usize) -> Self {
        let p = Polytope::blank(dim);
        let _ = p.h.set(HRep::infeasible(dim));
        let _ = p.v.set(VRep {
            vertices: Vec::new(),
        });
        let _ = p.empty.set(true);
        p
    }

    /// The probability simplex of dimension `d`.
    pub fn simplex(d: usize) -> Self {
        Polytope::from_hrep(HRep::simplex(d))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn has_hrep(&self) -> bool {
        self.h.get().is_some()
    }

    pub fn has_vrep(&self) -> bool {
        self.v.get().is_some()
    }

    /// The H-representation, computing it from the vertices if needed.
    pub fn hrep(&self) -> &HRep {
        if let Some(h) = self.h.get() {
            return h;
        }
        let vs = &self.v.get().expect("a polytope has at least one representation").vertices;
        let h = dd::hull_facets(self.dim, vs).expect("vertices share the polytope dimension");
        let _ = self.h.set(h);
        self.h.get().expect("published")
    }

    /// The V-representation, enumerating vertices from the H-representation
    /// if needed. Vertices computed here are exactly the extreme points.
    pub fn vrep(&self) -> Result<&VRep> {
        if let Some(v) = self.v.get() {
            return Ok(v);
        }
        let vertices = dd::enumerate_vertices(self.h.get().expect("one representation"))?;
        let _ = self.empty.set(vertices.is_empty());
        let _ = self.v.set(VRep { vertices });
        Ok(self.v.get().expect("published"))
    }

    pub fn vertices(&self) -> Result<&[QVector]> {
        Ok(&self.vrep()?.vertices)
    }

    pub fn is_empty(&self) -> Result<bool> {
        if let Some(e) = self.empty.get() {
            return Ok(*e);
        }
        let e = match self.v.get() {
            Some(v) => v.vertices.is_empty(),
            None => self.hrep().infeasibility()?.is_some(),
        };
        let _ = self.empty.set(e);
        Ok(e)
    }

    /// Maximum of `g·x` over the set with a maximiser; `None` when empty.
    pub fn maximize(&self, g: &[Rational]) -> Result<Option<(Rational, QVector)>> {
        if g.len() != self.dim {
            return Err(dim_err(format!(
                "functional of length {} on dimension {}",
                g.len(),
                self.dim
            )));
        }
        if let Some(v) = self.v.get() {
            let best = v
                .vertices
                .iter()
                .map(|x| (crate::exactq::linalg::dot(g, x), x))
                .fold(None::<(Rational, &QVector)>, |acc, (val, x)| match acc {
                    Some((b, bx)) if b >= val => Some((b, bx)),
                    _ => Some((val, x)),
                });
            return Ok(best.map(|(val, x)| (val, x.clone())));
        }
        match self.hrep().optimize(g, Direction::Maximize)? {
            HOptimum::Optimal { value, point } => Ok(Some((value, point))),
            HOptimum::Infeasible(_) => Ok(None),
            HOptimum::Unbounded => Err(Error::Unbounded),
        }
    }

    pub fn minimize(&self, g: &[Rational]) -> Result<Option<(Rational, QVector)>> {
        let neg: Vec<Rational> = g.iter().map(|x| -x).collect();
        Ok(self.maximize(&neg)?.map(|(v, x)| (-v, x)))
    }
}

/// Membership LP over convex-combination weights. `None` when `x` lies in
/// the hull; otherwise a separating functional `g` with
/// `g·x > max_i g·v_i`.
fn in_hull(points: &[QVector], x: &QVector) -> Result<Option<QVector>> {
    let d = x.dim();
    let n = points.len();
    if n == 0 {
        let g = if d > 0 { QVector::unit(d, 0) } else { QVector::zeros(0) };
        return Ok(Some(g));
    }
    // Rows: Σ λ_i v_i = x (d rows), Σ λ_i = 1.
    let mut m = QMatrix::zeros(d + 1, n);
    for (i, v) in points.iter().enumerate() {
        for r in 0..d {
            m.set(r, i, v[r].clone());
        }
        m.set(d, i, Rational::from_integer(1.into()));
    }
    let rhs: QVector = x.iter().cloned().chain(std::iter::once(Rational::from_integer(1.into()))).collect();
    let problem = LpProblem::feasibility(
        m,
        rhs,
        vec![Sense::Eq; d + 1],
        vec![VarBound::NonNegative; n],
    )?;
    match lp_solve(&problem)? {
        LpOutcome::Infeasible(cert) => {
            // y·v_i + z >= 0 for all i and y·x + z < 0, so g = -y separates.
            Ok(Some(cert.row_multipliers[..d].iter().map(|y| -y).collect()))
        }
        _ => Ok(None),
    }
}

/// Returns a copy with both representations populated: exactly the extreme
/// points and an irredundant facet description.
pub fn dd_convert(p: &Polytope) -> Result<Polytope> {
    if p.is_empty()? {
        return Ok(Polytope::empty(p.dim()));
    }
    let vertices = if p.has_vrep() {
        Polytope::from_points_reduced(p.dim(), p.vertices()?.to_vec())?
            .vertices()?
            .to_vec()
    } else {
        p.vertices()?.to_vec()
    };
    let h = dd::hull_facets(p.dim(), &vertices)?;
    let out = Polytope::from_vertices(p.dim(), vertices)?;
    let _ = out.h.set(h);
    Ok(out)
}

/// `{M x : x ∈ p}`, as the hull of the mapped vertices reduced to extreme points.
pub fn linear_image(m: &QMatrix, p: &Polytope) -> Result<Polytope> {
    if m.cols() != p.dim() {
        return Err(dim_err(format!(
            "map with {} columns applied to a {}-dimensional polytope",
            m.cols(),
            p.dim()
        )));
    }
    if p.is_empty()? {
        return Ok(Polytope::empty(m.rows()));
    }
    let mapped = p
        .vertices()?
        .iter()
        .map(|v| m.mul_vec(v))
        .collect::<Result<Vec<_>>>()?;
    Polytope::from_points_reduced(m.rows(), mapped)
}

/// `{x ∈ ambient : M x ∈ q}` as an H-representation (ambient rows first).
pub fn linear_preimage(m: &QMatrix, q: &Polytope, ambient: &Polytope) -> Result<Polytope> {
    if m.rows() != q.dim() || m.cols() != ambient.dim() {
        return Err(dim_err(format!(
            "map {}x{} between dimensions {} and {}",
            m.rows(),
            m.cols(),
            ambient.dim(),
            q.dim()
        )));
    }
    let pulled = q.hrep().pullback(m)?;
    Ok(Polytope::from_hrep(ambient.hrep().concat(&pulled)?))
}

/// Exact membership.
pub fn contains_point(p: &Polytope, x: &QVector) -> Result<bool> {
    if x.dim() != p.dim() {
        return Err(dim_err(format!(
            "point of dimension {} against a {}-dimensional polytope",
            x.dim(),
            p.dim()
        )));
    }
    if let Some(h) = p.h.get() {
        return Ok(h.contains(x));
    }
    Ok(in_hull(p.vertices()?, x)?.is_none())
}

/// A certificate separating `x` from `p`; errors if `x ∈ p`.
///
/// With an H-representation the functional is the first violated row;
/// otherwise it is read off the Farkas multipliers of the membership LP.
/// The gap is always the exact distance `g·x - max_{v∈p} g·v`.
pub fn separate(p: &Polytope, x: &QVector) -> Result<SeparationCertificate> {
    if x.dim() != p.dim() {
        return Err(dim_err(format!(
            "point of dimension {} against a {}-dimensional polytope",
            x.dim(),
            p.dim()
        )));
    }
    if p.is_empty()? {
        let functional = if p.dim() > 0 { QVector::unit(p.dim(), 0) } else { QVector::zeros(0) };
        return Ok(SeparationCertificate {
            functional,
            gap: Rational::from_integer(1.into()),
            point: x.clone(),
        });
    }
    let functional = if let Some(h) = p.h.get() {
        match h.violated_row(x) {
            None => return Err(Error::NotSeparable),
            Some(r) => {
                let (row, rhs) = h.row(r);
                let g = QVector::new(row.to_vec());
                match r {
                    RowRef::Eq(_) if g.dot(x) < *rhs => g.neg(),
                    _ => g,
                }
            }
        }
    } else {
        match in_hull(p.vertices()?, x)? {
            None => return Err(Error::NotSeparable),
            Some(g) => g,
        }
    };
    let (sup, _) = p.maximize(&functional)?.expect("nonempty");
    let gap = functional.dot(x) - sup;
    debug_assert!(gap.is_positive());
    Ok(SeparationCertificate {
        functional,
        gap,
        point: x.clone(),
    })
}

/// Decides `p ⊆ q`, with a certificate on failure.
///
/// Vertices of `p` are tested when available; otherwise every facet
/// functional of `q` is maximised over `p` by LP, so an H-only `p` is never
/// vertex-enumerated.
pub fn is_subset(p: &Polytope, q: &Polytope) -> Result<Inclusion> {
    if p.dim() != q.dim() {
        return Err(dim_err(format!(
            "containment between dimensions {} and {}",
            p.dim(),
            q.dim()
        )));
    }
    if p.is_empty()? {
        return Ok(Inclusion::Holds);
    }
    let use_vertices = p.has_vrep() && (q.has_hrep() || !p.has_hrep());
    if use_vertices {
        for v in p.vertices()? {
            if !contains_point(q, v)? {
                return Ok(Inclusion::Fails(separate(q, v)?));
            }
        }
        return Ok(Inclusion::Holds);
    }
    let qh = q.hrep();
    let ph = p.hrep();
    let check = |g: &[Rational], bound: &Rational| -> Result<Option<QVector>> {
        match ph.optimize(g, Direction::Maximize)? {
            HOptimum::Optimal { value, point } => Ok((value > *bound).then_some(point)),
            HOptimum::Infeasible(_) => Ok(None),
            HOptimum::Unbounded => Err(Error::Unbounded),
        }
    };
    for i in 0..qh.ineq.rows() {
        if let Some(x) = check(qh.ineq.row(i), &qh.ineq_rhs[i])? {
            return Ok(Inclusion::Fails(separate(q, &x)?));
        }
    }
    for i in 0..qh.eq.rows() {
        let row = qh.eq.row(i);
        let neg: Vec<Rational> = row.iter().map(|a| -a).collect();
        let found = match check(row, &qh.eq_rhs[i])? {
            Some(x) => Some(x),
            None => check(&neg, &-qh.eq_rhs[i].clone())?,
        };
        if let Some(x) = found {
            return Ok(Inclusion::Fails(separate(q, &x)?));
        }
    }
    Ok(Inclusion::Holds)
}

/// Set equality via containment both ways.
pub fn equals(p: &Polytope, q: &Polytope) -> Result<bool> {
    Ok(is_subset(p, q)?.holds() && is_subset(q, p)?.holds())
}

/// Intersection of H-represented sets: rows concatenated, emptiness decided
/// exactly, and redundant rows removed when nonempty.
pub fn intersect(ps: &[Polytope]) -> Result<Polytope> {
    let Some(first) = ps.first() else {
        return Err(Error::InvalidInput("intersection of no polytopes".into()));
    };
    let mut h = first.hrep().clone();
    for p in &ps[1..] {
        if p.dim() != first.dim() {
            return Err(dim_err("intersection of polytopes of different dimensions"));
        }
        h = h.concat(p.hrep())?;
    }
    if h.infeasibility()?.is_some() {
        let out = Polytope::from_hrep(h);
        let _ = out.empty.set(true);
        return Ok(out);
    }
    let (reduced, _, _) = h.remove_redundant()?;
    let out = Polytope::from_hrep(reduced);
    let _ = out.empty.set(false);
    Ok(out)
}

/// Coordinates that are pinned (min = max) over `p`, or `None` if `p` is
/// not a single point. `p` must be nonempty.
pub fn single_point(p: &Polytope) -> Result<Option<QVector>> {
    let mut out = Vec::with_capacity(p.dim());
    for j in 0..p.dim() {
        let e = QVector::unit(p.dim(), j);
        let (hi, _) = p.maximize(&e)?.ok_or(Error::EmptyJoint)?;
        let (lo, _) = p.minimize(&e)?.ok_or(Error::EmptyJoint)?;
        if hi != lo {
            return Ok(None);
        }
        out.push(hi);
    }
    Ok(Some(QVector::new(out)))
}

impl Polytope {
    /// Sets the cached emptiness flag; used by constructors elsewhere in the crate.
    pub(crate) fn with_empty_flag(self, empty: bool) -> Self {
        let _ = self.empty.set(empty);
        self
    }

    /// True when the certificate's point is outside and the set is exactly
    /// separated by it. Uses vertices when cheap, LP otherwise.
    pub fn check_certificate(&self, cert: &SeparationCertificate) -> Result<bool> {
        match self.v.get() {
            Some(v) => Ok(cert.verify_against(&v.vertices)),
            None => cert.verify_polytope(self),
        }
    }
}
