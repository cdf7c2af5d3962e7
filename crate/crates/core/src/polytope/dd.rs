//! Double description method for polyhedral cones `{z : G z >= 0}`.
//!
//! Both conversions go through cones: vertices of `{A x <= b, E x = e}` are
//! the extreme rays of its homogenisation with `t > 0`, and facets of a
//! point hull are the extreme rays of the cone of valid inequalities.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exactq::linalg::{dot, normalize_leading};
use crate::exactq::{inverse, nullspace, rref, QMatrix, QVector, Rational};

use super::HRep;

#[derive(Clone, PartialEq, Eq)]
struct ZeroSet(Vec<u64>);

impl ZeroSet {
    fn new(n: usize) -> Self {
        ZeroSet(vec![0; n.div_ceil(64)])
    }
    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, other: &ZeroSet) -> ZeroSet {
        ZeroSet(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    fn is_subset_of(&self, other: &ZeroSet) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
}

struct Ray {
    z: Vec<Rational>,
    zeros: ZeroSet,
}

/// Generators of `{z : G z >= 0}`: a lineality basis plus extreme rays of
/// the pointed part (the cone intersected with the row space of `G`).
#[derive(Debug, Clone)]
pub(crate) struct ConeGenerators {
    pub lineality: Vec<QVector>,
    pub rays: Vec<QVector>,
}

pub(crate) fn cone_generators(g: &QMatrix) -> ConeGenerators {
    let k = g.cols();
    let lineality = nullspace(g);
    let basis = if lineality.is_empty() {
        QMatrix::identity(k)
    } else {
        rref(g).matrix
    };
    let reduced = if lineality.is_empty() {
        g.clone()
    } else {
        g.mul(&basis.transpose()).expect("row-space basis has matching width")
    };
    let rays = pointed_rays(&reduced)
        .into_iter()
        .map(|u| {
            let mut z = basis.left_mul_vec(&u).expect("basis dimension").into_inner();
            normalize_leading(&mut z);
            QVector::new(z)
        })
        .collect();
    ConeGenerators { lineality, rays }
}

/// Extreme rays of the pointed cone `{u : H u >= 0}`, `H` of full column rank.
fn pointed_rays(h: &QMatrix) -> Vec<Vec<Rational>> {
    let (n, r) = (h.rows(), h.cols());
    if r == 0 {
        return Vec::new();
    }
    let mut selected: Vec<usize> = Vec::with_capacity(r);
    for i in 0..n {
        if selected.len() == r {
            break;
        }
        let mut trial = selected.clone();
        trial.push(i);
        if h.select_rows(&trial).rank() == trial.len() {
            selected = trial;
        }
    }
    assert_eq!(selected.len(), r, "pointed cone requires full column rank");
    let binv = inverse(&h.select_rows(&selected)).expect("selected rows are independent");

    let mut rays: Vec<Ray> = (0..r)
        .map(|j| {
            let mut zeros = ZeroSet::new(n);
            for (pos, &row) in selected.iter().enumerate() {
                if pos != j {
                    zeros.insert(row);
                }
            }
            let mut z = binv.column(j).into_inner();
            normalize_leading(&mut z);
            Ray { z, zeros }
        })
        .collect();

    let mut is_selected = vec![false; n];
    for &s in &selected {
        is_selected[s] = true;
    }
    for i in (0..n).filter(|&i| !is_selected[i]) {
        let row = h.row(i);
        let values: Vec<Rational> = rays.iter().map(|ray| dot(row, &ray.z)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&j| values[j].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&j| values[j].is_negative()).collect();
        if neg.is_empty() {
            for (ray, v) in rays.iter_mut().zip(&values) {
                if v.is_zero() {
                    ray.zeros.insert(i);
                }
            }
            continue;
        }
        let mut fresh = Vec::new();
        for &p in &pos {
            for &q in &neg {
                let common = rays[p].zeros.and(&rays[q].zeros);
                if common.count() + 2 < r {
                    continue;
                }
                let adjacent = rays.iter().enumerate().all(|(j, other)| {
                    j == p || j == q || !common.is_subset_of(&other.zeros)
                });
                if !adjacent {
                    continue;
                }
                // values[p] > 0 > values[q]; the combination is tight at row i.
                let (sp, sq) = (&values[p], -&values[q]);
                let mut z: Vec<Rational> = rays[q]
                    .z
                    .iter()
                    .zip(&rays[p].z)
                    .map(|(a, b)| sp * a + &sq * b)
                    .collect();
                normalize_leading(&mut z);
                let mut zeros = common;
                zeros.insert(i);
                fresh.push(Ray { z, zeros });
            }
        }
        let mut next: Vec<Ray> = Vec::with_capacity(pos.len() + fresh.len());
        for (j, mut ray) in rays.into_iter().enumerate() {
            if values[j].is_negative() {
                continue;
            }
            if values[j].is_zero() {
                ray.zeros.insert(i);
            }
            next.push(ray);
        }
        next.extend(fresh);
        rays = next;
    }
    rays.into_iter().map(|r| r.z).collect()
}

/// Vertices of the polytope described by `h`, sorted. Empty when infeasible.
pub(crate) fn enumerate_vertices(h: &HRep) -> Result<Vec<QVector>> {
    let d = h.dim();
    // Homogenised variables (x, t); the equalities become E x - e t = 0.
    let mut eq_h = QMatrix::zeros(h.eq.rows(), d + 1);
    for r in 0..h.eq.rows() {
        for c in 0..d {
            eq_h.set(r, c, h.eq.get(r, c).clone());
        }
        eq_h.set(r, d, -h.eq_rhs[r].clone());
    }
    let param = if h.eq.rows() == 0 {
        QMatrix::identity(d + 1)
    } else {
        let basis = nullspace(&eq_h);
        if basis.is_empty() {
            return Ok(Vec::new());
        }
        QMatrix::from_rows(d + 1, basis)?.transpose()
    };
    // Rows of G: b t - A x >= 0, and t >= 0.
    let mut g_rows = Vec::with_capacity(h.ineq.rows() + 1);
    for r in 0..h.ineq.rows() {
        let mut row: Vec<Rational> = h.ineq.row(r).iter().map(|a| -a).collect();
        row.push(h.ineq_rhs[r].clone());
        g_rows.push(QVector::new(row));
    }
    g_rows.push(QVector::unit(d + 1, d));
    let g = QMatrix::from_rows(d + 1, g_rows)?.mul(&param)?;
    let gens = cone_generators(&g);

    let lift = |u: &QVector| param.mul_vec(u).expect("parameter dimension");
    let mut vertices = Vec::new();
    let mut recession = false;
    for ray in &gens.rays {
        let xt = lift(ray);
        let t = &xt[d];
        if t.is_positive() {
            vertices.push(xt[..d].iter().map(|x| x / t).collect::<QVector>());
        } else {
            recession = true;
        }
    }
    if vertices.is_empty() {
        return Ok(Vec::new());
    }
    if recession || !gens.lineality.is_empty() {
        return Err(Error::Unbounded);
    }
    vertices.sort();
    vertices.dedup();
    Ok(vertices)
}

/// Irredundant H-representation of the convex hull of `points`.
///
/// Equalities are the reduced row echelon form of the affine hull; each
/// facet row is reduced modulo the equality pivots and scaled to a primitive
/// integer vector. Rows are sorted.
pub(crate) fn hull_facets(dim: usize, points: &[QVector]) -> Result<HRep> {
    if points.is_empty() {
        return Ok(HRep::infeasible(dim));
    }
    // Valid inequalities (a, beta) with a.v <= beta for every point.
    let mut g_rows = Vec::with_capacity(points.len());
    for p in points {
        if p.dim() != dim {
            return Err(crate::error::dim_err(format!(
                "point of dimension {} in a hull of dimension {dim}",
                p.dim()
            )));
        }
        let mut row: Vec<Rational> = p.iter().map(|x| -x).collect();
        row.push(Rational::from_integer(1.into()));
        g_rows.push(QVector::new(row));
    }
    let g = QMatrix::from_rows(dim + 1, g_rows)?;
    let gens = cone_generators(&g);

    let eq_all = if gens.lineality.is_empty() {
        QMatrix::zeros(0, dim + 1)
    } else {
        rref(&QMatrix::from_rows(dim + 1, gens.lineality.clone())?).matrix
    };
    let pivots = rref(&eq_all).pivots;

    let mut facets: Vec<QVector> = Vec::new();
    for ray in &gens.rays {
        let tight = points.iter().any(|p| dot(&ray[..dim], p) == ray[dim]);
        if !tight {
            continue;
        }
        let mut row = ray.clone().into_inner();
        for (k, &pc) in pivots.iter().enumerate() {
            let f = row[pc].clone();
            if f.is_zero() {
                continue;
            }
            for (x, e) in row.iter_mut().zip(eq_all.row(k)) {
                *x -= &f * e;
            }
        }
        if row[..dim].iter().all(Zero::is_zero) {
            continue;
        }
        facets.push(QVector::new(row).primitive());
    }
    facets.sort();
    facets.dedup();

    let split = |rows: Vec<QVector>| -> Result<(QMatrix, QVector)> {
        let rhs: QVector = rows.iter().map(|r| r[dim].clone()).collect();
        let lhs = rows
            .into_iter()
            .map(|r| QVector::new(r[..dim].to_vec()))
            .collect();
        Ok((QMatrix::from_rows(dim, lhs)?, rhs))
    };
    let (ineq, ineq_rhs) = split(facets)?;
    let (eq, eq_rhs) = split(eq_all.to_rows())?;
    HRep::new(ineq, ineq_rhs, eq, eq_rhs)
}
