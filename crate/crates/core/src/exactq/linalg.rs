//! Dense exact vectors, matrices and Gaussian elimination.

use std::fmt;
use std::ops::{Deref, Index};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rational::{format_rational, Rational};
use crate::error::{dim_err, Result};

/// A dense vector of rationals.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct QVector(Vec<Rational>);

impl QVector {
    pub fn new(entries: Vec<Rational>) -> Self {
        QVector(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        QVector(vec![Rational::zero(); dim])
    }

    pub fn unit(dim: usize, at: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[at] = Rational::one();
        v
    }

    pub fn from_i64(entries: &[i64]) -> Self {
        QVector(entries.iter().map(|&x| Rational::from_integer(x.into())).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Rational> {
        self.0
    }

    pub fn dot(&self, other: &[Rational]) -> Rational {
        debug_assert_eq!(self.0.len(), other.len());
        dot(&self.0, other)
    }

    pub fn sum(&self) -> Rational {
        self.0.iter().fold(Rational::zero(), |acc, x| acc + x)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, k: &Rational) -> QVector {
        QVector(self.0.iter().map(|x| x * k).collect())
    }

    pub fn add(&self, other: &QVector) -> QVector {
        QVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &QVector) -> QVector {
        QVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> QVector {
        QVector(self.0.iter().map(|x| -x).collect())
    }

    /// Positive rescaling to a primitive integer vector (gcd 1). Zero stays zero.
    pub fn primitive(&self) -> QVector {
        if self.is_zero() {
            return self.clone();
        }
        let l = self
            .0
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let ints: Vec<BigInt> = self.0.iter().map(|x| (x * &l).to_integer()).collect();
        let g = ints
            .iter()
            .fold(BigInt::zero(), |acc, x| acc.gcd(x));
        QVector(
            ints.into_iter()
                .map(|x| Rational::from_integer(x / &g))
                .collect(),
        )
    }
}

impl Deref for QVector {
    type Target = [Rational];
    fn deref(&self) -> &[Rational] {
        &self.0
    }
}

impl From<Vec<Rational>> for QVector {
    fn from(v: Vec<Rational>) -> Self {
        QVector(v)
    }
}

impl FromIterator<Rational> for QVector {
    fn from_iter<I: IntoIterator<Item = Rational>>(iter: I) -> Self {
        QVector(iter.into_iter().collect())
    }
}

impl fmt::Debug for QVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", format_rational(x))?;
        }
        write!(f, ")")
    }
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    let mut acc = Rational::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_data(rows: usize, cols: usize, data: Vec<Rational>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(dim_err(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(QMatrix { rows, cols, data })
    }

    /// Builds from rows; `cols` is needed to describe a matrix with no rows.
    pub fn from_rows(cols: usize, rows: Vec<QVector>) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let n = rows.len();
        for (i, r) in rows.into_iter().enumerate() {
            if r.dim() != cols {
                return Err(dim_err(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.dim()
                )));
            }
            data.extend(r.into_inner());
        }
        Ok(QMatrix { rows: n, cols, data })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(cols, rows.iter().map(|r| QVector::from_i64(r)).collect())
            .expect("ragged integer matrix")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vec(&self, r: usize) -> QVector {
        QVector::new(self.row(r).to_vec())
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[Rational]> {
        (0..self.rows).map(move |r| self.row(r))
    }

    pub fn column(&self, c: usize) -> QVector {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> QMatrix {
        let mut t = QMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Result<QVector> {
        if x.len() != self.cols {
            return Err(dim_err(format!(
                "matrix with {} columns applied to vector of length {}",
                self.cols,
                x.len()
            )));
        }
        Ok(self.row_iter().map(|r| dot(r, x)).collect())
    }

    /// `xᵀ · self`, i.e. a combination of rows.
    pub fn left_mul_vec(&self, x: &[Rational]) -> Result<QVector> {
        if x.len() != self.rows {
            return Err(dim_err(format!(
                "row combination of {} rows with {} weights",
                self.rows,
                x.len()
            )));
        }
        let mut out = vec![Rational::zero(); self.cols];
        for (w, r) in x.iter().zip(self.row_iter()) {
            if w.is_zero() {
                continue;
            }
            for (o, a) in out.iter_mut().zip(r) {
                if !a.is_zero() {
                    *o += w * a;
                }
            }
        }
        Ok(QVector::new(out))
    }

    pub fn mul(&self, other: &QMatrix) -> Result<QMatrix> {
        if self.cols != other.rows {
            return Err(dim_err(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let row = other.left_mul_vec(self.row(r))?;
            for (c, v) in row.into_inner().into_iter().enumerate() {
                out.set(r, c, v);
            }
        }
        Ok(out)
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &QMatrix) -> Result<QMatrix> {
        if self.cols != other.cols {
            return Err(dim_err(format!(
                "cannot stack {} columns over {}",
                self.cols, other.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(QMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn select_rows(&self, which: &[usize]) -> QMatrix {
        let mut data = Vec::with_capacity(which.len() * self.cols);
        for &r in which {
            data.extend_from_slice(self.row(r));
        }
        QMatrix {
            rows: which.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn to_rows(&self) -> Vec<QVector> {
        (0..self.rows).map(|r| self.row_vec(r)).collect()
    }

    /// True when every column sums to one and every entry is 0 or 1.
    pub fn is_zero_one_column_stochastic(&self) -> bool {
        let binary = self.data.iter().all(|x| x.is_zero() || x.is_one());
        binary
            && (0..self.cols).all(|c| {
                (0..self.rows).filter(|&r| self.get(r, c).is_one()).count() == 1
            })
    }

    pub fn rank(&self) -> usize {
        rref(self).pivots.len()
    }
}

impl Index<(usize, usize)> for QMatrix {
    type Output = Rational;
    fn index(&self, (r, c): (usize, usize)) -> &Rational {
        self.get(r, c)
    }
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "QMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", QVector::new(self.row(r).to_vec()))?;
        }
        write!(f, "]")
    }
}

/// Reduced row echelon form with its pivot columns.
#[derive(Debug, Clone)]
pub struct Rref {
    /// Nonzero rows only, one per pivot.
    pub matrix: QMatrix,
    pub pivots: Vec<usize>,
}

pub fn rref(a: &QMatrix) -> Rref {
    let (rows, cols) = (a.rows(), a.cols());
    let mut m: Vec<Vec<Rational>> = a.to_rows().into_iter().map(QVector::into_inner).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    let matrix = QMatrix::from_rows(cols, m.into_iter().map(QVector::new).collect())
        .expect("rref keeps the column count");
    Rref { matrix, pivots }
}

/// Basis of `{x : A x = 0}`, one vector per free column, in column order.
pub fn nullspace(a: &QMatrix) -> Vec<QVector> {
    let red = rref(a);
    let cols = a.cols();
    let is_pivot: Vec<bool> = {
        let mut v = vec![false; cols];
        for &p in &red.pivots {
            v[p] = true;
        }
        v
    };
    (0..cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut x = QVector::unit(cols, f).into_inner();
            for (i, &p) in red.pivots.iter().enumerate() {
                x[p] = -red.matrix.get(i, f).clone();
            }
            QVector::new(x)
        })
        .collect()
}

/// Outcome of exact Gaussian elimination on `A x = b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinearSolution {
    Unique(QVector),
    /// Solution set `particular + span(nullspace)`.
    Parametric {
        particular: QVector,
        nullspace: Vec<QVector>,
        rank: usize,
    },
    Inconsistent {
        rank: usize,
    },
}

pub fn solve_linear_system(a: &QMatrix, b: &[Rational]) -> Result<LinearSolution> {
    if a.rows() != b.len() {
        return Err(dim_err(format!(
            "system has {} rows but rhs has {} entries",
            a.rows(),
            b.len()
        )));
    }
    let n = a.cols();
    let mut aug = QMatrix::zeros(a.rows(), n + 1);
    for r in 0..a.rows() {
        for c in 0..n {
            aug.set(r, c, a.get(r, c).clone());
        }
        aug.set(r, n, b[r].clone());
    }
    let red = rref(&aug);
    if red.pivots.last() == Some(&n) {
        return Ok(LinearSolution::Inconsistent {
            rank: red.pivots.len() - 1,
        });
    }
    let rank = red.pivots.len();
    let mut x = vec![Rational::zero(); n];
    for (i, &p) in red.pivots.iter().enumerate() {
        x[p] = red.matrix.get(i, n).clone();
    }
    let particular = QVector::new(x);
    if rank == n {
        Ok(LinearSolution::Unique(particular))
    } else {
        Ok(LinearSolution::Parametric {
            particular,
            nullspace: nullspace(a),
            rank,
        })
    }
}

/// Inverse of a square matrix, or `None` when singular.
pub fn inverse(a: &QMatrix) -> Option<QMatrix> {
    let n = a.rows();
    if a.cols() != n {
        return None;
    }
    let mut aug = QMatrix::zeros(n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            aug.set(r, c, a.get(r, c).clone());
        }
        aug.set(r, n + r, Rational::one());
    }
    let red = rref(&aug);
    if red.pivots.len() < n || red.pivots[n - 1] != n - 1 {
        return None;
    }
    let mut inv = QMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            inv.set(r, c, red.matrix.get(r, n + c).clone());
        }
    }
    Some(inv)
}

/// Scales `v` positively so that its first nonzero entry has magnitude one.
pub fn normalize_leading(v: &mut [Rational]) {
    if let Some(lead) = v.iter().find(|x| !x.is_zero()) {
        let s = lead.abs().recip();
        if !s.is_one() {
            for x in v.iter_mut() {
                *x *= &s;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactq::rational::{int, ratio};

    #[test]
    fn identity_system() {
        let a = QMatrix::identity(2);
        let b = [ratio(1, 2), ratio(1, 2)];
        assert_eq!(
            solve_linear_system(&a, &b).unwrap(),
            LinearSolution::Unique(QVector::new(b.to_vec()))
        );
    }

    #[test]
    fn parallel_rows_are_inconsistent() {
        let a = QMatrix::from_i64(&[&[1, 1], &[2, 2]]);
        let b = [int(1), int(3)];
        assert_eq!(
            solve_linear_system(&a, &b).unwrap(),
            LinearSolution::Inconsistent { rank: 1 }
        );
    }

    #[test]
    fn parametric_solution_reports_rank() {
        let a = QMatrix::from_i64(&[&[1, 1], &[2, 2]]);
        let b = [int(1), int(2)];
        match solve_linear_system(&a, &b).unwrap() {
            LinearSolution::Parametric {
                particular,
                nullspace,
                rank,
            } => {
                assert_eq!(rank, 1);
                assert_eq!(nullspace.len(), 1);
                assert_eq!(a.mul_vec(&particular).unwrap().entries(), &b);
                assert!(a.mul_vec(&nullspace[0]).unwrap().is_zero());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = QMatrix::identity(2);
        assert!(solve_linear_system(&a, &[int(1)]).is_err());
        assert!(a.mul_vec(&[int(1)]).is_err());
    }

    #[test]
    fn inverse_round_trip() {
        let a = QMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        let inv = inverse(&a).unwrap();
        assert_eq!(a.mul(&inv).unwrap(), QMatrix::identity(2));
        assert!(inverse(&QMatrix::from_i64(&[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn primitive_scaling() {
        let v = QVector::new(vec![ratio(1, 2), ratio(-1, 3), int(0)]);
        assert_eq!(v.primitive(), QVector::from_i64(&[3, -2, 0]));
    }
}
