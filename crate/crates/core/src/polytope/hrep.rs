use num_traits::{Signed, Zero};

use crate::error::{dim_err, Result};
use crate::exactq::linalg::dot;
use crate::exactq::{
    lp_solve, Direction, LpOutcome, LpProblem, QMatrix, QVector, Rational, Sense, VarBound,
};

/// `{x : ineq · x <= ineq_rhs, eq · x = eq_rhs}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HRep {
    pub ineq: QMatrix,
    pub ineq_rhs: QVector,
    pub eq: QMatrix,
    pub eq_rhs: QVector,
}

/// Reference to one row of an [`HRep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RowRef {
    Ineq(usize),
    Eq(usize),
}

/// Farkas multipliers expressed on the rows of an [`HRep`]: nonnegative on
/// inequalities, free on equalities, with `Σ λ a + Σ ν e = 0` and
/// `Σ λ b + Σ ν f < 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HRepFarkas {
    pub ineq_multipliers: QVector,
    pub eq_multipliers: QVector,
}

impl HRepFarkas {
    pub fn verify(&self, h: &HRep) -> bool {
        if self.ineq_multipliers.dim() != h.ineq.rows() || self.eq_multipliers.dim() != h.eq.rows()
        {
            return false;
        }
        if self.ineq_multipliers.iter().any(Signed::is_negative) {
            return false;
        }
        let a = h.ineq.left_mul_vec(&self.ineq_multipliers).expect("dims checked");
        let e = h.eq.left_mul_vec(&self.eq_multipliers).expect("dims checked");
        let rhs = self.ineq_multipliers.dot(&h.ineq_rhs) + self.eq_multipliers.dot(&h.eq_rhs);
        a.add(&e).is_zero() && rhs.is_negative()
    }

    /// Rows carrying a nonzero multiplier.
    pub fn support(&self) -> Vec<RowRef> {
        let ineq = (0..self.ineq_multipliers.dim())
            .filter(|&i| !self.ineq_multipliers[i].is_zero())
            .map(RowRef::Ineq);
        let eq = (0..self.eq_multipliers.dim())
            .filter(|&i| !self.eq_multipliers[i].is_zero())
            .map(RowRef::Eq);
        ineq.chain(eq).collect()
    }
}

/// Result of optimising a linear functional over an [`HRep`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HOptimum {
    Optimal { value: Rational, point: QVector },
    Infeasible(HRepFarkas),
    Unbounded,
}

impl HRep {
    pub fn new(ineq: QMatrix, ineq_rhs: QVector, eq: QMatrix, eq_rhs: QVector) -> Result<Self> {
        if ineq.cols() != eq.cols() {
            return Err(dim_err(format!(
                "inequalities have {} columns, equalities {}",
                ineq.cols(),
                eq.cols()
            )));
        }
        if ineq.rows() != ineq_rhs.dim() || eq.rows() != eq_rhs.dim() {
            return Err(dim_err("row count and rhs length differ"));
        }
        Ok(HRep {
            ineq,
            ineq_rhs,
            eq,
            eq_rhs,
        })
    }

    /// The probability simplex `{x >= 0, Σ x = 1}` in dimension `d`.
    pub fn simplex(d: usize) -> Self {
        let mut ineq = QMatrix::zeros(d, d);
        for j in 0..d {
            ineq.set(j, j, -Rational::from_integer(1.into()));
        }
        let eq = QMatrix::from_rows(d, vec![(0..d).map(|_| Rational::from_integer(1.into())).collect()])
            .expect("one row");
        HRep {
            ineq,
            ineq_rhs: QVector::zeros(d),
            eq,
            eq_rhs: QVector::from_i64(&[1]),
        }
    }

    /// A canonical empty set: the single row `0 <= -1`.
    pub fn infeasible(d: usize) -> Self {
        HRep {
            ineq: QMatrix::zeros(1, d),
            ineq_rhs: QVector::from_i64(&[-1]),
            eq: QMatrix::zeros(0, d),
            eq_rhs: QVector::zeros(0),
        }
    }

    pub fn dim(&self) -> usize {
        self.ineq.cols()
    }

    pub fn num_rows(&self) -> usize {
        self.ineq.rows() + self.eq.rows()
    }

    pub fn row(&self, r: RowRef) -> (&[Rational], &Rational) {
        match r {
            RowRef::Ineq(i) => (self.ineq.row(i), &self.ineq_rhs[i]),
            RowRef::Eq(i) => (self.eq.row(i), &self.eq_rhs[i]),
        }
    }

    /// First violated row in inequality-then-equality order.
    pub fn violated_row(&self, x: &[Rational]) -> Option<RowRef> {
        (0..self.ineq.rows())
            .find(|&i| dot(self.ineq.row(i), x) > self.ineq_rhs[i])
            .map(RowRef::Ineq)
            .or_else(|| {
                (0..self.eq.rows())
                    .find(|&i| dot(self.eq.row(i), x) != self.eq_rhs[i])
                    .map(RowRef::Eq)
            })
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        x.len() == self.dim() && self.violated_row(x).is_none()
    }

    /// Concatenation of both row systems (`self` first).
    pub fn concat(&self, other: &HRep) -> Result<HRep> {
        HRep::new(
            self.ineq.vstack(&other.ineq)?,
            self.ineq_rhs.iter().chain(other.ineq_rhs.iter()).cloned().collect(),
            self.eq.vstack(&other.eq)?,
            self.eq_rhs.iter().chain(other.eq_rhs.iter()).cloned().collect(),
        )
    }

    /// `{p : self contains m · p}`.
    pub fn pullback(&self, m: &QMatrix) -> Result<HRep> {
        if m.rows() != self.dim() {
            return Err(dim_err(format!(
                "pullback of a {}-dimensional set along a map into dimension {}",
                self.dim(),
                m.rows()
            )));
        }
        HRep::new(
            self.ineq.mul(m)?,
            self.ineq_rhs.clone(),
            self.eq.mul(m)?,
            self.eq_rhs.clone(),
        )
    }

    pub fn select(&self, ineq_rows: &[usize], eq_rows: &[usize]) -> HRep {
        HRep {
            ineq: self.ineq.select_rows(ineq_rows),
            ineq_rhs: ineq_rows.iter().map(|&i| self.ineq_rhs[i].clone()).collect(),
            eq: self.eq.select_rows(eq_rows),
            eq_rhs: eq_rows.iter().map(|&i| self.eq_rhs[i].clone()).collect(),
        }
    }

    /// Optimises `objective · x` over the set.
    ///
    /// Rows of the form `-c x_j <= 0` are handed to the solver as variable
    /// bounds; Farkas multipliers are mapped back onto the original rows.
    pub fn optimize(&self, objective: &[Rational], direction: Direction) -> Result<HOptimum> {
        let d = self.dim();
        if objective.len() != d {
            return Err(dim_err(format!(
                "objective of length {} over dimension {d}",
                objective.len()
            )));
        }
        let mut bound_row: Vec<Option<usize>> = vec![None; d];
        let mut lp_rows: Vec<usize> = Vec::new();
        for i in 0..self.ineq.rows() {
            match nonneg_var(self.ineq.row(i), &self.ineq_rhs[i]) {
                Some(j) if bound_row[j].is_none() => bound_row[j] = Some(i),
                _ => lp_rows.push(i),
            }
        }
        let matrix = self
            .ineq
            .select_rows(&lp_rows)
            .vstack(&self.eq)?;
        let rhs: QVector = lp_rows
            .iter()
            .map(|&i| self.ineq_rhs[i].clone())
            .chain(self.eq_rhs.iter().cloned())
            .collect();
        let senses = std::iter::repeat(Sense::Le)
            .take(lp_rows.len())
            .chain(std::iter::repeat(Sense::Eq).take(self.eq.rows()))
            .collect();
        let bounds = bound_row
            .iter()
            .map(|b| if b.is_some() { VarBound::NonNegative } else { VarBound::Free })
            .collect();
        let problem = LpProblem::new(
            QVector::new(objective.to_vec()),
            matrix,
            rhs,
            senses,
            bounds,
            direction,
        )?;
        Ok(match lp_solve(&problem)? {
            LpOutcome::Optimal { value, solution } => HOptimum::Optimal {
                value,
                point: solution,
            },
            LpOutcome::Unbounded => HOptimum::Unbounded,
            LpOutcome::Infeasible(cert) => {
                let mut ineq_m = vec![Rational::zero(); self.ineq.rows()];
                for (k, &i) in lp_rows.iter().enumerate() {
                    ineq_m[i] = cert.row_multipliers[k].clone();
                }
                for (j, b) in bound_row.iter().enumerate() {
                    if let Some(i) = b {
                        // Row i reads -c x_j <= 0; the bound reads -x_j <= 0.
                        let c = -self.ineq.get(*i, j).clone();
                        ineq_m[*i] = &cert.bound_multipliers[j] / c;
                    }
                }
                let eq_m = cert.row_multipliers[lp_rows.len()..].to_vec();
                let out = HRepFarkas {
                    ineq_multipliers: QVector::new(ineq_m),
                    eq_multipliers: QVector::new(eq_m),
                };
                debug_assert!(out.verify(self));
                HOptimum::Infeasible(out)
            }
        })
    }

    /// `Some(certificate)` when the system has no solution.
    pub fn infeasibility(&self) -> Result<Option<HRepFarkas>> {
        match self.optimize(&vec![Rational::zero(); self.dim()], Direction::Minimize)? {
            HOptimum::Infeasible(f) => Ok(Some(f)),
            _ => Ok(None),
        }
    }

    /// Drops redundant rows, returning the reduced system and the kept
    /// inequality and equality indices.
    ///
    /// Inequality `i` is dropped iff maximising its left side over the rows
    /// still kept (all equalities included) stays within its bound; rows are
    /// visited in order. Equalities linearly dependent on earlier kept
    /// equalities are dropped. The system must be feasible.
    pub fn remove_redundant(&self) -> Result<(HRep, Vec<usize>, Vec<usize>)> {
        let d = self.dim();
        let mut eq_keep: Vec<usize> = Vec::new();
        let mut rank = 0;
        for i in 0..self.eq.rows() {
            let mut trial = eq_keep.clone();
            trial.push(i);
            let aug = augmented(&self.eq.select_rows(&trial), &trial.iter().map(|&k| self.eq_rhs[k].clone()).collect::<Vec<_>>());
            let r = aug.rank();
            if r > rank {
                rank = r;
                eq_keep = trial;
            }
        }
        let mut ineq_keep: Vec<usize> = (0..self.ineq.rows()).collect();
        let mut pos = 0;
        while pos < ineq_keep.len() {
            let i = ineq_keep[pos];
            let others: Vec<usize> = ineq_keep.iter().copied().filter(|&k| k != i).collect();
            let sub = self.select(&others, &eq_keep);
            debug_assert_eq!(sub.dim(), d);
            let redundant = match sub.optimize(self.ineq.row(i), Direction::Maximize)? {
                HOptimum::Optimal { value, .. } => value <= self.ineq_rhs[i],
                HOptimum::Unbounded => false,
                HOptimum::Infeasible(_) => true,
            };
            if redundant {
                ineq_keep.remove(pos);
            } else {
                pos += 1;
            }
        }
        Ok((self.select(&ineq_keep, &eq_keep), ineq_keep, eq_keep))
    }
}

fn augmented(a: &QMatrix, b: &[Rational]) -> QMatrix {
    let mut m = QMatrix::zeros(a.rows(), a.cols() + 1);
    for r in 0..a.rows() {
        for c in 0..a.cols() {
            m.set(r, c, a.get(r, c).clone());
        }
        m.set(r, a.cols(), b[r].clone());
    }
    m
}

/// `Some(j)` when the row reads `-c x_j <= 0` with `c > 0`.
fn nonneg_var(row: &[Rational], rhs: &Rational) -> Option<usize> {
    if !rhs.is_zero() {
        return None;
    }
    let mut nz = row.iter().enumerate().filter(|(_, a)| !a.is_zero());
    let (j, a) = nz.next()?;
    if nz.next().is_none() && a.is_negative() {
        Some(j)
    } else {
        None
    }
}
