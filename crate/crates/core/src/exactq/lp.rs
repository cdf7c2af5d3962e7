//! Two-phase dense tableau simplex over exact rationals.
//!
//! Pivoting follows Bland's rule (lowest-index entering column, lowest-index
//! basic variable among tied ratios), so the method terminates without any
//! perturbation. Infeasible programs return Farkas multipliers read off the
//! phase-one duals.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::linalg::{dot, QMatrix, QVector};
use super::rational::Rational;
use crate::error::{dim_err, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sense {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

impl Sense {
    /// Sign that turns a row of this sense into a `<=` row (equalities keep +1).
    fn le_sign(self) -> i32 {
        match self {
            Sense::Ge => -1,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarBound {
    NonNegative,
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpProblem {
    pub objective: QVector,
    pub matrix: QMatrix,
    pub rhs: QVector,
    pub senses: Vec<Sense>,
    pub bounds: Vec<VarBound>,
    pub direction: Direction,
}

impl LpProblem {
    pub fn new(
        objective: QVector,
        matrix: QMatrix,
        rhs: QVector,
        senses: Vec<Sense>,
        bounds: Vec<VarBound>,
        direction: Direction,
    ) -> Result<Self> {
        let p = LpProblem {
            objective,
            matrix,
            rhs,
            senses,
            bounds,
            direction,
        };
        p.check_dims()?;
        Ok(p)
    }

    /// Pure feasibility problem (zero objective).
    pub fn feasibility(
        matrix: QMatrix,
        rhs: QVector,
        senses: Vec<Sense>,
        bounds: Vec<VarBound>,
    ) -> Result<Self> {
        let n = matrix.cols();
        Self::new(
            QVector::zeros(n),
            matrix,
            rhs,
            senses,
            bounds,
            Direction::Minimize,
        )
    }

    pub fn num_vars(&self) -> usize {
        self.matrix.cols()
    }

    pub fn num_rows(&self) -> usize {
        self.matrix.rows()
    }

    fn check_dims(&self) -> Result<()> {
        let (m, n) = (self.matrix.rows(), self.matrix.cols());
        if self.rhs.dim() != m {
            return Err(dim_err(format!("{m} rows but rhs of length {}", self.rhs.dim())));
        }
        if self.senses.len() != m {
            return Err(dim_err(format!("{m} rows but {} senses", self.senses.len())));
        }
        if self.objective.dim() != n {
            return Err(dim_err(format!(
                "{n} variables but objective of length {}",
                self.objective.dim()
            )));
        }
        if self.bounds.len() != n {
            return Err(dim_err(format!("{n} variables but {} bounds", self.bounds.len())));
        }
        Ok(())
    }

    /// Exact feasibility of a candidate point.
    pub fn is_feasible_point(&self, x: &[Rational]) -> bool {
        if x.len() != self.num_vars() {
            return false;
        }
        let bounds_ok = self
            .bounds
            .iter()
            .zip(x)
            .all(|(b, v)| *b == VarBound::Free || !v.is_negative());
        bounds_ok
            && (0..self.num_rows()).all(|i| {
                let lhs = dot(self.matrix.row(i), x);
                match self.senses[i] {
                    Sense::Le => lhs <= self.rhs[i],
                    Sense::Eq => lhs == self.rhs[i],
                    Sense::Ge => lhs >= self.rhs[i],
                }
            })
    }
}

/// Farkas multipliers proving infeasibility.
///
/// Every row is read in `<=` orientation (`>=` rows negated); nonnegative
/// variables contribute the implicit rows `-x_j <= 0`. Multipliers on
/// inequality rows and bounds are nonnegative, the combined row is the zero
/// vector and the combined right-hand side is strictly negative, so the
/// system implies `0 <= negative`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub row_multipliers: QVector,
    pub bound_multipliers: QVector,
}

impl FarkasCertificate {
    /// Combined right-hand side `Σ λ_i σ_i b_i` (negative for a valid certificate).
    pub fn combined_rhs(&self, p: &LpProblem) -> Rational {
        (0..p.num_rows()).fold(Rational::zero(), |acc, i| {
            acc + &self.row_multipliers[i] * &p.rhs[i] * Rational::from_integer(p.senses[i].le_sign().into())
        })
    }

    pub fn verify(&self, p: &LpProblem) -> bool {
        if self.row_multipliers.dim() != p.num_rows() || self.bound_multipliers.dim() != p.num_vars()
        {
            return false;
        }
        let signs_ok = (0..p.num_rows())
            .all(|i| p.senses[i] == Sense::Eq || !self.row_multipliers[i].is_negative());
        let bounds_ok = (0..p.num_vars()).all(|j| match p.bounds[j] {
            VarBound::Free => self.bound_multipliers[j].is_zero(),
            VarBound::NonNegative => !self.bound_multipliers[j].is_negative(),
        });
        if !signs_ok || !bounds_ok {
            return false;
        }
        let oriented: Vec<Rational> = (0..p.num_rows())
            .map(|i| &self.row_multipliers[i] * Rational::from_integer(p.senses[i].le_sign().into()))
            .collect();
        let combined = match p.matrix.left_mul_vec(&oriented) {
            Ok(c) => c,
            Err(_) => return false,
        };
        let row_zero = combined
            .iter()
            .zip(self.bound_multipliers.iter())
            .all(|(c, mu)| (c - mu).is_zero());
        row_zero && self.combined_rhs(p).is_negative()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rational, solution: QVector },
    Infeasible(FarkasCertificate),
    Unbounded,
}

impl LpOutcome {
    pub fn is_infeasible(&self) -> bool {
        matches!(self, LpOutcome::Infeasible(_))
    }

    pub fn optimal_value(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }

    /// Re-checks the outcome exactly: primal feasibility and attained value
    /// for optima, certificate validity for infeasibility.
    pub fn verify(&self, p: &LpProblem) -> bool {
        match self {
            LpOutcome::Optimal { value, solution } => {
                p.is_feasible_point(solution) && p.objective.dot(solution) == *value
            }
            LpOutcome::Infeasible(cert) => cert.verify(p),
            LpOutcome::Unbounded => true,
        }
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    /// Reduced costs; the last entry holds minus the objective value.
    obj: Vec<Rational>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> &Rational {
        &self.rows[r][self.ncols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        if !inv.is_one() {
            for x in self.rows[r].iter_mut() {
                if !x.is_zero() {
                    *x *= &inv;
                }
            }
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let support: Vec<usize> = (0..pivot_row.len())
            .filter(|&j| !pivot_row[j].is_zero())
            .collect();
        let eliminate = |row: &mut Vec<Rational>| {
            if row[c].is_zero() {
                return;
            }
            let f = row[c].clone();
            for &j in &support {
                row[j] -= &f * &pivot_row[j];
            }
        };
        for row in self.rows.iter_mut() {
            if !row.is_empty() {
                eliminate(row);
            }
        }
        eliminate(&mut self.obj);
        self.rows[r] = pivot_row;
        self.basis[r] = c;
    }

    /// Runs Bland-rule simplex over columns `0..limit`. `Err(col)` reports an
    /// unbounded entering column.
    fn run(&mut self, limit: usize) -> std::result::Result<(), usize> {
        loop {
            let Some(c) = (0..limit).find(|&j| self.obj[j].is_negative()) else {
                return Ok(());
            };
            let mut best: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(r) / a;
                let better = match &best {
                    None => true,
                    Some((br, bv)) => {
                        ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br])
                    }
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return Err(c),
            }
        }
    }

    fn set_costs(&mut self, costs: &[Rational]) {
        let mut obj: Vec<Rational> = costs.to_vec();
        obj.push(Rational::zero());
        for (r, row) in self.rows.iter().enumerate() {
            let cb = &costs[self.basis[r]];
            if cb.is_zero() {
                continue;
            }
            for (o, a) in obj.iter_mut().zip(row) {
                if !a.is_zero() {
                    *o -= cb * a;
                }
            }
        }
        self.obj = obj;
    }
}

/// Solves `problem` exactly.
pub fn lp_solve(problem: &LpProblem) -> Result<LpOutcome> {
    problem.check_dims()?;
    let m = problem.num_rows();
    let n = problem.num_vars();

    // Structural columns: (variable, sign).
    let mut structural: Vec<(usize, bool)> = Vec::with_capacity(n);
    for j in 0..n {
        structural.push((j, true));
        if problem.bounds[j] == VarBound::Free {
            structural.push((j, false));
        }
    }
    let ns = structural.len();
    let slack_of: Vec<Option<usize>> = {
        let mut next = ns;
        problem
            .senses
            .iter()
            .map(|s| match s {
                Sense::Eq => None,
                _ => {
                    next += 1;
                    Some(next - 1)
                }
            })
            .collect()
    };
    let num_slack = slack_of.iter().flatten().count();
    let base_cols = ns + num_slack;

    // Row orientation flips so that every rhs is nonnegative.
    let flip: Vec<bool> = problem.rhs.iter().map(|b| b.is_negative()).collect();
    let needs_art: Vec<bool> = (0..m)
        .map(|i| match problem.senses[i] {
            Sense::Eq => true,
            Sense::Le => flip[i],
            Sense::Ge => !flip[i],
        })
        .collect();
    let num_art = needs_art.iter().filter(|&&b| b).count();
    let ncols = base_cols + num_art;

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut initial_col = Vec::with_capacity(m);
    let mut next_art = base_cols;
    for i in 0..m {
        let mut row = vec![Rational::zero(); ncols + 1];
        let a = problem.matrix.row(i);
        for (c, &(j, pos)) in structural.iter().enumerate() {
            if !a[j].is_zero() {
                row[c] = if pos { a[j].clone() } else { -a[j].clone() };
            }
        }
        if let Some(s) = slack_of[i] {
            row[s] = match problem.senses[i] {
                Sense::Le => Rational::one(),
                _ => -Rational::one(),
            };
        }
        row[ncols] = problem.rhs[i].clone();
        if flip[i] {
            for x in row.iter_mut() {
                *x = -std::mem::take(x);
            }
        }
        let col = if needs_art[i] {
            row[next_art] = Rational::one();
            next_art += 1;
            next_art - 1
        } else {
            slack_of[i].expect("rows without artificials have a slack")
        };
        basis.push(col);
        initial_col.push(col);
        rows.push(row);
    }

    let mut tab = Tableau {
        rows,
        obj: Vec::new(),
        basis,
        ncols,
    };

    // Phase one: minimise the sum of artificials.
    let phase1_costs: Vec<Rational> = (0..ncols)
        .map(|c| if c >= base_cols { Rational::one() } else { Rational::zero() })
        .collect();
    tab.set_costs(&phase1_costs);
    tab.run(ncols)
        .expect("phase one is bounded below by zero");

    if !tab.obj[ncols].is_zero() {
        // y_i = c0_i - d(c0_i) over the identity columns of the start basis.
        let mut row_multipliers = Vec::with_capacity(m);
        for i in 0..m {
            let c0 = &phase1_costs[initial_col[i]];
            let y = c0 - &tab.obj[initial_col[i]];
            let w = if flip[i] { -y } else { y };
            let sigma = Rational::from_integer(problem.senses[i].le_sign().into());
            row_multipliers.push(-w * sigma);
        }
        let oriented: Vec<Rational> = (0..m)
            .map(|i| &row_multipliers[i] * Rational::from_integer(problem.senses[i].le_sign().into()))
            .collect();
        let combined = problem.matrix.left_mul_vec(&oriented)?;
        let bound_multipliers = (0..n)
            .map(|j| match problem.bounds[j] {
                VarBound::NonNegative => combined[j].clone(),
                VarBound::Free => Rational::zero(),
            })
            .collect();
        let cert = FarkasCertificate {
            row_multipliers: QVector::new(row_multipliers),
            bound_multipliers,
        };
        debug_assert!(cert.verify(problem), "phase-one duals must certify infeasibility");
        return Ok(LpOutcome::Infeasible(cert));
    }

    // Drive remaining (zero-level) artificials out of the basis, then drop
    // artificial columns and rows that turned out to be redundant.
    for r in 0..tab.rows.len() {
        if tab.basis[r] >= base_cols {
            if let Some(c) = (0..base_cols).find(|&c| !tab.rows[r][c].is_zero()) {
                tab.pivot(r, c);
            }
        }
    }
    let keep: Vec<usize> = (0..tab.rows.len())
        .filter(|&r| tab.basis[r] < base_cols)
        .collect();
    tab.rows = keep
        .iter()
        .map(|&r| {
            let mut row = std::mem::take(&mut tab.rows[r]);
            let rhs = row.pop().expect("row has rhs");
            row.truncate(base_cols);
            row.push(rhs);
            row
        })
        .collect();
    tab.basis = keep.iter().map(|&r| tab.basis[r]).collect();
    tab.ncols = base_cols;

    // Phase two.
    let sign = match problem.direction {
        Direction::Minimize => Rational::one(),
        Direction::Maximize => -Rational::one(),
    };
    let mut costs = vec![Rational::zero(); base_cols];
    for (c, &(j, pos)) in structural.iter().enumerate() {
        let cj = &problem.objective[j] * &sign;
        costs[c] = if pos { cj } else { -cj };
    }
    tab.set_costs(&costs);
    if tab.run(base_cols).is_err() {
        return Ok(LpOutcome::Unbounded);
    }

    let mut x = vec![Rational::zero(); n];
    for (r, &b) in tab.basis.iter().enumerate() {
        if b < ns {
            let (j, pos) = structural[b];
            let v = tab.rows[r][base_cols].clone();
            if pos {
                x[j] += v;
            } else {
                x[j] -= v;
            }
        }
    }
    let value = problem.objective.dot(&x);
    Ok(LpOutcome::Optimal {
        value,
        solution: QVector::new(x),
    })
}
