//! Finite product spaces `Yⁿ`, the canonical space `Ω = Y^T`, and exact
//! matrices of the coordinate maps, permutations and marginalisations.
//!
//! Points of `Yⁿ` are indexed row-major with the first coordinate most
//! significant: `(y_1, …, y_n) ↦ Σ pos(y_j)·m^(n−j)`. The same convention
//! indexes `Ω`, whose coordinates follow the order of `T`. Every serialized
//! measure vector uses it.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactq::{QMatrix, QVector, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessSpace {
    index_labels: Vec<String>,
    outcome_labels: Vec<String>,
}

fn check_unique(what: &str, labels: &[String]) -> Result<()> {
    let mut seen = HashSet::new();
    for l in labels {
        if !seen.insert(l) {
            return Err(Error::InvalidInput(format!("duplicate {what} label {l:?}")));
        }
    }
    Ok(())
}

impl ProcessSpace {
    /// `index_labels` is `T`, `outcome_labels` is `Y`; `|Y| >= 2`, `|T| >= 1`.
    pub fn new(index_labels: Vec<String>, outcome_labels: Vec<String>) -> Result<Self> {
        if outcome_labels.len() < 2 {
            return Err(Error::InvalidInput("Y needs at least two outcomes".into()));
        }
        if index_labels.is_empty() {
            return Err(Error::InvalidInput("T needs at least one index".into()));
        }
        check_unique("index", &index_labels)?;
        check_unique("outcome", &outcome_labels)?;
        let space = ProcessSpace {
            index_labels,
            outcome_labels,
        };
        space
            .outcomes()
            .checked_pow(space.indices() as u32)
            .ok_or_else(|| Error::InvalidInput("|Y|^|T| overflows".into()))?;
        Ok(space)
    }

    /// Convenience constructor from string slices.
    pub fn from_labels(t: &[&str], y: &[&str]) -> Result<Self> {
        Self::new(
            t.iter().map(|s| s.to_string()).collect(),
            y.iter().map(|s| s.to_string()).collect(),
        )
    }

    pub fn index_labels(&self) -> &[String] {
        &self.index_labels
    }

    pub fn outcome_labels(&self) -> &[String] {
        &self.outcome_labels
    }

    /// `m = |Y|`.
    pub fn outcomes(&self) -> usize {
        self.outcome_labels.len()
    }

    /// `k = |T|`.
    pub fn indices(&self) -> usize {
        self.index_labels.len()
    }

    /// `m^n`.
    pub fn product_dim(&self, n: usize) -> usize {
        self.outcomes().pow(n as u32)
    }

    /// `m^k`, the dimension of measures on `Ω`.
    pub fn omega_dim(&self) -> usize {
        self.product_dim(self.indices())
    }

    pub fn index_position(&self, label: &str) -> Result<usize> {
        self.index_labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::InvalidInput(format!("unknown index label {label:?}")))
    }

    pub fn outcome_position(&self, label: &str) -> Result<usize> {
        self.outcome_labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::InvalidInput(format!("unknown outcome label {label:?}")))
    }

    pub fn tuple(&self, labels: &[&str]) -> Result<IndexTuple> {
        let pos = labels
            .iter()
            .map(|l| self.index_position(l))
            .collect::<Result<Vec<_>>>()?;
        IndexTuple::new(pos, self.indices())
    }

    pub fn tuple_labels(&self, t: &IndexTuple) -> Vec<String> {
        t.positions()
            .iter()
            .map(|&p| self.index_labels[p].clone())
            .collect()
    }

    /// One ascending tuple per nonempty subset of `T`, in canonical order.
    pub fn canonical_tuples(&self) -> Vec<IndexTuple> {
        let k = self.indices();
        let mut out: Vec<IndexTuple> = (1u64..(1u64 << k))
            .map(|mask| IndexTuple {
                positions: (0..k).filter(|&i| mask & (1 << i) != 0).collect(),
            })
            .collect();
        out.sort();
        out
    }

    /// The tuple enumerating all of `T` in order.
    pub fn full_tuple(&self) -> IndexTuple {
        IndexTuple {
            positions: (0..self.indices()).collect(),
        }
    }

    /// Row-major index of an outcome tuple given by labels.
    pub fn product_index(&self, outcomes: &[&str]) -> Result<usize> {
        let pos = outcomes
            .iter()
            .map(|l| self.outcome_position(l))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.product_index_of(&pos))
    }

    /// Row-major index of an outcome tuple given by positions in `Y`.
    pub fn product_index_of(&self, positions: &[usize]) -> usize {
        let m = self.outcomes();
        positions.iter().fold(0, |acc, &p| acc * m + p)
    }

    /// Inverse of [`ProcessSpace::product_index_of`] for tuples of length `n`.
    pub fn decode(&self, mut index: usize, n: usize) -> Vec<usize> {
        let m = self.outcomes();
        let mut out = vec![0; n];
        for j in (0..n).rev() {
            out[j] = index % m;
            index /= m;
        }
        out
    }

    /// Matrix of the pushforward under `ω ↦ (ω(t_1), …, ω(t_n))`.
    ///
    /// Entry `[x][ω]` is 1 iff `ω(t_j) = x_j` for every position `j`.
    pub fn phi_matrix(&self, alpha: &IndexTuple) -> Result<QMatrix> {
        self.check_tuple(alpha)?;
        let k = self.indices();
        let rows = self.product_dim(alpha.len());
        let cols = self.omega_dim();
        let mut m = QMatrix::zeros(rows, cols);
        for w in 0..cols {
            let omega = self.decode(w, k);
            let x: Vec<usize> = alpha.positions().iter().map(|&t| omega[t]).collect();
            m.set(self.product_index_of(&x), w, Rational::one());
        }
        Ok(m)
    }

    /// Matrix of the pushforward under `f_π(y_1, …, y_n) = (y_{π(1)}, …, y_{π(n)})`.
    pub fn permutation_matrix(&self, n: usize, pi: &Permutation) -> Result<QMatrix> {
        if pi.len() != n {
            return Err(Error::InvalidInput(format!(
                "permutation of length {} used on {n} coordinates",
                pi.len()
            )));
        }
        let d = self.product_dim(n);
        let mut m = QMatrix::zeros(d, d);
        for idx in 0..d {
            let y = self.decode(idx, n);
            let image: Vec<usize> = pi.as_slice().iter().map(|&p| y[p]).collect();
            m.set(self.product_index_of(&image), idx, Rational::one());
        }
        Ok(m)
    }

    /// Matrix summing out the trailing `total - keep` coordinates.
    pub fn marginal_matrix(&self, total: usize, keep: usize) -> Result<QMatrix> {
        if keep == 0 || keep > total {
            return Err(Error::InvalidInput(format!(
                "cannot marginalise {total} coordinates onto {keep}"
            )));
        }
        let rows = self.product_dim(keep);
        let block = self.product_dim(total - keep);
        let mut m = QMatrix::zeros(rows, rows * block);
        for i in 0..rows {
            for r in 0..block {
                m.set(i, i * block + r, Rational::one());
            }
        }
        Ok(m)
    }

    /// The matrix taking the law of `alpha` to the law of `beta`, for
    /// `beta ⊆ alpha` as sets: marginal · permutation aligning `beta` first.
    pub fn restriction_matrix(&self, alpha: &IndexTuple, beta: &IndexTuple) -> Result<QMatrix> {
        let pi = alpha.alignment(beta)?;
        let perm = self.permutation_matrix(alpha.len(), &pi)?;
        self.marginal_matrix(alpha.len(), beta.len())?.mul(&perm)
    }

    fn check_tuple(&self, t: &IndexTuple) -> Result<()> {
        if t.positions().iter().any(|&p| p >= self.indices()) {
            return Err(Error::InvalidInput(format!(
                "tuple {t} refers outside T"
            )));
        }
        Ok(())
    }

    pub fn tuple_display(&self, t: &IndexTuple) -> String {
        format!("({})", self.tuple_labels(t).join(","))
    }
}

/// Finite sequence of pairwise distinct elements of `T`, by position.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndexTuple {
    positions: Vec<usize>,
}

impl IndexTuple {
    pub fn new(positions: Vec<usize>, k: usize) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::InvalidInput("empty index tuple".into()));
        }
        let mut seen = vec![false; k];
        for &p in &positions {
            if p >= k {
                return Err(Error::InvalidInput(format!("index position {p} outside T")));
            }
            if std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidInput(
                    "index tuples must have pairwise distinct entries".into(),
                ));
            }
        }
        Ok(IndexTuple { positions })
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Ascending order of `T`.
    pub fn is_canonical(&self) -> bool {
        self.positions.windows(2).all(|w| w[0] < w[1])
    }

    pub fn canonical(&self) -> IndexTuple {
        let mut positions = self.positions.clone();
        positions.sort_unstable();
        IndexTuple { positions }
    }

    /// `(t_{π(1)}, …, t_{π(n)})`.
    pub fn permuted(&self, pi: &Permutation) -> Result<IndexTuple> {
        if pi.len() != self.len() {
            return Err(Error::InvalidInput("permutation length differs from tuple".into()));
        }
        Ok(IndexTuple {
            positions: pi.as_slice().iter().map(|&p| self.positions[p]).collect(),
        })
    }

    /// `self ≥ other`: the elements of `other` all occur in `self`.
    pub fn dominates(&self, other: &IndexTuple) -> bool {
        other.positions.iter().all(|p| self.positions.contains(p))
    }

    pub fn same_elements(&self, other: &IndexTuple) -> bool {
        self.len() == other.len() && self.dominates(other)
    }

    /// The permutation `π` of `self` whose first `|beta|` entries are
    /// `beta`, followed by the remaining positions in their original order.
    pub fn alignment(&self, beta: &IndexTuple) -> Result<Permutation> {
        let mut out = Vec::with_capacity(self.len());
        for b in &beta.positions {
            let j = self
                .positions
                .iter()
                .position(|p| p == b)
                .ok_or_else(|| Error::InvalidInput(format!("{beta} is not contained in {self}")))?;
            out.push(j);
        }
        for j in 0..self.len() {
            if !out.contains(&j) {
                out.push(j);
            }
        }
        Permutation::new(out)
    }

    /// The permutation `π` with `self.permuted(π) == other`.
    pub fn permutation_to(&self, other: &IndexTuple) -> Result<Permutation> {
        if !self.same_elements(other) {
            return Err(Error::InvalidInput(format!("{other} is not a permutation of {self}")));
        }
        self.alignment(other)
    }
}

impl Ord for IndexTuple {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.positions.cmp(&other.positions))
    }
}

impl PartialOrd for IndexTuple {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for IndexTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.positions.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A permutation of `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidInput(format!("{images:?} is not a permutation")));
            }
        }
        Ok(Permutation(images))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (j, &p) in self.0.iter().enumerate() {
            inv[p] = j;
        }
        Permutation(inv)
    }

    /// All permutations of `0..n` in lexicographic order.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..n).collect();
        loop {
            out.push(Permutation(cur.clone()));
            // Next lexicographic permutation.
            let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
                return out;
            };
            let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).expect("exists");
            cur.swap(i, j);
            cur[i + 1..].reverse();
        }
    }
}

/// A probability vector on a finite product space: nonnegative entries
/// summing to exactly one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MeasureVector(QVector);

impl MeasureVector {
    pub fn new(entries: QVector) -> Result<Self> {
        if entries.dim() == 0 {
            return Err(Error::InvalidInput("measure on an empty space".into()));
        }
        if entries.iter().any(Signed::is_negative) {
            return Err(Error::InvalidInput(format!(
                "measure {entries:?} has a negative entry"
            )));
        }
        if !entries.sum().is_one() {
            return Err(Error::InvalidInput(format!(
                "measure {entries:?} sums to {}, not 1",
                entries.sum()
            )));
        }
        Ok(MeasureVector(entries))
    }

    pub fn point_mass(dim: usize, at: usize) -> Self {
        MeasureVector(QVector::unit(dim, at))
    }

    pub fn uniform(dim: usize) -> Self {
        let w = Rational::new(1.into(), (dim as i64).into());
        MeasureVector((0..dim).map(|_| w.clone()).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn as_vector(&self) -> &QVector {
        &self.0
    }

    pub fn into_vector(self) -> QVector {
        self.0
    }

    /// Pushforward under a column-stochastic matrix.
    pub fn push(&self, m: &QMatrix) -> Result<MeasureVector> {
        MeasureVector::new(m.mul_vec(&self.0)?)
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| !self.0[i].is_zero()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactq::rational::ratio;

    fn binary(t: &[&str]) -> ProcessSpace {
        ProcessSpace::from_labels(t, &["0", "1"]).unwrap()
    }

    #[test]
    fn product_index_examples() {
        let s = binary(&["a"]);
        assert_eq!(s.product_index(&["0", "0"]).unwrap(), 0);
        assert_eq!(s.product_index(&["1", "0"]).unwrap(), 2);
        let s3 = ProcessSpace::from_labels(&["a"], &["a", "b", "c"]).unwrap();
        assert_eq!(s3.product_index(&["c", "a", "b"]).unwrap(), 19);
        assert!(s3.product_index(&["d"]).is_err());
    }

    #[test]
    fn product_index_is_bijective() {
        let s = ProcessSpace::from_labels(&["a"], &["x", "y", "z"]).unwrap();
        for n in 1..=3 {
            for i in 0..s.product_dim(n) {
                assert_eq!(s.product_index_of(&s.decode(i, n)), i);
            }
        }
    }

    #[test]
    fn invalid_spaces() {
        assert!(ProcessSpace::from_labels(&["a"], &["0"]).is_err());
        assert!(ProcessSpace::from_labels(&[], &["0", "1"]).is_err());
        assert!(ProcessSpace::from_labels(&["a", "a"], &["0", "1"]).is_err());
        assert!(binary(&["a", "b"]).tuple(&["a", "a"]).is_err());
    }

    #[test]
    fn phi_of_second_coordinate() {
        let s = binary(&["a", "b"]);
        let m = s.phi_matrix(&s.tuple(&["b"]).unwrap()).unwrap();
        assert_eq!(m, QMatrix::from_i64(&[&[1, 0, 1, 0], &[0, 1, 0, 1]]));
    }

    #[test]
    fn phi_of_full_tuple_is_identity() {
        let s = binary(&["a", "b", "c"]);
        assert_eq!(s.phi_matrix(&s.full_tuple()).unwrap(), QMatrix::identity(8));
    }

    #[test]
    fn phi_pushes_uniform_to_uniform() {
        // Every x ∈ Y^n has exactly m^(k-n) preimages, so uniform maps to uniform.
        let s = ProcessSpace::from_labels(&["a", "b", "c"], &["0", "1", "2"]).unwrap();
        let u = MeasureVector::uniform(s.omega_dim());
        for t in [vec!["c"], vec!["b", "a"], vec!["c", "a", "b"]] {
            let alpha = s.tuple(&t).unwrap();
            let m = s.phi_matrix(&alpha).unwrap();
            assert!(m.is_zero_one_column_stochastic());
            let pushed = u.push(&m).unwrap();
            assert_eq!(pushed, MeasureVector::uniform(s.product_dim(alpha.len())));
        }
    }

    #[test]
    fn permutation_examples() {
        let s = binary(&["a", "b"]);
        assert_eq!(
            s.permutation_matrix(2, &Permutation::identity(2)).unwrap(),
            QMatrix::identity(4)
        );
        let swap = Permutation::new(vec![1, 0]).unwrap();
        let m = s.permutation_matrix(2, &swap).unwrap();
        let at01 = MeasureVector::point_mass(4, s.product_index(&["0", "1"]).unwrap());
        let moved = at01.push(&m).unwrap();
        assert_eq!(moved, MeasureVector::point_mass(4, s.product_index(&["1", "0"]).unwrap()));
        assert!(s.permutation_matrix(3, &swap).is_err());
        assert!(Permutation::new(vec![0, 0]).is_err());
    }

    #[test]
    fn permutation_composition_over_s3() {
        let s = binary(&["a"]);
        let f = |pi: &Permutation, y: &[usize]| -> Vec<usize> {
            pi.as_slice().iter().map(|&p| y[p]).collect()
        };
        for pi in Permutation::all(3) {
            let mp = s.permutation_matrix(3, &pi).unwrap();
            assert_eq!(
                mp.mul(&s.permutation_matrix(3, &pi.inverse()).unwrap()).unwrap(),
                QMatrix::identity(8)
            );
            for rho in Permutation::all(3) {
                let mr = s.permutation_matrix(3, &rho).unwrap();
                // Applying f_ρ then f_π is f_σ with σ(j) = ρ(π(j)).
                let sigma = Permutation::new(pi.as_slice().iter().map(|&j| rho.as_slice()[j]).collect()).unwrap();
                for idx in 0..8 {
                    let y = s.decode(idx, 3);
                    assert_eq!(f(&pi, &f(&rho, &y)), f(&sigma, &y));
                }
                assert_eq!(mp.mul(&mr).unwrap(), s.permutation_matrix(3, &sigma).unwrap());
            }
        }
        assert_eq!(Permutation::all(3).len(), 6);
    }

    #[test]
    fn marginal_examples() {
        let s = binary(&["a"]);
        assert_eq!(s.marginal_matrix(2, 2).unwrap(), QMatrix::identity(4));
        assert_eq!(
            s.marginal_matrix(2, 1).unwrap(),
            QMatrix::from_i64(&[&[1, 1, 0, 0], &[0, 0, 1, 1]])
        );
        assert!(s.marginal_matrix(2, 0).is_err());
        assert!(s.marginal_matrix(1, 2).is_err());
    }

    #[test]
    fn marginal_chain() {
        let s = ProcessSpace::from_labels(&["a"], &["0", "1", "2"]).unwrap();
        for total in 1..=4 {
            for keep in 1..=total {
                let mut chain = QMatrix::identity(s.product_dim(total));
                for step in (keep..total).rev() {
                    chain = s.marginal_matrix(step + 1, step).unwrap().mul(&chain).unwrap();
                }
                assert_eq!(chain, s.marginal_matrix(total, keep).unwrap());
            }
        }
    }

    #[test]
    fn compatibility_identity() {
        let s = binary(&["a", "b", "c"]);
        for alpha in s.canonical_tuples() {
            for pi in Permutation::all(alpha.len()) {
                let alpha = alpha.permuted(&pi).unwrap();
                for beta in s.canonical_tuples() {
                    if !alpha.dominates(&beta) {
                        continue;
                    }
                    for rho in Permutation::all(beta.len()) {
                        let beta = beta.permuted(&rho).unwrap();
                        let lhs = s
                            .restriction_matrix(&alpha, &beta)
                            .unwrap()
                            .mul(&s.phi_matrix(&alpha).unwrap())
                            .unwrap();
                        assert_eq!(lhs, s.phi_matrix(&beta).unwrap(), "{alpha} -> {beta}");
                    }
                }
            }
        }
    }

    #[test]
    fn tuple_order() {
        let s = binary(&["a", "b", "c"]);
        let ab = s.tuple(&["a", "b"]).unwrap();
        let ba = s.tuple(&["b", "a"]).unwrap();
        let b = s.tuple(&["b"]).unwrap();
        assert!(ab.dominates(&b) && ba.dominates(&b) && !b.dominates(&ab));
        assert!(ab.same_elements(&ba));
        assert_eq!(s.canonical_tuples().len(), 7);
        assert_eq!(s.canonical_tuples()[0], s.tuple(&["a"]).unwrap());
        let pi = ab.permutation_to(&ba).unwrap();
        assert_eq!(ab.permuted(&pi).unwrap(), ba);
    }

    #[test]
    fn measure_vector_validation() {
        assert!(MeasureVector::new(QVector::new(vec![ratio(1, 2), ratio(1, 2)])).is_ok());
        assert!(MeasureVector::new(QVector::new(vec![ratio(3, 2), ratio(-1, 2)])).is_err());
        assert!(MeasureVector::new(QVector::new(vec![ratio(1, 2), ratio(1, 3)])).is_err());
    }
}
