//! Degree tables: outer sums (and differences) of exponent vectors, the
//! validity test for symmetric Gram tables, and the distinct-exponent set H.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Strictly increasing exponents of an encoding polynomial. The first
/// `useful` entries multiply data blocks; the rest multiply noise.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExponentVector {
    exps: Vec<u64>,
    useful: usize,
}

impl ExponentVector {
    pub fn new(exps: Vec<u64>, useful: usize) -> Result<Self> {
        if exps.is_empty() {
            return Err(Error::InvalidExponents("empty vector".into()));
        }
        if let Some(w) = exps.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidExponents(format!(
                "exponents must be strictly increasing, found {} before {}",
                w[0], w[1]
            )));
        }
        if useful > exps.len() {
            return Err(Error::InvalidExponents(format!(
                "{useful} useful entries in a vector of length {}",
                exps.len()
            )));
        }
        Ok(ExponentVector { exps, useful })
    }

    /// `p` data exponents followed by a single noise exponent.
    pub fn for_gram(exps: Vec<u64>) -> Result<Self> {
        let useful = exps.len().saturating_sub(1);
        Self::new(exps, useful)
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.exps
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn useful(&self) -> usize {
        self.useful
    }

    pub fn largest(&self) -> u64 {
        *self.exps.last().expect("non-empty")
    }

    pub fn shifted(&self, c: u64) -> Self {
        ExponentVector { exps: self.exps.iter().map(|e| e + c).collect(), useful: self.useful }
    }
}

impl std::fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.exps.iter().map(u64::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TableKind {
    Sum,
    Difference,
}

/// A grid with `cell(i, j) = rows[i] ± cols[j]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeTable {
    rows: Vec<u64>,
    cols: Vec<u64>,
    cells: Vec<i64>,
    kind: TableKind,
}

impl DegreeTable {
    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn cols(&self) -> &[u64] {
        &self.cols
    }

    pub fn kind(&self) -> TableKind {
        self.kind
    }

    pub fn cell(&self, i: usize, j: usize) -> i64 {
        self.cells[i * self.cols.len() + j]
    }

    pub fn grid(&self) -> Vec<Vec<i64>> {
        self.cells.chunks(self.cols.len().max(1)).map(<[i64]>::to_vec).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.rows.len();
        n == self.cols.len() && (0..n).all(|i| (0..i).all(|j| self.cell(i, j) == self.cell(j, i)))
    }

    /// Aligned text grid; `marked` cells are wrapped in brackets.
    pub fn render(&self, marked: &[(usize, usize)]) -> String {
        let width = self
            .cells
            .iter()
            .map(|c| c.to_string().len())
            .chain(self.rows.iter().chain(&self.cols).map(|e| e.to_string().len()))
            .max()
            .unwrap_or(1)
            + 2;
        let mut out = String::new();
        let _ = write!(out, "{:>width$} |", "");
        for c in &self.cols {
            let _ = write!(out, "{:>width$}", c);
        }
        out.push('\n');
        out.push_str(&"-".repeat(width + 2 + width * self.cols.len()));
        out.push('\n');
        for (i, r) in self.rows.iter().enumerate() {
            let _ = write!(out, "{:>width$} |", r);
            for j in 0..self.cols.len() {
                let v = self.cell(i, j);
                let s = if marked.contains(&(i, j)) { format!("[{v}]") } else { v.to_string() };
                let _ = write!(out, "{:>width$}", s);
            }
            out.push('\n');
        }
        out
    }
}

/// Degree table `rows ⊕ cols`. Inputs need not be sorted (secure MatDot's
/// second vector is decreasing).
pub fn outer_sum(rows: &[u64], cols: &[u64]) -> DegreeTable {
    let cells = rows.iter().flat_map(|&r| cols.iter().map(move |&c| (r + c) as i64)).collect();
    DegreeTable { rows: rows.to_vec(), cols: cols.to_vec(), cells, kind: TableKind::Sum }
}

/// `cell(i, j) = φ_i − φ_j`, the table for unit-modulus evaluation points
/// where conjugation inverts.
pub fn difference_table(phi: &[u64]) -> DegreeTable {
    let cells = phi.iter().flat_map(|&r| phi.iter().map(move |&c| r as i64 - c as i64)).collect();
    DegreeTable { rows: phi.to_vec(), cols: phi.to_vec(), cells, kind: TableKind::Difference }
}

/// Where a useful diagonal `2φ_j` reappears elsewhere in `φ ⊕ φ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Collision {
    pub diagonal: usize,
    pub cell: (usize, usize),
    pub value: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Validity {
    Valid,
    Invalid(Collision),
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

/// Checks that every useful diagonal `2φ_j`, `j < p`, occurs in `φ ⊕ φ` only
/// at cell `(j, j)`. The noise diagonal may collide. On failure the first
/// collision in (diagonal, row-major cell) order is returned.
pub fn is_valid(phi: &[u64], p: usize) -> Result<Validity> {
    if phi.len() != p + 1 {
        return Err(Error::InvalidExponents(format!("expected {} exponents for p = {p}, got {}", p + 1, phi.len())));
    }
    for j in 0..p {
        let d = 2 * phi[j];
        for a in 0..phi.len() {
            for b in 0..phi.len() {
                if (a, b) != (j, j) && phi[a] + phi[b] == d {
                    return Ok(Validity::Invalid(Collision { diagonal: j, cell: (a, b), value: d }));
                }
            }
        }
    }
    Ok(Validity::Valid)
}

/// Sorted distinct elements of `φ ⊕ φ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentSet {
    members: Vec<u64>,
    source: Vec<u64>,
}

impl ExponentSet {
    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn source(&self) -> &[u64] {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, e: u64) -> bool {
        self.members.binary_search(&e).is_ok()
    }

    /// True when the members are exactly `0..len`.
    pub fn is_contiguous_from_zero(&self) -> bool {
        self.members.iter().enumerate().all(|(i, &m)| m == i as u64)
    }
}

pub fn distinct_exponents(phi: &[u64]) -> ExponentSet {
    let set: BTreeSet<u64> = phi.iter().enumerate().flat_map(|(i, &a)| phi[i..].iter().map(move |&b| a + b)).collect();
    ExponentSet { members: set.into_iter().collect(), source: phi.to_vec() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exponent_vector_rejects_unsorted() {
        assert!(ExponentVector::for_gram(vec![0, 3, 2]).is_err());
        assert!(ExponentVector::for_gram(vec![0, 0]).is_err());
        assert!(ExponentVector::for_gram(vec![]).is_err());
        let v = ExponentVector::for_gram(vec![0, 1, 3]).unwrap();
        assert_eq!((v.useful(), v.largest()), (2, 3));
        assert_eq!(v.to_string(), "(0, 1, 3)");
    }

    #[test]
    fn trivial_tables() {
        assert_eq!(outer_sum(&[0], &[0]).grid(), vec![vec![0]]);
        assert_eq!(difference_table(&[0]).grid(), vec![vec![0]]);
        assert_eq!(difference_table(&[0, 2]).grid(), vec![vec![0, -2], vec![2, 0]]);
    }

    #[test]
    fn analog_difference_table() {
        let t = difference_table(&[0, 1, 2, 3, 4]);
        for i in 0..5 {
            assert_eq!(t.cell(i, i), 0);
            for j in 0..5 {
                assert_eq!(t.cell(i, j), i as i64 - j as i64);
            }
        }
        assert_eq!(t.cell(0, 4), -4);
        assert_eq!(t.cell(4, 0), 4);
    }

    #[test]
    fn validity_examples() {
        assert_eq!(is_valid(&[0, 1, 3, 7, 8], 4).unwrap(), Validity::Valid);
        assert_eq!(is_valid(&[0, 1], 1).unwrap(), Validity::Valid);
        assert_eq!(
            is_valid(&[0, 1, 2, 3, 4], 4).unwrap(),
            Validity::Invalid(Collision { diagonal: 1, cell: (0, 2), value: 2 })
        );
        assert!(is_valid(&[0, 1], 2).is_err());
    }

    #[test]
    fn distinct_exponent_examples() {
        assert_eq!(distinct_exponents(&[0, 1, 3, 7, 8]).len(), 14);
        let h = distinct_exponents(&[0, 1, 3, 4]);
        assert_eq!(h.members(), &(0..=8).collect::<Vec<_>>()[..]);
        assert!(h.is_contiguous_from_zero());
        assert_eq!(distinct_exponents(&[0]).members(), &[0]);
    }

    #[test]
    fn render_marks_cells() {
        let t = outer_sum(&[0, 1], &[0, 1]);
        let s = t.render(&[(0, 0)]);
        assert!(s.contains("[0]"));
        assert_eq!(s.lines().count(), 4);
    }

    fn increasing() -> impl Strategy<Value = Vec<u64>> {
        prop::collection::btree_set(0u64..60, 1..7).prop_map(|s| s.into_iter().collect())
    }

    proptest! {
        #[test]
        fn shift_invariance(phi in increasing(), c in 0u64..100) {
            let p = phi.len() - 1;
            let shifted: Vec<u64> = phi.iter().map(|e| e + c).collect();
            prop_assert_eq!(is_valid(&phi, p).unwrap().is_valid(), is_valid(&shifted, p).unwrap().is_valid());
            prop_assert_eq!(distinct_exponents(&phi).len(), distinct_exponents(&shifted).len());
        }

        #[test]
        fn largest_diagonal_never_collides(phi in increasing()) {
            // so requiring uniqueness for the noise diagonal too changes nothing
            let n = phi.len();
            let top = 2 * phi[n - 1];
            let hits = (0..n).flat_map(|a| (0..n).map(move |b| (a, b)))
                .filter(|&(a, b)| phi[a] + phi[b] == top)
                .count();
            prop_assert_eq!(hits, 1);
        }

        #[test]
        fn h_bounded_by_largest(phi in increasing()) {
            let h = distinct_exponents(&phi);
            let max = *phi.last().unwrap();
            let n = phi.len();
            prop_assert!(h.len() as u64 <= 2 * max + 1);
            prop_assert!(h.len() <= n * (n + 1) / 2);
        }

        #[test]
        fn symmetric_tables_cannot_separate_cross_terms(phi in increasing()) {
            let t = outer_sum(&phi, &phi);
            prop_assert!(t.is_symmetric());
            for i in 0..phi.len() {
                for j in 0..phi.len() {
                    prop_assert_eq!(t.cell(i, j), (phi[i] + phi[j]) as i64);
                }
            }
        }
    }
}
