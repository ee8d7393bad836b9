//! Constructions of valid exponent vectors for the Gram scheme.
//!
//! * [`construct_trivial`]: `φ_{j+1} = 2φ_j + 1`, quadratic |H|.
//! * [`construct_doubling`]: recursive concatenation, |H| = 3^n for
//!   `p + 1 = 2^n`, truncated otherwise.
//! * [`search_min_max`]: depth-first search for the smallest possible
//!   largest exponent, which makes plain interpolation cheapest.

use serde::{Deserialize, Serialize};

use crate::degree::{distinct_exponents, is_valid, ExponentVector};
use crate::error::{Error, Result};

/// Default node budget for [`search_min_max`].
pub const DEFAULT_SEARCH_BUDGET: u64 = 100_000_000;

pub fn construct_trivial(p: usize) -> Result<ExponentVector> {
    if p == 0 {
        return Err(Error::InvalidPartition(p));
    }
    if p + 1 >= 64 {
        return Err(Error::Overflow(p));
    }
    let exps = (0..=p as u32).map(|j| (1u64 << j) - 1).collect();
    ExponentVector::for_gram(exps)
}

/// Base-2 recursive construction (`φ⁰ = (0)`, seed `(0, 1)`).
pub fn construct_doubling(p: usize) -> Result<ExponentVector> {
    construct_recursive(p, &[0, 1])
}

/// Recursive construction over an arbitrary seed vector of length `k`:
/// `φ^{n+1} = concat_c (φⁿ + seed_c·(2M + 1))`, where `M = max φⁿ`, then
/// truncated to `p + 1` entries. The seed must start at 0 and every one of
/// its diagonals (including the last) must be unique in `seed ⊕ seed`; base
/// 2 uses `(0, 1)`.
pub fn construct_recursive(p: usize, seed: &[u64]) -> Result<ExponentVector> {
    if p == 0 {
        return Err(Error::InvalidPartition(p));
    }
    if seed.len() < 2 || seed[0] != 0 || !is_valid(seed, seed.len() - 1)?.is_valid() || !last_diagonal_unique(seed) {
        return Err(Error::InvalidExponents(format!("unusable seed vector {seed:?}")));
    }
    let mut phi = vec![0u64];
    while phi.len() < p + 1 {
        let max = *phi.last().expect("non-empty");
        let step = max.checked_mul(2).and_then(|v| v.checked_add(1)).ok_or(Error::Overflow(p))?;
        let mut next = Vec::with_capacity(phi.len() * seed.len());
        for &c in seed {
            let off = c.checked_mul(step).ok_or(Error::Overflow(p))?;
            for &e in &phi {
                next.push(e.checked_add(off).ok_or(Error::Overflow(p))?);
            }
        }
        phi = next;
    }
    // sums reach 2·max, keep that representable too
    phi.truncate(p + 1);
    if phi.last().is_some_and(|&m| m > u64::MAX / 2) {
        return Err(Error::Overflow(p));
    }
    ExponentVector::for_gram(phi)
}

fn last_diagonal_unique(v: &[u64]) -> bool {
    let n = v.len();
    let d = 2 * v[n - 1];
    (0..n).all(|a| (0..n).all(|b| (a, b) == (n - 1, n - 1) || v[a] + v[b] != d))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    pub phi: ExponentVector,
    pub largest: u64,
    pub distinct_count: usize,
    pub nodes_visited: u64,
}

/// Finds a valid φ of length `p + 1` whose largest entry is as small as
/// possible, breaking ties lexicographically.
///
/// Iterative deepening over the candidate maximum `B = p, p + 1, …`. For a
/// fixed `B` the last entry is pinned to `B` and the interior is filled in
/// increasing order by depth-first search, so the first complete vector
/// found is the lexicographically smallest optimum.
pub fn search_min_max(p: usize, budget: Option<u64>) -> Result<SearchResult> {
    if p == 0 {
        return Err(Error::InvalidPartition(p));
    }
    let budget = budget.unwrap_or(DEFAULT_SEARCH_BUDGET);
    let mut nodes = 0u64;
    let mut bound = p as u64;
    loop {
        let mut dfs = Dfs::new(p, bound);
        let outcome = dfs.run(&mut nodes, budget);
        match outcome {
            Step::Found => {
                let phi = ExponentVector::for_gram(dfs.phi)?;
                debug_assert!(is_valid(phi.as_slice(), p)?.is_valid());
                return Ok(SearchResult {
                    largest: phi.largest(),
                    distinct_count: distinct_exponents(phi.as_slice()).len(),
                    phi,
                    nodes_visited: nodes,
                });
            }
            Step::Exhausted => bound += 1,
            Step::OutOfBudget => {
                return Err(Error::BudgetExceeded { nodes, bound, best: construct_doubling(p)? });
            }
        }
    }
}

enum Step {
    Found,
    Exhausted,
    OutOfBudget,
}

struct Dfs {
    p: usize,
    bound: u64,
    phi: Vec<u64>,
    /// `placed[v]`: v is already an entry of φ.
    placed: Vec<bool>,
    /// Multiplicity of each value among cells `(a, b)`, `a <= b`.
    sums: Vec<u32>,
}

impl Dfs {
    fn new(p: usize, bound: u64) -> Self {
        let b = bound as usize;
        let mut s =
            Dfs { p, bound, phi: Vec::with_capacity(p + 1), placed: vec![false; b + 1], sums: vec![0; 2 * b + 1] };
        s.push(0);
        s
    }

    fn push(&mut self, v: u64) {
        for &e in &self.phi {
            self.sums[(e + v) as usize] += 1;
        }
        self.sums[(2 * v) as usize] += 1;
        self.placed[v as usize] = true;
        self.phi.push(v);
    }

    fn pop(&mut self) {
        let v = self.phi.pop().expect("non-empty");
        self.placed[v as usize] = false;
        self.sums[(2 * v) as usize] -= 1;
        for &e in &self.phi {
            self.sums[(e + v) as usize] -= 1;
        }
    }

    /// Can `v` be appended without a useful diagonal colliding? `last` marks
    /// the noise entry, whose own diagonal is exempt (and, being the
    /// maximum, unique anyway).
    fn fits(&self, v: u64, last: bool) -> bool {
        // existing diagonals 2φ_j against new cells v + φ_i
        for &e in &self.phi {
            let d = 2 * e;
            if d >= v && d - v <= self.bound && self.placed[(d - v) as usize] {
                return false;
            }
        }
        // new diagonal 2v against existing cells
        last || self.sums[(2 * v) as usize] == 0
    }

    fn run(&mut self, nodes: &mut u64, budget: u64) -> Step {
        let k = self.phi.len();
        if k == self.p {
            *nodes += 1;
            if *nodes > budget {
                return Step::OutOfBudget;
            }
            if self.fits(self.bound, true) {
                self.push(self.bound);
                return Step::Found;
            }
            return Step::Exhausted;
        }
        let remaining = (self.p - k) as u64;
        let lo = self.phi[k - 1] + 1;
        let hi = self.bound - remaining;
        for v in lo..=hi {
            *nodes += 1;
            if *nodes > budget {
                return Step::OutOfBudget;
            }
            if !self.fits(v, false) {
                continue;
            }
            self.push(v);
            match self.run(nodes, budget) {
                Step::Exhausted => self.pop(),
                other => return other,
            }
        }
        Step::Exhausted
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn exps(v: &ExponentVector) -> Vec<u64> {
        v.as_slice().to_vec()
    }

    #[test]
    fn trivial_examples() {
        assert_eq!(exps(&construct_trivial(1).unwrap()), vec![0, 1]);
        assert_eq!(exps(&construct_trivial(3).unwrap()), vec![0, 1, 3, 7]);
        let v = construct_trivial(4).unwrap();
        assert_eq!(exps(&v), vec![0, 1, 3, 7, 15]);
        assert_eq!(distinct_exponents(v.as_slice()).len(), 15);
        assert!(matches!(construct_trivial(63), Err(Error::Overflow(63))));
        for p in 1..20 {
            let v = construct_trivial(p).unwrap();
            assert!(is_valid(v.as_slice(), p).unwrap().is_valid());
            assert_eq!(v.largest(), (1 << p) - 1);
            assert_eq!(distinct_exponents(v.as_slice()).len(), (p + 1) * (p + 2) / 2);
        }
    }

    #[test]
    fn doubling_examples() {
        let v = construct_doubling(1).unwrap();
        assert_eq!((exps(&v), distinct_exponents(v.as_slice()).len()), (vec![0, 1], 3));
        let v = construct_doubling(3).unwrap();
        assert_eq!((exps(&v), distinct_exponents(v.as_slice()).len()), (vec![0, 1, 3, 4], 9));
        let v = construct_doubling(7).unwrap();
        assert_eq!(exps(&v), vec![0, 1, 3, 4, 9, 10, 12, 13]);
        let h = distinct_exponents(v.as_slice());
        assert_eq!(h.len(), 27);
        assert!(h.is_contiguous_from_zero());
    }

    #[test]
    fn doubling_is_always_valid() {
        for p in 1..=40 {
            let v = construct_doubling(p).unwrap();
            assert_eq!(v.len(), p + 1);
            assert!(is_valid(v.as_slice(), p).unwrap().is_valid(), "p = {p}");
        }
    }

    #[test]
    fn base_three_construction_is_valid() {
        let seed = exps(&construct_trivial(2).unwrap()); // (0, 1, 3)
        for p in 1..=30 {
            let v = construct_recursive(p, &seed).unwrap();
            assert!(is_valid(v.as_slice(), p).unwrap().is_valid(), "p = {p}");
        }
        // one level: (0,1,3) blocks with step 1
        assert_eq!(exps(&construct_recursive(2, &seed).unwrap()), vec![0, 1, 3]);
        assert!(construct_recursive(3, &[0, 1, 2]).is_err());
        assert!(construct_recursive(3, &[1, 2]).is_err());
    }

    #[test]
    fn search_small_cases() {
        let r = search_min_max(1, None).unwrap();
        assert_eq!(exps(&r.phi), vec![0, 1]);
        let r = search_min_max(2, None).unwrap();
        assert_eq!((exps(&r.phi), r.largest), (vec![0, 1, 3], 3));
        let r = search_min_max(4, None).unwrap();
        assert_eq!(r.largest, 8);
        assert_eq!(r.distinct_count, distinct_exponents(r.phi.as_slice()).len());
    }

    // Brute force over every strictly increasing vector (0, …, b), no pruning.
    fn brute_min_max(p: usize) -> (u64, Vec<u64>) {
        fn interiors(lo: u64, hi: u64, k: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
            if k == 0 {
                out.push(cur.clone());
                return;
            }
            for v in lo..hi {
                cur.push(v);
                interiors(v + 1, hi, k - 1, cur, out);
                cur.pop();
            }
        }
        for b in p as u64.. {
            let mut all = Vec::new();
            interiors(1, b, p - 1, &mut Vec::new(), &mut all);
            let best = all
                .into_iter()
                .map(|mid| {
                    let mut v = vec![0];
                    v.extend(mid);
                    v.push(b);
                    v
                })
                .filter(|v| is_valid(v, p).unwrap().is_valid())
                .min();
            if let Some(v) = best {
                return (b, v);
            }
        }
        unreachable!()
    }

    #[test]
    fn search_matches_brute_force() {
        for p in 1..=6 {
            let (b, v) = brute_min_max(p);
            let r = search_min_max(p, None).unwrap();
            assert_eq!(r.largest, b, "p = {p}");
            assert_eq!(exps(&r.phi), v, "p = {p}");
        }
    }

    #[test]
    fn search_dominates_constructions_and_is_monotone() {
        let mut prev = 0;
        for p in 1..=8 {
            let r = search_min_max(p, None).unwrap();
            assert!(r.largest <= construct_doubling(p).unwrap().largest());
            assert!(r.largest <= construct_trivial(p).unwrap().largest());
            assert!(r.largest >= prev);
            prev = r.largest;
        }
    }

    #[test]
    fn budget_exhaustion_reports_fallback() {
        match search_min_max(8, Some(50)) {
            Err(Error::BudgetExceeded { nodes, best, .. }) => {
                assert!(nodes > 50);
                assert!(is_valid(best.as_slice(), 8).unwrap().is_valid());
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn doubling_h_is_a_power_of_three() {
        for n in 0..=5u32 {
            let p = (1usize << n) - 1;
            let h: BTreeSet<u64> = if p == 0 {
                [0].into()
            } else {
                distinct_exponents(construct_doubling(p).unwrap().as_slice()).members().iter().copied().collect()
            };
            assert_eq!(h.len(), 3usize.pow(n));
        }
    }
}
