//! Exhaustive security audit at toy sizes.
//!
//! Every quantity here is an exact count over a full enumeration, so "the
//! share is uniform" and "mutual information is zero" are decided exactly
//! rather than estimated.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::degree::ExponentVector;
use crate::error::{Error, Result};
use crate::field::{Fe, PrimeField};
use crate::matrix::FieldMatrix;
use crate::par::Backend;

/// Largest number of outcomes any single enumeration may visit.
pub const ENUMERATION_LIMIT: u128 = 1_000_000;

fn space_size(q: u64, dims: usize) -> Result<usize> {
    let mut size: u128 = 1;
    for _ in 0..dims {
        size = size.saturating_mul(q as u128);
        if size > ENUMERATION_LIMIT {
            return Err(Error::TooLarge(size));
        }
    }
    Ok(size as usize)
}

/// Base-`q` digits of `index`, least significant first.
fn digits(field: &PrimeField, mut index: usize, len: usize) -> Vec<Fe> {
    let q = field.modulus() as usize;
    (0..len)
        .map(|_| {
            let d = index % q;
            index /= q;
            field.elem(d as u64)
        })
        .collect()
}

fn index_of(field: &PrimeField, values: &[Fe]) -> u64 {
    values.iter().rev().fold(0, |acc, v| acc * field.modulus() + v.value())
}

/// The data part `Σ_k A_k α^{φ_k}` of a share, `A` given as `t × p·chunk`.
fn data_part(field: &PrimeField, phi: &ExponentVector, alpha: Fe, a: &FieldMatrix) -> Result<FieldMatrix> {
    let blocks = a.partition_ipp(phi.useful())?;
    let mut acc = FieldMatrix::zeros(blocks[0].rows(), blocks[0].cols());
    for (block, &e) in blocks.iter().zip(phi.as_slice()) {
        acc.add_scaled(field, field.pow(alpha, e), block)?;
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniformityReport {
    /// Hit count of each share value, indexed by its base-`q` encoding.
    pub histogram: Vec<u64>,
    pub uniform: bool,
}

impl UniformityReport {
    pub fn min_count(&self) -> u64 {
        self.histogram.iter().copied().min().unwrap_or(0)
    }

    pub fn max_count(&self) -> u64 {
        self.histogram.iter().copied().max().unwrap_or(0)
    }
}

/// Distribution of the share sent to the worker at `alpha` over every noise
/// value, for fixed `A` of shape `t × p·chunk_cols`.
pub fn share_uniformity_check(
    field: &PrimeField,
    t: usize,
    chunk_cols: usize,
    phi: &ExponentVector,
    alpha: Fe,
    a: &FieldMatrix,
    backend: Backend,
) -> Result<UniformityReport> {
    if a.shape() != (t, phi.useful() * chunk_cols) {
        return Err(Error::Shape(format!("A is {:?}, expected {t}x{}", a.shape(), phi.useful() * chunk_cols)));
    }
    let dims = t * chunk_cols;
    let size = space_size(field.modulus(), dims)?;
    let base = data_part(field, phi, alpha, a)?;
    let beta = field.pow(alpha, phi.largest());
    let hits = backend.map_range(size, |r| {
        let noise = digits(field, r, dims);
        let share: Vec<Fe> =
            base.as_slice().iter().zip(&noise).map(|(&b, &n)| field.add(b, field.mul(beta, n))).collect();
        index_of(field, &share) as usize
    });
    let mut histogram = vec![0u64; size];
    for h in hits {
        histogram[h] += 1;
    }
    let uniform = histogram.iter().all(|&c| c == 1);
    Ok(UniformityReport { histogram, uniform })
}

/// Mutual information in bits between a uniformly chosen row and the
/// observation, from per-row observation counts with equal row totals.
pub fn mutual_information(rows: &[BTreeMap<u64, u64>]) -> f64 {
    let total: u64 = rows.iter().flat_map(|r| r.values()).sum();
    if total == 0 {
        return 0.0;
    }
    let mut marginal: BTreeMap<u64, u64> = BTreeMap::new();
    for row in rows {
        for (&k, &c) in row {
            *marginal.entry(k).or_default() += c;
        }
    }
    let n = total as f64;
    let mut mi = 0.0;
    for row in rows {
        let row_total: u64 = row.values().sum();
        for (k, &c) in row {
            // p(a,s) / (p(a) p(s)) as an integer ratio, so independence gives log2(1) = 0 exactly
            let num = c as u128 * total as u128;
            let den = row_total as u128 * marginal[k] as u128;
            if num != den {
                mi += (c as f64 / n) * (num as f64 / den as f64).log2();
            }
        }
    }
    mi
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointAudit {
    pub alpha: u64,
    /// Number of distinct `A` enumerated.
    pub a_values: usize,
    /// The share was uniform for every `A`.
    pub all_uniform: bool,
    /// `I(A; Ã_i)` in bits with `A` uniform.
    pub mi_bits: f64,
}

/// Runs [`share_uniformity_check`] for every `t × p·chunk_cols` matrix `A`.
pub fn single_share_audit(
    field: &PrimeField,
    t: usize,
    chunk_cols: usize,
    phi: &ExponentVector,
    alpha: Fe,
    backend: Backend,
) -> Result<PointAudit> {
    let a_dims = t * phi.useful() * chunk_cols;
    let a_space = space_size(field.modulus(), a_dims)?;
    space_size(field.modulus(), a_dims + t * chunk_cols)?;
    let reports: Vec<Result<UniformityReport>> = backend.map_range(a_space, |ai| {
        let a = FieldMatrix::from_vec(t, phi.useful() * chunk_cols, digits(field, ai, a_dims))?;
        share_uniformity_check(field, t, chunk_cols, phi, alpha, &a, Backend::Sequential)
    });
    let reports: Vec<_> = reports.into_iter().collect::<Result<_>>()?;
    let rows: Vec<BTreeMap<u64, u64>> = reports
        .iter()
        .map(|r| r.histogram.iter().enumerate().filter(|(_, &c)| c > 0).map(|(k, &c)| (k as u64, c)).collect())
        .collect();
    Ok(PointAudit {
        alpha: alpha.value(),
        a_values: a_space,
        all_uniform: reports.iter().all(|r| r.uniform),
        mi_bits: mutual_information(&rows),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeakageReport {
    /// `c_k` with `α_j^{φ_n}·Ã_i − α_i^{φ_n}·Ã_j = Σ_k c_k A_k`.
    pub coefficients: Vec<Fe>,
    /// The identity above held for every enumerated `(A, R)`.
    pub functional_holds: bool,
    pub mi_single_bits: f64,
    pub mi_pair_bits: f64,
}

/// Two colluding workers at `alpha_i`, `alpha_j` with scalar blocks
/// (`t = 1`, one column per block) and `A` uniform over `F_q^p`.
pub fn collusion_leakage_demo(
    field: &PrimeField,
    phi: &ExponentVector,
    alpha_i: Fe,
    alpha_j: Fe,
    backend: Backend,
) -> Result<LeakageReport> {
    let p = phi.useful();
    let q = field.modulus();
    let a_space = space_size(q, p)?;
    space_size(q, p + 1)?;
    let top = phi.largest();
    let (bi, bj) = (field.pow(alpha_i, top), field.pow(alpha_j, top));
    let coefficients: Vec<Fe> = phi.as_slice()[..p]
        .iter()
        .map(|&e| field.sub(field.mul(bj, field.pow(alpha_i, e)), field.mul(bi, field.pow(alpha_j, e))))
        .collect();

    type Row = (BTreeMap<u64, u64>, BTreeMap<u64, u64>, bool);
    let rows: Vec<Row> = backend.map_range(a_space, |ai| {
        let a = digits(field, ai, p);
        let data = |alpha: Fe| {
            a.iter()
                .zip(phi.as_slice())
                .fold(Fe::ZERO, |acc, (&ak, &e)| field.add(acc, field.mul(ak, field.pow(alpha, e))))
        };
        let (di, dj) = (data(alpha_i), data(alpha_j));
        let functional = coefficients.iter().zip(&a).fold(Fe::ZERO, |acc, (&c, &ak)| field.add(acc, field.mul(c, ak)));
        let mut single = BTreeMap::new();
        let mut pair = BTreeMap::new();
        let mut holds = true;
        for r in 0..q {
            let r = field.elem(r);
            let si = field.add(di, field.mul(bi, r));
            let sj = field.add(dj, field.mul(bj, r));
            *single.entry(si.value()).or_default() += 1;
            *pair.entry(si.value() * q + sj.value()).or_default() += 1;
            holds &= field.sub(field.mul(bj, si), field.mul(bi, sj)) == functional;
        }
        (single, pair, holds)
    });
    let functional_holds = rows.iter().all(|r| r.2);
    let singles: Vec<_> = rows.iter().map(|r| r.0.clone()).collect();
    let pairs: Vec<_> = rows.into_iter().map(|r| r.1).collect();
    Ok(LeakageReport {
        coefficients,
        functional_holds,
        mi_single_bits: mutual_information(&singles),
        mi_pair_bits: mutual_information(&pairs),
    })
}
