//! Secure MatDot for a general product `A·B` with X = 1, used as the
//! comparison baseline and as an independent cross-check of the Gram
//! scheme.
//!
//! `f(x) = Σ_j A_j x^{j-1} + R x^p`, `g(x) = Σ_j B_j x^{p-j} + S x^p`; the
//! coefficient of `x^{p-1}` in `f·g` is `Σ_j A_j B_j = A·B`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::choose_points;
use crate::engine::DecodeMode;
use crate::error::{Error, Result};
use crate::field::{Fe, PrimeField};
use crate::linalg::solve_field;
use crate::matrix::FieldMatrix;
use crate::par::Backend;
use crate::pool::{self, Latency, Payload, PoolConfig, Response, Share, Stragglers, TaskTrace};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatDotInstance {
    pub p: usize,
    pub phi: Vec<u64>,
    pub gamma: Vec<u64>,
    pub points: Vec<Fe>,
}

impl MatDotInstance {
    pub fn exponents(p: usize) -> Result<(Vec<u64>, Vec<u64>)> {
        if p == 0 {
            return Err(Error::InvalidPartition(p));
        }
        let p64 = p as u64;
        let phi = (0..=p64).collect();
        let gamma = (0..p64).rev().chain([p64]).collect();
        Ok((phi, gamma))
    }

    pub fn new(p: usize, points: Vec<Fe>) -> Result<Self> {
        let (phi, gamma) = Self::exponents(p)?;
        Ok(MatDotInstance { p, phi, gamma, points })
    }

    /// `2p + 2X − 1` with X = 1.
    pub fn recovery_threshold(&self) -> usize {
        2 * self.p + 1
    }
}

/// A worker's pair of encoded factors.
#[derive(Debug, Clone, PartialEq)]
pub struct MatDotShare {
    pub a: FieldMatrix,
    pub b: FieldMatrix,
}

impl Payload for MatDotShare {
    const ELEM_BYTES: usize = 8;
    fn elems(&self) -> usize {
        self.a.len() + self.b.len()
    }
}

#[derive(Debug, Clone)]
pub struct MatDotConfig {
    pub p: usize,
    pub n_workers: usize,
    pub seed: u64,
    pub stragglers: Stragglers,
    pub latency: Latency,
    pub backend: Backend,
}

impl MatDotConfig {
    pub fn new(p: usize, n_workers: usize, seed: u64) -> Self {
        MatDotConfig {
            p,
            n_workers,
            seed,
            stragglers: Stragglers::None,
            latency: Latency::InOrder,
            backend: Backend::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MatDotOutput {
    pub product: FieldMatrix,
    pub trace: TaskTrace,
    pub instance: MatDotInstance,
}

fn row_blocks(b: &FieldMatrix, p: usize) -> Result<Vec<FieldMatrix>> {
    Ok(b.transpose().partition_ipp(p)?.iter().map(FieldMatrix::transpose).collect())
}

pub fn matdot_run(field: PrimeField, a: &FieldMatrix, b: &FieldMatrix, cfg: &MatDotConfig) -> Result<MatDotOutput> {
    if a.cols() != b.rows() {
        return Err(Error::Shape(format!("cannot multiply {:?} by {:?}", a.shape(), b.shape())));
    }
    let p = cfg.p;
    let (phi, gamma) = MatDotInstance::exponents(p)?;
    let r = 2 * p + 1;
    if cfg.n_workers < r {
        return Err(Error::NotEnoughResponses { missing: r - cfg.n_workers });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let exps: Vec<u64> = (0..r as u64).collect();
    let points = choose_points(&field, cfg.n_workers, &exps, DecodeMode::Interpolation, &mut rng, cfg.backend)?;
    let inst = MatDotInstance { p, phi, gamma, points };

    let mut a_blocks = a.partition_ipp(p)?;
    let mut b_blocks = row_blocks(b, p)?;
    rng.set_stream(1);
    a_blocks.push(FieldMatrix::random(&field, a.rows(), a_blocks[0].cols(), &mut rng));
    b_blocks.push(FieldMatrix::random(&field, b_blocks[0].rows(), b.cols(), &mut rng));

    let f = &field;
    let shares: Vec<Share<MatDotShare>> = cfg.backend.map_range(cfg.n_workers, |i| {
        let x = inst.points[i];
        let combine = |blocks: &[FieldMatrix], exps: &[u64]| {
            let mut acc = FieldMatrix::zeros(blocks[0].rows(), blocks[0].cols());
            for (m, &e) in blocks.iter().zip(exps) {
                acc.add_scaled(f, f.pow(x, e), m).expect("same shape");
            }
            acc
        };
        Share {
            worker: i,
            payload: MatDotShare { a: combine(&a_blocks, &inst.phi), b: combine(&b_blocks, &inst.gamma) },
        }
    });
    let pool_cfg = PoolConfig {
        stragglers: cfg.stragglers.clone(),
        latency: cfg.latency,
        needed: Some(r),
        seed: cfg.seed,
        backend: cfg.backend,
        ..Default::default()
    };
    let out = pool::dispatch(&shares, |s| s.a.matmul(f, &s.b).expect("conforming shares"), &pool_cfg)?;
    let product = decode_matdot(&out.responses, &inst, f)?;
    Ok(MatDotOutput { product, trace: out.trace, instance: inst })
}

/// Interpolates `f·g` from the `2p + 1` lowest-indexed responses and reads
/// off the coefficient of `x^{p-1}`.
pub fn decode_matdot(
    responses: &[Response<FieldMatrix>],
    inst: &MatDotInstance,
    field: &PrimeField,
) -> Result<FieldMatrix> {
    let r = inst.recovery_threshold();
    let mut used: Vec<&Response<FieldMatrix>> = responses.iter().collect();
    used.sort_by_key(|resp| resp.worker);
    used.dedup_by_key(|resp| resp.worker);
    if used.len() < r {
        return Err(Error::NotEnoughResponses { missing: r - used.len() });
    }
    used.truncate(r);
    let vt: Vec<Vec<Fe>> =
        (0..r as u64).map(|e| used.iter().map(|resp| field.pow(inst.points[resp.worker], e)).collect()).collect();
    let target: Vec<Fe> = (0..r).map(|k| if k + 1 == inst.p { Fe::ONE } else { Fe::ZERO }).collect();
    let weights = solve_field(field, vt, target).ok_or(Error::DecodingSingular)?;
    let (rows, cols) = used[0].payload.shape();
    let mut acc = FieldMatrix::zeros(rows, cols);
    for (w, resp) in weights.iter().zip(&used) {
        acc.add_scaled(field, *w, &resp.payload)?;
    }
    Ok(acc)
}

/// Cost of computing `A·Aᵀ` with MatDot and `p` partitions: both factors
/// are encoded, and responses are full `t×t` (they are not symmetric).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramCost {
    pub n_workers: usize,
    pub encoded_matrices: usize,
    pub upload_elems: f64,
    pub download_elems: u64,
}

pub fn matdot_gram_costs(p: usize, t: usize, s: usize) -> Result<GramCost> {
    if p == 0 {
        return Err(Error::InvalidPartition(p));
    }
    let n = 2 * p + 1;
    Ok(GramCost {
        n_workers: n,
        encoded_matrices: 2 * n,
        upload_elems: 2.0 * n as f64 * (t * s) as f64 / p as f64,
        download_elems: (n * t * t) as u64,
    })
}
