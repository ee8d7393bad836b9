//! Analog Gram scheme over the complex numbers.
//!
//! `f(x) = Σ_j A_j x^{j-1}` is evaluated at distinct unit-modulus points, so
//! `conj(α) = α⁻¹` and each response `f(α)f(α)*` equals
//! `Σ_{j,j'} A_j A_{j'}* α^{j-j'}`. Multiplying by `α^{p-1}` gives a
//! polynomial of degree `2p − 2` whose middle coefficient is `A·A*`, so any
//! `2p − 1` responses suffice. There is no noise term and no security.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::cmatrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::linalg::{solve_complex, solve_real};
use crate::matrix::{triangle_len, PackedLower};
use crate::par::Backend;
use crate::pool::{self, Latency, PoolConfig, Response, Share, Stragglers, TaskTrace};

/// `exp(2πik/n)` for `k = 0..n`.
pub fn choose_unit_points(n: usize) -> Vec<Complex64> {
    (0..n).map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalogInstance {
    pub p: usize,
    pub points: Vec<Complex64>,
    /// Points are exactly [`choose_unit_points`]`(points.len())`.
    pub roots_of_unity: bool,
}

impl AnalogInstance {
    pub fn new(p: usize, n: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidPartition(p));
        }
        Ok(AnalogInstance { p, points: choose_unit_points(n), roots_of_unity: true })
    }

    pub fn recovery_threshold(&self) -> usize {
        2 * self.p - 1
    }
}

pub type AnalogShare = Share<ComplexMatrix>;
pub type AnalogResponse = Response<PackedLower<Complex64>>;

pub fn adgmm_encode(a: &ComplexMatrix, inst: &AnalogInstance, backend: Backend) -> Result<Vec<AnalogShare>> {
    let blocks = a.partition_ipp(inst.p)?;
    let (rows, cols) = blocks[0].shape();
    Ok(backend.map_range(inst.points.len(), |i| {
        let x = inst.points[i];
        let mut acc = ComplexMatrix::zeros(rows, cols);
        let mut xp = Complex64::new(1.0, 0.0);
        for block in &blocks {
            acc.add_scaled(xp, block).expect("same shape");
            xp *= x;
        }
        Share { worker: i, payload: acc }
    }))
}

/// Weights `w` with `Σ_i w_i α_i^{p-1} y_i = A·A*` for responses from `workers`.
fn decoding_weights(inst: &AnalogInstance, workers: &[usize]) -> Result<Vec<Complex64>> {
    let n = workers.len();
    let shift = inst.p as i32 - 1;
    if inst.roots_of_unity && n == inst.points.len() && workers.iter().enumerate().all(|(i, &w)| i == w) {
        // all n = 2p − 1 roots of unity: the inverse DFT weight α^{-(p-1)}/n
        // cancels against the α^{p-1} shift
        return Ok(vec![Complex64::new(1.0 / n as f64, 0.0); n]);
    }
    let vt: Vec<Vec<Complex64>> =
        (0..n).map(|k| workers.iter().map(|&w| inst.points[w].powi(k as i32)).collect()).collect();
    let target: Vec<Complex64> =
        (0..n).map(|k| if k as i32 == shift { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }).collect();
    let w = solve_complex(vt, target, 1e-13).ok_or(Error::DecodingSingular)?;
    Ok(w.into_iter().zip(workers).map(|(wi, &wk)| wi * inst.points[wk].powi(shift)).collect())
}

/// Decodes `A·A*` from the `2p − 1` lowest-indexed responses.
pub fn adgmm_decode(responses: &[AnalogResponse], inst: &AnalogInstance) -> Result<ComplexMatrix> {
    let r = inst.recovery_threshold();
    let mut used: Vec<&AnalogResponse> = responses.iter().collect();
    used.sort_by_key(|resp| resp.worker);
    used.dedup_by_key(|resp| resp.worker);
    if used.len() < r {
        return Err(Error::NotEnoughResponses { missing: r - used.len() });
    }
    used.truncate(r);
    let workers: Vec<usize> = used.iter().map(|resp| resp.worker).collect();
    let weights = decoding_weights(inst, &workers)?;
    let t = used[0].payload.dim();
    let entries: Vec<Complex64> = (0..triangle_len(t))
        .map(|k| used.iter().zip(&weights).map(|(resp, w)| w * resp.payload.entries()[k]).sum())
        .collect();
    Ok(PackedLower::new(t, entries)?.unpack_hermitian())
}

#[derive(Debug, Clone)]
pub struct AnalogConfig {
    pub p: usize,
    pub n_workers: usize,
    pub stragglers: Stragglers,
    pub latency: Latency,
    pub seed: u64,
    pub backend: Backend,
}

impl AnalogConfig {
    pub fn new(p: usize, n_workers: usize) -> Self {
        AnalogConfig {
            p,
            n_workers,
            stragglers: Stragglers::None,
            latency: Latency::InOrder,
            seed: 0,
            backend: Backend::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct AnalogOutput {
    pub gram: ComplexMatrix,
    pub trace: TaskTrace,
    pub shares: Vec<AnalogShare>,
}

pub fn adgmm_run(a: &ComplexMatrix, cfg: &AnalogConfig) -> Result<AnalogOutput> {
    let inst = AnalogInstance::new(cfg.p, cfg.n_workers)?;
    let r = inst.recovery_threshold();
    if cfg.n_workers < r {
        return Err(Error::NotEnoughResponses { missing: r - cfg.n_workers });
    }
    let shares = adgmm_encode(a, &inst, cfg.backend)?;
    let pool_cfg = PoolConfig {
        stragglers: cfg.stragglers.clone(),
        latency: cfg.latency,
        needed: Some(r),
        seed: cfg.seed,
        backend: cfg.backend,
        ..Default::default()
    };
    let backend = cfg.backend;
    let out = pool::dispatch(&shares, |m| m.gram_lower_with(backend), &pool_cfg)?;
    if out.responses.len() < r {
        return Err(Error::NotEnoughResponses { missing: r - out.responses.len() });
    }
    let gram = adgmm_decode(&out.responses, &inst)?;
    Ok(AnalogOutput { gram, trace: out.trace, shares })
}

/// Least squares `β = (A·Aᵀ)⁻¹ A b` for a real `t×s` matrix with linearly
/// independent rows, with the Gram matrix computed by [`adgmm_run`].
pub fn lstsq_demo(a: &ComplexMatrix, b: &[f64], cfg: &AnalogConfig) -> Result<Vec<f64>> {
    if b.len() != a.cols() {
        return Err(Error::Shape(format!("b has length {}, A has {} columns", b.len(), a.cols())));
    }
    let gram = adgmm_run(a, cfg)?.gram;
    let t = a.rows();
    let rhs: Vec<f64> = (0..t).map(|i| a.row(i).iter().zip(b).map(|(x, y)| x.re * y).sum()).collect();
    let g: Vec<Vec<f64>> = (0..t).map(|i| (0..t).map(|j| gram.get(i, j).re).collect()).collect();
    solve_real(g, rhs, 1e-10).ok_or(Error::SingularGram)
}
