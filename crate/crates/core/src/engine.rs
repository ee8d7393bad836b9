//! The secure Gram scheme end to end: evaluation points, share encoding,
//! dispatch and decoding of `A·Aᵀ` from any `R` worker responses.
//!
//! Shares are `f(α_i)` with `f(x) = Σ_j A_j x^{φ_j} + R₁ x^{φ_{p+1}}`; each
//! worker returns the lower triangle of `f(α_i) f(α_i)ᵀ`, which evaluates a
//! polynomial whose exponents are the distinct entries of `φ ⊕ φ`. Decoding
//! solves the generalized Vandermonde system on those exponents and sums the
//! coefficients sitting on the useful diagonals `2φ_j`.

use std::collections::{BTreeSet, HashSet};
use std::str::FromStr;

use rand::rngs::OsRng;
use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::degree::{distinct_exponents, is_valid, ExponentSet, ExponentVector, Validity};
use crate::error::{Error, Result};
use crate::exponents::{construct_doubling, construct_trivial, search_min_max};
use crate::field::{Fe, PrimeField};
use crate::linalg::{is_invertible_field, solve_field};
use crate::matrix::{FieldMatrix, PackedLower};
use crate::par::Backend;
use crate::pool::{self, Dispatched, Latency, PoolConfig, Response, Share, Stragglers, TaskTrace};
use crate::wire::{self, RemoteConfig};

/// Check every subset while there are at most this many.
pub const EXHAUSTIVE_SUBSET_LIMIT: u128 = 100_000;
/// Otherwise check this many random subsets.
pub const SAMPLED_SUBSETS: usize = 1000;
pub const POINT_ATTEMPTS: usize = 100;

pub type EncodedShare = Share<FieldMatrix>;
pub type GramResponse = Response<PackedLower<Fe>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecodeMode {
    /// Solve on the distinct exponents H; points are verified so that any
    /// `|H|` responses decode.
    SubsetSafe,
    /// Plain interpolation on `0..=2φ_{p+1}`; any distinct nonzero points.
    Interpolation,
}

impl FromStr for DecodeMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "subset-safe" => Ok(DecodeMode::SubsetSafe),
            "interp" | "interpolation" => Ok(DecodeMode::Interpolation),
            other => Err(Error::Config(format!("unknown decode mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemeChoice {
    Trivial,
    Doubling,
    Search { budget: Option<u64> },
    Explicit(Vec<u64>),
}

impl SchemeChoice {
    pub fn exponents(&self, p: usize) -> Result<ExponentVector> {
        match self {
            SchemeChoice::Trivial => construct_trivial(p),
            SchemeChoice::Doubling => construct_doubling(p),
            SchemeChoice::Search { budget } => Ok(search_min_max(p, *budget)?.phi),
            SchemeChoice::Explicit(exps) => {
                let phi = ExponentVector::for_gram(exps.clone())?;
                match is_valid(phi.as_slice(), p)? {
                    Validity::Valid => Ok(phi),
                    Validity::Invalid(c) => Err(Error::InvalidExponents(format!(
                        "diagonal {} collides with cell {:?} (value {})",
                        c.diagonal, c.cell, c.value
                    ))),
                }
            }
        }
    }
}

impl FromStr for SchemeChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trivial" => Ok(SchemeChoice::Trivial),
            "doubling" => Ok(SchemeChoice::Doubling),
            "search" => Ok(SchemeChoice::Search { budget: None }),
            other => Err(Error::InvalidScheme(other.to_string())),
        }
    }
}

/// Exponents the decoder solves for under `mode`.
pub fn decoding_exponents(phi: &ExponentVector, mode: DecodeMode) -> Vec<u64> {
    match mode {
        DecodeMode::SubsetSafe => distinct_exponents(phi.as_slice()).members().to_vec(),
        DecodeMode::Interpolation => (0..=2 * phi.largest()).collect(),
    }
}

/// Everything needed to encode and decode one job.
#[derive(Debug, Clone)]
pub struct SchemeInstance {
    pub field: PrimeField,
    pub t: usize,
    pub s: usize,
    pub p: usize,
    pub phi: ExponentVector,
    pub points: Vec<Fe>,
    pub h: ExponentSet,
    pub mode: DecodeMode,
    decode_exps: Vec<u64>,
}

impl SchemeInstance {
    /// Picks `n` evaluation points with `rng` according to `mode`.
    pub fn new<R: Rng + ?Sized>(
        field: PrimeField,
        (t, s): (usize, usize),
        phi: ExponentVector,
        n: usize,
        mode: DecodeMode,
        rng: &mut R,
        backend: Backend,
    ) -> Result<Self> {
        let exps = decoding_exponents(&phi, mode);
        let points = choose_points(&field, n, &exps, mode, rng, backend)?;
        Self::with_points(field, (t, s), phi, points, mode)
    }

    pub fn with_points(
        field: PrimeField,
        (t, s): (usize, usize),
        phi: ExponentVector,
        points: Vec<Fe>,
        mode: DecodeMode,
    ) -> Result<Self> {
        let p = phi.useful();
        if p == 0 || phi.len() != p + 1 {
            return Err(Error::InvalidExponents("need p data exponents and one noise exponent".into()));
        }
        if points.iter().any(|a| a.is_zero()) {
            return Err(Error::Config("evaluation points must be nonzero".into()));
        }
        if points.iter().collect::<HashSet<_>>().len() != points.len() {
            return Err(Error::Config("evaluation points must be distinct".into()));
        }
        let h = distinct_exponents(phi.as_slice());
        let decode_exps = decoding_exponents(&phi, mode);
        Ok(SchemeInstance { field, t, s, p, phi, points, h, mode, decode_exps })
    }

    pub fn n_workers(&self) -> usize {
        self.points.len()
    }

    /// `|H|`, or `2φ_{p+1} + 1` in interpolation mode.
    pub fn recovery_threshold(&self) -> usize {
        self.decode_exps.len()
    }

    pub fn decode_exponents(&self) -> &[u64] {
        &self.decode_exps
    }

    pub fn chunk_cols(&self) -> usize {
        self.s.div_ceil(self.p)
    }

    pub fn share_elems(&self) -> usize {
        self.t * self.chunk_cols()
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
        if acc > u64::MAX as u128 {
            return u128::MAX;
        }
    }
    acc
}

/// Generalized Vandermonde `[α_i^{e_k}]` restricted to the rows in `subset`.
fn vandermonde(field: &PrimeField, points: &[Fe], exps: &[u64], subset: &[usize]) -> Vec<Vec<Fe>> {
    subset.iter().map(|&i| exps.iter().map(|&e| field.pow(points[i], e)).collect()).collect()
}

fn sample_nonzero<R: Rng + ?Sized>(field: &PrimeField, n: usize, rng: &mut R) -> Vec<Fe> {
    let q = field.modulus();
    if (q - 1) as u128 <= 4 * n as u128 {
        let mut all: Vec<u64> = (1..q).collect();
        all.shuffle(rng);
        all.truncate(n);
        return all.into_iter().map(|v| field.elem(v)).collect();
    }
    let mut seen = HashSet::with_capacity(n);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let v = rng.gen_range(1..q);
        if seen.insert(v) {
            out.push(field.elem(v));
        }
    }
    out
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// True when every `|exps|`-subset of `points` (or a random sample of them
/// when there are too many) gives an invertible system.
pub fn points_decodable<R: Rng + ?Sized>(
    field: &PrimeField,
    points: &[Fe],
    exps: &[u64],
    rng: &mut R,
    backend: Backend,
) -> bool {
    let (n, r) = (points.len(), exps.len());
    if r > n {
        return false;
    }
    let check = |subset: &Vec<usize>| is_invertible_field(field, vandermonde(field, points, exps, subset));
    if binomial(n, r) <= EXHAUSTIVE_SUBSET_LIMIT {
        let mut idx: Vec<usize> = (0..r).collect();
        let mut batch = Vec::with_capacity(4096);
        loop {
            batch.push(idx.clone());
            let more = next_combination(&mut idx, n);
            if batch.len() == 4096 || !more {
                if !backend.all_of(&batch, check) {
                    return false;
                }
                batch.clear();
            }
            if !more {
                return true;
            }
        }
    }
    let subsets: Vec<Vec<usize>> = (0..SAMPLED_SUBSETS)
        .map(|_| {
            let mut s = rand::seq::index::sample(rng, n, r).into_vec();
            s.sort_unstable();
            s
        })
        .collect();
    backend.all_of(&subsets, check)
}

/// `n` distinct nonzero evaluation points. In subset-safe mode with gapped
/// exponents the draw is verified and repeated up to [`POINT_ATTEMPTS`]
/// times.
pub fn choose_points<R: Rng + ?Sized>(
    field: &PrimeField,
    n: usize,
    exps: &[u64],
    mode: DecodeMode,
    rng: &mut R,
    backend: Backend,
) -> Result<Vec<Fe>> {
    if field.modulus() <= n as u64 {
        return Err(Error::FieldTooSmall { q: field.modulus(), n });
    }
    let contiguous = exps.iter().enumerate().all(|(i, &e)| e == i as u64);
    if mode == DecodeMode::Interpolation || contiguous || exps.len() > n {
        // plain Vandermonde (or too few workers to ever decode: nothing to verify)
        return Ok(sample_nonzero(field, n, rng));
    }
    for _ in 0..POINT_ATTEMPTS {
        let pts = sample_nonzero(field, n, rng);
        if points_decodable(field, &pts, exps, rng, backend) {
            return Ok(pts);
        }
    }
    Err(Error::PointSelectionFailed { attempts: POINT_ATTEMPTS })
}

/// Encodes with an explicit noise block `mask` (shape `t × ⌈s/p⌉`).
pub fn encode_with_mask(
    a: &FieldMatrix,
    inst: &SchemeInstance,
    mask: &FieldMatrix,
    backend: Backend,
) -> Result<Vec<EncodedShare>> {
    if a.shape() != (inst.t, inst.s) {
        return Err(Error::Shape(format!("input is {:?}, instance expects {:?}", a.shape(), (inst.t, inst.s))));
    }
    if mask.shape() != (inst.t, inst.chunk_cols()) {
        return Err(Error::Shape("noise block has the wrong shape".into()));
    }
    let f = &inst.field;
    let mut blocks = a.partition_ipp(inst.p)?;
    blocks.push(mask.clone());
    let exps = inst.phi.as_slice();
    Ok(backend.map_range(inst.points.len(), |i| {
        let alpha = inst.points[i];
        let mut acc = FieldMatrix::zeros(inst.t, inst.chunk_cols());
        for (block, &e) in blocks.iter().zip(exps) {
            acc.add_scaled(f, f.pow(alpha, e), block).expect("block shapes agree");
        }
        Share { worker: i, payload: acc }
    }))
}

/// Draws `R₁` uniformly from `rng` and encodes one share per point.
pub fn encode_shares<R: RngCore + ?Sized>(
    a: &FieldMatrix,
    inst: &SchemeInstance,
    rng: &mut R,
    backend: Backend,
) -> Result<Vec<EncodedShare>> {
    let mask = FieldMatrix::random(&inst.field, inst.t, inst.chunk_cols(), rng);
    encode_with_mask(a, inst, &mask, backend)
}

/// Linear combination weights `w` such that `Σ_i w_i y_i` is the sum of the
/// useful coefficients, for responses from `workers`.
pub fn decoding_weights(inst: &SchemeInstance, workers: &[usize]) -> Result<Vec<Fe>> {
    let f = &inst.field;
    let exps = inst.decode_exponents();
    let useful: BTreeSet<u64> = inst.phi.as_slice()[..inst.p].iter().map(|e| 2 * e).collect();
    // c = V⁻¹y, so uᵀc = (V⁻ᵀu)ᵀy
    let vt: Vec<Vec<Fe>> = exps.iter().map(|&e| workers.iter().map(|&w| f.pow(inst.points[w], e)).collect()).collect();
    let u: Vec<Fe> = exps.iter().map(|e| if useful.contains(e) { Fe::ONE } else { Fe::ZERO }).collect();
    solve_field(f, vt, u).ok_or(Error::DecodingSingular)
}

/// Recovers `A·Aᵀ` from at least `R` responses, in any order. The `R`
/// lowest worker indices are used, so the output does not depend on arrival
/// order.
pub fn decode_gram(responses: &[GramResponse], inst: &SchemeInstance, backend: Backend) -> Result<FieldMatrix> {
    let r = inst.recovery_threshold();
    let mut by_worker: Vec<&GramResponse> = responses.iter().collect();
    by_worker.sort_by_key(|resp| resp.worker);
    by_worker.dedup_by_key(|resp| resp.worker);
    if let Some(bad) = by_worker.iter().find(|resp| resp.worker >= inst.n_workers()) {
        return Err(Error::Config(format!("response from unknown worker {}", bad.worker)));
    }
    if by_worker.len() < r {
        return Err(Error::NotEnoughResponses { missing: r - by_worker.len() });
    }
    let used = &by_worker[..r];
    if let Some(bad) = used.iter().find(|resp| resp.payload.dim() != inst.t) {
        return Err(Error::Shape(format!("response from worker {} has dimension {}", bad.worker, bad.payload.dim())));
    }
    let workers: Vec<usize> = used.iter().map(|resp| resp.worker).collect();
    let weights = decoding_weights(inst, &workers)?;
    let f = &inst.field;
    let len = crate::matrix::triangle_len(inst.t);
    let entries = backend.map_range(len, |k| {
        let ys: Vec<Fe> = used.iter().map(|resp| resp.payload.entries()[k]).collect();
        f.dot(&weights, &ys)
    });
    Ok(PackedLower::new(inst.t, entries)?.unpack())
}

#[derive(Debug, Clone, Default)]
pub enum Transport {
    #[default]
    InProcess,
    Remote(RemoteConfig),
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub p: usize,
    pub scheme: SchemeChoice,
    pub n_workers: usize,
    /// Collusion parameter X; only 1 is supported.
    pub collusion: usize,
    pub mode: DecodeMode,
    pub seed: u64,
    /// Draw `R₁` from the OS entropy source instead of the seeded generator.
    pub secure_noise: bool,
    pub stragglers: Stragglers,
    pub latency: Latency,
    pub capture: BTreeSet<usize>,
    pub backend: Backend,
    pub transport: Transport,
}

impl RunConfig {
    pub fn new(p: usize, scheme: SchemeChoice, n_workers: usize) -> Self {
        RunConfig {
            p,
            scheme,
            n_workers,
            collusion: 1,
            mode: DecodeMode::SubsetSafe,
            seed: 0,
            secure_noise: false,
            stragglers: Stragglers::None,
            latency: Latency::InOrder,
            capture: BTreeSet::new(),
            backend: Backend::default(),
            transport: Transport::InProcess,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub gram: FieldMatrix,
    pub trace: TaskTrace,
    pub instance: SchemeInstance,
    pub captured: Vec<EncodedShare>,
}

fn seeded(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// partition → encode → dispatch → collect the first `R` → decode.
pub fn run_sdgmm(field: PrimeField, a: &FieldMatrix, cfg: &RunConfig) -> Result<RunOutput> {
    if cfg.collusion != 1 {
        return Err(Error::UnsupportedCollusion(cfg.collusion));
    }
    if cfg.p == 0 {
        return Err(Error::InvalidPartition(0));
    }
    let phi = cfg.scheme.exponents(cfg.p)?;
    let r = decoding_exponents(&phi, cfg.mode).len();
    if cfg.n_workers < r {
        return Err(Error::NotEnoughResponses { missing: r - cfg.n_workers });
    }
    let inst =
        SchemeInstance::new(field, a.shape(), phi, cfg.n_workers, cfg.mode, &mut seeded(cfg.seed, 0), cfg.backend)?;
    let shares = if cfg.secure_noise {
        encode_shares(a, &inst, &mut OsRng, cfg.backend)?
    } else {
        encode_shares(a, &inst, &mut seeded(cfg.seed, 1), cfg.backend)?
    };
    let pool_cfg = PoolConfig {
        stragglers: cfg.stragglers.clone(),
        latency: cfg.latency,
        capture: cfg.capture.clone(),
        needed: Some(r),
        seed: cfg.seed,
        backend: cfg.backend,
    };
    let Dispatched { responses, trace, captured } = match &cfg.transport {
        Transport::InProcess => {
            let backend = cfg.backend;
            pool::dispatch(&shares, |m| m.gram_lower_with(&field, backend), &pool_cfg)?
        }
        Transport::Remote(remote) => wire::dispatch_remote(&shares, &field, remote, &pool_cfg)?,
    };
    if responses.len() < r {
        return Err(Error::NotEnoughResponses { missing: r - responses.len() });
    }
    let gram = decode_gram(&responses, &inst, cfg.backend)?;
    Ok(RunOutput { gram, trace, instance: inst, captured })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f11() -> PrimeField {
        PrimeField::new(11).unwrap()
    }

    #[test]
    fn scalar_share_by_hand() {
        let f = f11();
        let phi = ExponentVector::for_gram(vec![0, 1, 3]).unwrap();
        let inst = SchemeInstance::with_points(f, (1, 2), phi, vec![f.elem(2)], DecodeMode::Interpolation).unwrap();
        let a = FieldMatrix::from_u64_rows(&f, &[vec![3, 5]]).unwrap();
        let mask = FieldMatrix::from_u64_rows(&f, &[vec![7]]).unwrap();
        let shares = encode_with_mask(&a, &inst, &mask, Backend::Sequential).unwrap();
        // 3 + 5·2 + 7·8 = 69 = 3 mod 11
        assert_eq!(shares[0].payload.get(0, 0), f.elem(3));
    }

    #[test]
    fn zero_input_and_zero_mask_give_zero_shares() {
        let f = PrimeField::default_field();
        let phi = ExponentVector::for_gram(vec![0, 1, 3]).unwrap();
        let inst =
            SchemeInstance::new(f, (2, 4), phi, 6, DecodeMode::SubsetSafe, &mut seeded(1, 0), Backend::Sequential)
                .unwrap();
        let shares =
            encode_with_mask(&FieldMatrix::zeros(2, 4), &inst, &FieldMatrix::zeros(2, 2), Backend::Sequential).unwrap();
        assert!(shares.iter().all(|s| s.payload.is_zero()));
    }

    #[test]
    fn mask_enumeration_permutes_the_field() {
        let f = PrimeField::new(7).unwrap();
        let phi = ExponentVector::for_gram(vec![0, 1, 3]).unwrap();
        let a = FieldMatrix::from_u64_rows(&f, &[vec![4, 2]]).unwrap();
        for alpha in 1..7 {
            let inst =
                SchemeInstance::with_points(f, (1, 2), phi.clone(), vec![f.elem(alpha)], DecodeMode::Interpolation)
                    .unwrap();
            let mut seen: Vec<u64> = (0..7)
                .map(|r| {
                    let mask = FieldMatrix::from_u64_rows(&f, &[vec![r]]).unwrap();
                    encode_with_mask(&a, &inst, &mask, Backend::Sequential).unwrap()[0].payload.get(0, 0).value()
                })
                .collect();
            seen.sort_unstable();
            assert_eq!(seen, (0..7).collect::<Vec<_>>());
        }
    }

    #[test]
    fn points_errors_and_contiguous_shortcut() {
        let f = PrimeField::new(5).unwrap();
        let err = choose_points(&f, 6, &[0, 1, 2], DecodeMode::SubsetSafe, &mut seeded(0, 0), Backend::Sequential);
        assert!(matches!(err, Err(Error::FieldTooSmall { q: 5, n: 6 })));
        let big = PrimeField::default_field();
        let pts = choose_points(
            &big,
            9,
            &(0..9).collect::<Vec<_>>(),
            DecodeMode::SubsetSafe,
            &mut seeded(0, 0),
            Backend::Sequential,
        )
        .unwrap();
        assert_eq!(pts.len(), 9);
        assert!(pts.iter().all(|p| !p.is_zero()));
    }

    #[test]
    fn gapped_points_are_verified_for_every_subset() {
        let f = PrimeField::default_field();
        let h = distinct_exponents(&[0, 1, 3, 7, 8]);
        for n in [14, 15] {
            let pts = choose_points(&f, n, h.members(), DecodeMode::SubsetSafe, &mut seeded(5, 0), Backend::default())
                .unwrap();
            let mut idx: Vec<usize> = (0..14).collect();
            loop {
                assert!(is_invertible_field(&f, vandermonde(&f, &pts, h.members(), &idx)));
                if !next_combination(&mut idx, n) {
                    break;
                }
            }
        }
    }

    #[test]
    fn small_field_rejects_bad_points() {
        // over F_7, α⁶ = 1 so exponents 0 and 6 give equal columns
        let f = PrimeField::new(7).unwrap();
        let err = choose_points(&f, 3, &[0, 1, 6], DecodeMode::SubsetSafe, &mut seeded(0, 0), Backend::Sequential);
        assert!(matches!(err, Err(Error::PointSelectionFailed { .. })));
    }

    #[test]
    fn identity_decodes_to_identity() {
        let f = PrimeField::default_field();
        let a = FieldMatrix::identity(&f, 4);
        let out = run_sdgmm(f, &a, &RunConfig::new(2, SchemeChoice::Search { budget: None }, 6)).unwrap();
        assert_eq!(out.gram, FieldMatrix::identity(&f, 4));
    }

    #[test]
    fn too_few_workers_and_collusion_are_rejected() {
        let f = PrimeField::default_field();
        let a = FieldMatrix::identity(&f, 2);
        let err = run_sdgmm(f, &a, &RunConfig::new(1, SchemeChoice::Doubling, 2)).unwrap_err();
        assert!(matches!(err, Error::NotEnoughResponses { missing: 1 }));
        let mut cfg = RunConfig::new(1, SchemeChoice::Doubling, 3);
        cfg.collusion = 2;
        assert!(matches!(run_sdgmm(f, &a, &cfg), Err(Error::UnsupportedCollusion(2))));
        let bad = RunConfig::new(4, SchemeChoice::Explicit(vec![0, 1, 2, 3, 4]), 20);
        assert!(matches!(run_sdgmm(f, &a, &bad), Err(Error::InvalidExponents(_))));
    }

    #[test]
    fn decode_reports_missing_responses() {
        let f = PrimeField::default_field();
        let phi = ExponentVector::for_gram(vec![0, 1]).unwrap();
        let inst =
            SchemeInstance::new(f, (1, 1), phi, 3, DecodeMode::SubsetSafe, &mut seeded(0, 0), Backend::Sequential)
                .unwrap();
        let one = GramResponse { worker: 0, payload: PackedLower::new(1, vec![Fe::ONE]).unwrap() };
        let dup = one.clone();
        assert!(matches!(
            decode_gram(&[one, dup], &inst, Backend::Sequential),
            Err(Error::NotEnoughResponses { missing: 2 })
        ));
    }

    #[test]
    fn secure_noise_still_decodes() {
        let f = PrimeField::default_field();
        let a = FieldMatrix::random(&f, 3, 5, &mut seeded(2, 9));
        let mut cfg = RunConfig::new(3, SchemeChoice::Doubling, 10);
        cfg.secure_noise = true;
        cfg.stragglers = Stragglers::Count(1);
        let out = run_sdgmm(f, &a, &cfg).unwrap();
        assert_eq!(out.gram, a.matmul(&f, &a.transpose()).unwrap());
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(14, 14), 1);
        assert_eq!(binomial(15, 14), 15);
        assert_eq!(binomial(20, 14), 38_760);
        assert_eq!(binomial(200, 100), u128::MAX);
    }
}
