//! Simulated worker pool: runs one task per share, drops stragglers,
//! orders completions by a seeded latency model and accounts every element
//! moved in either direction.

use std::collections::BTreeSet;

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cmatrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::field::Fe;
use crate::matrix::{FieldMatrix, PackedLower};
use crate::par::Backend;

/// Anything that travels between user and worker.
pub trait Payload {
    /// Bytes per element on the wire.
    const ELEM_BYTES: usize;
    fn elems(&self) -> usize;
}

impl Payload for FieldMatrix {
    const ELEM_BYTES: usize = 8;
    fn elems(&self) -> usize {
        self.len()
    }
}

impl Payload for ComplexMatrix {
    const ELEM_BYTES: usize = 16;
    fn elems(&self) -> usize {
        self.len()
    }
}

impl Payload for PackedLower<Fe> {
    const ELEM_BYTES: usize = 8;
    fn elems(&self) -> usize {
        self.entries().len()
    }
}

impl Payload for PackedLower<Complex64> {
    const ELEM_BYTES: usize = 16;
    fn elems(&self) -> usize {
        self.entries().len()
    }
}

/// The encoded input handed to one worker.
#[derive(Debug, Clone, PartialEq)]
pub struct Share<M> {
    pub worker: usize,
    pub payload: M,
}

impl<M: Payload> Share<M> {
    pub fn byte_size(&self) -> usize {
        self.payload.elems() * M::ELEM_BYTES
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Response<R> {
    pub worker: usize,
    pub payload: R,
}

/// Which workers never answer.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Stragglers {
    #[default]
    None,
    Set(BTreeSet<usize>),
    /// This many workers, chosen with the pool seed.
    Count(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Latency {
    /// Every worker takes the same time; completions arrive by index.
    #[default]
    InOrder,
    /// Exponentially distributed latencies from a seeded generator.
    Seeded(u64),
}

#[derive(Debug, Clone, Default)]
pub struct PoolConfig {
    pub stragglers: Stragglers,
    pub latency: Latency,
    /// Workers whose received shares are recorded verbatim.
    pub capture: BTreeSet<usize>,
    /// Stop collecting after this many responses.
    pub needed: Option<usize>,
    pub seed: u64,
    pub backend: Backend,
}

impl PoolConfig {
    pub fn dropped_workers(&self, n: usize) -> Result<BTreeSet<usize>> {
        match &self.stragglers {
            Stragglers::None => Ok(BTreeSet::new()),
            Stragglers::Set(set) => {
                if let Some(&bad) = set.iter().find(|&&w| w >= n) {
                    return Err(Error::Config(format!("cannot drop worker {bad} of {n}")));
                }
                Ok(set.clone())
            }
            Stragglers::Count(k) => {
                if *k > n {
                    return Err(Error::Config(format!("cannot drop {k} of {n} workers")));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                rng.set_stream(7);
                Ok(sample(&mut rng, n, *k).into_iter().collect())
            }
        }
    }

    fn latencies(&self, n: usize) -> Vec<f64> {
        match self.latency {
            Latency::InOrder => vec![0.0; n],
            Latency::Seeded(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln() * 10.0).collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskTrace {
    pub n_workers: usize,
    pub upload_elems: usize,
    pub download_elems: usize,
    pub upload_bytes: usize,
    pub download_bytes: usize,
    /// Responses that were used, in completion order.
    pub responders: Vec<usize>,
    /// Responses that arrived after enough had been collected.
    pub ignored: Vec<usize>,
    pub dropped: Vec<usize>,
    /// Simulated latency per worker in milliseconds; `None` for stragglers.
    pub latency_ms: Vec<Option<f64>>,
}

#[derive(Debug, Clone)]
pub struct Dispatched<S, R> {
    pub responses: Vec<Response<R>>,
    pub trace: TaskTrace,
    pub captured: Vec<Share<S>>,
}

/// Sends every share to its worker, runs `compute` on the responsive ones
/// and returns their results in completion order.
pub fn dispatch<S, R, F>(shares: &[Share<S>], compute: F, config: &PoolConfig) -> Result<Dispatched<S, R>>
where
    S: Payload + Clone + Sync,
    R: Payload + Send,
    F: Fn(&S) -> R + Sync + Send,
{
    let n = shares.len();
    let dropped = config.dropped_workers(n)?;
    let captured: Vec<Share<S>> = shares.iter().filter(|s| config.capture.contains(&s.worker)).cloned().collect();
    let upload_elems: usize = shares.iter().map(|s| s.payload.elems()).sum();

    let latencies = config.latencies(n);
    let live: Vec<(usize, &Share<S>)> = shares.iter().enumerate().filter(|(i, _)| !dropped.contains(i)).collect();
    if live.is_empty() {
        return Err(Error::NoResponses);
    }
    let mut done: Vec<(f64, Response<R>)> = config.backend.map_slice(&live, |(slot, share)| {
        (latencies[*slot], Response { worker: share.worker, payload: compute(&share.payload) })
    });
    done.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.worker.cmp(&b.1.worker)));

    let keep = config.needed.unwrap_or(done.len()).min(done.len());
    let ignored = done[keep..].iter().map(|(_, r)| r.worker).collect();
    done.truncate(keep);
    let responses: Vec<Response<R>> = done.into_iter().map(|(_, r)| r).collect();
    let download_elems = responses.iter().map(|r| r.payload.elems()).sum();

    let trace = TaskTrace {
        n_workers: n,
        upload_elems,
        download_elems,
        upload_bytes: upload_elems * S::ELEM_BYTES,
        download_bytes: download_elems * R::ELEM_BYTES,
        responders: responses.iter().map(|r| r.worker).collect(),
        ignored,
        dropped: dropped.iter().map(|&i| shares[i].worker).collect(),
        latency_ms: (0..n).map(|i| (!dropped.contains(&i)).then_some(latencies[i])).collect(),
    };
    Ok(Dispatched { responses, trace, captured })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;

    fn shares(n: usize) -> (PrimeField, Vec<Share<FieldMatrix>>) {
        let f = PrimeField::new(101).unwrap();
        let s = (0..n)
            .map(|i| Share {
                worker: i,
                payload: FieldMatrix::from_fn(2, 3, |r, c| f.elem((i * 7 + r * 3 + c) as u64)),
            })
            .collect();
        (f, s)
    }

    #[test]
    fn drop_three_of_seventeen() {
        let (f, s) = shares(17);
        let cfg =
            PoolConfig { stragglers: Stragglers::Count(3), latency: Latency::Seeded(4), seed: 1, ..Default::default() };
        let out = dispatch(&s, |m| m.gram_lower(&f), &cfg).unwrap();
        assert_eq!(out.responses.len(), 14);
        assert_eq!(out.trace.dropped.len(), 3);
        assert_eq!(out.trace.upload_elems, 17 * 6);
        assert_eq!(out.trace.download_elems, 14 * 3);
        for r in &out.responses {
            assert!(!out.trace.dropped.contains(&r.worker));
            assert_eq!(r.payload, s[r.worker].payload.gram_lower(&f));
        }
    }

    #[test]
    fn no_drops_means_everyone_responds() {
        let (f, s) = shares(5);
        let out = dispatch(&s, |m| m.gram_lower(&f), &PoolConfig::default()).unwrap();
        assert_eq!(out.trace.responders, vec![0, 1, 2, 3, 4]);
        assert!(out.trace.dropped.is_empty());
    }

    #[test]
    fn capture_is_verbatim() {
        let (f, s) = shares(8);
        let cfg = PoolConfig { capture: [5].into(), ..Default::default() };
        let out = dispatch(&s, |m| m.gram_lower(&f), &cfg).unwrap();
        assert_eq!(out.captured, vec![s[5].clone()]);
    }

    #[test]
    fn all_dropped_is_an_error() {
        let (f, s) = shares(3);
        let cfg = PoolConfig { stragglers: Stragglers::Count(3), ..Default::default() };
        assert!(matches!(dispatch(&s, |m| m.gram_lower(&f), &cfg), Err(Error::NoResponses)));
        let cfg = PoolConfig { stragglers: Stragglers::Count(4), ..Default::default() };
        assert!(matches!(dispatch(&s, |m| m.gram_lower(&f), &cfg), Err(Error::Config(_))));
    }

    #[test]
    fn payloads_do_not_depend_on_latency_or_backend() {
        let (f, s) = shares(9);
        let base =
            dispatch(&s, |m| m.gram_lower(&f), &PoolConfig { backend: Backend::Sequential, ..Default::default() })
                .unwrap();
        let shuffled = dispatch(
            &s,
            |m| m.gram_lower(&f),
            &PoolConfig { latency: Latency::Seeded(99), backend: Backend::Parallel, ..Default::default() },
        )
        .unwrap();
        let mut a: Vec<_> = base.responses.iter().map(|r| (r.worker, r.payload.clone())).collect();
        let mut b: Vec<_> = shuffled.responses.iter().map(|r| (r.worker, r.payload.clone())).collect();
        a.sort_by_key(|x| x.0);
        b.sort_by_key(|x| x.0);
        assert_eq!(a, b);
        assert_ne!(shuffled.trace.responders, base.trace.responders);
    }

    #[test]
    fn needed_limits_download() {
        let (f, s) = shares(6);
        let cfg = PoolConfig { needed: Some(4), latency: Latency::Seeded(3), ..Default::default() };
        let out = dispatch(&s, |m| m.gram_lower(&f), &cfg).unwrap();
        assert_eq!(out.responses.len(), 4);
        assert_eq!(out.trace.ignored.len(), 2);
        assert_eq!(out.trace.download_elems, 4 * 3);
        let again = dispatch(&s, |m| m.gram_lower(&f), &cfg).unwrap();
        assert_eq!(again.trace, out.trace);
    }
}
