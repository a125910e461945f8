//! Seeded, batch-parallel Monte Carlo plumbing.
//!
//! Every estimator draws from ChaCha8 streams keyed by a [`SeedStream`]: the
//! 64-bit master seed fixes the ChaCha key and the stream id selects one of
//! its 2^64 independent streams. Child streams are derived with
//! [`SeedStream::child`], which mixes a tag into the parent stream id through
//! SplitMix64. Samples are split into fixed-size batches, batch `i` reading
//! stream `child(i)`; batch statistics are combined in batch order, so the
//! result never depends on how many threads ran the batches.

use std::ops::AddAssign;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Samples per independent batch.
pub const BATCH_SIZE: u64 = 4096;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Address of one reproducible random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedStream {
    pub seed: u64,
    pub stream: u64,
}

impl SeedStream {
    pub fn new(seed: u64) -> Self {
        Self { seed, stream: 0 }
    }

    pub fn child(&self, tag: u64) -> Self {
        Self {
            seed: self.seed,
            stream: splitmix64(self.stream ^ splitmix64(tag)),
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Point estimate with its Monte Carlo standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithError {
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: u64,
    pub seed: u64,
}

impl EstimateWithError {
    /// A value known without sampling error.
    pub fn exact(value: f64, seed: u64) -> Self {
        Self {
            mean: value,
            stderr: 0.0,
            n_samples: 0,
            seed,
        }
    }

    /// Whether `value` lies within `k` standard errors of the mean.
    pub fn within(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.stderr
    }
}

/// Running mean and centred second moment (Welford), mergeable (Chan et al.).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let total = self.count + other.count;
        let delta = other.mean - self.mean;
        self.mean += delta * other.count as f64 / total as f64;
        self.m2 +=
            other.m2 + delta * delta * (self.count as f64 * other.count as f64) / total as f64;
        self.count = total;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }

    pub fn into_estimate(self, seed: u64) -> EstimateWithError {
        EstimateWithError {
            mean: self.mean,
            stderr: (self.variance() / self.count.max(1) as f64).sqrt(),
            n_samples: self.count,
            seed,
        }
    }
}

/// Run `n_samples` draws of `sample` in seeded batches and combine them in
/// batch order. `sample` returns the per-sample value; the auxiliary counters
/// it can bump are summed across batches (used for tie and flag counts).
pub fn run_batched<A, F>(n_samples: u64, key: SeedStream, sample: F) -> (Moments, A)
where
    A: Default + Copy + Send + AddAssign,
    F: Fn(&mut ChaCha8Rng, &mut A) -> f64 + Sync,
{
    let batches = n_samples.div_ceil(BATCH_SIZE);
    let parts: Vec<(Moments, A)> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = key.child(b).rng();
            let size = BATCH_SIZE.min(n_samples - b * BATCH_SIZE);
            let mut m = Moments::default();
            let mut aux = A::default();
            for _ in 0..size {
                m.push(sample(&mut rng, &mut aux));
            }
            (m, aux)
        })
        .collect();
    parts.iter().fold(
        (Moments::default(), A::default()),
        |(mut acc, mut aux), (m, a)| {
            acc.merge(m);
            aux += *a;
            (acc, aux)
        },
    )
}
