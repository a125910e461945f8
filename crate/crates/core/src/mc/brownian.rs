use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::pattern::{make_pattern, CorrelationPattern};
use crate::dyadic::Region;
use crate::error::{Error, Result};
use crate::estimate::{run_batched, EstimateWithError, SeedStream};

/// Share of tied samples above which an argmin run is flagged.
const TIE_FLAG_FRACTION: f64 = 1e-3;

/// Two Brownian paths sampled on the same uniform grid of `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledPath {
    pub dt: f64,
    pub b: Vec<f64>,
    pub b_prime: Vec<f64>,
}

/// Gaussian increments `dB ~ N(0, dt)`, `dB' = rho_k dB + sqrt(1 - rho_k^2) dW`;
/// steps with `rho_k = 1` reuse `dB` bit for bit.
pub fn gen_coupled_bm<R: Rng + ?Sized>(pattern: &CorrelationPattern, rng: &mut R) -> CoupledPath {
    let dt = pattern.dt();
    let sd = dt.sqrt();
    let n = pattern.n_steps();
    let mut b = Vec::with_capacity(n + 1);
    let mut b_prime = Vec::with_capacity(n + 1);
    let (mut x, mut xp) = (0.0f64, 0.0f64);
    b.push(x);
    b_prime.push(xp);
    for &r in pattern.rho_per_step() {
        let (inc, inc_p) = coupled_increment(r, sd, rng);
        x += inc;
        xp += inc_p;
        b.push(x);
        b_prime.push(xp);
    }
    CoupledPath { dt, b, b_prime }
}

#[inline]
pub(super) fn coupled_increment<R: Rng + ?Sized>(rho: f64, sd: f64, rng: &mut R) -> (f64, f64) {
    let inc = sd * rng.sample::<f64, _>(StandardNormal);
    if rho >= 1.0 {
        (inc, inc)
    } else {
        let other = sd * rng.sample::<f64, _>(StandardNormal);
        (inc, rho * inc + (1.0 - rho * rho).sqrt() * other)
    }
}

/// Coincidence probability of the grid argmins together with diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArgminEstimate {
    /// Coincidences at a grid time whose adjacent steps both carry
    /// identical increments.
    pub estimate: EstimateWithError,
    /// All coincidences of the two grid argmin indices.
    pub raw: EstimateWithError,
    /// Samples in which either path attained its minimum at two grid points.
    pub ties: u64,
    /// Set when ties exceed 0.1% of samples.
    pub flagged: bool,
}

#[derive(Debug, Clone, Copy, Default)]
struct ArgminCounts {
    ties: u64,
    loose: u64,
}

impl std::ops::AddAssign for ArgminCounts {
    fn add_assign(&mut self, other: Self) {
        self.ties += other.ties;
        self.loose += other.loose;
    }
}

/// Whether the paths move rigidly on both sides of each grid time.
fn rigid_times(pattern: &CorrelationPattern) -> Vec<bool> {
    let n = pattern.n_steps();
    (0..=n)
        .map(|j| (j == 0 || pattern.rho(j - 1) >= 1.0) && (j == n || pattern.rho(j) >= 1.0))
        .collect()
}

/// `P(argmin B = argmin B')` over the grid `{0, 1/n, ..., 1}`; ties resolve
/// to the smallest index.
///
/// Two continuous paths can share their minimum time only where they move
/// rigidly, so `estimate` counts a coincidence only at grid times between two
/// identical-increment steps. Coincidences next to a perturbed step are
/// grid artefacts that fade slowly with refinement; `raw` keeps them.
pub fn argmin_coincidence<R: Region + ?Sized>(
    a: &R,
    rho: f64,
    n_grid: usize,
    n_samples: u64,
    key: SeedStream,
) -> Result<ArgminEstimate> {
    if n_grid < 2 {
        return Err(Error::Domain("argmin grid needs at least two steps".into()));
    }
    if n_samples < 2 {
        return Err(Error::Domain("at least two samples are required".into()));
    }
    let pattern = make_pattern(a, rho, n_grid)?;
    let rigid = rigid_times(&pattern);
    let sd = pattern.dt().sqrt();
    let (moments, counts) = run_batched(n_samples, key, |rng, counts: &mut ArgminCounts| {
        let (mut x, mut xp) = (0.0f64, 0.0f64);
        let (mut min, mut min_p) = (0.0f64, 0.0f64);
        let (mut arg, mut arg_p) = (0usize, 0usize);
        let (mut tied, mut tied_p) = (false, false);
        for (k, &r) in pattern.rho_per_step().iter().enumerate() {
            let (inc, inc_p) = coupled_increment(r, sd, rng);
            x += inc;
            xp += inc_p;
            if x < min {
                min = x;
                arg = k + 1;
                tied = false;
            } else if x == min {
                tied = true;
            }
            if xp < min_p {
                min_p = xp;
                arg_p = k + 1;
                tied_p = false;
            } else if xp == min_p {
                tied_p = true;
            }
        }
        if tied || tied_p {
            counts.ties += 1;
        }
        match (arg == arg_p, rigid[arg]) {
            (true, true) => 1.0,
            (true, false) => {
                counts.loose += 1;
                0.0
            }
            _ => 0.0,
        }
    });
    let estimate = moments.into_estimate(key.seed);
    let p = estimate.mean + counts.loose as f64 / n_samples as f64;
    let raw = EstimateWithError {
        mean: p,
        stderr: (p * (1.0 - p) / (n_samples - 1) as f64).max(0.0).sqrt(),
        n_samples,
        seed: key.seed,
    };
    Ok(ArgminEstimate {
        estimate,
        raw,
        ties: counts.ties,
        flagged: counts.ties as f64 > TIE_FLAG_FRACTION * n_samples as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::TimeSet;

    #[test]
    fn identity_pattern_gives_identical_paths() {
        let p = CorrelationPattern::uniform(64, 1.0).unwrap();
        let path = gen_coupled_bm(&p, &mut SeedStream::new(4).rng());
        assert_eq!(path.b, path.b_prime);
        assert_eq!(path.b.len(), 65);
    }

    #[test]
    fn terminal_moments() {
        let a: TimeSet = "1/4..1/2".parse().unwrap();
        let p = make_pattern(&a, 0.5, 64).unwrap();
        let mut rng = SeedStream::new(5).rng();
        let n = 100_000;
        let (mut var, mut cov) = (0.0, 0.0);
        for _ in 0..n {
            let path = gen_coupled_bm(&p, &mut rng);
            let (x, y) = (path.b[64], path.b_prime[64]);
            var += x * x;
            cov += x * y;
        }
        let (var, cov) = (var / n as f64, cov / n as f64);
        // 16 of 64 steps perturbed plus the step starting at 1/2
        let expected_cov = 1.0 - 0.5 * 17.0 / 64.0;
        assert!(
            (var - 1.0).abs() < 4.0 * (2.0f64 / n as f64).sqrt(),
            "{var}"
        );
        assert!((cov - expected_cov).abs() < 0.02, "{cov}");
    }

    #[test]
    fn argmin_empty_set_is_certain() {
        let e = argmin_coincidence(&TimeSet::empty(), 0.5, 256, 1000, SeedStream::new(1)).unwrap();
        assert_eq!(e.estimate.mean, 1.0);
        assert_eq!(e.ties, 0);
        assert!(!e.flagged);
    }

    #[test]
    fn argmin_full_set_never_rigid() {
        let e = argmin_coincidence(&TimeSet::full(), 0.0, 256, 4096, SeedStream::new(2)).unwrap();
        assert_eq!(e.estimate.mean, 0.0);
        assert!(e.raw.mean > 0.0 && e.raw.mean < 0.1);
    }

    #[test]
    fn rigid_times_border_perturbed_steps() {
        let p = CorrelationPattern::from_entries(vec![1.0, 0.5, 1.0, 1.0]).unwrap();
        assert_eq!(rigid_times(&p), vec![true, false, false, true, true]);
    }

    #[test]
    fn argmin_validates_grid() {
        assert!(argmin_coincidence(&TimeSet::empty(), 0.5, 1, 10, SeedStream::new(1)).is_err());
    }
}
