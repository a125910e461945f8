use rand::{Rng, RngCore};

use super::pattern::{make_pattern, CorrelationPattern};
use crate::dyadic::Region;
use crate::error::{Error, Result};
use crate::estimate::{run_batched, EstimateWithError, SeedStream};
use crate::walk::{sgn, WalkPath};
use crate::walsh::{noise_functional, sgn_functional_table, walsh_transform, MAX_COORDINATES};

/// Longest walk accepted by the walk estimators.
pub const MAX_WALK_LENGTH: usize = 10_000_000;

const UNIT_53: f64 = (1u64 << 53) as f64;

/// 53-bit thresholds for "flip this step"; zero means never flip.
fn flip_thresholds(pattern: &CorrelationPattern) -> Vec<u64> {
    pattern
        .rho_per_step()
        .iter()
        .map(|&r| (0.5 * (1.0 - r) * UNIT_53) as u64)
        .collect()
}

/// Streams the coupled increments `(e_k, e'_k)` into `visit`.
#[inline]
fn for_each_coupled_step<R: RngCore + ?Sized>(
    thresholds: &[u64],
    rng: &mut R,
    mut visit: impl FnMut(i64, i64) -> bool,
) {
    let mut bits = 0u64;
    for (k, &threshold) in thresholds.iter().enumerate() {
        if k % 64 == 0 {
            bits = rng.next_u64();
        }
        let e = if bits >> (k % 64) & 1 == 1 { -1 } else { 1 };
        let flipped = threshold != 0 && (rng.next_u64() >> 11) < threshold;
        if !visit(e, if flipped { -e } else { e }) {
            return;
        }
    }
}

/// A pair of ±1 increment paths: `e` uniform and `e'_k = e_k` with
/// probability `(1 + rho_k)/2`, independently over `k`.
pub fn gen_coupled_walk<R: Rng + ?Sized>(
    pattern: &CorrelationPattern,
    rng: &mut R,
) -> (WalkPath, WalkPath) {
    let thresholds = flip_thresholds(pattern);
    let mut first = Vec::with_capacity(thresholds.len());
    let mut second = Vec::with_capacity(thresholds.len());
    for_each_coupled_step(&thresholds, rng, |e, ep| {
        first.push(e as i8);
        second.push(ep as i8);
        true
    });
    (
        WalkPath::from_increments(first).expect("unit steps"),
        WalkPath::from_increments(second).expect("unit steps"),
    )
}

fn check_walk_params(n: usize, n_samples: u64) -> Result<()> {
    if n > MAX_WALK_LENGTH {
        return Err(Error::Resource(format!(
            "walk length {n} exceeds the cap of {MAX_WALK_LENGTH}"
        )));
    }
    if n_samples < 2 {
        return Err(Error::Domain("at least two samples are required".into()));
    }
    Ok(())
}

/// Monte Carlo estimate of `E[sgn(X_n) sgn(X'_n)]` where `X`, `X'` are
/// recovered from a coupled pair `Z`, `Z'` through the discrete Tanaka
/// equation.
pub fn discrete_phi<R: Region + ?Sized>(
    a: &R,
    rho: f64,
    n: usize,
    n_samples: u64,
    key: SeedStream,
) -> Result<EstimateWithError> {
    check_walk_params(n, n_samples)?;
    discrete_phi_with_pattern(&make_pattern(a, rho, n)?, n_samples, key)
}

pub fn discrete_phi_with_pattern(
    pattern: &CorrelationPattern,
    n_samples: u64,
    key: SeedStream,
) -> Result<EstimateWithError> {
    check_walk_params(pattern.n_steps(), n_samples)?;
    let thresholds = flip_thresholds(pattern);
    let (moments, _) = run_batched(n_samples, key, |rng, _: &mut u64| {
        let (mut x, mut xp) = (0i64, 0i64);
        for_each_coupled_step(&thresholds, rng, |e, ep| {
            x += sgn(x) * e;
            xp += sgn(xp) * ep;
            true
        });
        (sgn(x) * sgn(xp)) as f64
    });
    Ok(moments.into_estimate(key.seed))
}

/// Exact value of the discrete correlation via the Walsh spectrum of
/// `sgn(X_n)`; limited to `n <= 24`.
pub fn exact_discrete_phi(pattern: &CorrelationPattern) -> Result<f64> {
    let n = pattern.n_steps();
    if n > MAX_COORDINATES {
        return Err(Error::Resource(format!(
            "exact evaluation needs n <= {MAX_COORDINATES}, got {n}"
        )));
    }
    let spectrum = walsh_transform(&sgn_functional_table(n)?);
    noise_functional(&spectrum, &pattern.to_rho_vector())
}

/// `E[1(Z survives) 1(Z' survives)]` for a coupled walk pair started at
/// height `start`, survival meaning staying strictly positive.
pub fn walk_survival_corr(
    start: i64,
    pattern: &CorrelationPattern,
    n_samples: u64,
    key: SeedStream,
) -> Result<EstimateWithError> {
    if start <= 0 {
        return Err(Error::Domain(format!(
            "start height {start} must be positive"
        )));
    }
    check_walk_params(pattern.n_steps(), n_samples)?;
    let thresholds = flip_thresholds(pattern);
    let (moments, _) = run_batched(n_samples, key, |rng, _: &mut u64| {
        let (mut z, mut zp) = (start, start);
        let mut alive = true;
        for_each_coupled_step(&thresholds, rng, |e, ep| {
            z += e;
            zp += ep;
            alive = z > 0 && zp > 0;
            alive
        });
        if alive {
            1.0
        } else {
            0.0
        }
    });
    Ok(moments.into_estimate(key.seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::TimeSet;

    #[test]
    fn identical_pattern_copies_walk() {
        let p = CorrelationPattern::uniform(200, 1.0).unwrap();
        let mut rng = SeedStream::new(1).rng();
        let (a, b) = gen_coupled_walk(&p, &mut rng);
        assert_eq!(a, b);
    }

    #[test]
    fn empirical_step_correlation() {
        for (rho, seed) in [(0.0, 2u64), (0.5, 3)] {
            let p = CorrelationPattern::uniform(100, rho).unwrap();
            let mut rng = SeedStream::new(seed).rng();
            let (mut sum, mut count) = (0.0, 0.0);
            for _ in 0..1000 {
                let (a, b) = gen_coupled_walk(&p, &mut rng);
                for (x, y) in a.increments().iter().zip(b.increments()) {
                    sum += (x * y) as f64;
                    count += 1.0;
                }
            }
            let corr = sum / count;
            assert!((corr - rho).abs() < 3.0 / count.sqrt(), "rho {rho}: {corr}");
        }
    }

    #[test]
    fn phi_of_empty_set_is_one() {
        let e = discrete_phi(&TimeSet::empty(), 0.5, 64, 1000, SeedStream::new(7)).unwrap();
        assert_eq!((e.mean, e.stderr), (1.0, 0.0));
    }

    #[test]
    fn phi_matches_exact_small_n() {
        let a: TimeSet = "1/4..3/4".parse().unwrap();
        let p = make_pattern(&a, 0.3, 12).unwrap();
        let exact = exact_discrete_phi(&p).unwrap();
        let e = discrete_phi_with_pattern(&p, 200_000, SeedStream::new(11)).unwrap();
        assert!(e.within(exact, 4.0), "{e:?} vs {exact}");
    }

    #[test]
    fn caps_and_sample_floor() {
        let a = TimeSet::full();
        assert!(matches!(
            discrete_phi(&a, 0.5, MAX_WALK_LENGTH + 1, 10, SeedStream::new(1)),
            Err(Error::Resource(_))
        ));
        assert!(discrete_phi(&a, 0.5, 10, 1, SeedStream::new(1)).is_err());
    }
}
