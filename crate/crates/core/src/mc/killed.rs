//! Killed Brownian pairs, the excursion entrance law and the survival
//! correlation functionals built from them.
//!
//! Survival is never read off grid values alone. Conditional on the grid
//! values, a Brownian bridge from `x0 > 0` to `x1 > 0` over time `h` avoids
//! zero with probability `1 - exp(-2 x0 x1 / h)`, and each sample carries the
//! product of these factors. On steps with identical increments the pair
//! moves rigidly, so joint survival is survival of the lower path and any run
//! of such steps is one exact Gaussian step. On perturbed steps the joint
//! factor mixes the identical and independent cases with weight `rho`, which
//! is exact at `rho` in `{0, 1}`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

use super::brownian::coupled_increment;
use super::pattern::CorrelationPattern;
use crate::error::{Error, Result};
use crate::estimate::{run_batched, EstimateWithError, SeedStream};

/// Floor for the start time of entrance-law estimators.
pub const MIN_START_TIME: f64 = 1.0 / 65_536.0;

/// A starting height drawn from the normalized entrance law at time `t`,
/// with the total mass of the law as importance weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntranceSample {
    pub y: f64,
    pub weight: f64,
}

/// Draws `y` with density `(y/t) exp(-y^2/2t)` by inversion; the weight
/// `t^{-1/2}` is the mass of `y t^{-3/2} exp(-y^2/2t) dy`.
pub fn sample_entrance<R: Rng + ?Sized>(t: f64, rng: &mut R) -> Result<EntranceSample> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Domain(format!(
            "entrance time {t} is outside (0, 1)"
        )));
    }
    Ok(draw_entrance(t, rng))
}

fn draw_entrance<R: Rng + ?Sized>(t: f64, rng: &mut R) -> EntranceSample {
    loop {
        let u = 1.0 - rng.random::<f64>();
        let y = (-2.0 * t * u.ln()).sqrt();
        if y > 0.0 {
            return EntranceSample {
                y,
                weight: t.powf(-0.5),
            };
        }
    }
}

/// Probability that Brownian motion from `y > 0` avoids zero for time `s`.
pub fn survival_probability(y: f64, s: f64) -> f64 {
    if y <= 0.0 {
        0.0
    } else if s <= 0.0 {
        1.0
    } else {
        erf(y / (2.0 * s).sqrt())
    }
}

/// Probability that a Brownian bridge from `x0` to `x1` over time `h`
/// stays positive.
pub fn bridge_survival(x0: f64, x1: f64, h: f64) -> f64 {
    if x0 <= 0.0 || x1 <= 0.0 {
        0.0
    } else {
        -(-2.0 * x0 * x1 / h).exp_m1()
    }
}

/// Discretization switches for the killed-pair simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathOptions {
    /// Replace each run of identical-increment steps by a single exact step,
    /// and the final run by the closed-form survival probability.
    pub merge_identical_runs: bool,
}

impl Default for PathOptions {
    fn default() -> Self {
        Self {
            merge_identical_runs: true,
        }
    }
}

/// Conditional probability, given one simulated grid skeleton, that both
/// paths of a pair started at height `y` at time `start` stay positive up to
/// time 1. Its expectation is the joint survival probability.
pub fn joint_survival_weight<R: Rng + ?Sized>(
    pattern: &CorrelationPattern,
    start: f64,
    y: f64,
    options: PathOptions,
    rng: &mut R,
) -> f64 {
    let n = pattern.n_steps();
    let dt = pattern.dt();
    let mut k = ((start * n as f64).floor() as usize).min(n - 1);
    let mut t = start;
    let (mut x, mut xp) = (y, y);
    let mut weight = 1.0;
    while k < n {
        let r = pattern.rho(k);
        if r >= 1.0 {
            let end = if options.merge_identical_runs {
                pattern.first_perturbed_from(k).unwrap_or(n)
            } else {
                k + 1
            };
            let lo = x.min(xp);
            if options.merge_identical_runs && end == n {
                return weight * survival_probability(lo, 1.0 - t);
            }
            let t_end = if end == n { 1.0 } else { end as f64 * dt };
            let h = t_end - t;
            let inc = h.sqrt() * rng.sample::<f64, _>(StandardNormal);
            weight *= bridge_survival(lo, lo + inc, h);
            if weight == 0.0 {
                return 0.0;
            }
            x += inc;
            xp += inc;
            t = t_end;
            k = end;
        } else {
            let t_end = if k + 1 == n { 1.0 } else { (k + 1) as f64 * dt };
            let h = t_end - t;
            let (inc, inc_p) = coupled_increment(r, h.sqrt(), rng);
            let (x1, xp1) = (x + inc, xp + inc_p);
            if x1 <= 0.0 || xp1 <= 0.0 {
                return 0.0;
            }
            let hit = (-2.0 * x * x1 / h).exp();
            let hit_p = (-2.0 * xp * xp1 / h).exp();
            let both_hit = r * hit.min(hit_p) + (1.0 - r) * hit * hit_p;
            weight *= 1.0 - hit - hit_p + both_hit;
            x = x1;
            xp = xp1;
            t = t_end;
            k += 1;
        }
    }
    weight
}

/// `E[1(both paths from height y at time start survive to 1)]` for a
/// pattern-coupled Brownian pair.
pub fn survival_corr(
    y: f64,
    start: f64,
    pattern: &CorrelationPattern,
    n_samples: u64,
    key: SeedStream,
    options: PathOptions,
) -> Result<EstimateWithError> {
    if y.is_nan() || y <= 0.0 {
        return Err(Error::Domain(format!(
            "starting height {y} must be positive"
        )));
    }
    check_start(start)?;
    check_samples(n_samples)?;
    let (moments, _) = run_batched(n_samples, key, |rng, _: &mut u64| {
        joint_survival_weight(pattern, start, y, options, rng)
    });
    Ok(moments.into_estimate(key.seed))
}

/// Start time used when none is given: the left end of the first perturbed
/// step, where the entrance law is already exact for the grid model.
fn default_start(pattern: &CorrelationPattern) -> f64 {
    pattern
        .first_perturbed()
        .map(|k| (k as f64 * pattern.dt()).max(MIN_START_TIME))
        .unwrap_or(0.5)
}

/// Entrance-law mixture of pair survival correlations started at `t0`:
/// the total mass of `m_(t0, lambda)` weighted by `rho^|S cap A|`, with `A`
/// the perturbed part of `pattern`, which must lie in `[t0, 1]`.
pub fn m_lambda_functional(
    pattern: &CorrelationPattern,
    t0: Option<f64>,
    n_samples: u64,
    key: SeedStream,
    options: PathOptions,
) -> Result<EstimateWithError> {
    let t0 = t0.unwrap_or_else(|| default_start(pattern));
    if !(t0 > 0.0 && t0 < 1.0) {
        return Err(Error::Domain(format!("start time {t0} is outside (0, 1)")));
    }
    if let Some(k) = pattern.first_perturbed() {
        let left = k as f64 * pattern.dt();
        if left < t0 - 1e-12 {
            return Err(Error::Precondition(format!(
                "perturbed step at time {left} precedes the start time {t0}"
            )));
        }
    }
    check_samples(n_samples)?;
    let (moments, _) = run_batched(n_samples, key, |rng, _: &mut u64| {
        let entry = draw_entrance(t0, rng);
        entry.weight * joint_survival_weight(pattern, t0, entry.y, options, rng)
    });
    Ok(moments.into_estimate(key.seed))
}

/// `E[w P_y(survive until 1)]` with `(y, w)` from the entrance law at `t`;
/// equals one when the entrance law is normalized correctly.
pub fn entrance_survival_mass(
    t: f64,
    n_samples: u64,
    key: SeedStream,
) -> Result<EstimateWithError> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Domain(format!(
            "entrance time {t} is outside (0, 1)"
        )));
    }
    check_samples(n_samples)?;
    let (moments, _) = run_batched(n_samples, key, |rng, _: &mut u64| {
        let e = draw_entrance(t, rng);
        e.weight * survival_probability(e.y, 1.0 - t)
    });
    Ok(moments.into_estimate(key.seed))
}

fn check_start(start: f64) -> Result<()> {
    if (0.0..1.0).contains(&start) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "start time {start} is outside [0, 1)"
        )))
    }
}

fn check_samples(n_samples: u64) -> Result<()> {
    if n_samples < 2 {
        Err(Error::Domain("at least two samples are required".into()))
    } else {
        Ok(())
    }
}
