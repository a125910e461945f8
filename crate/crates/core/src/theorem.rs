//! Both sides of the coincidence identity for the perturbed Tanaka pair.
//!
//! The left side is the probability that two pattern-coupled Brownian motions
//! attain their minimum over `[0, 1]` at the same grid time. The right side
//! integrates, against the arc-sine law over the complement of `A`, the
//! product of two entrance-law functionals evaluated on `A` pulled back
//! through `x -> t + (1 - t) x` (after the minimum) and `x -> t (1 - x)`
//! (before it, time reversed).

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::TimeSet;
use crate::error::{Error, Result};
use crate::estimate::{EstimateWithError, SeedStream};
use crate::mc::{
    argmin_coincidence, discrete_phi_with_pattern, exact_discrete_phi, m_lambda_functional,
    make_pattern, ArgminEstimate, CorrelationPattern, PathOptions,
};
use crate::walsh::MAX_COORDINATES;

/// Agreement threshold in combined standard errors.
pub const PASS_SIGMAS: f64 = 4.0;

const LHS_TAG: u64 = 0x4c48_5321;
const RHS_TAG: u64 = 0x5248_5321;

/// Quadrature node for the arc-sine law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArcsineNode {
    pub t: f64,
    pub weight: f64,
}

/// `theta(t) = (2/pi) asin(sqrt t)`, under which the arc-sine law on `[0,1]`
/// becomes the uniform law on `[0,1]`.
pub fn arcsine_angle(t: f64) -> f64 {
    t.sqrt().asin() / FRAC_PI_2
}

fn angle_to_time(theta: f64) -> f64 {
    (FRAC_PI_2 * theta).sin().powi(2)
}

/// Equal-weight midpoint rule in the angle variable over `[a, b]`.
pub fn arcsine_nodes(a: f64, b: f64, n_nodes: usize) -> Result<Vec<ArcsineNode>> {
    if !(0.0 <= a && a < b && b <= 1.0) {
        return Err(Error::Domain(format!("invalid interval ({a}, {b})")));
    }
    if n_nodes == 0 {
        return Err(Error::Domain("at least one node is required".into()));
    }
    let (lo, hi) = (arcsine_angle(a), arcsine_angle(b));
    let weight = (hi - lo) / n_nodes as f64;
    Ok((0..n_nodes)
        .map(|i| ArcsineNode {
            t: angle_to_time(lo + (i as f64 + 0.5) * weight),
            weight,
        })
        .collect())
}

/// Resolution of the right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhsParams {
    /// Nodes per complement component.
    pub n_nodes: usize,
    /// Entrance-law samples per factor.
    pub n_samples: u64,
    /// Grid of the factor simulations.
    pub n_grid: usize,
    pub options: PathOptions,
}

impl Default for RhsParams {
    fn default() -> Self {
        Self {
            n_nodes: 32,
            n_samples: 20_000,
            n_grid: 4096,
            options: PathOptions::default(),
        }
    }
}

/// Resolution of the left-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LhsParams {
    pub n_grid: usize,
    pub n_samples: u64,
}

impl Default for LhsParams {
    fn default() -> Self {
        Self {
            n_grid: 1 << 13,
            n_samples: 100_000,
        }
    }
}

fn side_factor(
    pulled: crate::dyadic::IntervalSet,
    rho: f64,
    params: &RhsParams,
    key: SeedStream,
) -> Result<EstimateWithError> {
    let pattern = make_pattern(&pulled, rho, params.n_grid)?;
    if pattern.is_identity() {
        return Ok(EstimateWithError::exact(1.0, key.seed));
    }
    m_lambda_functional(&pattern, None, params.n_samples, key, params.options)
}

/// The two entrance-law factors at a time `t` outside the interior of `A`:
/// `(before, after)` the minimum. A side without points of `A` contributes
/// exactly one.
pub fn rhs_factors(
    t: f64,
    a: &TimeSet,
    rho: f64,
    params: &RhsParams,
    key: SeedStream,
) -> Result<(EstimateWithError, EstimateWithError)> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Domain(format!("node time {t} is outside (0, 1)")));
    }
    let (before, after) = a.boundary_times(t)?;
    let left = match before {
        None => EstimateWithError::exact(1.0, key.seed),
        Some(_) => side_factor(a.affine_preimage(-t, t)?, rho, params, key.child(0))?,
    };
    let right = match after {
        None => EstimateWithError::exact(1.0, key.seed),
        Some(_) => side_factor(a.affine_preimage(1.0 - t, t)?, rho, params, key.child(1))?,
    };
    Ok((left, right))
}

/// One quadrature node of the right-hand side with its factor estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub component: usize,
    pub t: f64,
    pub weight: f64,
    pub left: EstimateWithError,
    pub right: EstimateWithError,
}

impl NodeRecord {
    pub fn value(&self) -> f64 {
        self.left.mean * self.right.mean
    }

    /// Variance of the product of two independent estimates.
    pub fn variance(&self) -> f64 {
        let (l, r) = (self.left, self.right);
        l.mean.powi(2) * r.stderr.powi(2)
            + r.mean.powi(2) * l.stderr.powi(2)
            + l.stderr.powi(2) * r.stderr.powi(2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhsIntegral {
    pub estimate: EstimateWithError,
    pub nodes: Vec<NodeRecord>,
}

/// Arc-sine integral over the complement of `A` of the factor products.
pub fn rhs_integral(
    a: &TimeSet,
    rho: f64,
    params: &RhsParams,
    key: SeedStream,
) -> Result<RhsIntegral> {
    if params.n_nodes == 0 {
        return Err(Error::Domain("at least one node is required".into()));
    }
    let components = a.complement_components();
    let mut work = Vec::new();
    for (c, (lo, hi)) in components.iter().enumerate() {
        for (i, node) in arcsine_nodes(lo.to_f64(), hi.to_f64(), params.n_nodes)?
            .into_iter()
            .enumerate()
        {
            work.push((c, i, node));
        }
    }
    let nodes = work
        .par_iter()
        .map(|&(c, i, node)| {
            let node_key = key.child(c as u64).child(i as u64);
            let (left, right) = rhs_factors(node.t, a, rho, params, node_key)?;
            Ok(NodeRecord {
                component: c,
                t: node.t,
                weight: node.weight,
                left,
                right,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut mean = 0.0;
    let mut variance = 0.0;
    let mut n_samples = 0;
    for (c, (lo, hi)) in components.iter().enumerate() {
        let width = arcsine_angle(hi.to_f64()) - arcsine_angle(lo.to_f64());
        let here: Vec<&NodeRecord> = nodes.iter().filter(|r| r.component == c).collect();
        let sum: f64 = here.iter().map(|r| r.value()).sum();
        mean += width * sum / here.len() as f64;
        variance += here
            .iter()
            .map(|r| r.weight.powi(2) * r.variance())
            .sum::<f64>();
        n_samples += here
            .iter()
            .map(|r| r.left.n_samples + r.right.n_samples)
            .sum::<u64>();
    }
    Ok(RhsIntegral {
        estimate: EstimateWithError {
            mean,
            stderr: variance.sqrt(),
            n_samples,
            seed: key.seed,
        },
        nodes,
    })
}

/// Outcome of comparing the two sides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub lhs: EstimateWithError,
    pub rhs: EstimateWithError,
    pub discrepancy: f64,
    pub combined_stderr: f64,
    pub pass: bool,
    /// Left-hand side counting every coincidence of grid argmin indices.
    pub lhs_raw: EstimateWithError,
    /// Samples with a tied grid minimum on the left-hand side.
    pub lhs_ties: u64,
    pub lhs_flagged: bool,
}

impl TheoremReport {
    fn new(left: ArgminEstimate, rhs: EstimateWithError) -> Self {
        let lhs = left.estimate;
        let discrepancy = lhs.mean - rhs.mean;
        let combined_stderr = lhs.stderr.hypot(rhs.stderr);
        Self {
            lhs,
            rhs,
            discrepancy,
            combined_stderr,
            pass: discrepancy.abs() <= PASS_SIGMAS * combined_stderr,
            lhs_raw: left.raw,
            lhs_ties: left.ties,
            lhs_flagged: left.flagged,
        }
    }
}

/// Runs both sides on independent streams and compares them.
pub fn verify_theorem(
    a: &TimeSet,
    rho: f64,
    lhs: &LhsParams,
    rhs: &RhsParams,
    key: SeedStream,
) -> Result<(TheoremReport, Vec<NodeRecord>)> {
    let left = argmin_coincidence(a, rho, lhs.n_grid, lhs.n_samples, key.child(LHS_TAG))?;
    let right = rhs_integral(a, rho, rhs, key.child(RHS_TAG))?;
    let mut rhs_estimate = right.estimate;
    rhs_estimate.seed = key.seed;
    Ok((TheoremReport::new(left, rhs_estimate), right.nodes))
}

/// Left-hand side at two grid resolutions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridStability {
    pub coarse: EstimateWithError,
    pub fine: EstimateWithError,
    pub discrepancy: f64,
    pub combined_stderr: f64,
    pub pass: bool,
}

/// Compares the grid argmin coincidence at `n_grid` and `2 n_grid`.
pub fn grid_stability(
    a: &TimeSet,
    rho: f64,
    n_grid: usize,
    n_samples: u64,
    key: SeedStream,
) -> Result<GridStability> {
    let coarse = argmin_coincidence(a, rho, n_grid, n_samples, key.child(0))?.estimate;
    let fine = argmin_coincidence(a, rho, 2 * n_grid, n_samples, key.child(1))?.estimate;
    let discrepancy = fine.mean - coarse.mean;
    let combined_stderr = coarse.stderr.hypot(fine.stderr);
    Ok(GridStability {
        coarse,
        fine,
        discrepancy,
        combined_stderr,
        pass: discrepancy.abs() <= PASS_SIGMAS * combined_stderr,
    })
}

/// One row of a sensitivity curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub n: usize,
    pub estimate: EstimateWithError,
    /// Walsh-exact value, when `n` is small enough to enumerate.
    pub exact: Option<f64>,
}

/// Whole-path correlation of the recovered signs as the walk length grows.
pub fn sensitivity_curve(
    rho: f64,
    n_list: &[usize],
    n_samples: u64,
    key: SeedStream,
) -> Result<Vec<CurvePoint>> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::Domain(format!("rho = {rho} is outside [0, 1]")));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition(
            "walk lengths must be strictly ascending".into(),
        ));
    }
    n_list
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let pattern = CorrelationPattern::uniform(n, rho)?;
            let estimate = discrete_phi_with_pattern(&pattern, n_samples, key.child(i as u64))?;
            let exact = if n <= MAX_COORDINATES.min(20) {
                Some(exact_discrete_phi(&pattern)?)
            } else {
                None
            };
            Ok(CurvePoint { n, estimate, exact })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_rule_weights_sum_to_one() {
        for n in [1, 2, 8, 64, 1024] {
            let nodes = arcsine_nodes(0.0, 1.0, n).unwrap();
            assert_eq!(nodes.iter().map(|n| n.weight).sum::<f64>(), 1.0, "n = {n}");
        }
        for n in [3, 7, 100] {
            let total: f64 = arcsine_nodes(0.0, 1.0, n)
                .unwrap()
                .iter()
                .map(|n| n.weight)
                .sum();
            assert!((total - 1.0).abs() < 1e-15, "n = {n}");
        }
    }

    #[test]
    fn half_interval_has_half_mass() {
        let total: f64 = arcsine_nodes(0.0, 0.5, 16)
            .unwrap()
            .iter()
            .map(|n| n.weight)
            .sum();
        assert!((total - 0.5).abs() < 1e-15);
    }

    #[test]
    fn arcsine_mean_is_half() {
        let mean: f64 = arcsine_nodes(0.0, 1.0, 64)
            .unwrap()
            .iter()
            .map(|n| n.weight * n.t)
            .sum();
        assert!((mean - 0.5).abs() < 1e-12);
    }

    #[test]
    fn invalid_rule_inputs() {
        assert!(arcsine_nodes(0.5, 0.5, 4).is_err());
        assert!(arcsine_nodes(0.0, 1.5, 4).is_err());
        assert!(arcsine_nodes(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn empty_side_is_exactly_one() {
        let a: TimeSet = "1/4..1/2".parse().unwrap();
        let params = RhsParams {
            n_samples: 1000,
            n_grid: 256,
            ..RhsParams::default()
        };
        let (_, right) = rhs_factors(0.6, &a, 0.5, &params, SeedStream::new(1)).unwrap();
        assert_eq!((right.mean, right.stderr), (1.0, 0.0));
        assert!(matches!(
            rhs_factors(0.3, &a, 0.5, &params, SeedStream::new(1)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn rhs_boundary_cases() {
        let params = RhsParams {
            n_nodes: 8,
            n_samples: 100,
            n_grid: 64,
            ..RhsParams::default()
        };
        let empty = rhs_integral(&TimeSet::empty(), 0.5, &params, SeedStream::new(2)).unwrap();
        assert_eq!((empty.estimate.mean, empty.estimate.stderr), (1.0, 0.0));
        let full = rhs_integral(&TimeSet::full(), 0.5, &params, SeedStream::new(2)).unwrap();
        assert_eq!((full.estimate.mean, full.estimate.stderr), (0.0, 0.0));
        assert!(full.nodes.is_empty());
    }

    #[test]
    fn curve_requires_ascending_lengths() {
        assert!(matches!(
            sensitivity_curve(0.5, &[8, 4], 10, SeedStream::new(1)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn curve_at_rho_one_is_flat() {
        let curve = sensitivity_curve(1.0, &[4, 64, 256], 1000, SeedStream::new(1)).unwrap();
        assert!(curve.iter().all(|p| p.estimate.mean == 1.0));
        assert_eq!(curve[0].exact, Some(1.0));
    }
}
