use crate::dyadic::Region;
use crate::error::{Error, Result};
use crate::walsh::RhoVector;

/// Per-step increment correlation on a uniform grid of `[0, 1]`.
///
/// Step `k` covers `[k/n, (k+1)/n)`; its entry is `rho` when the left
/// endpoint `k/n` lies in the perturbed region and `1` otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationPattern {
    rho_per_step: Vec<f64>,
}

impl CorrelationPattern {
    /// Arbitrary entries in `[0, 1]`.
    pub fn from_entries(rho_per_step: Vec<f64>) -> Result<Self> {
        if rho_per_step.is_empty() {
            return Err(Error::Domain("pattern needs at least one step".into()));
        }
        if let Some(bad) = rho_per_step.iter().find(|r| !(0.0..=1.0).contains(*r)) {
            return Err(Error::Domain(format!(
                "step correlation {bad} is outside [0, 1]"
            )));
        }
        Ok(Self { rho_per_step })
    }

    /// The same correlation on every step.
    pub fn uniform(n_steps: usize, rho: f64) -> Result<Self> {
        Self::from_entries(vec![rho; n_steps])
    }

    pub fn n_steps(&self) -> usize {
        self.rho_per_step.len()
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.rho_per_step.len() as f64
    }

    pub fn rho_per_step(&self) -> &[f64] {
        &self.rho_per_step
    }

    pub fn rho(&self, k: usize) -> f64 {
        self.rho_per_step[k]
    }

    /// Index of the first perturbed step at or after `from`.
    pub fn first_perturbed_from(&self, from: usize) -> Option<usize> {
        (from..self.n_steps()).find(|&k| self.rho_per_step[k] < 1.0)
    }

    pub fn first_perturbed(&self) -> Option<usize> {
        self.first_perturbed_from(0)
    }

    pub fn last_perturbed(&self) -> Option<usize> {
        self.rho_per_step.iter().rposition(|&r| r < 1.0)
    }

    pub fn is_identity(&self) -> bool {
        self.first_perturbed().is_none()
    }

    pub fn to_rho_vector(&self) -> RhoVector {
        RhoVector::new(self.rho_per_step.clone()).expect("entries checked at construction")
    }
}

/// Pattern for a region `A` sampled at step left endpoints.
pub fn make_pattern<R: Region + ?Sized>(
    a: &R,
    rho: f64,
    n_steps: usize,
) -> Result<CorrelationPattern> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::Domain(format!("rho = {rho} is outside [0, 1)")));
    }
    if n_steps == 0 {
        return Err(Error::Domain("pattern needs at least one step".into()));
    }
    let rho_per_step = (0..n_steps)
        .map(|k| {
            if a.contains_time(k as f64 / n_steps as f64) {
                rho
            } else {
                1.0
            }
        })
        .collect();
    Ok(CorrelationPattern { rho_per_step })
}
