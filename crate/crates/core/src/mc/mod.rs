//! Coupled Monte Carlo engine.
//!
//! Walk and Brownian pairs whose increments are correlated with coefficient
//! `rho` on the perturbed steps and identical elsewhere, together with the
//! estimators built on them.

mod brownian;
mod killed;
mod pattern;
mod walks;

pub use brownian::{argmin_coincidence, gen_coupled_bm, ArgminEstimate, CoupledPath};
pub use killed::{
    bridge_survival, entrance_survival_mass, joint_survival_weight, m_lambda_functional,
    sample_entrance, survival_corr, survival_probability, EntranceSample, PathOptions,
};
pub use pattern::{make_pattern, CorrelationPattern};
pub use walks::{
    discrete_phi, discrete_phi_with_pattern, exact_discrete_phi, gen_coupled_walk,
    walk_survival_corr, MAX_WALK_LENGTH,
};
