//! Noise splitting in the discrete and continuous Tanaka equation.
//!
//! The crate has two halves. The exact half works with ±1 walks: the
//! transforms between the walk `X` and its driving walk `Z` ([`walk`]), and
//! the Fourier-Walsh spectrum of `sgn(X_n)` as a function of the increments
//! of `Z` ([`walsh`]), which gives noise correlations in closed form. The
//! Monte Carlo half ([`mc`], [`theorem`]) simulates walk and Brownian pairs
//! whose increments are correlated on a region `A` ([`dyadic`]) and checks
//! that the probability of a common argmin equals an arc-sine integral of
//! entrance-law survival correlations.

pub mod cli;
pub mod dyadic;
pub mod error;
pub mod estimate;
pub mod mc;
pub mod theorem;
pub mod walk;
pub mod walsh;

pub use dyadic::{count_in, DyadicRational, IntervalSet, PointSet, Region, TimeSet};
pub use error::{Error, Result};
pub use estimate::{EstimateWithError, SeedStream};
pub use walk::WalkPath;
