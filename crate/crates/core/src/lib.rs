//! Probabilistic machinery of the Bohm-EPR spin experiment.
//!
//! The crate covers four connected pieces:
//!
//! - [`spin`]: exact singlet-state pair distributions, their marginals,
//!   conditionals and covariances, and the single-device ("local") form
//!   obtained by flipping one spin label.
//! - [`inequalities`]: Bell-1964 and CHSH evaluation, Bell-local model
//!   integration and grid search for violating coplanar configurations.
//! - [`joint`]: third- and fourth-order joint distributions built from
//!   pairwise marginals, with negative entries kept as diagnostics.
//! - [`hv`]: a Monte Carlo run of a stochastic hidden-variable model that
//!   reproduces the singlet statistics.
//!
//! [`born`] recomputes the singlet probabilities from the two-particle state
//! vector and serves as an independent oracle for [`spin`].
//!
//! Angles are radians throughout the library.

pub mod born;
pub mod direction;
pub mod error;
pub mod hv;
pub mod inequalities;
pub mod info;
pub mod joint;
pub mod lp;
pub mod sampling;
pub mod spin;
pub mod verify;

pub use direction::{Direction, Spin};
pub use error::{Error, Result};
pub use spin::{PairDist, SpinDist, Which};
