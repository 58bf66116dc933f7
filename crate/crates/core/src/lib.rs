//! Hover-position statistics for rotary-wing aerial relays.
//!
//! A hovering device holds position against wind by feeding a position
//! estimate back into its controller. This crate models that loop as a
//! stochastic differential equation, derives the stationary law of the
//! distance between the device and its intended hover point, and turns
//! that law into link metrics:
//!
//! - [`models`]: control laws and per-axis parameters, with stationary
//!   per-axis variances in closed form and via the covariance equation.
//! - [`steady_state`]: stationary radial distance distributions — exact
//!   potential-based densities for symmetric control, closed forms for
//!   linear and bang-bang control, a chi-square mixture series for three
//!   unequal axis variances, and a two-branch closed form when two axes
//!   match.
//! - [`connectivity`]: probability that the fading link to a ground
//!   station clears an SNR threshold, by quadrature against any distance
//!   law and in closed or series form where one exists.
//! - [`sde`]: reproducible Euler sampling of the same dynamics, used to
//!   validate every analytic law against simulated ensembles.
//! - [`special`]: the error-function family, Dawson integral, regularized
//!   incomplete gamma, and decaying parabolic cylinder functions backing
//!   the closed forms.
//! - [`quad`]: adaptive Gauss-Kronrod quadrature.
//! - [`stats`]: Kolmogorov-Smirnov distance and correlation helpers for
//!   comparing samples against distributions.

pub mod connectivity;
pub mod models;
pub mod quad;
pub mod sde;
pub mod special;
pub mod stats;
pub mod steady_state;

pub use connectivity::ConnectivitySpec;
pub use models::{
    AsymmetricModel, AxisParams, ControlLaw, Covariance2, Lambdas, ModelError, SymmetricModel,
};
pub use sde::{Ensemble, SampleQuantity, SdeModel, SimConfig, State3D};
pub use steady_state::{RadialDistribution, SeriesDiagnostics};
