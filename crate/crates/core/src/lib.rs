//! Simulation and analytics for suprema of spectrally positive Lévy processes.
//!
//! The library is built around processes of the form `X = -ct + Z + C` where
//! `Z` and `C` are independent driftless subordinators (plus an optional
//! Brownian part handled through compound-Poisson approximation). It provides
//!
//! * jump-measure families with closed-form tails, means and Laplace
//!   exponents ([`measure`]),
//! * process specifications and their dual Laplace exponent ψ ([`process`]),
//! * closed-form fluctuation quantities: the root Φ(0), hitting
//!   probabilities, first-passage crossing laws and supremum Laplace
//!   transforms ([`fluctuation`]),
//! * exact event-driven path simulation and the geometric-compound sampler
//!   for the all-time supremum ([`pathsim`]),
//! * small-jump truncation / compound-Poisson approximation schemes with
//!   pathwise convergence checkers ([`approx`]),
//! * atom-aware empirical distribution tests ([`stats`]).
//!
//! The central use case is comparing two independent samplers — the
//! geometric-compound representation of `sup Y` and the pathwise supremum of
//! `X` just before a `C`-jump first sets a new running maximum — which agree
//! in distribution exactly when `E[X_1] <= 0`.

pub mod approx;
pub mod config;
pub mod error;
pub mod fluctuation;
pub mod measure;
pub mod models;
pub mod pathsim;
pub mod process;
pub mod quad;
pub mod special;
pub mod stats;
pub mod table;

pub use error::{Error, Result};
pub use measure::JumpMeasure;
pub use process::{ExponentView, ProcessSpec};
