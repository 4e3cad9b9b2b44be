//! Stationary periodic states of the thermocapillary thin-film equation
//!
//! ```text
//! ∂t h + ∂x( h³(∂x³h - g ∂x h) + M h²/(1+h)² ∂x h ) = 0
//! ```
//!
//! The crate solves the nonlocal steady problem for even, mean-zero periodic
//! perturbations `h = 1 + v`, continues the branch that bifurcates at
//! `M*(k0) = 4g + 4k0²` toward film rupture, analyses the underlying planar
//! Hamiltonian system, computes spectra of the linearised evolution, and
//! time-steps both the full equation and its long-wave amplitude equation.

// NaN must fail range checks, hence `!(x > 0.0)` style comparisons
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod config;
pub mod continuation;
pub mod error;
pub mod evolution;
pub mod io;
pub mod model;
pub mod par;
pub mod phase;
pub mod profile;
pub mod quadrature;
pub mod roots;
pub mod shooting;
pub mod spectral;
pub mod stability;
pub mod steady;

pub use error::{Error, Result};
pub use model::{HamiltonianParams, ModelParams, K0};
pub use par::Exec;
pub use profile::PeriodicProfile;
