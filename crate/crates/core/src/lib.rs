//! Numerical laboratory for a one-dimensional discrete-time quantum walk whose
//! coin phase is redrawn at random on every time step.
//!
//! The crate has two halves that deliberately know nothing about each other's
//! internals, so that one can validate the other:
//!
//! * [`walk`] + [`ensemble`] — exact position-space evolution of single
//!   trajectories and a deterministic Monte Carlo engine that averages ⟨x²⟩_t
//!   and the probability profile over many independent phase histories.
//! * [`transfer`] — the averaged step channel of the walk written as a 4×4
//!   transfer matrix in the Pauli basis, its closed coefficient forms for the
//!   two special interval centers, and the asymptotic diffusion constant D(ε)
//!   obtained from it along two independent routes.
//!
//! [`profile`] classifies averaged probability profiles as Gaussian versus
//! exponential, and [`validate`] bundles the cross-checks between all of the
//! above into a single pass/fail report.

pub mod ensemble;
pub mod error;
pub mod profile;
pub mod quadrature;
pub mod stats;
pub mod transfer;
pub mod validate;
pub mod walk;

pub use error::{Error, Result};

/// Complex double-precision scalar used throughout.
pub type C64 = num_complex::Complex64;
