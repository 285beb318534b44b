//! Correlation, gap-probability, spacing and form-factor numerics for the
//! circular β-ensembles, finite N and bulk scaled, with the leading `1/N²`
//! correction terms and the differential identities that relate them.
//!
//! Modules are layered bottom-up: [`numerics`] supplies quadrature, special
//! functions, ODE integration and spectral differentiation; [`kernels`] and
//! [`correlations`] build the point-process densities; [`gap`] and
//! [`painleve`] give two independent routes to the gap generating functions;
//! [`spacing`], [`sff`] and [`beta_even`] cover the derived statistics.

pub mod beta_even;
pub mod cli;
pub mod correlations;
pub mod gap;
pub mod kernels;
pub mod numerics;
pub mod painleve;
pub mod sff;
pub mod spacing;

mod error;

pub use error::{Error, Result};
