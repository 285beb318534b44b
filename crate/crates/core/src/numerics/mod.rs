//! Quadrature rules, special functions, ODE integration and spectral
//! differentiation.

mod chebyshev;
mod ode;
mod quadrature;
mod special;

pub use chebyshev::{spectral_derivative, ChebGrid};
pub use ode::{ode_integrate, ode_integrate_with, OdeOptions, OdeProblem, Trajectory};
pub use quadrature::{gauss_jacobi, gauss_legendre, legendre_unit, QuadratureRule, RuleKind};
pub use special::{digamma, harmonic, harmonic_asymptotic, sine_integral, EULER_GAMMA};

#[cfg(test)]
pub(crate) use quadrature::ln_beta;

/// Exact rational used by the series tables.
pub type Q = num_rational::Ratio<i128>;

/// Default node count for one-dimensional and Fredholm integrals.
pub const DEFAULT_LEGENDRE_NODES: usize = 64;
