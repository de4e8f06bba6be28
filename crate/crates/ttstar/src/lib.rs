//! Numerical library for the radial tt*-Toda equations in the case n=3, l=0.
//!
//! The crate implements the three equivalent parametrizations of local
//! solutions near t=0 (asymptotic, monodromy, holomorphic data), the explicit
//! 4x4 Stokes and connection matrices in the generic and resonant cases, the
//! Barnes-integral solution of the associated scalar equation, and a radial
//! ODE integrator that closes the t->0 / t->infinity connection problem
//! numerically.
//!
//! Modules map onto the main subsystems:
//!
//! - [`data`]: the parameter triangle and its three gauges,
//! - [`specfun`]: gamma / log-gamma / digamma and the constants they need,
//! - [`correspondence`]: closed-form maps between the gauges,
//! - [`barnes`]: the scalar solution `g0(s)` by several independent routes,
//! - [`monodromy`]: Stokes matrices, connection matrices, resonant data,
//! - [`toda`]: the radial ODE, asymptotic initializers and fits.

pub mod barnes;
pub mod correspondence;
pub mod data;
pub mod error;
pub mod linalg;
pub mod monodromy;
pub mod ode;
pub mod par;
pub mod specfun;
pub mod toda;

pub use error::Error;

/// Result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Tolerance for membership tests of the parameter region.
pub const EPS_GEO: f64 = 1e-12;

/// Distance below which a point snaps to a boundary component; the
/// gamma-product formulas degrade near their poles well before this.
pub const EPS_RES: f64 = 1e-8;
