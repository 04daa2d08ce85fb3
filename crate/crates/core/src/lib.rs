//! Numerical analysis of the collinear point L3 in the restricted planar
//! circular three-body problem.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: adaptive Runge-Kutta integration along complex paths,
//!   tanh-sinh quadrature and bracketed root finding.
//! * [`rpc3bp`]: Hamiltonians in Cartesian, polar and Poincare variables,
//!   the singular scaling and the equilibrium L3.
//! * [`separatrix`]: the reduced pendulum, the strip half-width `A` and the
//!   singularities of the complexified separatrix.
//! * [`inner`]: the inner equation, its asymptotic series and the Stokes
//!   constant obtained by complex shooting.
//! * [`splitting`]: the asymptotic distance formula and a full-model
//!   measurement of the manifold splitting.

pub mod error;
pub mod inner;
pub mod numerics;
pub mod rpc3bp;
pub mod separatrix;
pub mod splitting;

pub use error::{Error, Result};
pub use num_complex::Complex64;
