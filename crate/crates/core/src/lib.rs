//! Simulation laboratory for hybrid quantum-classical ensembles on configuration space.
//!
//! Two quantum probes `Q`, `Q'` (coordinates `q`, `q'`) couple to a classical mediator `C`
//! (coordinate `x`) through the interaction `g1 p̂ x̂ + g2 q̂' k̂`. The crate provides
//!
//! - [`config_space`]: the grid, hybrid wavefunctions, Madelung `(P, S)` fields, quadrature
//!   and finite-difference calculus;
//! - [`ensemble_algebra`]: ensemble observables, their variational derivatives, the hybrid
//!   Poisson bracket, homomorphism residuals and the strong-separability probe;
//! - [`dynamics`]: exact grid transport, Madelung advection and the symplectic moment
//!   propagator, plus the classically tagged twin;
//! - [`entanglement`]: Gaussian log-negativity, two-qubit negativity and CHSH maxima,
//!   Gaussian mutual information;
//! - [`protocol`]: the qubit post-selection protocol, the assumption auditor and verdicts.
//!
//! Units are dimensionless with `ħ = 1` throughout.

pub mod config_space;
pub mod dynamics;
pub mod ensemble_algebra;
pub mod entanglement;
mod error;
pub mod exec;
pub mod protocol;
pub mod sampling;

pub use error::{Error, Result};
