//! Evolution under the interaction `H = g1 p̂ x̂ + g2 q̂' k̂`.
//!
//! Three realizations that must agree: exact transport of `ψ` along the characteristic
//! flow, RK4 advection of the Madelung fields, and the linear propagator acting on
//! first and second moments. The classical twin reuses the moment propagator under a
//! classical tag.

mod advection;
mod gaussian;
mod moments;
mod params;
mod series;
mod transport;

pub use advection::{evolve_madelung, evolve_madelung_auto, stable_step, step_bound};
pub use gaussian::{
    classical_twin, evolve_gaussian, generator, heisenberg_matrix, k_sensitivity,
    GaussianMoments, KSensitivityRow, Tag, VACUUM_VARIANCE,
};
pub(crate) use gaussian::min_uncertainty_eigenvalue;
pub use moments::{grid_moments, madelung_moments};
pub use params::{FlowMap, InteractionParams};
pub use series::{gaussian_time_series, MomentRecord, TimeSeries, VARIABLES};
pub use transport::evolve_wavefunction;
