//! Discretized configuration space `z = (q, q', x)`.
//!
//! Fields are stored as flat row-major arrays with axis order `(q, q', x)`; the `x` index
//! runs fastest.

mod calculus;
mod grid;
mod madelung;
mod snapshot;
pub(crate) mod wavefunction;

pub use calculus::{
    gradient, quadrature, spectral_derivative, spectral_matrix, FieldValue,
};
pub use grid::{Axis, Constants, GridSpec, BOUNDARY_CELLS, BOUNDARY_MASS_LIMIT, HBAR, P_FLOOR};
pub use madelung::{from_madelung, to_madelung, MadelungFields};
pub use snapshot::Snapshot;
pub use wavefunction::{
    gaussian_product_state, ClosedForm, GaussianPacket, HybridWavefunction, ProductGaussian,
};
