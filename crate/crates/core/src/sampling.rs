//! Seeded random smooth states.
//!
//! A draw is a product of chirped, boosted Gaussian packets carried along the interaction
//! flow for a random time, so the result is smooth, nodeless and in general correlated
//! across all three coordinates.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config_space::{ClosedForm, GaussianPacket, GridSpec, HybridWavefunction, ProductGaussian};
use crate::dynamics::{FlowMap, InteractionParams};
use crate::Result;

/// A product of packets evaluated at `Φ_{-t}(z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportedProduct {
    pub product: ProductGaussian,
    pub params: InteractionParams,
}

impl TransportedProduct {
    pub fn new(product: ProductGaussian, params: InteractionParams) -> Self {
        Self { product, params }
    }

    fn back(&self) -> FlowMap {
        self.params.flow().inverse()
    }

    pub fn sample(&self, grid: &GridSpec) -> Result<HybridWavefunction> {
        HybridWavefunction::from_closed_form(grid, self)
    }
}

impl ClosedForm for TransportedProduct {
    fn amplitude(&self, z: [f64; 3]) -> Complex64 {
        self.product.amplitude(self.back().apply(z))
    }
}

/// Draws the `index`-th state of the stream seeded by `seed`.
pub fn random_smooth_form(seed: u64, index: u64) -> TransportedProduct {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let packets = std::array::from_fn(|_| {
        GaussianPacket::chirped(
            rng.gen_range(-0.8..0.8),
            rng.gen_range(0.8..1.25),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-0.5..0.5),
        )
        .expect("positive width")
    });
    let params = InteractionParams::new(
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(0.0..1.0),
    )
    .expect("finite draw");
    TransportedProduct::new(ProductGaussian { packets }, params)
}

/// `count` states from the stream seeded by `seed`, sampled on `grid`.
pub fn random_smooth_states(
    grid: &GridSpec,
    seed: u64,
    count: usize,
) -> Result<Vec<(TransportedProduct, HybridWavefunction)>> {
    (0..count as u64)
        .map(|i| {
            let form = random_smooth_form(seed, i);
            Ok((form, form.sample(grid)?))
        })
        .collect()
}
