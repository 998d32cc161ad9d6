use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::calculus::quadrature;
use super::grid::{GridSpec, BOUNDARY_MASS_LIMIT};
use crate::exec;
use crate::{Error, Result};

/// Tolerance on `∫|ψ|² dz = 1`.
pub(crate) const NORM_TOLERANCE: f64 = 1e-9;

/// A wavefunction given in closed form, evaluable anywhere in configuration space.
pub trait ClosedForm: Send + Sync {
    /// Amplitude at `z = (q, q', x)`. Need not be normalized on any particular grid.
    fn amplitude(&self, z: [f64; 3]) -> Complex64;
}

/// One-dimensional Gaussian wavepacket
/// `(π w²)^(-1/4) exp(-(u-c)²/(2w²) + i b (u-c)²/2 + i p (u-c))`.
///
/// With this convention the position variance is `w²/2`; a unit width packet is the
/// vacuum with both variances equal to `1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPacket {
    pub center: f64,
    pub width: f64,
    pub momentum: f64,
    /// Quadratic phase coefficient `b`.
    #[serde(default)]
    pub chirp: f64,
}

impl GaussianPacket {
    pub fn new(center: f64, width: f64, momentum: f64) -> Result<Self> {
        Self::chirped(center, width, momentum, 0.0)
    }

    pub fn chirped(center: f64, width: f64, momentum: f64, chirp: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::NonPositiveWidth(width));
        }
        Ok(Self {
            center,
            width,
            momentum,
            chirp,
        })
    }

    pub fn vacuum() -> Self {
        Self {
            center: 0.0,
            width: 1.0,
            momentum: 0.0,
            chirp: 0.0,
        }
    }

    pub fn amplitude(&self, u: f64) -> Complex64 {
        let d = u - self.center;
        let w2 = self.width * self.width;
        let norm = (std::f64::consts::PI * w2).powf(-0.25);
        let phase = 0.5 * self.chirp * d * d + self.momentum * d;
        Complex64::from_polar(norm * (-d * d / (2.0 * w2)).exp(), phase)
    }

    pub fn position_variance(&self) -> f64 {
        0.5 * self.width * self.width
    }

    pub fn momentum_variance(&self) -> f64 {
        let w2 = self.width * self.width;
        0.5 / w2 + 0.5 * self.chirp * self.chirp * w2
    }

    /// Symmetrized covariance `⟨{Δu, Δp}⟩/2`.
    pub fn position_momentum_covariance(&self) -> f64 {
        0.5 * self.chirp * self.width * self.width
    }
}

/// Product `ψ_Q(q) ψ_Q'(q') ψ_C(x)` of three Gaussian packets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductGaussian {
    pub packets: [GaussianPacket; 3],
}

impl ProductGaussian {
    pub fn new(centers: [f64; 3], widths: [f64; 3], momenta: [f64; 3]) -> Result<Self> {
        let mut packets = [GaussianPacket::vacuum(); 3];
        for a in 0..3 {
            packets[a] = GaussianPacket::new(centers[a], widths[a], momenta[a])?;
        }
        Ok(Self { packets })
    }

    pub fn vacuum() -> Self {
        Self {
            packets: [GaussianPacket::vacuum(); 3],
        }
    }

    pub fn sample(&self, grid: &GridSpec) -> Result<HybridWavefunction> {
        HybridWavefunction::from_closed_form(grid, self)
    }
}

impl ClosedForm for ProductGaussian {
    fn amplitude(&self, z: [f64; 3]) -> Complex64 {
        self.packets[0].amplitude(z[0])
            * self.packets[1].amplitude(z[1])
            * self.packets[2].amplitude(z[2])
    }
}

/// Normalized product of three Gaussian packets sampled on `grid`.
pub fn gaussian_product_state(
    grid: &GridSpec,
    centers: [f64; 3],
    widths: [f64; 3],
    momenta: [f64; 3],
) -> Result<HybridWavefunction> {
    ProductGaussian::new(centers, widths, momenta)?.sample(grid)
}

/// Complex amplitudes `ψ(q, q', x)` on a grid.
///
/// Constructors guarantee `∫|ψ|² = 1` to `1e-9` and at most `1e-6` probability in the
/// two-cell layer next to every face.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridWavefunction {
    grid: GridSpec,
    amplitudes: Vec<Complex64>,
}

impl HybridWavefunction {
    pub fn from_amplitudes(grid: &GridSpec, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                actual: amplitudes.len(),
            });
        }
        let psi = Self {
            grid: *grid,
            amplitudes,
        };
        let norm = psi.norm_squared();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        psi.check_boundary()?;
        Ok(psi)
    }

    /// Samples `form` on the grid and rescales it to unit norm.
    pub fn from_closed_form(grid: &GridSpec, form: &dyn ClosedForm) -> Result<Self> {
        let raw = sample_closed_form(grid, form, |z| z);
        let scale = norm_scale(&raw, grid);
        let psi = Self {
            grid: *grid,
            amplitudes: raw.into_iter().map(|a| a * scale).collect(),
        };
        psi.check_boundary()?;
        Ok(psi)
    }

    pub(crate) fn from_parts_unchecked(grid: GridSpec, amplitudes: Vec<Complex64>) -> Self {
        Self { grid, amplitudes }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm_squared(&self) -> f64 {
        quadrature(&self.density(), &self.grid).expect("shape checked at construction")
    }

    /// Probability within two cells of any face.
    pub fn boundary_mass(&self) -> f64 {
        boundary_mass(&self.density(), &self.grid)
    }

    pub(crate) fn check_boundary(&self) -> Result<()> {
        let mass = self.boundary_mass();
        if mass > BOUNDARY_MASS_LIMIT {
            return Err(Error::BoundaryMass {
                mass,
                limit: BOUNDARY_MASS_LIMIT,
            });
        }
        Ok(())
    }

    /// `⟨self|other⟩` by trapezoidal quadrature.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::ShapeMismatch {
                expected: self.grid.len(),
                actual: other.grid.len(),
            });
        }
        let prod: Vec<Complex64> = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .collect();
        quadrature(&prod, &self.grid)
    }

    /// `|⟨self|other⟩|`, insensitive to a global phase.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        Ok(self.inner(other)?.norm())
    }
}

pub(crate) fn boundary_mass(density: &[f64], grid: &GridSpec) -> f64 {
    let masked: Vec<f64> = density
        .iter()
        .enumerate()
        .map(|(i, &d)| if grid.near_face(i) { d } else { 0.0 })
        .collect();
    quadrature(&masked, grid).expect("density matches grid")
}

/// Evaluates `form` at `map(z)` for every node `z`.
pub(crate) fn sample_closed_form(
    grid: &GridSpec,
    form: &dyn ClosedForm,
    map: impl Fn([f64; 3]) -> [f64; 3] + Sync + Send,
) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); grid.len()];
    let slab = grid.slab_len();
    exec::for_each_chunk_mut(&mut out, slab, |i, chunk| {
        for (local, o) in chunk.iter_mut().enumerate() {
            *o = form.amplitude(map(grid.point(i * slab + local)));
        }
    });
    out
}

/// Factor that brings `raw` to unit norm on `grid`.
pub(crate) fn norm_scale(raw: &[Complex64], grid: &GridSpec) -> f64 {
    let dens: Vec<f64> = raw.iter().map(|a| a.norm_sqr()).collect();
    1.0 / quadrature(&dens, grid).expect("raw matches grid").sqrt()
}
