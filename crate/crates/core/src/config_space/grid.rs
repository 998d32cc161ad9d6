use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Reduced Planck constant in the dimensionless units used everywhere.
pub const HBAR: f64 = 1.0;

/// Density below which `S` is undefined (masked) and divisions by `P` are floored.
pub const P_FLOOR: f64 = 1e-12;

/// Largest probability allowed within [`BOUNDARY_CELLS`] of a face.
pub const BOUNDARY_MASS_LIMIT: f64 = 1e-6;

/// Width of the face layer, in grid cells, that must stay (almost) empty.
pub const BOUNDARY_CELLS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    Q,
    QPrime,
    X,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::Q, Axis::QPrime, Axis::X];

    pub fn index(self) -> usize {
        match self {
            Axis::Q => 0,
            Axis::QPrime => 1,
            Axis::X => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Axis::Q => "q",
            Axis::QPrime => "q'",
            Axis::X => "x",
        }
    }
}

/// Physical constants. Only `hbar = 1` is accepted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    hbar: f64,
}

impl Constants {
    pub fn new(hbar: f64) -> Result<Self> {
        if hbar != HBAR {
            return Err(Error::InvalidHbar(hbar));
        }
        Ok(Self { hbar })
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }
}

impl Default for Constants {
    fn default() -> Self {
        Self { hbar: HBAR }
    }
}

/// Uniform cubic grid on `[-L, L]^3` with `N` points per axis, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    half_width: f64,
    points: usize,
}

impl GridSpec {
    pub const DEFAULT_HALF_WIDTH: f64 = 8.0;
    pub const DEFAULT_POINTS: usize = 64;
    pub const MIN_POINTS: usize = 8;

    pub fn new(half_width: f64, points: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half width must be positive and finite, got {half_width}"
            )));
        }
        if points < Self::MIN_POINTS {
            return Err(Error::InvalidGrid(format!(
                "need at least {} points per axis, got {points}",
                Self::MIN_POINTS
            )));
        }
        Ok(Self { half_width, points })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.points - 1) as f64
    }

    /// Total number of nodes, `N^3`.
    pub fn len(&self) -> usize {
        self.points.pow(3)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Nodes per `q` slab, `N^2`.
    pub fn slab_len(&self) -> usize {
        self.points * self.points
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing()
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.coord(i)).collect()
    }

    pub fn index(&self, i: usize, j: usize, l: usize) -> usize {
        (i * self.points + j) * self.points + l
    }

    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let n = self.points;
        [idx / (n * n), (idx / n) % n, idx % n]
    }

    pub fn point(&self, idx: usize) -> [f64; 3] {
        let [i, j, l] = self.unravel(idx);
        [self.coord(i), self.coord(j), self.coord(l)]
    }

    pub fn stride(&self, axis: Axis) -> usize {
        match axis {
            Axis::Q => self.points * self.points,
            Axis::QPrime => self.points,
            Axis::X => 1,
        }
    }

    /// One-dimensional trapezoid weights.
    pub fn weights(&self) -> Vec<f64> {
        let h = self.spacing();
        let mut w = vec![h; self.points];
        w[0] = 0.5 * h;
        w[self.points - 1] = 0.5 * h;
        w
    }

    /// True when the node lies within [`BOUNDARY_CELLS`] cells of some face.
    pub fn near_face(&self, idx: usize) -> bool {
        let last = self.points - 1;
        self.unravel(idx)
            .iter()
            .any(|&i| i <= BOUNDARY_CELLS || i >= last - BOUNDARY_CELLS)
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            half_width: Self::DEFAULT_HALF_WIDTH,
            points: Self::DEFAULT_POINTS,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_or_degenerate_grids() {
        assert!(GridSpec::new(8.0, 7).is_err());
        assert!(GridSpec::new(0.0, 64).is_err());
        assert!(GridSpec::new(f64::NAN, 64).is_err());
        assert!(GridSpec::new(8.0, 8).is_ok());
    }

    #[test]
    fn coordinates_span_the_box() {
        let g = GridSpec::default();
        assert_eq!(g.coord(0), -8.0);
        assert!((g.coord(63) - 8.0).abs() < 1e-12);
        assert!((g.spacing() - 16.0 / 63.0).abs() < 1e-15);
    }

    #[test]
    fn index_round_trip() {
        let g = GridSpec::new(1.0, 9).unwrap();
        for idx in [0, 5, 80, 400, g.len() - 1] {
            let [i, j, l] = g.unravel(idx);
            assert_eq!(g.index(i, j, l), idx);
        }
    }

    #[test]
    fn hbar_must_be_one() {
        assert!(Constants::new(1.0).is_ok());
        assert_eq!(Constants::new(1.054).unwrap_err(), Error::InvalidHbar(1.054));
    }
}
