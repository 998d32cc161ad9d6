//! Quadrature and differentiation on the grid.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use super::grid::{Axis, GridSpec};
use crate::exec;
use crate::{Error, Result};

/// Scalar types that can live on grid nodes.
pub trait FieldValue:
    Copy + Send + Sync + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
}

impl FieldValue for f64 {}
impl FieldValue for Complex64 {}

/// Trapezoidal integral of `field` over `[-L, L]^3`.
///
/// Partial sums are formed per `q` slab and combined in slab order, so the value does not
/// depend on the thread count.
pub fn quadrature<T: FieldValue>(field: &[T], grid: &GridSpec) -> Result<T> {
    if field.len() != grid.len() {
        return Err(Error::ShapeMismatch {
            expected: grid.len(),
            actual: field.len(),
        });
    }
    let w = grid.weights();
    let n = grid.points();
    let slabs = exec::map_range(n, |i| {
        let slab = &field[i * n * n..(i + 1) * n * n];
        let mut acc = T::default();
        for j in 0..n {
            let row = &slab[j * n..(j + 1) * n];
            let mut r = T::default();
            for (v, &wl) in row.iter().zip(&w) {
                r = r + *v * wl;
            }
            acc = acc + r * w[j];
        }
        acc * w[i]
    });
    Ok(slabs.into_iter().fold(T::default(), |a, b| a + b))
}

#[inline]
fn fd4<T: FieldValue>(line: impl Fn(usize) -> T, i: usize, n: usize, inv12h: f64) -> T {
    if i >= 2 && i + 2 < n {
        return ((line(i - 2) - line(i + 2)) + (line(i + 1) - line(i - 1)) * 8.0) * inv12h;
    }
    // one-sided five-point stencils, exact through degree four; mirrored at the upper face
    const EDGE: [f64; 5] = [-25.0, 48.0, -36.0, 16.0, -3.0];
    const NEXT: [f64; 5] = [-3.0, -10.0, 18.0, -6.0, 1.0];
    let (coeffs, upper) = match i {
        0 => (EDGE, false),
        1 => (NEXT, false),
        _ if i == n - 2 => (NEXT, true),
        _ => (EDGE, true),
    };
    let mut acc = T::default();
    for (m, &c) in coeffs.iter().enumerate() {
        acc = if upper {
            acc - line(n - 1 - m) * c
        } else {
            acc + line(m) * c
        };
    }
    acc * inv12h
}

/// Fourth-order finite-difference derivative along `axis`.
///
/// Central five-point stencil in the interior, one-sided five-point stencils on the two
/// layers next to each face. Exact for polynomials of degree at most four.
pub fn gradient<T: FieldValue>(field: &[T], axis: Axis, grid: &GridSpec) -> Vec<T> {
    assert_eq!(field.len(), grid.len(), "field does not match grid");
    let n = grid.points();
    let stride = grid.stride(axis);
    let inv12h = 1.0 / (12.0 * grid.spacing());
    let mut out = vec![T::default(); grid.len()];
    exec::for_each_chunk_mut(&mut out, grid.slab_len(), |i, slab| {
        for (local, o) in slab.iter_mut().enumerate() {
            let idx = i * n * n + local;
            let pos = grid.unravel(idx)[axis.index()];
            let start = idx - pos * stride;
            *o = fd4(|m| field[start + m * stride], pos, n, inv12h);
        }
    });
    out
}

/// Periodic Fourier differentiation matrix for the grid along one axis.
///
/// The period is `N h`. The Nyquist mode is dropped, which makes the matrix real and
/// antisymmetric, so `-i D` is Hermitian under the uniform inner product.
pub fn spectral_matrix(grid: &GridSpec) -> Vec<f64> {
    let n = grid.points();
    let scale = 2.0 * std::f64::consts::PI / (n as f64 * grid.spacing());
    let mut d = vec![0.0; n * n];
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let diff = a as i64 - b as i64;
            let sign = if diff.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let arg = diff as f64 * std::f64::consts::PI / n as f64;
            let kernel = if n % 2 == 0 {
                arg.cos() / arg.sin()
            } else {
                1.0 / arg.sin()
            };
            d[a * n + b] = 0.5 * sign * kernel * scale;
        }
    }
    d
}

/// Spectral (Fourier) derivative of a complex field along `axis`.
pub fn spectral_derivative(field: &[Complex64], axis: Axis, grid: &GridSpec) -> Vec<Complex64> {
    let d = spectral_matrix(grid);
    apply_line_matrix(field, axis, grid, &d)
}

pub(crate) fn apply_line_matrix(
    field: &[Complex64],
    axis: Axis,
    grid: &GridSpec,
    matrix: &[f64],
) -> Vec<Complex64> {
    assert_eq!(field.len(), grid.len(), "field does not match grid");
    let n = grid.points();
    let stride = grid.stride(axis);
    let mut out = vec![Complex64::default(); grid.len()];
    exec::for_each_chunk_mut(&mut out, grid.slab_len(), |i, slab| {
        for (local, o) in slab.iter_mut().enumerate() {
            let idx = i * n * n + local;
            let pos = grid.unravel(idx)[axis.index()];
            let start = idx - pos * stride;
            let row = &matrix[pos * n..(pos + 1) * n];
            let mut acc = Complex64::default();
            for (m, &c) in row.iter().enumerate() {
                if c != 0.0 {
                    acc += field[start + m * stride] * c;
                }
            }
            *o = acc;
        }
    });
    out
}
