use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use num_complex::Complex64;

use super::calculus::{gradient, quadrature};
use super::grid::{Axis, GridSpec, HBAR, P_FLOOR};
use super::wavefunction::{HybridWavefunction, NORM_TOLERANCE};
use crate::{Error, Result};

/// Madelung representation `ψ = √P e^{iS/ħ}`.
///
/// `S` is meaningful only where `P ≥ floor`; below the floor the node is masked and
/// `S` is stored as zero.
#[derive(Debug, Clone, PartialEq)]
pub struct MadelungFields {
    grid: GridSpec,
    density: Vec<f64>,
    action: Vec<f64>,
    mask: Vec<bool>,
    floor: f64,
}

impl MadelungFields {
    /// Normalized fields. Fails on negative densities or `|∫P - 1| > 1e-9`.
    pub fn new(grid: &GridSpec, density: Vec<f64>, action: Vec<f64>) -> Result<Self> {
        let m = Self::from_raw(grid, density, action)?;
        let norm = m.norm();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(m)
    }

    /// Fields without the normalization requirement, e.g. perturbed densities used to
    /// probe functionals.
    pub fn from_raw(grid: &GridSpec, density: Vec<f64>, mut action: Vec<f64>) -> Result<Self> {
        for len in [density.len(), action.len()] {
            if len != grid.len() {
                return Err(Error::ShapeMismatch {
                    expected: grid.len(),
                    actual: len,
                });
            }
        }
        if let Some(bad) = density.iter().find(|p| !(**p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidState(format!("density value {bad}")));
        }
        let mask: Vec<bool> = density.iter().map(|&p| p < P_FLOOR).collect();
        for (s, &m) in action.iter_mut().zip(&mask) {
            if m {
                *s = 0.0;
            }
        }
        Ok(Self {
            grid: *grid,
            density,
            action,
            mask,
            floor: P_FLOOR,
        })
    }

    /// Recomputes the mask with a different density floor.
    pub fn with_floor(mut self, floor: f64) -> Self {
        self.floor = floor;
        for ((m, s), &p) in self.mask.iter_mut().zip(&mut self.action).zip(&self.density) {
            *m = p < floor;
            if *m {
                *s = 0.0;
            }
        }
        self
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn action(&self) -> &[f64] {
        &self.action
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    pub fn norm(&self) -> f64 {
        quadrature(&self.density, &self.grid).expect("density matches grid")
    }

    /// Probability carried by masked nodes.
    pub fn masked_mass(&self) -> f64 {
        let v: Vec<f64> = self
            .density
            .iter()
            .zip(&self.mask)
            .map(|(&p, &m)| if m { p } else { 0.0 })
            .collect();
        quadrature(&v, &self.grid).expect("density matches grid")
    }

    /// `∂S` along `axis`, set to zero wherever the stencil touches a masked node.
    pub fn action_gradient(&self, axis: Axis) -> Vec<f64> {
        let mut g = gradient(&self.action, axis, &self.grid);
        let n = self.grid.points();
        let stride = self.grid.stride(axis);
        for (idx, v) in g.iter_mut().enumerate() {
            let pos = self.grid.unravel(idx)[axis.index()];
            let lo = pos.saturating_sub(2).min(n - 5);
            let hi = (lo + 4).max((pos + 2).min(n - 1));
            let start = idx - pos * stride;
            if (lo..=hi).any(|m| self.mask[start + m * stride]) {
                *v = 0.0;
            }
        }
        g
    }

    /// `√P e^{iS/ħ}` without any validation.
    pub(crate) fn amplitudes(&self) -> Vec<Complex64> {
        self.density
            .iter()
            .zip(&self.action)
            .map(|(&p, &s)| Complex64::from_polar(p.sqrt(), s / HBAR))
            .collect()
    }
}

/// `P = |ψ|²` and `S = ħ arg ψ`, with the phase unwrapped over unmasked nodes.
pub fn to_madelung(psi: &HybridWavefunction) -> MadelungFields {
    let grid = *psi.grid();
    let density = psi.density();
    let mask: Vec<bool> = density.iter().map(|&p| p < P_FLOOR).collect();
    let phase = unwrap_phase(&grid, psi.amplitudes(), &density, &mask);
    let action = phase
        .into_iter()
        .zip(&mask)
        .map(|(s, &m)| if m { 0.0 } else { HBAR * s })
        .collect();
    MadelungFields {
        grid,
        density,
        action,
        mask,
        floor: P_FLOOR,
    }
}

/// `ψ = √P e^{iS/ħ}`. Requires `∫P = 1` to `1e-9`.
pub fn from_madelung(m: &MadelungFields) -> Result<HybridWavefunction> {
    let norm = m.norm();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized(norm));
    }
    let psi = HybridWavefunction::from_parts_unchecked(m.grid, m.amplitudes());
    psi.check_boundary()?;
    Ok(psi)
}

#[derive(PartialEq)]
struct Frontier {
    density: f64,
    node: usize,
    from: usize,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        self.density
            .total_cmp(&other.density)
            .then_with(|| other.node.cmp(&self.node))
            .then_with(|| other.from.cmp(&self.from))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn wrap(d: f64) -> f64 {
    d - 2.0 * PI * (d / (2.0 * PI)).round()
}

/// Quality-guided flood-fill unwrap: starting from the grid center (or the densest node
/// of each connected unmasked region), nodes are visited in order of decreasing density
/// and take the phase of the neighbour they were reached from plus the wrapped step.
fn unwrap_phase(grid: &GridSpec, psi: &[Complex64], density: &[f64], mask: &[bool]) -> Vec<f64> {
    let n = grid.points();
    let raw: Vec<f64> = psi.iter().map(|a| a.arg()).collect();
    let mut out = vec![0.0; grid.len()];
    let mut done = mask.to_vec();
    let mut heap = BinaryHeap::new();

    let push_neighbours = |idx: usize, done: &[bool], heap: &mut BinaryHeap<Frontier>| {
        let ijk = grid.unravel(idx);
        for axis in Axis::ALL {
            let pos = ijk[axis.index()];
            let stride = grid.stride(axis);
            let mut visit = |nb: usize| {
                if !done[nb] {
                    heap.push(Frontier {
                        density: density[nb],
                        node: nb,
                        from: idx,
                    });
                }
            };
            if pos > 0 {
                visit(idx - stride);
            }
            if pos + 1 < n {
                visit(idx + stride);
            }
        }
    };

    let center = grid.index(n / 2, n / 2, n / 2);
    let mut seeds: Option<Vec<usize>> = None;
    let mut next_seed = 0usize;
    let mut seed = Some(center);
    loop {
        let s = match seed.take() {
            Some(s) => s,
            None => {
                let order = seeds.get_or_insert_with(|| {
                    let mut v: Vec<usize> = (0..grid.len()).filter(|&i| !mask[i]).collect();
                    v.sort_by(|&a, &b| density[b].total_cmp(&density[a]).then(a.cmp(&b)));
                    v
                });
                while next_seed < order.len() && done[order[next_seed]] {
                    next_seed += 1;
                }
                match order.get(next_seed) {
                    Some(&s) => s,
                    None => break,
                }
            }
        };
        if done[s] {
            continue;
        }
        done[s] = true;
        out[s] = raw[s];
        push_neighbours(s, &done, &mut heap);
        while let Some(Frontier { node, from, .. }) = heap.pop() {
            if done[node] {
                continue;
            }
            done[node] = true;
            out[node] = out[from] + wrap(raw[node] - raw[from]);
            push_neighbours(node, &done, &mut heap);
        }
    }
    out
}
