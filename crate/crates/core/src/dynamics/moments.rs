use nalgebra::{Matrix6, Vector6};
use num_complex::Complex64;

use super::{GaussianMoments, Tag};
use crate::config_space::{quadrature, spectral_derivative, Axis, GridSpec, HybridWavefunction, MadelungFields};

/// First and second moments of `(q, p, q', p', x, k)` in the grid state.
///
/// Momenta act spectrally. Covariances are the symmetrized `Re⟨(A-a)ψ|(B-b)ψ⟩`.
pub fn grid_moments(psi: &HybridWavefunction) -> GaussianMoments {
    moments_of(psi.amplitudes(), psi.grid())
}

/// Moments of `√P e^{iS}`.
pub fn madelung_moments(m: &MadelungFields) -> GaussianMoments {
    moments_of(&m.amplitudes(), m.grid())
}

fn moments_of(psi: &[Complex64], grid: &GridSpec) -> GaussianMoments {
    let i = Complex64::i();
    let mut v: Vec<Vec<Complex64>> = Vec::with_capacity(6);
    for axis in Axis::ALL {
        let pos: Vec<Complex64> = psi
            .iter()
            .enumerate()
            .map(|(idx, a)| a * grid.point(idx)[axis.index()])
            .collect();
        let mom: Vec<Complex64> = spectral_derivative(psi, axis, grid)
            .into_iter()
            .map(|d| -i * d)
            .collect();
        v.push(pos);
        v.push(mom);
    }
    let inner = |a: &[Complex64], b: &[Complex64]| -> f64 {
        let prod: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x.conj() * y).collect();
        quadrature(&prod, grid).expect("field matches grid").re
    };
    let norm = inner(psi, psi);
    let mean = Vector6::from_fn(|r, _| inner(psi, &v[r]) / norm);
    let u: Vec<Vec<Complex64>> = (0..6)
        .map(|r| v[r].iter().zip(psi).map(|(a, p)| a - p * mean[r]).collect())
        .collect();
    let mut cov = Matrix6::zeros();
    for r in 0..6 {
        for c in r..6 {
            let val = inner(&u[r], &u[c]) / norm;
            cov[(r, c)] = val;
            cov[(c, r)] = val;
        }
    }
    GaussianMoments::from_parts_unchecked(mean, cov, Tag::Quantum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config_space::{to_madelung, GaussianPacket, ProductGaussian};

    #[test]
    fn product_state_moments_match_packets() {
        let grid = GridSpec::new(8.0, 48).unwrap();
        let st = ProductGaussian {
            packets: [
                GaussianPacket::chirped(0.5, 1.0, 1.0, 0.5).unwrap(),
                GaussianPacket::vacuum(),
                GaussianPacket::new(-1.0, 1.3, -0.5).unwrap(),
            ],
        };
        let psi = st.sample(&grid).unwrap();
        let want = GaussianMoments::from_product(&st, Tag::Quantum);
        for g in [grid_moments(&psi), madelung_moments(&to_madelung(&psi))] {
            assert!((g.mean() - want.mean()).amax() < 1e-8);
            assert!((g.cov() - want.cov()).amax() < 1e-8, "{}", g.cov() - want.cov());
        }
    }
}
