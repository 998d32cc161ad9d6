use num_complex::Complex64;

use super::{FlowMap, InteractionParams};
use crate::config_space::wavefunction::{norm_scale, sample_closed_form};
use crate::config_space::{ClosedForm, GridSpec, HybridWavefunction};
use crate::{exec, Result};

/// `ψ_t(z) = ψ_0(Φ_{-t}(z))`.
///
/// With `initial_form` (the closed form `ψ` was sampled from) the pulled-back points are
/// evaluated exactly and scaled by the factor that normalized the `t = 0` sample, so the
/// result is exactly the unitary image of the input. Otherwise `ψ` is interpolated with
/// tricubic Lagrange stencils and rescaled to unit norm; points pulled back from outside
/// the box get amplitude zero.
pub fn evolve_wavefunction(
    psi: &HybridWavefunction,
    params: &InteractionParams,
    initial_form: Option<&dyn ClosedForm>,
) -> Result<HybridWavefunction> {
    let grid = *psi.grid();
    if params.t == 0.0 {
        return Ok(psi.clone());
    }
    let back = params.flow().inverse();
    let amplitudes = match initial_form {
        Some(form) => {
            let scale = norm_scale(&sample_closed_form(&grid, form, |z| z), &grid);
            let raw = sample_closed_form(&grid, form, |z| back.apply(z));
            raw.into_iter().map(|a| a * scale).collect()
        }
        None => {
            let raw = interpolate_pulled_back(psi.amplitudes(), &grid, &back);
            let scale = norm_scale(&raw, &grid);
            raw.into_iter().map(|a| a * scale).collect()
        }
    };
    let out = HybridWavefunction::from_parts_unchecked(grid, amplitudes);
    out.check_boundary()?;
    Ok(out)
}

fn interpolate_pulled_back(
    field: &[Complex64],
    grid: &GridSpec,
    back: &FlowMap,
) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); grid.len()];
    let slab = grid.slab_len();
    exec::for_each_chunk_mut(&mut out, slab, |i, chunk| {
        for (local, o) in chunk.iter_mut().enumerate() {
            *o = tricubic(field, grid, back.apply(grid.point(i * slab + local)));
        }
    });
    out
}

/// Start index and weights of the four-point Lagrange stencil around `y`.
fn stencil(y: f64, grid: &GridSpec) -> Option<(usize, [f64; 4])> {
    let n = grid.points();
    let u = (y + grid.half_width()) / grid.spacing();
    if !(u >= 0.0 && u <= (n - 1) as f64) {
        return None;
    }
    let start = (u.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
    let s = u - start as f64;
    let w = [
        -(s - 1.0) * (s - 2.0) * (s - 3.0) / 6.0,
        s * (s - 2.0) * (s - 3.0) / 2.0,
        -s * (s - 1.0) * (s - 3.0) / 2.0,
        s * (s - 1.0) * (s - 2.0) / 6.0,
    ];
    Some((start, w))
}

fn tricubic(field: &[Complex64], grid: &GridSpec, z: [f64; 3]) -> Complex64 {
    let (Some((a, wa)), Some((b, wb)), Some((c, wc))) =
        (stencil(z[0], grid), stencil(z[1], grid), stencil(z[2], grid))
    else {
        return Complex64::default();
    };
    let mut acc = Complex64::default();
    for (i, &w0) in wa.iter().enumerate() {
        for (j, &w1) in wb.iter().enumerate() {
            let mut line = Complex64::default();
            for (l, &w2) in wc.iter().enumerate() {
                line += field[grid.index(a + i, b + j, c + l)] * w2;
            }
            acc += line * (w0 * w1);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config_space::{GaussianPacket, ProductGaussian};
    use crate::Error;

    #[test]
    fn zero_time_is_identity() {
        let grid = GridSpec::new(8.0, 32).unwrap();
        let psi = ProductGaussian::vacuum().sample(&grid).unwrap();
        let p = InteractionParams::new(1.0, 1.0, 0.0).unwrap();
        assert_eq!(evolve_wavefunction(&psi, &p, None).unwrap(), psi);
    }

    #[test]
    fn stencil_reproduces_cubics() {
        let grid = GridSpec::new(2.0, 9).unwrap();
        for y in [-2.0, -1.9, -0.3, 0.0, 1.1, 1.99, 2.0] {
            let (start, w) = stencil(y, &grid).unwrap();
            let v: f64 = (0..4)
                .map(|m| {
                    let x = grid.coord(start + m);
                    w[m] * (x * x * x - 2.0 * x + 1.0)
                })
                .sum();
            assert!((v - (y * y * y - 2.0 * y + 1.0)).abs() < 1e-12, "y={y}");
        }
        assert!(stencil(2.01, &grid).is_none());
    }

    #[test]
    fn exact_and_interpolated_transport_agree() {
        let grid = GridSpec::new(8.0, 64).unwrap();
        let form = ProductGaussian::vacuum();
        let psi = form.sample(&grid).unwrap();
        let p = InteractionParams::new(1.0, 1.0, 0.5).unwrap();
        let exact = evolve_wavefunction(&psi, &p, Some(&form)).unwrap();
        let interp = evolve_wavefunction(&psi, &p, None).unwrap();
        assert!((exact.norm_squared() - 1.0).abs() < 1e-9);
        assert!((interp.norm_squared() - 1.0).abs() < 1e-9);
        assert!(exact.fidelity(&interp).unwrap() > 1.0 - 1e-4);
    }

    #[test]
    fn leaking_transport_is_rejected() {
        let grid = GridSpec::new(8.0, 32).unwrap();
        let form = ProductGaussian {
            packets: [
                GaussianPacket::vacuum(),
                GaussianPacket::vacuum(),
                GaussianPacket::new(2.0, 1.0, 0.0).unwrap(),
            ],
        };
        let psi = form.sample(&grid).unwrap();
        let p = InteractionParams::new(3.0, 0.0, 1.5).unwrap();
        assert!(matches!(
            evolve_wavefunction(&psi, &p, Some(&form)),
            Err(Error::BoundaryMass { .. })
        ));
    }
}
