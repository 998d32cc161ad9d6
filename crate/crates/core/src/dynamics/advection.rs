use nalgebra::{SMatrix, SVector};

use super::InteractionParams;
use crate::config_space::{gradient, quadrature, Axis, GridSpec, MadelungFields};
use crate::ensemble_algebra::NODE_MASS_LIMIT;
use crate::{exec, Error, Result};

/// Largest admissible RK4 step, `h / max speed`, with the speed bounded by
/// `(|g1| + |g2|) L` over the box.
pub fn step_bound(grid: &GridSpec, params: &InteractionParams) -> f64 {
    let speed = (params.g1.abs() + params.g2.abs()) * grid.half_width();
    if speed == 0.0 {
        f64::INFINITY
    } else {
        grid.spacing() / speed
    }
}

/// Default step, `0.4` of [`step_bound`].
pub fn stable_step(grid: &GridSpec, params: &InteractionParams) -> f64 {
    0.4 * step_bound(grid, params)
}

/// RK4 integration of
///
/// `∂P/∂t = -g1 x ∂_q P - g2 q' ∂_x P`, `∂S/∂t = -g1 x ∂_q S - g2 q' ∂_x S`
///
/// in `steps` equal steps up to `params.t`.
///
/// `S` is undefined on masked nodes, so before stepping it is replaced there by a
/// density-weighted quadratic fit of the unmasked values; this keeps the difference
/// stencils free of jumps. After stepping, negative densities from dispersion are
/// clipped, `P` is rescaled to unit mass and the mask is recomputed.
pub fn evolve_madelung(
    m: &MadelungFields,
    params: &InteractionParams,
    steps: usize,
) -> Result<MadelungFields> {
    let grid = *m.grid();
    let masked = m.masked_mass();
    if masked > NODE_MASS_LIMIT {
        return Err(Error::NodeDominated(masked));
    }
    if params.t == 0.0 || (params.g1 == 0.0 && params.g2 == 0.0) {
        return Ok(m.clone());
    }
    let bound = step_bound(&grid, params);
    let dt = params.t / steps as f64;
    if steps == 0 || dt > bound {
        return Err(Error::StepTooLarge { dt, bound });
    }
    let mut p = m.density().to_vec();
    let mut s = extend_action(m);
    for _ in 0..steps {
        rk4(&mut p, &grid, params, dt);
        rk4(&mut s, &grid, params, dt);
    }
    for v in &mut p {
        *v = v.max(0.0);
    }
    let mass = quadrature(&p, &grid)?;
    for v in &mut p {
        *v /= mass;
    }
    Ok(MadelungFields::from_raw(&grid, p, s)?.with_floor(m.floor()))
}

/// [`evolve_madelung`] with the number of steps chosen from [`stable_step`].
pub fn evolve_madelung_auto(m: &MadelungFields, params: &InteractionParams) -> Result<MadelungFields> {
    let dt = stable_step(m.grid(), params);
    let steps = if dt.is_finite() {
        (params.t / dt).ceil().max(1.0) as usize
    } else {
        1
    };
    evolve_madelung(m, params, steps)
}

fn rhs(f: &[f64], grid: &GridSpec, params: &InteractionParams) -> Vec<f64> {
    let dq = gradient(f, Axis::Q, grid);
    let dx = gradient(f, Axis::X, grid);
    let mut out = vec![0.0; f.len()];
    let slab = grid.slab_len();
    exec::for_each_chunk_mut(&mut out, slab, |i, chunk| {
        for (local, o) in chunk.iter_mut().enumerate() {
            let idx = i * slab + local;
            let [_, qp, x] = grid.point(idx);
            *o = -(params.g1 * x * dq[idx] + params.g2 * qp * dx[idx]);
        }
    });
    out
}

fn axpy(base: &[f64], k: &[f64], a: f64) -> Vec<f64> {
    base.iter().zip(k).map(|(b, k)| b + a * k).collect()
}

fn rk4(f: &mut [f64], grid: &GridSpec, params: &InteractionParams, dt: f64) {
    let k1 = rhs(f, grid, params);
    let k2 = rhs(&axpy(f, &k1, dt / 2.0), grid, params);
    let k3 = rhs(&axpy(f, &k2, dt / 2.0), grid, params);
    let k4 = rhs(&axpy(f, &k3, dt), grid, params);
    for (i, v) in f.iter_mut().enumerate() {
        *v += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

type Basis = SVector<f64, 10>;

fn quadratic_basis([q, qp, x]: [f64; 3]) -> Basis {
    Basis::from([1.0, q, qp, x, q * q, qp * qp, x * x, q * qp, q * x, qp * x])
}

/// `S` on unmasked nodes, a weighted quadratic fit elsewhere.
fn extend_action(m: &MadelungFields) -> Vec<f64> {
    let grid = m.grid();
    let (p, s, mask) = (m.density(), m.action(), m.mask());
    if !mask.iter().any(|&b| b) {
        return s.to_vec();
    }
    let slab = grid.slab_len();
    let partials = exec::map_range(grid.points(), |i| {
        let mut a = SMatrix::<f64, 10, 10>::zeros();
        let mut b = Basis::zeros();
        for idx in i * slab..(i + 1) * slab {
            if mask[idx] {
                continue;
            }
            let phi = quadratic_basis(grid.point(idx));
            a += phi * phi.transpose() * p[idx];
            b += phi * (p[idx] * s[idx]);
        }
        (a, b)
    });
    let (mut a, mut b) = (SMatrix::<f64, 10, 10>::zeros(), Basis::zeros());
    for (pa, pb) in partials {
        a += pa;
        b += pb;
    }
    let coef = a
        .cholesky()
        .map(|c| c.solve(&b))
        .or_else(|| a.lu().solve(&b))
        .unwrap_or_else(Basis::zeros);
    (0..grid.len())
        .map(|idx| {
            if mask[idx] {
                coef.dot(&quadratic_basis(grid.point(idx)))
            } else {
                s[idx]
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config_space::{gaussian_product_state, to_madelung};

    fn marginal_mean(m: &MadelungFields, axis: Axis) -> f64 {
        let g = m.grid();
        let v: Vec<f64> = m
            .density()
            .iter()
            .enumerate()
            .map(|(i, p)| p * g.point(i)[axis.index()])
            .collect();
        quadrature(&v, g).unwrap()
    }

    #[test]
    fn no_coupling_leaves_fields() {
        let grid = GridSpec::new(8.0, 24).unwrap();
        let m = to_madelung(&gaussian_product_state(&grid, [0.0; 3], [1.0; 3], [0.5, 0.0, 0.0]).unwrap());
        let p = InteractionParams::new(0.0, 0.0, 1.0).unwrap();
        assert_eq!(evolve_madelung(&m, &p, 3).unwrap(), m);
    }

    #[test]
    fn step_bound_enforced() {
        let grid = GridSpec::new(8.0, 24).unwrap();
        let m = to_madelung(&gaussian_product_state(&grid, [0.0; 3], [1.0; 3], [0.0; 3]).unwrap());
        let p = InteractionParams::new(1.0, 1.0, 1.0).unwrap();
        assert!(matches!(evolve_madelung(&m, &p, 1), Err(Error::StepTooLarge { .. })));
        assert!(matches!(evolve_madelung(&m, &p, 0), Err(Error::StepTooLarge { .. })));
    }

    #[test]
    fn drift_of_q_follows_mediator_position() {
        let grid = GridSpec::new(8.0, 48).unwrap();
        let p = InteractionParams::new(1.0, 0.0, 0.5).unwrap();
        for (xc, drift) in [(0.0, 0.0), (2.0, 1.0)] {
            let m = to_madelung(&gaussian_product_state(&grid, [0.0, 0.0, xc], [1.0; 3], [0.0; 3]).unwrap());
            let out = evolve_madelung_auto(&m, &p).unwrap();
            assert!((marginal_mean(&out, Axis::Q) - drift).abs() < 1e-3);
            assert!((out.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn quadratic_extension_is_exact_for_quadratic_action() {
        let grid = GridSpec::new(8.0, 24).unwrap();
        let psi = gaussian_product_state(&grid, [0.0; 3], [1.0; 3], [0.3, 0.0, -0.2]).unwrap();
        let m = to_madelung(&psi).with_floor(1e-4);
        let ext = extend_action(&m);
        for (idx, &v) in ext.iter().enumerate() {
            let [q, _, x] = grid.point(idx);
            let exact = 0.3 * q - 0.2 * x;
            let offset = m.action()[grid.index(12, 12, 12)] - {
                let [q, _, x] = grid.point(grid.index(12, 12, 12));
                0.3 * q - 0.2 * x
            };
            assert!((v - exact - offset).abs() < 1e-8, "idx {idx}");
        }
    }
}
