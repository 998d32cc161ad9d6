use nalgebra::{Complex, DMatrix, Matrix6, SMatrix, Vector6};
use serde::{Deserialize, Serialize};

use super::InteractionParams;
use crate::config_space::ProductGaussian;
use crate::entanglement::{log_negativity, reduce_to_qq_prime};
use crate::{exec, Error, Result};

/// Position and momentum variance of the vacuum packet (`ħ = 1`).
pub const VACUUM_VARIANCE: f64 = 0.5;

const SYMMETRY_TOLERANCE: f64 = 1e-12;
const ADMISSIBILITY_TOLERANCE: f64 = 1e-10;

/// Interpretation attached to a set of moments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tag {
    Quantum,
    Classical,
}

impl Tag {
    pub fn label(self) -> &'static str {
        match self {
            Tag::Quantum => "quantum",
            Tag::Classical => "classical",
        }
    }
}

/// Mean and covariance over `(q, p, q', p', x, k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianMoments {
    mean: Vector6<f64>,
    cov: Matrix6<f64>,
    tag: Tag,
}

pub(crate) fn symplectic_form<const D: usize>() -> SMatrix<f64, D, D> {
    let mut w = SMatrix::<f64, D, D>::zeros();
    for m in 0..D / 2 {
        w[(2 * m, 2 * m + 1)] = 1.0;
        w[(2 * m + 1, 2 * m)] = -1.0;
    }
    w
}

/// Smallest eigenvalue of `cov + (i/2) Ω`.
pub(crate) fn min_uncertainty_eigenvalue<const D: usize>(cov: &SMatrix<f64, D, D>) -> f64 {
    let w = symplectic_form::<D>();
    let h = DMatrix::from_fn(D, D, |r, c| Complex::new(cov[(r, c)], 0.5 * w[(r, c)]));
    h.symmetric_eigenvalues().min()
}

impl GaussianMoments {
    /// Validates symmetry and, for the quantum tag, the uncertainty relation
    /// `cov + (i/2) Ω ⪰ 0`; the classical tag only needs `cov ⪰ 0`.
    pub fn new(mean: Vector6<f64>, cov: Matrix6<f64>, tag: Tag) -> Result<Self> {
        if !mean.iter().chain(cov.iter()).all(|v| v.is_finite()) {
            return Err(Error::Inadmissible("non-finite moment".into()));
        }
        if (cov - cov.transpose()).amax() > SYMMETRY_TOLERANCE {
            return Err(Error::Inadmissible("covariance is not symmetric".into()));
        }
        let min = match tag {
            Tag::Quantum => min_uncertainty_eigenvalue(&cov),
            Tag::Classical => cov.symmetric_eigenvalues().min(),
        };
        if min < -ADMISSIBILITY_TOLERANCE {
            return Err(Error::Inadmissible(format!(
                "{} covariance has eigenvalue {min:.3e}",
                tag.label()
            )));
        }
        Ok(Self { mean, cov, tag })
    }

    pub(crate) fn from_parts_unchecked(mean: Vector6<f64>, cov: Matrix6<f64>, tag: Tag) -> Self {
        Self { mean, cov, tag }
    }

    /// Product vacuum: zero mean, `cov = I/2`.
    pub fn vacuum() -> Self {
        Self {
            mean: Vector6::zeros(),
            cov: Matrix6::identity() * VACUUM_VARIANCE,
            tag: Tag::Quantum,
        }
    }

    /// Moments of a product of Gaussian packets.
    pub fn from_product(state: &ProductGaussian, tag: Tag) -> Self {
        let mut mean = Vector6::zeros();
        let mut cov = Matrix6::zeros();
        for (m, pk) in state.packets.iter().enumerate() {
            let (iq, ip) = (2 * m, 2 * m + 1);
            mean[iq] = pk.center;
            mean[ip] = pk.momentum;
            cov[(iq, iq)] = pk.position_variance();
            cov[(ip, ip)] = pk.momentum_variance();
            cov[(iq, ip)] = pk.position_momentum_covariance();
            cov[(ip, iq)] = cov[(iq, ip)];
        }
        Self { mean, cov, tag }
    }

    /// Product state with unit-width probes and a mediator of the given variances.
    pub fn with_mediator(x_variance: f64, k_variance: f64, tag: Tag) -> Result<Self> {
        let mut cov = Matrix6::identity() * VACUUM_VARIANCE;
        cov[(4, 4)] = x_variance;
        cov[(5, 5)] = k_variance;
        Self::new(Vector6::zeros(), cov, tag)
    }

    pub fn mean(&self) -> &Vector6<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &Matrix6<f64> {
        &self.cov
    }

    pub fn tag(&self) -> Tag {
        self.tag
    }

    pub fn with_tag(self, tag: Tag) -> Self {
        Self { tag, ..self }
    }

    pub fn covariance(&self, a: usize, b: usize) -> f64 {
        self.cov[(a, b)]
    }

    pub fn correlation(&self, a: usize, b: usize) -> f64 {
        self.cov[(a, b)] / (self.cov[(a, a)] * self.cov[(b, b)]).sqrt()
    }
}

/// Linear generator `G` with `d/dt z = G z` for `z = (q, p, q', p', x, k)`.
pub fn generator(g1: f64, g2: f64) -> Matrix6<f64> {
    let mut g = Matrix6::zeros();
    g[(0, 4)] = g1;
    g[(4, 2)] = g2;
    g[(3, 5)] = -g2;
    g[(5, 1)] = -g1;
    g
}

/// Heisenberg propagator `S(t) = exp(t G)`. `G` is nilpotent of order three, so the
/// series stops at `t² G² / 2`.
pub fn heisenberg_matrix(params: &InteractionParams) -> Matrix6<f64> {
    let tg = generator(params.g1, params.g2) * params.t;
    Matrix6::identity() + tg + tg * tg * 0.5
}

/// `mean ← S mean`, `cov ← S cov Sᵀ`; the tag is carried through.
pub fn evolve_gaussian(state: &GaussianMoments, params: &InteractionParams) -> GaussianMoments {
    let s = heisenberg_matrix(params);
    let cov = s * state.cov * s.transpose();
    GaussianMoments {
        mean: s * state.mean,
        cov: (cov + cov.transpose()) * 0.5,
        tag: state.tag,
    }
}

/// Liouville evolution of a classical Gaussian ensemble. Same algebra as
/// [`evolve_gaussian`], restricted to classically tagged input.
pub fn classical_twin(
    state: &GaussianMoments,
    params: &InteractionParams,
) -> Result<GaussianMoments> {
    if state.tag != Tag::Classical {
        return Err(Error::WrongTag {
            expected: "classical",
        });
    }
    Ok(evolve_gaussian(state, params))
}

/// One row of the mediator-squeezing sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KSensitivityRow {
    pub k_variance: f64,
    pub x_variance: f64,
    pub log_negativity: f64,
}

/// Q-Q' log-negativity at `params.t` from a product state with vacuum probes and a
/// mediator of the given `k` variances.
///
/// Without `x_variance` each mediator is a minimum-uncertainty packet,
/// `Var x = 1/(4 Var k)`. With it, every pair must satisfy `Var x · Var k ≥ 1/4`.
pub fn k_sensitivity(
    k_variances: &[f64],
    x_variance: Option<f64>,
    params: &InteractionParams,
) -> Result<Vec<KSensitivityRow>> {
    let mut inputs = Vec::with_capacity(k_variances.len());
    for &kv in k_variances {
        let xv = x_variance.unwrap_or(0.25 / kv);
        if !(kv > 0.0 && xv > 0.0) || xv * kv < 0.25 - 1e-12 {
            return Err(Error::UncertaintyViolation {
                variance: kv,
                bound: 0.25 / xv,
            });
        }
        inputs.push(GaussianMoments::with_mediator(xv, kv, Tag::Quantum)?);
    }
    let rows = exec::map_range(inputs.len(), |i| {
        let out = evolve_gaussian(&inputs[i], params);
        let e = reduce_to_qq_prime(&out).map(|c| log_negativity(&c))?;
        Ok(KSensitivityRow {
            k_variance: inputs[i].cov[(5, 5)],
            x_variance: inputs[i].cov[(4, 4)],
            log_negativity: e,
        })
    });
    rows.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(g1: f64, g2: f64, t: f64) -> InteractionParams {
        InteractionParams::new(g1, g2, t).unwrap()
    }

    /// Entry-by-entry form of the propagator, written out independently of `generator`.
    fn explicit(g1: f64, g2: f64, t: f64) -> Matrix6<f64> {
        let mut s = Matrix6::identity();
        s[(0, 4)] = g1 * t;
        s[(0, 2)] = g1 * g2 * t * t / 2.0;
        s[(3, 5)] = -g2 * t;
        s[(3, 1)] = g1 * g2 * t * t / 2.0;
        s[(4, 2)] = g2 * t;
        s[(5, 1)] = -g1 * t;
        s
    }

    #[test]
    fn matrix_matches_written_out_propagator() {
        for (g1, g2, t) in [(1.0, 1.0, 1.0), (0.3, -2.0, 0.7), (0.0, 1.5, 2.0)] {
            assert!((heisenberg_matrix(&params(g1, g2, t)) - explicit(g1, g2, t)).amax() < 1e-15);
        }
    }

    #[test]
    fn zero_time_is_identity() {
        assert_eq!(heisenberg_matrix(&params(1.0, 1.0, 0.0)), Matrix6::identity());
        let v = GaussianMoments::vacuum();
        assert_eq!(evolve_gaussian(&v, &params(1.0, 1.0, 0.0)), v);
    }

    #[test]
    fn decoupled_mediator_leaves_second_probe_alone() {
        let s = heisenberg_matrix(&params(1.3, 0.0, 0.8));
        for a in 0..6 {
            for b in [2, 3] {
                let id = if a == b { 1.0 } else { 0.0 };
                assert_eq!(s[(a, b)], id);
                assert_eq!(s[(b, a)], id);
            }
        }
    }

    #[test]
    fn half_steps_compose() {
        let half = heisenberg_matrix(&params(1.0, 1.0, 0.5));
        let full = heisenberg_matrix(&params(1.0, 1.0, 1.0));
        assert!((half * half - full).amax() < 1e-12);
    }

    #[test]
    fn vacuum_cross_covariances() {
        for t in [0.25, 0.5, 1.0, 2.0] {
            let out = evolve_gaussian(&GaussianMoments::vacuum(), &params(1.0, 1.0, t));
            assert!((out.covariance(0, 2) - t * t / 4.0).abs() < 1e-12);
            assert!((out.covariance(1, 3) - t * t / 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn admissibility() {
        assert!(GaussianMoments::new(Vector6::zeros(), Matrix6::identity() * 0.5, Tag::Quantum).is_ok());
        let squeezed_below = Matrix6::identity() * 0.2;
        assert!(matches!(
            GaussianMoments::new(Vector6::zeros(), squeezed_below, Tag::Quantum),
            Err(Error::Inadmissible(_))
        ));
        assert!(GaussianMoments::new(Vector6::zeros(), squeezed_below, Tag::Classical).is_ok());
        let mut asym = Matrix6::identity();
        asym[(0, 1)] = 1e-9;
        assert!(GaussianMoments::new(Vector6::zeros(), asym, Tag::Classical).is_err());
    }

    #[test]
    fn product_moments_follow_packets() {
        let st = ProductGaussian::new([1.0, 0.0, -2.0], [0.5, 1.0, 2.0], [0.0, 3.0, 0.0]).unwrap();
        let g = GaussianMoments::from_product(&st, Tag::Quantum);
        assert_eq!(g.mean()[0], 1.0);
        assert_eq!(g.mean()[3], 3.0);
        assert!((g.covariance(0, 0) - 0.125).abs() < 1e-15);
        assert!((g.covariance(1, 1) - 2.0).abs() < 1e-15);
        assert!((g.covariance(4, 4) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn twin_requires_classical_tag_and_matches_bitwise() {
        let p = params(1.0, 1.0, 1.0);
        let q = GaussianMoments::vacuum();
        assert_eq!(
            classical_twin(&q, &p).unwrap_err(),
            Error::WrongTag {
                expected: "classical"
            }
        );
        let c = classical_twin(&q.with_tag(Tag::Classical), &p).unwrap();
        assert_eq!(c.tag(), Tag::Classical);
        assert_eq!(c.cov(), evolve_gaussian(&q, &p).cov());
        assert!(c.correlation(0, 2) > 0.0);
    }

    #[test]
    fn k_sensitivity_trivial_rows() {
        let ks = [0.5, 1.0, 2.0];
        for p in [params(0.0, 1.0, 1.0), params(1.0, 1.0, 0.0)] {
            for row in k_sensitivity(&ks, None, &p).unwrap() {
                assert_eq!(row.log_negativity, 0.0);
            }
        }
        assert!(matches!(
            k_sensitivity(&[0.1], Some(1.0), &params(1.0, 1.0, 1.0)),
            Err(Error::UncertaintyViolation { .. })
        ));
        assert!(k_sensitivity(&[-1.0], None, &params(1.0, 1.0, 1.0)).is_err());
    }

    proptest! {
        #[test]
        fn propagator_is_symplectic(g1 in -3.0..3.0f64, g2 in -3.0..3.0f64, t in 0.0..3.0f64) {
            let s = heisenberg_matrix(&params(g1, g2, t));
            let w = symplectic_form::<6>();
            prop_assert!((s * w * s.transpose() - w).amax() < 1e-12);
        }

        #[test]
        fn group_property(g1 in -2.0..2.0f64, g2 in -2.0..2.0f64, t1 in 0.0..1.5f64, t2 in 0.0..1.5f64) {
            let a = heisenberg_matrix(&params(g1, g2, t1));
            let b = heisenberg_matrix(&params(g1, g2, t2));
            let ab = heisenberg_matrix(&params(g1, g2, t1 + t2));
            prop_assert!((a * b - ab).amax() < 1e-12);
        }

        #[test]
        fn decoupling_keeps_probes_uncorrelated(g1 in -3.0..3.0f64, t in 0.0..3.0f64) {
            let out = evolve_gaussian(&GaussianMoments::vacuum(), &params(g1, 0.0, t));
            for a in [0, 1] {
                for b in [2, 3] {
                    prop_assert!(out.covariance(a, b).abs() < 1e-12);
                }
            }
        }
    }
}
