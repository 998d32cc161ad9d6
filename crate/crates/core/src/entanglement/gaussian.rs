use nalgebra::{Matrix2, Matrix4};

use crate::dynamics::{GaussianMoments, Tag};
use crate::{Error, Result};

/// Covariance of `(q, p, q', p')`, admissible as a quantum state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeCov {
    cov: Matrix4<f64>,
}

const ADMISSIBILITY_TOLERANCE: f64 = 1e-10;

impl TwoModeCov {
    pub fn new(cov: Matrix4<f64>) -> Result<Self> {
        if (cov - cov.transpose()).amax() > 1e-12 {
            return Err(Error::Inadmissible("covariance is not symmetric".into()));
        }
        let min = crate::dynamics::min_uncertainty_eigenvalue(&cov);
        if min < -ADMISSIBILITY_TOLERANCE {
            return Err(Error::Inadmissible(format!(
                "cov + iΩ/2 has eigenvalue {min:.3e}"
            )));
        }
        Ok(Self { cov })
    }

    /// Two-mode squeezed vacuum with squeezing `r`.
    pub fn two_mode_squeezed(r: f64) -> Self {
        let c = (2.0 * r).cosh() / 2.0;
        let s = (2.0 * r).sinh() / 2.0;
        Self {
            cov: Matrix4::new(
                c, 0.0, s, 0.0, //
                0.0, c, 0.0, -s, //
                s, 0.0, c, 0.0, //
                0.0, -s, 0.0, c,
            ),
        }
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.cov
    }

    /// `Q` block `A`.
    pub fn a(&self) -> Matrix2<f64> {
        self.cov.fixed_view::<2, 2>(0, 0).into_owned()
    }

    /// `Q'` block `B`.
    pub fn b(&self) -> Matrix2<f64> {
        self.cov.fixed_view::<2, 2>(2, 2).into_owned()
    }

    /// Cross block `C`.
    pub fn c(&self) -> Matrix2<f64> {
        self.cov.fixed_view::<2, 2>(0, 2).into_owned()
    }
}

/// Anything that carries a covariance of `(q, p, q', p')`.
pub trait QQCovariance {
    fn qq_covariance(&self) -> Matrix4<f64>;
}

impl QQCovariance for TwoModeCov {
    fn qq_covariance(&self) -> Matrix4<f64> {
        self.cov
    }
}

impl QQCovariance for GaussianMoments {
    fn qq_covariance(&self) -> Matrix4<f64> {
        self.cov().fixed_view::<4, 4>(0, 0).into_owned()
    }
}

/// Partial trace over the mediator: keeps the `(q, p, q', p')` rows and columns.
///
/// Refuses classically tagged moments: entanglement is only defined for quantum probes.
pub fn reduce_to_qq_prime(g: &GaussianMoments) -> Result<TwoModeCov> {
    if g.tag() == Tag::Classical {
        return Err(Error::TagRefusal);
    }
    TwoModeCov::new(g.qq_covariance())
}

/// Log-negativity `E_N = max(0, -ln 2ν̃)` from the smallest symplectic eigenvalue of the
/// partial transpose, `ν̃² = (Δ̃ - sqrt(Δ̃² - 4 det σ)) / 2`, `Δ̃ = det A + det B - 2 det C`.
pub fn log_negativity(cov: &TwoModeCov) -> f64 {
    let delta = cov.a().determinant() + cov.b().determinant() - 2.0 * cov.c().determinant();
    let det = cov.matrix().determinant();
    let disc = (delta * delta - 4.0 * det).max(0.0);
    let nu2 = ((delta - disc.sqrt()) / 2.0).max(0.0);
    (-(2.0 * nu2.sqrt()).ln()).max(0.0)
}

/// `½ ln(det A det B / det σ)` for the `(Q; Q')` split. Accepts either tag.
pub fn gaussian_mutual_information<T: QQCovariance>(g: &T) -> Result<f64> {
    let cov = g.qq_covariance();
    let det_a = cov.fixed_view::<2, 2>(0, 0).determinant();
    let det_b = cov.fixed_view::<2, 2>(2, 2).determinant();
    let det = cov.determinant();
    let scale = det_a * det_b;
    if !(det > 1e-14 * scale.abs().max(1e-300)) || det_a <= 0.0 || det_b <= 0.0 {
        return Err(Error::SingularCovariance);
    }
    Ok((0.5 * (scale / det).ln()).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{evolve_gaussian, InteractionParams};

    #[test]
    fn vacuum_reduces_to_identity_blocks() {
        let red = reduce_to_qq_prime(&GaussianMoments::vacuum()).unwrap();
        assert_eq!(red.a(), Matrix2::identity() * 0.5);
        assert_eq!(red.b(), Matrix2::identity() * 0.5);
        assert_eq!(red.c(), Matrix2::zeros());
        assert_eq!(log_negativity(&red), 0.0);
    }

    #[test]
    fn evolved_cross_block_is_quarter_t_squared() {
        let p = InteractionParams::new(1.0, 1.0, 1.0).unwrap();
        let red = reduce_to_qq_prime(&evolve_gaussian(&GaussianMoments::vacuum(), &p)).unwrap();
        let c = red.c();
        assert!((c[(0, 0)] - 0.25).abs() < 1e-12);
        assert!((c[(1, 1)] - 0.25).abs() < 1e-12);
        assert!(c[(0, 1)].abs() < 1e-12 && c[(1, 0)].abs() < 1e-12);
    }

    #[test]
    fn classical_tag_is_refused() {
        let g = GaussianMoments::vacuum().with_tag(Tag::Classical);
        assert_eq!(reduce_to_qq_prime(&g).unwrap_err(), Error::TagRefusal);
    }

    #[test]
    fn two_mode_squeezed_log_negativity() {
        for r in [0.25, 0.5, 1.0] {
            let e = log_negativity(&TwoModeCov::two_mode_squeezed(r));
            assert!((e - 2.0 * r).abs() < 1e-9, "r={r}: {e}");
        }
    }

    #[test]
    fn inadmissible_covariances_rejected() {
        // below the vacuum in both quadratures
        let m = Matrix4::identity() * 0.1;
        assert!(matches!(TwoModeCov::new(m), Err(Error::Inadmissible(_))));
        let mut asym = Matrix4::identity() * 0.5;
        asym[(0, 1)] = 0.1;
        assert!(matches!(TwoModeCov::new(asym), Err(Error::Inadmissible(_))));
    }

    #[test]
    fn mutual_information_product_and_singular() {
        assert_eq!(gaussian_mutual_information(&GaussianMoments::vacuum()).unwrap(), 0.0);
        let tms = TwoModeCov::two_mode_squeezed(0.5);
        // pure two-mode state: I = 2 S(ρ_A) ... here just positive
        assert!(gaussian_mutual_information(&tms).unwrap() > 0.0);
        struct Flat;
        impl QQCovariance for Flat {
            fn qq_covariance(&self) -> Matrix4<f64> {
                let mut m = Matrix4::identity();
                m[(0, 0)] = 0.0;
                m
            }
        }
        assert_eq!(
            gaussian_mutual_information(&Flat).unwrap_err(),
            Error::SingularCovariance
        );
    }
}
