use super::classical::ClassicalPoly;
use super::functional::{hybrid_bracket, EnsembleObservable};
use super::operator::Operator;
use crate::config_space::MadelungFields;
use crate::{Error, Result};

/// `{Q_M, C_f}_H` for a probe operator `M̂` on `(q, q')` and a mediator observable `f`.
///
/// Strong separability demands this vanish for every pair. It does on product states and
/// for `f` linear in `k`; a nonzero value on an entangled state is a change of a local
/// mediator quantity driven by an operation on the probes alone.
pub fn strong_separability(
    probe: &Operator,
    mediator: &ClassicalPoly,
    state: &MadelungFields,
) -> Result<f64> {
    if probe.touches_mediator() {
        return Err(Error::SectorMixing(probe.to_string()));
    }
    let q = EnsembleObservable::from_operator(probe.clone())?;
    let c = EnsembleObservable::from_classical(mediator.clone());
    hybrid_bracket(&q, &c, state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config_space::{to_madelung, GaussianPacket, GridSpec, ProductGaussian};
    use crate::dynamics::{FlowMap, InteractionParams};
    use crate::sampling::TransportedProduct;

    fn grid() -> GridSpec {
        GridSpec::new(8.0, 64).unwrap()
    }

    fn op(s: &str) -> Operator {
        Operator::parse(s).unwrap()
    }

    fn poly(s: &str) -> ClassicalPoly {
        ClassicalPoly::parse(s).unwrap()
    }

    /// Probe packet with chirp `b`, vacuum elsewhere, carried to `t = 1` at unit couplings.
    fn entangled_form(b: f64) -> TransportedProduct {
        TransportedProduct::new(
            ProductGaussian {
                packets: [
                    GaussianPacket::chirped(0.0, 1.0, 0.0, b).unwrap(),
                    GaussianPacket::vacuum(),
                    GaussianPacket::vacuum(),
                ],
            },
            InteractionParams::new(1.0, 1.0, 1.0).unwrap(),
        )
    }

    /// `{Q_{p²}, C_{k²}}` for `ψ ∝ exp(-½ zᵀAz + ½ i zᵀBz)` is `-2 A_qx B_xq`, with
    /// `A = MᵀM`, `B = b (row_q M)ᵀ(row_q M)` and `M` the pulled-back flow.
    fn closed_form_bracket(b: f64) -> f64 {
        let back: FlowMap = InteractionParams::new(1.0, 1.0, 1.0).unwrap().flow().inverse();
        let m = back.matrix();
        let a_qx: f64 = (0..3).map(|r| m[r][0] * m[r][2]).sum();
        let b_xq = b * m[0][2] * m[0][0];
        -2.0 * a_qx * b_xq
    }

    #[test]
    fn probe_touching_mediator_rejected() {
        let st = to_madelung(&ProductGaussian::vacuum().sample(&GridSpec::new(8.0, 24).unwrap()).unwrap());
        assert!(matches!(
            strong_separability(&op("q*x"), &poly("k"), &st),
            Err(Error::SectorMixing(_))
        ));
        assert!(strong_separability(&op("k"), &poly("k"), &st).is_err());
    }

    #[test]
    fn product_states_are_separable() {
        let st = ProductGaussian {
            packets: [
                GaussianPacket::chirped(0.3, 1.0, 0.5, 0.4).unwrap(),
                GaussianPacket::chirped(-0.2, 0.9, -0.3, -0.2).unwrap(),
                GaussianPacket::chirped(0.1, 1.1, 0.2, 0.3).unwrap(),
            ],
        };
        let m = to_madelung(&st.sample(&grid()).unwrap());
        for probe in ["q", "p", "p^2", "q*p", "q*q'", "p'^2"] {
            for f in ["x", "k", "k^2", "x*k", "x^2 + k^3"] {
                let v = strong_separability(&op(probe), &poly(f), &m).unwrap();
                assert!(v.abs() < 1e-6, "({probe}, {f}): {v:e}");
            }
        }
    }

    #[test]
    fn linear_mediator_observables_on_entangled_state() {
        let m = to_madelung(&entangled_form(0.5).sample(&grid()).unwrap());
        for probe in ["q", "p", "p^2", "q*p'"] {
            for f in ["x", "k", "2*x - k"] {
                let v = strong_separability(&op(probe), &poly(f), &m).unwrap();
                assert!(v.abs() < 1e-6, "({probe}, {f}): {v:e}");
            }
            // at most linear in k: point transformations of x, which commute with M.
            // Zero as well, but high powers of x weight the grid edge.
            for f in ["x*k", "x^2 + x^3*k"] {
                let v = strong_separability(&op(probe), &poly(f), &m).unwrap();
                assert!(v.abs() < 1e-5, "({probe}, {f}): {v:e}");
            }
        }
    }

    #[test]
    fn quadratic_mediator_observable_breaks_separability() {
        let b = 0.5;
        let want = closed_form_bracket(b);
        assert!((want + 1.0).abs() < 1e-15);
        let m = to_madelung(&entangled_form(b).sample(&grid()).unwrap());
        let v = strong_separability(&op("p^2"), &poly("k^2"), &m).unwrap();
        assert!((v - want).abs() < 1e-3, "{v} vs {want}");
    }

    #[test]
    fn position_probe_never_moves_mediator_momentum() {
        // q̂ shifts S by a function of q only, so ∂ₓS and every C_f are unaffected
        let m = to_madelung(&entangled_form(0.5).sample(&grid()).unwrap());
        let v = strong_separability(&op("q"), &poly("k^2"), &m).unwrap();
        assert!(v.abs() < 1e-6, "{v:e}");
    }
}
