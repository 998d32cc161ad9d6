use nalgebra::Matrix2;
use num_complex::Complex64;

use super::cq::CQState;
use super::script::Probe;
use crate::entanglement::TwoQubitState;
use crate::{Error, Result};

const ORTHOGONALITY_TOLERANCE: f64 = 1e-12;
const FIX_TOLERANCE: f64 = 1e-9;

/// Single-qubit unitary applied to one probe on the `c = 1` branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFix {
    pub target: Probe,
    pub unitary: Matrix2<Complex64>,
}

impl LocalFix {
    pub fn new(target: Probe, unitary: Matrix2<Complex64>) -> Result<Self> {
        let dev = (unitary * unitary.adjoint() - Matrix2::identity())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if dev > 1e-12 {
            return Err(Error::InvalidState(format!("local fix is not unitary ({dev:.3e})")));
        }
        Ok(Self { target, unitary })
    }

    pub fn apply(&self, rho: &TwoQubitState) -> TwoQubitState {
        let id = Matrix2::identity();
        match self.target {
            Probe::Q => rho.apply_local(&self.unitary, &id),
            Probe::QPrime => rho.apply_local(&id, &self.unitary),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub label: &'static str,
    pub state: CQState,
}

/// States along the protocol: the conditioned preparation, the post-measurement branches
/// and the corrected branches, plus the bit-averaged states before and after.
#[derive(Debug, Clone, PartialEq)]
pub struct HrTrace {
    pub steps: Vec<TraceStep>,
    /// `½ρ0 + ½ρ1`, what the qubits look like before `c` is revealed.
    pub mixture: TwoQubitState,
    pub final_state: TwoQubitState,
}

/// Prepares `ρ0` or `ρ1` conditioned on a fair bit, reveals the bit and applies
/// `local_fix` on the `c = 1` branch.
pub fn hr_qubit_protocol(
    rho0: &TwoQubitState,
    rho1: &TwoQubitState,
    local_fix: &LocalFix,
) -> Result<HrTrace> {
    let overlap = rho0.overlap(rho1);
    if overlap.abs() > ORTHOGONALITY_TOLERANCE {
        return Err(Error::NotOrthogonal(overlap));
    }
    let fixed = local_fix.apply(rho1);
    let dev = fixed.distance(rho0);
    if dev > FIX_TOLERANCE {
        return Err(Error::FixDoesNotMap(dev));
    }
    let prepared = CQState::new(vec![(0.5, *rho0), (0.5, *rho1)])?;
    let mixture = prepared.mixture();
    // revealing c leaves the branches intact; the bit is now known to the operator
    let measured = prepared.clone();
    let corrected = CQState::new(vec![(0.5, *rho0), (0.5, fixed)])?;
    let final_state = corrected.mixture();
    Ok(HrTrace {
        steps: vec![
            TraceStep {
                label: "prepare_conditioned",
                state: prepared,
            },
            TraceStep {
                label: "measure_mediator",
                state: measured,
            },
            TraceStep {
                label: "conditional_local_op",
                state: corrected,
            },
        ],
        mixture,
        final_state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::{chsh_max, negativity_qubits};
    use crate::protocol::script::Gate;

    fn z_fix(target: Probe) -> LocalFix {
        LocalFix::new(target, Gate::Z.matrix()).unwrap()
    }

    #[test]
    fn bell_pair_localization() {
        let t = hr_qubit_protocol(
            &TwoQubitState::phi_plus(),
            &TwoQubitState::phi_minus(),
            &z_fix(Probe::QPrime),
        )
        .unwrap();
        assert!((negativity_qubits(&t.final_state) - 0.5).abs() < 1e-12);
        assert!(negativity_qubits(&t.mixture).abs() < 1e-12);
        assert!((chsh_max(&t.final_state) - 2.0 * 2f64.sqrt()).abs() < 1e-9);
        assert!((chsh_max(&t.mixture) - 2.0).abs() < 1e-9);
        for (_, branch) in t.steps[2].state.branches() {
            assert!(branch.distance(&TwoQubitState::phi_plus()) < 1e-12);
        }
    }

    #[test]
    fn fix_on_either_probe_works() {
        let t = hr_qubit_protocol(
            &TwoQubitState::phi_plus(),
            &TwoQubitState::phi_minus(),
            &z_fix(Probe::Q),
        )
        .unwrap();
        assert!(t.final_state.distance(&TwoQubitState::phi_plus()) < 1e-12);
    }

    #[test]
    fn preconditions() {
        let phi_p = TwoQubitState::phi_plus();
        assert!(matches!(
            hr_qubit_protocol(&phi_p, &phi_p, &z_fix(Probe::QPrime)),
            Err(Error::NotOrthogonal(_))
        ));
        let id = LocalFix::new(Probe::QPrime, Gate::Identity.matrix()).unwrap();
        assert!(matches!(
            hr_qubit_protocol(&phi_p, &TwoQubitState::phi_minus(), &id),
            Err(Error::FixDoesNotMap(_))
        ));
        let not_unitary = Matrix2::identity() * Complex64::new(2.0, 0.0);
        assert!(LocalFix::new(Probe::Q, not_unitary).is_err());
    }

    #[test]
    fn psi_pair_with_bit_flip() {
        // X on one qubit maps Ψ⁺ to Φ⁺
        let fix = LocalFix::new(Probe::QPrime, Gate::X.matrix()).unwrap();
        let t = hr_qubit_protocol(&TwoQubitState::phi_plus(), &TwoQubitState::psi_plus(), &fix).unwrap();
        assert!((negativity_qubits(&t.final_state) - 0.5).abs() < 1e-12);
    }
}
