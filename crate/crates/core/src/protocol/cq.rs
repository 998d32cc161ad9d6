use crate::entanglement::{von_neumann_entropy, TwoQubitState};
use crate::{Error, Result};

const PROBABILITY_TOLERANCE: f64 = 1e-12;

/// Classical bit `c` paired with a two-qubit state per value.
#[derive(Debug, Clone, PartialEq)]
pub struct CQState {
    branches: Vec<(f64, TwoQubitState)>,
}

impl CQState {
    /// Branch `i` belongs to bit value `i`; at most two branches.
    pub fn new(branches: Vec<(f64, TwoQubitState)>) -> Result<Self> {
        if branches.is_empty() || branches.len() > 2 {
            return Err(Error::InvalidState(format!(
                "a bit has one or two branches, got {}",
                branches.len()
            )));
        }
        if let Some((p, _)) = branches.iter().find(|(p, _)| !(*p >= 0.0)) {
            return Err(Error::InvalidState(format!("negative probability {p}")));
        }
        let total: f64 = branches.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
            return Err(Error::InvalidState(format!("probabilities sum to {total}")));
        }
        Ok(Self { branches })
    }

    pub fn branches(&self) -> &[(f64, TwoQubitState)] {
        &self.branches
    }

    /// State of the qubits with the bit discarded.
    pub fn mixture(&self) -> TwoQubitState {
        TwoQubitState::mixture(&self.branches).expect("branches are valid and weights sum to one")
    }
}

/// `S(Σ p_c ρ_c) - Σ p_c S(ρ_c)` in bits.
pub fn holevo_information(s: &CQState) -> f64 {
    let avg: f64 = s
        .branches
        .iter()
        .map(|(p, rho)| p * von_neumann_entropy(rho))
        .sum();
    (von_neumann_entropy(&s.mixture()) - avg).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn holevo_examples() {
        let hr = CQState::new(vec![
            (0.5, TwoQubitState::phi_plus()),
            (0.5, TwoQubitState::phi_minus()),
        ])
        .unwrap();
        assert!((holevo_information(&hr) - 1.0).abs() < 1e-9);
        let same = CQState::new(vec![
            (0.5, TwoQubitState::phi_plus()),
            (0.5, TwoQubitState::phi_plus()),
        ])
        .unwrap();
        assert!(holevo_information(&same).abs() < 1e-12);
        let single = CQState::new(vec![(1.0, TwoQubitState::phi_plus())]).unwrap();
        assert!(holevo_information(&single).abs() < 1e-12);
    }

    #[test]
    fn invalid_weights() {
        let s = TwoQubitState::phi_plus();
        assert!(CQState::new(vec![(0.5, s), (0.6, s)]).is_err());
        assert!(CQState::new(vec![(-0.5, s), (1.5, s)]).is_err());
        assert!(CQState::new(vec![]).is_err());
        assert!(CQState::new(vec![(0.5, s), (0.25, s), (0.25, s)]).is_err());
    }
}
