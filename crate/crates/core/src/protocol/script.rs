use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::InteractionParams;
use crate::entanglement::TwoQubitState;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Probe {
    #[serde(rename = "Q")]
    Q,
    #[serde(rename = "Q'")]
    QPrime,
}

/// Which two systems an interaction couples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pair {
    #[serde(rename = "Q-C")]
    QC,
    #[serde(rename = "Q'-C")]
    QPrimeC,
    #[serde(rename = "Q-Q'")]
    QQPrime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
    MaximallyMixed,
}

impl NamedState {
    pub fn state(self) -> TwoQubitState {
        match self {
            NamedState::PhiPlus => TwoQubitState::phi_plus(),
            NamedState::PhiMinus => TwoQubitState::phi_minus(),
            NamedState::PsiPlus => TwoQubitState::psi_plus(),
            NamedState::PsiMinus => TwoQubitState::psi_minus(),
            NamedState::MaximallyMixed => TwoQubitState::maximally_mixed(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gate {
    Identity,
    X,
    Y,
    Z,
    H,
}

impl Gate {
    pub fn matrix(self) -> Matrix2<Complex64> {
        let (o, z, i) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::i());
        let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        match self {
            Gate::Identity => Matrix2::identity(),
            Gate::X => Matrix2::new(z, o, o, z),
            Gate::Y => Matrix2::new(z, -i, i, z),
            Gate::Z => Matrix2::new(o, z, z, -o),
            Gate::H => Matrix2::new(s, s, s, -s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrepareMode {
    Product,
    Conditioned,
}

/// One step of an entanglement-generation protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProtocolStep {
    /// `conditioned` prepares `rho0` or `rho1` depending on the mediator bit.
    Prepare {
        mode: PrepareMode,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rho0: Option<NamedState>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rho1: Option<NamedState>,
    },
    Interact {
        pair: Pair,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        params: Option<InteractionParams>,
        /// Switched on or off by the mediator bit.
        #[serde(default)]
        controlled: bool,
    },
    MeasureMediator,
    /// `ops[c]` is applied to `target` when the revealed bit is `c`.
    ConditionalLocalOp { target: Probe, ops: [Gate; 2] },
    VerifyEntanglement,
}

/// Ordered step list, written as TOML with one `[[steps]]` table per step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolScript {
    pub name: String,
    pub steps: Vec<ProtocolStep>,
}

impl ProtocolScript {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::MalformedScript(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scripts serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip() {
        let s = ProtocolScript {
            name: "demo".into(),
            steps: vec![
                ProtocolStep::Prepare {
                    mode: PrepareMode::Conditioned,
                    rho0: Some(NamedState::PhiPlus),
                    rho1: Some(NamedState::PhiMinus),
                },
                ProtocolStep::Interact {
                    pair: Pair::QQPrime,
                    params: Some(InteractionParams::new(1.0, 0.5, 1.0).unwrap()),
                    controlled: true,
                },
                ProtocolStep::MeasureMediator,
                ProtocolStep::ConditionalLocalOp {
                    target: Probe::QPrime,
                    ops: [Gate::Identity, Gate::Z],
                },
                ProtocolStep::VerifyEntanglement,
            ],
        };
        let text = s.to_toml();
        assert_eq!(ProtocolScript::from_toml(&text).unwrap(), s);
    }

    #[test]
    fn unknown_step_is_malformed() {
        let text = "name = \"x\"\n[[steps]]\nkind = \"teleport\"\n";
        assert!(matches!(
            ProtocolScript::from_toml(text),
            Err(Error::MalformedScript(_))
        ));
    }

    #[test]
    fn gates_are_unitary() {
        for g in [Gate::Identity, Gate::X, Gate::Y, Gate::Z, Gate::H] {
            let m = g.matrix();
            let dev = (m * m.adjoint() - Matrix2::identity()).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(dev < 1e-15);
        }
    }
}
