use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::cq::{holevo_information, CQState};
use super::script::{Pair, PrepareMode, ProtocolScript, ProtocolStep};
use crate::{Error, Result};

/// Violated assumption of the entanglement witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Flag {
    InitialCorrelation,
    DirectQqInteraction,
    MediatorMeasurement,
    PostSelection,
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flag::InitialCorrelation => "INITIAL_CORRELATION",
            Flag::DirectQqInteraction => "DIRECT_QQ_INTERACTION",
            Flag::MediatorMeasurement => "MEDIATOR_MEASUREMENT",
            Flag::PostSelection => "POST_SELECTION",
        })
    }
}

const HOLEVO_THRESHOLD: f64 = 1e-9;

const INTEROPERABILITY_NOTE: &str = "the interoperability-of-information principle is assumed, not checked";
const SHARP_NOTE: &str = "only the product-state initial condition is audited; the sharp-observable alternative is not implemented";
const CIRCULARITY_NOTE: &str = "conditioned preparation uses entangling gates taken as primitives; how they are realised is left unexplained";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub script: String,
    pub flags: BTreeSet<Flag>,
    pub witness_applicable: bool,
    pub verdict: String,
    /// Holevo information of the prepared bit-qubit state, in bits.
    pub holevo_information: f64,
    pub notes: Vec<String>,
}

/// Checks a script against the witness assumptions: product preparation, no direct
/// probe-probe coupling, no readout of the mediator used to condition the probes.
pub fn audit(script: &ProtocolScript) -> Result<AuditReport> {
    let mut flags = BTreeSet::new();
    let mut notes = Vec::new();
    let first = script
        .steps
        .first()
        .ok_or_else(|| Error::MalformedScript("empty script".into()))?;
    let holevo = match first {
        ProtocolStep::Prepare { mode, rho0, rho1 } => match mode {
            PrepareMode::Product => {
                if rho0.is_some() || rho1.is_some() {
                    return Err(Error::MalformedScript(
                        "product preparation takes no branch states".into(),
                    ));
                }
                0.0
            }
            PrepareMode::Conditioned => {
                let (Some(r0), Some(r1)) = (rho0, rho1) else {
                    return Err(Error::MalformedScript(
                        "conditioned preparation needs rho0 and rho1".into(),
                    ));
                };
                flags.insert(Flag::InitialCorrelation);
                notes.push(CIRCULARITY_NOTE.to_string());
                holevo_information(&CQState::new(vec![(0.5, r0.state()), (0.5, r1.state())])?)
            }
        },
        _ => return Err(Error::MalformedScript("first step must be prepare".into())),
    };
    if holevo > HOLEVO_THRESHOLD {
        flags.insert(Flag::InitialCorrelation);
    }
    let mut measured = false;
    for (i, step) in script.steps.iter().enumerate().skip(1) {
        match step {
            ProtocolStep::Prepare { .. } => {
                return Err(Error::MalformedScript(format!("second prepare at step {i}")))
            }
            ProtocolStep::Interact { pair, .. } => {
                if *pair == Pair::QQPrime {
                    flags.insert(Flag::DirectQqInteraction);
                }
            }
            ProtocolStep::MeasureMediator => {
                measured = true;
                flags.insert(Flag::MediatorMeasurement);
            }
            ProtocolStep::ConditionalLocalOp { .. } => {
                if !measured {
                    return Err(Error::MalformedScript(format!(
                        "conditional operation at step {i} before the bit is revealed"
                    )));
                }
                flags.insert(Flag::PostSelection);
            }
            ProtocolStep::VerifyEntanglement => {}
        }
    }
    notes.push(INTEROPERABILITY_NOTE.to_string());
    notes.push(SHARP_NOTE.to_string());
    let witness_applicable = flags.is_empty();
    let verdict = if witness_applicable {
        "witness assumptions satisfied".to_string()
    } else {
        format!("witness assumptions violated: {}", join(&flags))
    };
    Ok(AuditReport {
        script: script.name.clone(),
        flags,
        witness_applicable,
        verdict,
        holevo_information: holevo,
        notes,
    })
}

fn join(flags: &BTreeSet<Flag>) -> String {
    flags.iter().map(Flag::to_string).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    RuledOut,
    Silent,
    OutsideScope,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessVerdict {
    pub outcome: Outcome,
    pub text: String,
    pub entangled: bool,
    pub flags: Vec<Flag>,
    pub notes: Vec<String>,
}

/// Combines an audit with the entanglement observed in the same run.
pub fn witness_verdict(report: &AuditReport, entangled: bool) -> WitnessVerdict {
    let (outcome, text) = match (report.witness_applicable, entangled) {
        (true, true) => (
            Outcome::RuledOut,
            "classical-mediator models ruled out (non-classicality witnessed)".to_string(),
        ),
        (true, false) => (Outcome::Silent, "no verdict (witness silent)".to_string()),
        (false, _) => (
            Outcome::OutsideScope,
            format!(
                "protocol outside witness scope, not a counterexample (flags: {})",
                join(&report.flags)
            ),
        ),
    };
    WitnessVerdict {
        outcome,
        text,
        entangled,
        flags: report.flags.iter().copied().collect(),
        notes: report.notes.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::fixtures;
    use crate::protocol::script::{Gate, NamedState, Probe};

    #[test]
    fn local_mediation_is_clean() {
        let r = audit(&fixtures::local_mediation()).unwrap();
        assert!(r.flags.is_empty() && r.witness_applicable);
        assert_eq!(r.holevo_information, 0.0);
        assert_eq!(witness_verdict(&r, true).outcome, Outcome::RuledOut);
        assert_eq!(witness_verdict(&r, false).outcome, Outcome::Silent);
    }

    #[test]
    fn hr_script_flags() {
        let r = audit(&fixtures::hr_post_selection()).unwrap();
        let want: BTreeSet<Flag> = [
            Flag::InitialCorrelation,
            Flag::MediatorMeasurement,
            Flag::PostSelection,
        ]
        .into();
        assert_eq!(r.flags, want);
        assert!(!r.witness_applicable);
        assert!((r.holevo_information - 1.0).abs() < 1e-9);
        assert!(r.notes.iter().any(|n| n.contains("primitives")));
        let v = witness_verdict(&r, true);
        assert_eq!(v.outcome, Outcome::OutsideScope);
        assert!(v.text.contains("POST_SELECTION"));
    }

    #[test]
    fn direct_interaction_flagged() {
        let r = audit(&fixtures::direct_interaction()).unwrap();
        assert!(r.flags.contains(&Flag::DirectQqInteraction));
    }

    #[test]
    fn measurement_without_conditioning_is_not_post_selection() {
        let mut s = fixtures::local_mediation();
        s.steps.insert(3, ProtocolStep::MeasureMediator);
        let r = audit(&s).unwrap();
        assert!(r.flags.contains(&Flag::MediatorMeasurement));
        assert!(!r.flags.contains(&Flag::PostSelection));
    }

    #[test]
    fn malformed_scripts() {
        let empty = ProtocolScript {
            name: "e".into(),
            steps: vec![],
        };
        assert!(matches!(audit(&empty), Err(Error::MalformedScript(_))));
        let mut no_prepare = fixtures::local_mediation();
        no_prepare.steps.remove(0);
        assert!(audit(&no_prepare).is_err());
        let early = ProtocolScript {
            name: "early".into(),
            steps: vec![
                ProtocolStep::Prepare {
                    mode: PrepareMode::Product,
                    rho0: None,
                    rho1: None,
                },
                ProtocolStep::ConditionalLocalOp {
                    target: Probe::Q,
                    ops: [Gate::Identity, Gate::Z],
                },
                ProtocolStep::MeasureMediator,
            ],
        };
        assert!(audit(&early).is_err());
        let half = ProtocolScript {
            name: "half".into(),
            steps: vec![ProtocolStep::Prepare {
                mode: PrepareMode::Conditioned,
                rho0: Some(NamedState::PhiPlus),
                rho1: None,
            }],
        };
        assert!(audit(&half).is_err());
    }

    #[test]
    fn flagged_runs_never_rule_out() {
        for script in fixtures::corpus() {
            let r = audit(&script).unwrap();
            assert_eq!(r.witness_applicable, r.flags.is_empty());
            for entangled in [false, true] {
                let v = witness_verdict(&r, entangled);
                if !r.flags.is_empty() {
                    assert_ne!(v.outcome, Outcome::RuledOut, "{}", script.name);
                }
            }
        }
    }
}
