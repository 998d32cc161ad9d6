//! The qubit post-selection protocol, the witness-assumption auditor and verdicts.

mod audit;
mod cq;
pub mod fixtures;
mod hr;
mod script;

pub use audit::{audit, witness_verdict, AuditReport, Flag, Outcome, WitnessVerdict};
pub use cq::{holevo_information, CQState};
pub use hr::{hr_qubit_protocol, HrTrace, LocalFix, TraceStep};
pub use script::{Gate, NamedState, Pair, PrepareMode, Probe, ProtocolScript, ProtocolStep};
