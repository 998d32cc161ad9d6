//! Entanglement and correlation measures for the two probes.

mod gaussian;
mod qubits;
mod verdict;

pub use gaussian::{
    gaussian_mutual_information, log_negativity, reduce_to_qq_prime, QQCovariance, TwoModeCov,
};
pub use qubits::{
    chsh_max, negativity_qubits, partial_transpose, von_neumann_entropy, Matrix4c,
    TwoQubitState,
};
pub use verdict::{EntanglementVerdict, VerdictRecord, ENTANGLEMENT_THRESHOLD};
