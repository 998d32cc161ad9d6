//! Ensemble observables and the hybrid Poisson bracket.
//!
//! A classical observable `f(x, k)` (with `k = ∂ₓS`) maps to `C_f[P,S] = ∫ P f(x, ∂ₓS) dz`;
//! a quantum operator `M̂` maps to `Q_M[P,S] = ⟨ψ|M̂|ψ⟩`. The bracket
//! `{A, B}_H = ∫ (δA/δP δB/δS - δA/δS δB/δP) dz` sends Poisson brackets and commutators
//! of the two sectors onto brackets of these functionals.

mod classical;
mod functional;
mod grammar;
mod homomorphism;
mod operator;
mod separability;

pub use classical::{classical_poisson_bracket, ClassicalPoly, MAX_CLASSICAL_DEGREE};
pub use functional::{
    eval_observable, functional_value, gateaux_check, hybrid_bracket, variational_derivative,
    EnsembleObservable, GateauxReport, Sector, VariationalDerivative, NODE_MASS_LIMIT,
};
pub use grammar::{parse, Expr, Symbol};
pub use homomorphism::{
    check_homomorphism, BracketRecord, HomomorphismReport, LabeledState, ObservablePair,
};
pub use operator::{Operator, MAX_OPERATOR_DEGREE, MAX_WORD_LENGTH};
pub use separability::strong_separability;
