use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::classical::ClassicalPoly;
use super::operator::Operator;
use crate::config_space::{gradient, quadrature, Axis, MadelungFields, HBAR};
use crate::exec;
use crate::{Error, Result};

/// Largest probability the masked (node) region may carry before evaluation is refused.
pub const NODE_MASS_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sector {
    Classical,
    Quantum,
}

#[derive(Debug, Clone, PartialEq)]
enum Payload {
    Classical(ClassicalPoly),
    Quantum(Operator),
}

/// Pure-sector ensemble observable: `C_f` for a classical `f(x, k)` or `Q_M` for a
/// Hermitian operator `M̂`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleObservable {
    label: String,
    payload: Payload,
}

impl EnsembleObservable {
    pub fn classical(src: &str) -> Result<Self> {
        Ok(Self {
            label: src.trim().to_string(),
            payload: Payload::Classical(ClassicalPoly::parse(src)?),
        })
    }

    pub fn quantum(src: &str) -> Result<Self> {
        Ok(Self {
            label: src.trim().to_string(),
            payload: Payload::Quantum(Operator::parse(src)?),
        })
    }

    pub fn from_classical(f: ClassicalPoly) -> Self {
        Self {
            label: f.to_string(),
            payload: Payload::Classical(f),
        }
    }

    /// Wraps an operator. Non-Hermitian operators are rejected.
    pub fn from_operator(m: Operator) -> Result<Self> {
        if !m.is_hermitian() {
            return Err(Error::OutsideFamily(format!("operator {m} is not Hermitian")));
        }
        Ok(Self {
            label: m.to_string(),
            payload: Payload::Quantum(m),
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn sector(&self) -> Sector {
        match self.payload {
            Payload::Classical(_) => Sector::Classical,
            Payload::Quantum(_) => Sector::Quantum,
        }
    }

    pub fn as_classical(&self) -> Option<&ClassicalPoly> {
        match &self.payload {
            Payload::Classical(f) => Some(f),
            Payload::Quantum(_) => None,
        }
    }

    pub fn as_operator(&self) -> Option<&Operator> {
        match &self.payload {
            Payload::Quantum(m) => Some(m),
            Payload::Classical(_) => None,
        }
    }
}

impl fmt::Display for EnsembleObservable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.sector() {
            Sector::Classical => "classical",
            Sector::Quantum => "quantum",
        };
        write!(f, "{tag}:{}", self.label)
    }
}

/// Accepts `classical:<expr>` or `quantum:<expr>`.
impl FromStr for EnsembleObservable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            Some((tag, body)) if tag.trim() == "classical" => Self::classical(body),
            Some((tag, body)) if tag.trim() == "quantum" => Self::quantum(body),
            _ => Err(Error::Parse(format!(
                "expected `classical:<expr>` or `quantum:<expr>`, got `{s}`"
            ))),
        }
    }
}

/// Functional derivatives `(δA/δP, δA/δS)` on every node.
#[derive(Debug, Clone, PartialEq)]
pub struct VariationalDerivative {
    pub d_density: Vec<f64>,
    pub d_action: Vec<f64>,
}

/// `(ψ̄ M̂ψ)` per node for the state's `ψ = √P e^{iS}`.
fn local_expectation(m: &Operator, state: &MadelungFields) -> Vec<Complex64> {
    let psi = state.amplitudes();
    let mpsi = m.apply(&psi, state.grid());
    psi.iter().zip(&mpsi).map(|(a, b)| a.conj() * b).collect()
}

/// Value of the functional with no precondition on the state, so perturbed or
/// unnormalized fields can be probed.
pub fn functional_value(obs: &EnsembleObservable, state: &MadelungFields) -> f64 {
    let grid = state.grid();
    match &obs.payload {
        Payload::Classical(f) => {
            let k = state.action_gradient(Axis::X);
            let p = state.density();
            let vals = exec::map_range(grid.len(), |idx| {
                let x = grid.point(idx)[2];
                p[idx] * f.eval(x, k[idx])
            });
            quadrature(&vals, grid).expect("fields match grid")
        }
        Payload::Quantum(m) => {
            let local = local_expectation(m, state);
            // imaginary residue of a Hermitian expectation is quadrature noise
            quadrature(&local, grid).expect("fields match grid").re
        }
    }
}

fn check_nodes(state: &MadelungFields) -> Result<()> {
    let mass = state.masked_mass();
    if mass > NODE_MASS_LIMIT {
        return Err(Error::NodeDominated(mass));
    }
    Ok(())
}

/// `C_f[P,S] = ∫ P f(x, ∂ₓS)` or `Q_M[P,S] = ⟨ψ|M̂|ψ⟩`.
pub fn eval_observable(obs: &EnsembleObservable, state: &MadelungFields) -> Result<f64> {
    check_nodes(state)?;
    Ok(functional_value(obs, state))
}

/// Analytic functional derivatives.
///
/// Classical: `δC/δP = f(x, ∂ₓS)`, `δC/δS = -∂ₓ(P ∂f/∂k)`.
/// Quantum: `δQ/δP = Re(ψ̄M̂ψ)/P` (with `P` floored), `δQ/δS = (2/ħ) Im(ψ̄M̂ψ)`.
pub fn variational_derivative(
    obs: &EnsembleObservable,
    state: &MadelungFields,
) -> Result<VariationalDerivative> {
    check_nodes(state)?;
    let grid = state.grid();
    let p = state.density();
    match &obs.payload {
        Payload::Classical(f) => {
            let k = state.action_gradient(Axis::X);
            let dfdk = f.d_dk();
            let (d_density, flux): (Vec<f64>, Vec<f64>) = exec::map_range(grid.len(), |idx| {
                let x = grid.point(idx)[2];
                (f.eval(x, k[idx]), p[idx] * dfdk.eval(x, k[idx]))
            })
            .into_iter()
            .unzip();
            let d_action = if dfdk.terms().next().is_none() {
                vec![0.0; grid.len()]
            } else {
                gradient(&flux, Axis::X, grid).into_iter().map(|v| -v).collect()
            };
            Ok(VariationalDerivative {
                d_density,
                d_action,
            })
        }
        Payload::Quantum(m) => {
            let local = local_expectation(m, state);
            let floor = state.floor();
            let d_density = local
                .iter()
                .zip(p)
                .map(|(z, &pp)| z.re / pp.max(floor))
                .collect();
            let d_action = local.iter().map(|z| 2.0 / HBAR * z.im).collect();
            Ok(VariationalDerivative {
                d_density,
                d_action,
            })
        }
    }
}

/// `{A, B}_H = ∫ (δA/δP δB/δS - δA/δS δB/δP) dz`.
pub fn hybrid_bracket(
    a: &EnsembleObservable,
    b: &EnsembleObservable,
    state: &MadelungFields,
) -> Result<f64> {
    let da = variational_derivative(a, state)?;
    let db = variational_derivative(b, state)?;
    let integrand: Vec<f64> = (0..state.grid().len())
        .map(|i| da.d_density[i] * db.d_action[i] - da.d_action[i] * db.d_density[i])
        .collect();
    quadrature(&integrand, state.grid())
}

/// Directional (Gâteaux) check of the analytic derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateauxReport {
    /// `∫ δA/δP η_P + δA/δS η_S`.
    pub analytic: f64,
    /// `(A[P+εη_P, S+εη_S] - A[P-εη_P, S-εη_S]) / 2ε`.
    pub finite_difference: f64,
}

impl GateauxReport {
    pub fn residual(&self) -> f64 {
        (self.analytic - self.finite_difference).abs()
    }
}

/// Compares the analytic derivative against a central difference along `(η_P, η_S)`.
///
/// `η_P` must keep `P ± εη_P` non-negative.
pub fn gateaux_check(
    obs: &EnsembleObservable,
    state: &MadelungFields,
    eta_density: &[f64],
    eta_action: &[f64],
    eps: f64,
) -> Result<GateauxReport> {
    let grid = state.grid();
    for len in [eta_density.len(), eta_action.len()] {
        if len != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                actual: len,
            });
        }
    }
    let dv = variational_derivative(obs, state)?;
    let lin: Vec<f64> = (0..grid.len())
        .map(|i| dv.d_density[i] * eta_density[i] + dv.d_action[i] * eta_action[i])
        .collect();
    let analytic = quadrature(&lin, grid)?;
    let shifted = |sign: f64| -> Result<f64> {
        let p = state
            .density()
            .iter()
            .zip(eta_density)
            .map(|(p, e)| p + sign * eps * e)
            .collect();
        let s = state
            .action()
            .iter()
            .zip(eta_action)
            .map(|(s, e)| s + sign * eps * e)
            .collect();
        let m = MadelungFields::from_raw(grid, p, s)?.with_floor(state.floor());
        Ok(functional_value(obs, &m))
    };
    let finite_difference = (shifted(1.0)? - shifted(-1.0)?) / (2.0 * eps);
    Ok(GateauxReport {
        analytic,
        finite_difference,
    })
}
