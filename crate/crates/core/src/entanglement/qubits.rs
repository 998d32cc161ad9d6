use nalgebra::{Matrix2, Matrix3, Matrix4, Vector4};
use num_complex::Complex64;

use crate::{Error, Result};

pub type Matrix4c = Matrix4<Complex64>;

const STATE_TOLERANCE: f64 = 1e-12;

/// Two-qubit density matrix in the basis `|00⟩, |01⟩, |10⟩, |11⟩`, first label `Q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState {
    rho: Matrix4c,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

impl TwoQubitState {
    /// Checks Hermiticity, unit trace and eigenvalues `≥ -1e-12`.
    pub fn new(rho: Matrix4c) -> Result<Self> {
        if !rho.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite entry".into()));
        }
        let herm = (rho - rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > STATE_TOLERANCE {
            return Err(Error::InvalidState(format!("not Hermitian ({herm:.3e})")));
        }
        let tr = rho.trace();
        if (tr - c(1.0)).norm() > STATE_TOLERANCE {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let min = hermitian_eigenvalues(&rho).min();
        if min < -STATE_TOLERANCE {
            return Err(Error::InvalidState(format!("eigenvalue {min:.3e}")));
        }
        Ok(Self { rho })
    }

    /// `|v⟩⟨v|` for a normalized `v`.
    pub fn pure(v: Vector4<Complex64>) -> Result<Self> {
        let n = v.norm();
        if !(n > 0.0) {
            return Err(Error::InvalidState("zero vector".into()));
        }
        let v = v / c(n);
        Self::new(v * v.adjoint())
    }

    fn bell(a: usize, b: usize, sign: f64) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut v = Vector4::zeros();
        v[a] = c(s);
        v[b] = c(sign * s);
        Self::pure(v).expect("Bell vectors are normalized")
    }

    pub fn phi_plus() -> Self {
        Self::bell(0, 3, 1.0)
    }

    pub fn phi_minus() -> Self {
        Self::bell(0, 3, -1.0)
    }

    pub fn psi_plus() -> Self {
        Self::bell(1, 2, 1.0)
    }

    pub fn psi_minus() -> Self {
        Self::bell(1, 2, -1.0)
    }

    pub fn maximally_mixed() -> Self {
        Self {
            rho: Matrix4c::identity() * c(0.25),
        }
    }

    /// Computational basis state `|ab⟩`.
    pub fn basis(a: usize, b: usize) -> Self {
        let mut rho = Matrix4c::zeros();
        rho[(2 * a + b, 2 * a + b)] = c(1.0);
        Self { rho }
    }

    /// `Σ w_i ρ_i`; weights must be nonnegative and sum to one.
    pub fn mixture(parts: &[(f64, TwoQubitState)]) -> Result<Self> {
        let mut rho = Matrix4c::zeros();
        for (w, s) in parts {
            if !(*w >= 0.0) {
                return Err(Error::InvalidState(format!("negative weight {w}")));
            }
            rho += s.rho * c(*w);
        }
        Self::new(rho)
    }

    pub fn matrix(&self) -> &Matrix4c {
        &self.rho
    }

    /// `(U ⊗ V) ρ (U ⊗ V)†`.
    pub fn apply_local(&self, u: &Matrix2<Complex64>, v: &Matrix2<Complex64>) -> Self {
        let k = u.kronecker(v);
        let k4 = Matrix4c::from_fn(|r, c| k[(r, c)]);
        let rho = k4 * self.rho * k4.adjoint();
        Self {
            rho: (rho + rho.adjoint()) * c(0.5),
        }
    }

    /// `tr(ρ σ)`, real for Hermitian arguments.
    pub fn overlap(&self, other: &Self) -> f64 {
        (self.rho * other.rho).trace().re
    }

    /// Largest entry-wise modulus of `ρ - σ`.
    pub fn distance(&self, other: &Self) -> f64 {
        (self.rho - other.rho).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn hermitian_eigenvalues(m: &Matrix4c) -> Vector4<f64> {
    let h = (m + m.adjoint()) * c(0.5);
    h.symmetric_eigenvalues()
}

/// Transpose on the second qubit: `⟨ab|ρ^T|cd⟩ = ⟨ad|ρ|cb⟩`.
pub fn partial_transpose(rho: &Matrix4c) -> Matrix4c {
    Matrix4c::from_fn(|r, col| {
        let (a, b) = (r / 2, r % 2);
        let (cc, d) = (col / 2, col % 2);
        rho[(2 * a + d, 2 * cc + b)]
    })
}

/// Sum of the moduli of the negative eigenvalues of the partial transpose.
pub fn negativity_qubits(state: &TwoQubitState) -> f64 {
    hermitian_eigenvalues(&partial_transpose(&state.rho))
        .iter()
        .filter(|&&l| l < 0.0)
        .map(|l| -l)
        .sum()
}

fn paulis() -> [Matrix2<Complex64>; 3] {
    let (o, z, i) = (c(1.0), c(0.0), Complex64::i());
    [
        Matrix2::new(z, o, o, z),
        Matrix2::new(z, -i, i, z),
        Matrix2::new(o, z, z, -o),
    ]
}

/// Maximal CHSH value over all measurement settings, `2 sqrt(m1 + m2)` with `m1, m2` the
/// two largest eigenvalues of `TᵀT`, `T_ij = tr(ρ σ_i ⊗ σ_j)`.
pub fn chsh_max(state: &TwoQubitState) -> f64 {
    let s = paulis();
    let t = Matrix3::from_fn(|i, j| {
        let k = s[i].kronecker(&s[j]);
        let k4 = Matrix4c::from_fn(|r, c| k[(r, c)]);
        (state.rho * k4).trace().re
    });
    let mut ev: Vec<f64> = (t.transpose() * t).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    2.0 * (ev[0] + ev[1]).max(0.0).sqrt()
}

/// Base-2 von Neumann entropy.
pub fn von_neumann_entropy(state: &TwoQubitState) -> f64 {
    hermitian_eigenvalues(&state.rho)
        .iter()
        .filter(|&&l| l > 1e-15)
        .map(|&l| -l * l.log2())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn classical_mixture() -> TwoQubitState {
        TwoQubitState::mixture(&[(0.5, TwoQubitState::basis(0, 0)), (0.5, TwoQubitState::basis(1, 1))])
            .unwrap()
    }

    #[test]
    fn bell_partial_transpose_spectrum() {
        let pt = partial_transpose(TwoQubitState::phi_plus().matrix());
        let mut ev: Vec<f64> = hermitian_eigenvalues(&pt).iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        let want = [-0.5, 0.5, 0.5, 0.5];
        for (a, b) in ev.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn negativity_examples() {
        for bell in [
            TwoQubitState::phi_plus(),
            TwoQubitState::phi_minus(),
            TwoQubitState::psi_plus(),
            TwoQubitState::psi_minus(),
        ] {
            assert!((negativity_qubits(&bell) - 0.5).abs() < 1e-12);
        }
        assert!(negativity_qubits(&classical_mixture()) < 1e-12);
        assert!(negativity_qubits(&TwoQubitState::maximally_mixed()) < 1e-12);
    }

    #[test]
    fn chsh_examples() {
        assert!((chsh_max(&TwoQubitState::phi_plus()) - 2.0 * 2f64.sqrt()).abs() < 1e-9);
        assert!((chsh_max(&classical_mixture()) - 2.0).abs() < 1e-9);
        assert!(chsh_max(&TwoQubitState::maximally_mixed()).abs() < 1e-9);
    }

    #[test]
    fn invalid_states_rejected() {
        let mut m = *TwoQubitState::phi_plus().matrix();
        m[(0, 3)] = c(0.7);
        assert!(TwoQubitState::new(m).is_err());
        assert!(TwoQubitState::new(Matrix4c::identity()).is_err());
        let mut neg = Matrix4c::zeros();
        neg[(0, 0)] = c(1.5);
        neg[(1, 1)] = c(-0.5);
        assert!(TwoQubitState::new(neg).is_err());
    }

    #[test]
    fn entropies() {
        assert!(von_neumann_entropy(&TwoQubitState::phi_plus()).abs() < 1e-12);
        assert!((von_neumann_entropy(&classical_mixture()) - 1.0).abs() < 1e-12);
        assert!((von_neumann_entropy(&TwoQubitState::maximally_mixed()) - 2.0).abs() < 1e-12);
    }

    fn random_state(re: [f64; 16], im: [f64; 16]) -> TwoQubitState {
        let a = Matrix4c::from_fn(|r, col| Complex64::new(re[4 * r + col], im[4 * r + col]));
        let m = a * a.adjoint();
        TwoQubitState::new(m / m.trace()).unwrap()
    }

    /// Smallest eigenvalue by power iteration on `2 I - M`, independent of the eigensolver
    /// used by the measure itself.
    fn min_eigenvalue_power(m: &Matrix4c) -> f64 {
        let shift = 2.0;
        let b = Matrix4c::identity() * c(shift) - m;
        let mut v = Vector4::from_fn(|i, _| c(1.0 + i as f64 * 0.37));
        let mut lambda = 0.0;
        for _ in 0..5000 {
            let w = b * v;
            lambda = w.norm() / v.norm();
            v = w / c(w.norm());
        }
        shift - lambda
    }

    proptest! {
        #[test]
        fn negativity_zero_iff_ppt(re in prop::array::uniform16(-1.0..1.0f64), im in prop::array::uniform16(-1.0..1.0f64)) {
            let s = random_state(re, im);
            let neg = negativity_qubits(&s);
            let min = min_eigenvalue_power(&partial_transpose(s.matrix()));
            if min < -1e-6 {
                prop_assert!(neg > 0.0);
                prop_assert!((neg + min).abs() < 1e-6);
            }
            if min > 1e-6 {
                prop_assert_eq!(neg, 0.0);
            }
        }

        #[test]
        fn chsh_bounds(re in prop::array::uniform16(-1.0..1.0f64), im in prop::array::uniform16(-1.0..1.0f64)) {
            let s = random_state(re, im);
            let v = chsh_max(&s);
            prop_assert!(v <= 2.0 * 2f64.sqrt() + 1e-9);
            if negativity_qubits(&s) == 0.0 {
                prop_assert!(v <= 2.0 + 1e-9);
            }
        }

        #[test]
        fn product_states_are_separable(a in prop::array::uniform4(-1.0..1.0f64), b in prop::array::uniform4(-1.0..1.0f64)) {
            let qa = nalgebra::Vector2::new(Complex64::new(a[0], a[1]), Complex64::new(a[2], a[3]));
            let qb = nalgebra::Vector2::new(Complex64::new(b[0], b[1]), Complex64::new(b[2], b[3]));
            prop_assume!(qa.norm() > 1e-3 && qb.norm() > 1e-3);
            let v = qa.kronecker(&qb);
            let s = TwoQubitState::pure(Vector4::from_fn(|i, _| v[i])).unwrap();
            prop_assert!(negativity_qubits(&s) < 1e-12);
            prop_assert!(chsh_max(&s) <= 2.0 + 1e-9);
        }
    }
}
