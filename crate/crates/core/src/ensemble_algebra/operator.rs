use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use super::grammar::{parse, Expr, Symbol};
use crate::config_space::{spectral_derivative, Axis, GridSpec};
use crate::{Error, Result};

/// Longest operator word accepted from user input.
pub const MAX_WORD_LENGTH: u32 = 3;

/// Highest degree an operator may reach, e.g. as the commutator of two words.
pub const MAX_OPERATOR_DEGREE: u32 = 4;

const PRUNE: f64 = 1e-14;

/// Exponents of a normal-ordered monomial `q^a p^b q'^c p'^d x^e k^f`.
type Powers = [u32; 6];

const I: Complex64 = Complex64::new(0.0, 1.0);

fn slot(s: Symbol) -> usize {
    match s {
        Symbol::Q => 0,
        Symbol::P => 1,
        Symbol::QPrime => 2,
        Symbol::PPrime => 3,
        Symbol::X => 4,
        Symbol::K => 5,
    }
}

fn binom(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Polynomial in the canonical operators of the three modes, stored normal ordered
/// (positions to the left of momenta within each mode), `ħ = 1`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Operator {
    terms: BTreeMap<Powers, Complex64>,
}

impl Operator {
    /// Parses a Hermitian operator. Products are symmetrized, `A*B -> (AB + BA)/2`.
    pub fn parse(src: &str) -> Result<Self> {
        let op = Self::from_expr(&parse(src)?)?;
        if op.degree() > MAX_WORD_LENGTH {
            return Err(Error::OutsideFamily(format!(
                "operator word of length {} exceeds {MAX_WORD_LENGTH}",
                op.degree()
            )));
        }
        Ok(op)
    }

    fn from_expr(e: &Expr) -> Result<Self> {
        let op = match e {
            Expr::Num(v) => Self::scalar(Complex64::new(*v, 0.0)),
            Expr::Var(s) => Self::symbol(*s),
            Expr::Neg(a) => Self::from_expr(a)?.scale(Complex64::new(-1.0, 0.0)),
            Expr::Add(a, b) => Self::from_expr(a)?.add(&Self::from_expr(b)?),
            Expr::Sub(a, b) => Self::from_expr(a)?.sub(&Self::from_expr(b)?),
            Expr::Mul(a, b) => Self::from_expr(a)?.symmetrized(&Self::from_expr(b)?)?,
            Expr::Pow(a, n) => {
                let base = Self::from_expr(a)?;
                let mut acc = Self::identity();
                for _ in 0..*n {
                    acc = acc.mul(&base)?;
                }
                acc
            }
        };
        Ok(op)
    }

    pub fn scalar(c: Complex64) -> Self {
        let mut op = Self::default();
        op.add_term([0; 6], c);
        op
    }

    pub fn identity() -> Self {
        Self::scalar(Complex64::new(1.0, 0.0))
    }

    pub fn symbol(s: Symbol) -> Self {
        let mut pw = [0; 6];
        pw[slot(s)] = 1;
        let mut op = Self::default();
        op.add_term(pw, Complex64::new(1.0, 0.0));
        op
    }

    fn add_term(&mut self, pw: Powers, c: Complex64) {
        let e = self.terms.entry(pw).or_default();
        *e += c;
        if e.norm() < PRUNE {
            self.terms.remove(&pw);
        }
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|pw| pw.iter().sum())
            .max()
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when the operator involves `x̂` or `k̂`.
    pub fn touches_mediator(&self) -> bool {
        self.terms.keys().any(|pw| pw[4] > 0 || pw[5] > 0)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = Self::default();
        for (pw, c) in &self.terms {
            out.add_term(*pw, c * s);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (pw, c) in &other.terms {
            out.add_term(*pw, *c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Operator product, re-normal-ordered with `p^b q^a = Σ_j (-i)^j j! C(a,j) C(b,j) q^(a-j) p^(b-j)`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut out = Self::default();
        for (l, cl) in &self.terms {
            for (r, cr) in &other.terms {
                // per mode expansions, then their tensor product
                let mut partial: Vec<(Powers, Complex64)> = vec![([0; 6], cl * cr)];
                for mode in 0..3 {
                    let (a1, b1) = (l[2 * mode], l[2 * mode + 1]);
                    let (a2, b2) = (r[2 * mode], r[2 * mode + 1]);
                    let mut next = Vec::new();
                    for j in 0..=b1.min(a2) {
                        let w = (-I).powu(j) * (factorial(j) * binom(a2, j) * binom(b1, j));
                        for (pw, c) in &partial {
                            let mut pw = *pw;
                            pw[2 * mode] = a1 + a2 - j;
                            pw[2 * mode + 1] = b1 + b2 - j;
                            next.push((pw, c * w));
                        }
                    }
                    partial = next;
                }
                for (pw, c) in partial {
                    out.add_term(pw, c);
                }
            }
        }
        if out.degree() > MAX_OPERATOR_DEGREE {
            return Err(Error::OutsideFamily(format!(
                "operator degree {} exceeds {MAX_OPERATOR_DEGREE}",
                out.degree()
            )));
        }
        Ok(out)
    }

    /// `(AB + BA) / 2`.
    pub fn symmetrized(&self, other: &Self) -> Result<Self> {
        Ok(self
            .mul(other)?
            .add(&other.mul(self)?)
            .scale(Complex64::new(0.5, 0.0)))
    }

    /// `[A, B] / (iħ)`.
    pub fn commutator_over_i(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(other)?.sub(&other.mul(self)?).scale(-I))
    }

    /// Hermitian adjoint, re-normal-ordered.
    pub fn adjoint(&self) -> Result<Self> {
        let mut out = Self::default();
        for (pw, c) in &self.terms {
            // (q^a p^b)† = p^b q^a, modes commute
            let mut term = Self::scalar(c.conj());
            for mode in 0..3 {
                let mut p = [0; 6];
                p[2 * mode + 1] = pw[2 * mode + 1];
                let mut q = [0; 6];
                q[2 * mode] = pw[2 * mode];
                let mut mp = Self::default();
                mp.add_term(p, Complex64::new(1.0, 0.0));
                let mut mq = Self::default();
                mq.add_term(q, Complex64::new(1.0, 0.0));
                term = term.mul(&mp.mul(&mq)?)?;
            }
            out = out.add(&term);
        }
        Ok(out)
    }

    pub fn is_hermitian(&self) -> bool {
        match self.adjoint() {
            Ok(adj) => {
                let diff = adj.sub(self);
                diff.terms.values().all(|c| c.norm() < 1e-12)
            }
            Err(_) => false,
        }
    }

    /// `M̂ψ` on the grid. Momenta act spectrally, `p̂ = -i ∂`.
    pub fn apply(&self, psi: &[Complex64], grid: &GridSpec) -> Vec<Complex64> {
        let mut derivs: BTreeMap<[u32; 3], Vec<Complex64>> = BTreeMap::new();
        derivs.insert([0; 3], psi.to_vec());
        let axes = [Axis::Q, Axis::QPrime, Axis::X];
        for pw in self.terms.keys() {
            let key = [pw[1], pw[3], pw[5]];
            if derivs.contains_key(&key) {
                continue;
            }
            let mut cur = [0u32; 3];
            let mut v = psi.to_vec();
            for (a, axis) in axes.iter().enumerate() {
                for _ in 0..key[a] {
                    cur[a] += 1;
                    v = match derivs.get(&cur) {
                        Some(cached) => cached.clone(),
                        None => {
                            let d: Vec<Complex64> = spectral_derivative(&v, *axis, grid)
                                .into_iter()
                                .map(|z| -I * z)
                                .collect();
                            derivs.insert(cur, d.clone());
                            d
                        }
                    };
                }
            }
        }
        let mut out = vec![Complex64::default(); psi.len()];
        for (pw, c) in &self.terms {
            let d = &derivs[&[pw[1], pw[3], pw[5]]];
            for (idx, (o, dv)) in out.iter_mut().zip(d).enumerate() {
                let z = grid.point(idx);
                let pos = z[0].powi(pw[0] as i32) * z[1].powi(pw[2] as i32) * z[2].powi(pw[4] as i32);
                *o += c * dv * pos;
            }
        }
        out
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        const NAMES: [&str; 6] = ["q", "p", "q'", "p'", "x", "k"];
        for (n, (pw, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            if c.im == 0.0 {
                write!(f, "{}", c.re)?;
            } else {
                write!(f, "({}{:+}i)", c.re, c.im)?;
            }
            for (s, &e) in NAMES.iter().zip(pw) {
                match e {
                    0 => {}
                    1 => write!(f, "*{s}")?,
                    _ => write!(f, "*{s}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(s: &str) -> Operator {
        Operator::parse(s).unwrap()
    }

    #[test]
    fn canonical_commutators() {
        assert_eq!(op("q").commutator_over_i(&op("p")).unwrap(), Operator::identity());
        assert_eq!(op("q'").commutator_over_i(&op("p'")).unwrap(), Operator::identity());
        assert_eq!(op("x").commutator_over_i(&op("k")).unwrap(), Operator::identity());
        assert!(op("q").commutator_over_i(&op("q'")).unwrap().is_zero());
        assert!(op("p").commutator_over_i(&op("k")).unwrap().is_zero());
        // [q^2, p]/i = 2q
        assert_eq!(
            op("q^2").commutator_over_i(&op("p")).unwrap(),
            op("2*q")
        );
    }

    #[test]
    fn symmetrized_products_are_hermitian() {
        for s in ["q*p", "p*q*p", "q^2*p", "x*k + q*p'", "p^2", "q*p*q'"] {
            assert!(op(s).is_hermitian(), "{s}");
        }
        // the bare normal-ordered product is not
        let qp = Operator::symbol(Symbol::Q).mul(&Operator::symbol(Symbol::P)).unwrap();
        assert!(!qp.is_hermitian());
        // (qp + pq)/2 = qp - i/2 in normal order
        let sym = op("q*p");
        assert_eq!(sym, qp.add(&Operator::scalar(Complex64::new(0.0, -0.5))));
    }

    #[test]
    fn word_length_limit() {
        assert!(matches!(Operator::parse("q^2*p^2"), Err(Error::OutsideFamily(_))));
        assert!(Operator::parse("q*p*q").is_ok());
    }

    #[test]
    fn apply_matches_analytic_action() {
        let g = GridSpec::new(8.0, 48).unwrap();
        let psi: Vec<Complex64> = (0..g.len())
            .map(|i| {
                let z = g.point(i);
                Complex64::new(0.0, 0.7 * z[0]).exp()
                    * (-(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]) / 2.0).exp()
            })
            .collect();
        // (qp + pq)/2 ψ = (q p - i/2) ψ, p ψ = (0.7 + i q) ψ along q
        let out = op("q*p").apply(&psi, &g);
        for idx in (0..g.len()).step_by(331) {
            let q = g.point(idx)[0];
            let want = psi[idx] * (q * Complex64::new(0.7, q) - Complex64::new(0.0, 0.5));
            assert!((out[idx] - want).norm() < 1e-9);
        }
    }
}
