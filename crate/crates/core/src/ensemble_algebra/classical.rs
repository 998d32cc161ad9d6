use std::collections::BTreeMap;
use std::fmt;

use super::grammar::{parse, Expr, Symbol};
use crate::{Error, Result};

/// Highest total degree in `(x, k)` kept in the classical family.
pub const MAX_CLASSICAL_DEGREE: u32 = 4;

/// Polynomial `f(x, k)` with real coefficients, total degree at most four.
///
/// Only the mediator coordinate `x` and its momentum `k` can appear; this is what makes
/// the observable classical.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ClassicalPoly {
    terms: BTreeMap<(u32, u32), f64>,
}

impl ClassicalPoly {
    pub fn parse(src: &str) -> Result<Self> {
        Self::from_expr(&parse(src)?)
    }

    pub fn constant(c: f64) -> Self {
        let mut p = Self::default();
        p.add_term(0, 0, c);
        p
    }

    pub fn x() -> Self {
        Self::monomial(1, 0, 1.0)
    }

    pub fn k() -> Self {
        Self::monomial(0, 1, 1.0)
    }

    pub fn monomial(x_pow: u32, k_pow: u32, coeff: f64) -> Self {
        let mut p = Self::default();
        p.add_term(x_pow, k_pow, coeff);
        p
    }

    fn from_expr(e: &Expr) -> Result<Self> {
        let p = match e {
            Expr::Num(v) => Self::constant(*v),
            Expr::Var(Symbol::X) => Self::x(),
            Expr::Var(Symbol::K) => Self::k(),
            Expr::Var(s) => return Err(Error::QuantumCoordinate(s.name().into())),
            Expr::Neg(a) => Self::from_expr(a)?.scale(-1.0),
            Expr::Add(a, b) => Self::from_expr(a)?.add(&Self::from_expr(b)?),
            Expr::Sub(a, b) => Self::from_expr(a)?.add(&Self::from_expr(b)?.scale(-1.0)),
            Expr::Mul(a, b) => Self::from_expr(a)?.mul(&Self::from_expr(b)?)?,
            Expr::Pow(a, n) => {
                let base = Self::from_expr(a)?;
                let mut acc = Self::constant(1.0);
                for _ in 0..*n {
                    acc = acc.mul(&base)?;
                }
                acc
            }
        };
        p.check_degree()?;
        Ok(p)
    }

    fn add_term(&mut self, x_pow: u32, k_pow: u32, c: f64) {
        if c == 0.0 {
            return;
        }
        let e = self.terms.entry((x_pow, k_pow)).or_insert(0.0);
        *e += c;
        if *e == 0.0 {
            self.terms.remove(&(x_pow, k_pow));
        }
    }

    fn check_degree(&self) -> Result<()> {
        if self.degree() > MAX_CLASSICAL_DEGREE {
            return Err(Error::OutsideFamily(format!(
                "classical degree {} exceeds {MAX_CLASSICAL_DEGREE}: {self}",
                self.degree()
            )));
        }
        Ok(())
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|(a, b)| a + b).max().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), f64)> + '_ {
        self.terms.iter().map(|(k, v)| (*k, *v))
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = Self::default();
        for (&(a, b), &c) in &self.terms {
            out.add_term(a, b, c * s);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(a, b), &c) in &other.terms {
            out.add_term(a, b, c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut out = Self::default();
        for (&(a1, b1), &c1) in &self.terms {
            for (&(a2, b2), &c2) in &other.terms {
                out.add_term(a1 + a2, b1 + b2, c1 * c2);
            }
        }
        out.check_degree()?;
        Ok(out)
    }

    pub fn d_dx(&self) -> Self {
        let mut out = Self::default();
        for (&(a, b), &c) in &self.terms {
            if a > 0 {
                out.add_term(a - 1, b, c * a as f64);
            }
        }
        out
    }

    pub fn d_dk(&self) -> Self {
        let mut out = Self::default();
        for (&(a, b), &c) in &self.terms {
            if b > 0 {
                out.add_term(a, b - 1, c * b as f64);
            }
        }
        out
    }

    pub fn eval(&self, x: f64, k: f64) -> f64 {
        self.terms
            .iter()
            .map(|(&(a, b), &c)| c * x.powi(a as i32) * k.powi(b as i32))
            .sum()
    }

    /// True when `∂f/∂k ≡ 0`, i.e. the observable ignores the action entirely.
    pub fn is_action_free(&self) -> bool {
        self.terms.keys().all(|&(_, b)| b == 0)
    }

    /// Highest power of `k`.
    pub fn action_degree(&self) -> u32 {
        self.terms.keys().map(|&(_, b)| b).max().unwrap_or(0)
    }

    /// True when `f` is affine in `(x, k)`.
    pub fn is_linear(&self) -> bool {
        self.degree() <= 1
    }

    /// Canonical bracket `{f, g}_P = ∂ₓf ∂ₖg - ∂ₖf ∂ₓg`.
    pub fn poisson_bracket(&self, other: &Self) -> Result<Self> {
        let lhs = self.d_dx().mul(&other.d_dk())?;
        let rhs = self.d_dk().mul(&other.d_dx())?;
        Ok(lhs.add(&rhs.scale(-1.0)))
    }
}

/// `classical_poisson_bracket(f, g) = {f, g}_P`.
pub fn classical_poisson_bracket(f: &ClassicalPoly, g: &ClassicalPoly) -> Result<ClassicalPoly> {
    f.poisson_bracket(g)
}

impl fmt::Display for ClassicalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (&(a, b), &c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (sym, pow) in [("x", a), ("k", b)] {
                match pow {
                    0 => {}
                    1 => write!(f, "*{sym}")?,
                    _ => write!(f, "*{sym}^{pow}")?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> ClassicalPoly {
        ClassicalPoly::parse(s).unwrap()
    }

    #[test]
    fn canonical_brackets() {
        assert_eq!(p("x").poisson_bracket(&p("k")).unwrap(), p("1"));
        assert_eq!(p("x").poisson_bracket(&p("x")).unwrap(), ClassicalPoly::default());
        assert_eq!(p("x^2").poisson_bracket(&p("k^2")).unwrap(), p("4*x*k"));
        assert_eq!(classical_poisson_bracket(&p("x"), &p("x*k")).unwrap(), p("x"));
        assert_eq!(p("x^2").poisson_bracket(&p("k")).unwrap(), p("2*x"));
    }

    #[test]
    fn quantum_coordinates_are_rejected() {
        for s in ["q", "x*q'", "p + k", "pp"] {
            assert!(matches!(
                ClassicalPoly::parse(s),
                Err(Error::QuantumCoordinate(_))
            ));
        }
    }

    #[test]
    fn degree_cap_and_bracket_closure() {
        assert!(matches!(
            ClassicalPoly::parse("x^5"),
            Err(Error::OutsideFamily(_))
        ));
        // {x^4, k^4} = 16 x^3 k^3 has degree six
        assert!(matches!(
            p("x^4").poisson_bracket(&p("k^4")),
            Err(Error::OutsideFamily(_))
        ));
    }

    #[test]
    fn partials_and_evaluation() {
        let f = p("x^2*k - 3*k + 0.5");
        assert_eq!(f.d_dx(), p("2*x*k"));
        assert_eq!(f.d_dk(), p("x^2 - 3"));
        assert!((f.eval(2.0, 1.5) - (6.0 - 4.5 + 0.5)).abs() < 1e-15);
        assert!(p("x^3").is_action_free());
        assert!(p("2*x - k").is_linear());
        assert!(!p("k^2").is_linear());
        assert_eq!(p("x^3*k + k^2").action_degree(), 2);
        assert_eq!(p("x").action_degree(), 0);
    }
}
