use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Couplings `g1` (Q-C), `g2` (Q'-C) and evolution time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteractionParams {
    pub g1: f64,
    pub g2: f64,
    pub t: f64,
}

impl InteractionParams {
    pub fn new(g1: f64, g2: f64, t: f64) -> Result<Self> {
        if !(g1.is_finite() && g2.is_finite() && t.is_finite()) {
            return Err(Error::InvalidParams("non-finite coupling or time".into()));
        }
        if t < 0.0 {
            return Err(Error::InvalidParams(format!("time must be >= 0, got {t}")));
        }
        Ok(Self { g1, g2, t })
    }

    pub fn at(&self, t: f64) -> Result<Self> {
        Self::new(self.g1, self.g2, t)
    }

    pub fn flow(&self) -> FlowMap {
        FlowMap {
            g1: self.g1,
            g2: self.g2,
            t: self.t,
        }
    }
}

/// The characteristic flow `Φ_t` on `(q, q', x)`.
///
/// `q ↦ q + g1 t x + g1 g2 t²/2 q'`, `q' ↦ q'`, `x ↦ x + g2 t q'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowMap {
    pub g1: f64,
    pub g2: f64,
    pub t: f64,
}

impl FlowMap {
    /// Matrix of `Φ_t` acting on column vectors `(q, q', x)`.
    pub fn matrix(&self) -> [[f64; 3]; 3] {
        let (a, b, t) = (self.g1, self.g2, self.t);
        [
            [1.0, a * b * t * t / 2.0, a * t],
            [0.0, 1.0, 0.0],
            [0.0, b * t, 1.0],
        ]
    }

    pub fn apply(&self, z: [f64; 3]) -> [f64; 3] {
        let m = self.matrix();
        std::array::from_fn(|r| m[r][0] * z[0] + m[r][1] * z[1] + m[r][2] * z[2])
    }

    pub fn inverse(&self) -> FlowMap {
        FlowMap {
            t: -self.t,
            ..*self
        }
    }

    pub fn jacobian_determinant(&self) -> f64 {
        let m = self.matrix();
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_bad_params() {
        assert!(InteractionParams::new(1.0, 1.0, -0.1).is_err());
        assert!(InteractionParams::new(f64::NAN, 1.0, 0.1).is_err());
        assert!(InteractionParams::new(1.0, 1.0, 0.0).is_ok());
    }

    #[test]
    fn flow_matches_formula() {
        let f = InteractionParams::new(1.0, 2.0, 0.5).unwrap().flow();
        let z = f.apply([1.0, 2.0, 3.0]);
        assert!((z[0] - (1.0 + 0.5 * 3.0 + 0.25 * 2.0)).abs() < 1e-15);
        assert_eq!(z[1], 2.0);
        assert!((z[2] - 5.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn flow_is_volume_preserving_and_invertible(
            g1 in -3.0..3.0f64, g2 in -3.0..3.0f64, t in 0.0..2.0f64,
            z in prop::array::uniform3(-5.0..5.0f64),
        ) {
            let f = InteractionParams::new(g1, g2, t).unwrap().flow();
            prop_assert!((f.jacobian_determinant() - 1.0).abs() < 1e-12);
            let back = f.inverse().apply(f.apply(z));
            for a in 0..3 {
                prop_assert!((back[a] - z[a]).abs() < 1e-10);
            }
        }
    }
}
