use serde::Serialize;

use super::functional::{functional_value, hybrid_bracket, EnsembleObservable, Sector};
use crate::config_space::MadelungFields;
use crate::exec;
use crate::{Error, Result};

/// Same-sector pair together with the image of its bracket:
/// `C_{{f,g}_P}` for classical pairs, `Q_{[M,N]/iħ}` for quantum pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservablePair {
    pub left: EnsembleObservable,
    pub right: EnsembleObservable,
    image: EnsembleObservable,
}

impl ObservablePair {
    pub fn new(left: EnsembleObservable, right: EnsembleObservable) -> Result<Self> {
        let image = match (left.sector(), right.sector()) {
            (Sector::Classical, Sector::Classical) => {
                let f = left.as_classical().expect("classical sector");
                let g = right.as_classical().expect("classical sector");
                EnsembleObservable::from_classical(f.poisson_bracket(g)?)
            }
            (Sector::Quantum, Sector::Quantum) => {
                let m = left.as_operator().expect("quantum sector");
                let n = right.as_operator().expect("quantum sector");
                EnsembleObservable::from_operator(m.commutator_over_i(n)?)?
            }
            _ => {
                return Err(Error::OutsideFamily(format!(
                    "mixed-sector pair ({left}, {right}) has no bracket image"
                )))
            }
        };
        Ok(Self { left, right, image })
    }

    pub fn classical(f: &str, g: &str) -> Result<Self> {
        Self::new(EnsembleObservable::classical(f)?, EnsembleObservable::classical(g)?)
    }

    pub fn quantum(m: &str, n: &str) -> Result<Self> {
        Self::new(EnsembleObservable::quantum(m)?, EnsembleObservable::quantum(n)?)
    }

    pub fn image(&self) -> &EnsembleObservable {
        &self.image
    }
}

#[derive(Debug, Clone)]
pub struct LabeledState {
    pub id: String,
    pub state: MadelungFields,
}

/// One bracket evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BracketRecord {
    pub left: String,
    pub right: String,
    pub state_id: String,
    /// `{A, B}_H` evaluated on the state.
    pub bracket: f64,
    /// Value of the image observable on the same state.
    pub image_value: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomomorphismReport {
    pub records: Vec<BracketRecord>,
    pub max_residual: f64,
}

/// Residuals `|{A,B}_H - image|` for every (pair, state) combination.
pub fn check_homomorphism(
    pairs: &[ObservablePair],
    states: &[LabeledState],
) -> Result<HomomorphismReport> {
    let combos: Vec<(usize, usize)> = (0..pairs.len())
        .flat_map(|p| (0..states.len()).map(move |s| (p, s)))
        .collect();
    let records = exec::map_range(combos.len(), |c| {
        let (p, s) = combos[c];
        let pair = &pairs[p];
        let st = &states[s];
        let bracket = hybrid_bracket(&pair.left, &pair.right, &st.state)?;
        let image_value = functional_value(&pair.image, &st.state);
        Ok(BracketRecord {
            left: pair.left.to_string(),
            right: pair.right.to_string(),
            state_id: st.id.clone(),
            bracket,
            image_value,
            residual: (bracket - image_value).abs(),
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let max_residual = records.iter().map(|r| r.residual).fold(0.0, f64::max);
    Ok(HomomorphismReport {
        records,
        max_residual,
    })
}
