//! Self-describing JSON container for grid states.
//!
//! ```json
//! {
//!   "format": "hybrid-lab-snapshot",
//!   "version": 1,
//!   "grid": { "half_width": 8.0, "points_per_axis": 64, "axes": ["q", "q'", "x"] },
//!   "layout": "row-major",
//!   "kind": "wavefunction",
//!   "fields": { "re": [...], "im": [...] }
//! }
//! ```
//!
//! `kind = "madelung"` stores `fields.P` and `fields.S` instead. Arrays hold `N^3` numbers
//! with the `x` index running fastest.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::GridSpec;
use super::madelung::MadelungFields;
use super::wavefunction::HybridWavefunction;
use crate::{Error, Result};

const FORMAT: &str = "hybrid-lab-snapshot";
const VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct GridRecord {
    half_width: f64,
    points_per_axis: usize,
    axes: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Container {
    format: String,
    version: u32,
    grid: GridRecord,
    layout: String,
    kind: String,
    fields: BTreeMap<String, Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Snapshot {
    Wavefunction(HybridWavefunction),
    Madelung(MadelungFields),
}

impl Snapshot {
    pub fn grid(&self) -> &GridSpec {
        match self {
            Snapshot::Wavefunction(w) => w.grid(),
            Snapshot::Madelung(m) => m.grid(),
        }
    }

    pub fn to_json(&self) -> String {
        let g = self.grid();
        let mut fields = BTreeMap::new();
        let kind = match self {
            Snapshot::Wavefunction(w) => {
                fields.insert("re".into(), w.amplitudes().iter().map(|a| a.re).collect());
                fields.insert("im".into(), w.amplitudes().iter().map(|a| a.im).collect());
                "wavefunction"
            }
            Snapshot::Madelung(m) => {
                fields.insert("P".into(), m.density().to_vec());
                fields.insert("S".into(), m.action().to_vec());
                "madelung"
            }
        };
        let c = Container {
            format: FORMAT.into(),
            version: VERSION,
            grid: GridRecord {
                half_width: g.half_width(),
                points_per_axis: g.points(),
                axes: vec!["q".into(), "q'".into(), "x".into()],
            },
            layout: "row-major".into(),
            kind: kind.into(),
            fields,
        };
        serde_json::to_string(&c).expect("snapshot serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Container =
            serde_json::from_str(text).map_err(|e| Error::Snapshot(e.to_string()))?;
        if c.format != FORMAT || c.version != VERSION {
            return Err(Error::Snapshot(format!(
                "unsupported container {} v{}",
                c.format, c.version
            )));
        }
        if c.layout != "row-major" || c.grid.axes != ["q", "q'", "x"] {
            return Err(Error::Snapshot("unsupported layout or axis order".into()));
        }
        let grid = GridSpec::new(c.grid.half_width, c.grid.points_per_axis)?;
        let mut fields = c.fields;
        let mut take = |name: &str| {
            fields
                .remove(name)
                .ok_or_else(|| Error::Snapshot(format!("missing field `{name}`")))
        };
        match c.kind.as_str() {
            "wavefunction" => {
                let re = take("re")?;
                let im = take("im")?;
                if re.len() != im.len() {
                    return Err(Error::ShapeMismatch {
                        expected: re.len(),
                        actual: im.len(),
                    });
                }
                let amps = re
                    .into_iter()
                    .zip(im)
                    .map(|(r, i)| Complex64::new(r, i))
                    .collect();
                Ok(Snapshot::Wavefunction(HybridWavefunction::from_amplitudes(
                    &grid, amps,
                )?))
            }
            "madelung" => {
                let p = take("P")?;
                let s = take("S")?;
                Ok(Snapshot::Madelung(MadelungFields::new(&grid, p, s)?))
            }
            other => Err(Error::Snapshot(format!("unknown kind `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config_space::{gaussian_product_state, to_madelung};

    #[test]
    fn snapshots_round_trip_bit_exact() {
        let g = GridSpec::new(6.0, 24).unwrap();
        let psi = gaussian_product_state(&g, [0.3, 0.0, -0.2], [1.0; 3], [0.5, 0.0, 1.0]).unwrap();
        let snap = Snapshot::Wavefunction(psi.clone());
        assert_eq!(Snapshot::from_json(&snap.to_json()).unwrap(), snap);
        let mad = Snapshot::Madelung(to_madelung(&psi));
        assert_eq!(Snapshot::from_json(&mad.to_json()).unwrap(), mad);
    }

    #[test]
    fn rejects_foreign_containers() {
        assert!(Snapshot::from_json("{}").is_err());
        let bad = r#"{"format":"other","version":1,"grid":{"half_width":1.0,"points_per_axis":8,"axes":["q","q'","x"]},"layout":"row-major","kind":"madelung","fields":{}}"#;
        assert!(matches!(Snapshot::from_json(bad), Err(Error::Snapshot(_))));
    }
}
