use serde::Serialize;

/// Log-negativity or negativity above which a run counts as entangled.
pub const ENTANGLEMENT_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EntanglementVerdict {
    Entangled,
    NotEntangled,
}

/// `{measure, value, threshold, verdict}` as appended to run reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerdictRecord {
    pub measure: String,
    pub value: f64,
    pub threshold: f64,
    pub verdict: EntanglementVerdict,
}

impl VerdictRecord {
    pub fn new(measure: impl Into<String>, value: f64) -> Self {
        Self {
            measure: measure.into(),
            value,
            threshold: ENTANGLEMENT_THRESHOLD,
            verdict: if value > ENTANGLEMENT_THRESHOLD {
                EntanglementVerdict::Entangled
            } else {
                EntanglementVerdict::NotEntangled
            },
        }
    }

    pub fn entangled(&self) -> bool {
        self.verdict == EntanglementVerdict::Entangled
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_is_strict() {
        assert!(!VerdictRecord::new("E_N", 1e-6).entangled());
        assert!(VerdictRecord::new("E_N", 2e-6).entangled());
    }
}
