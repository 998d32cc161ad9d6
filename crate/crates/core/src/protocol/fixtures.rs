//! Reference protocol scripts.

use super::script::ProtocolScript;

const LOCAL_MEDIATION: &str = include_str!("../../fixtures/protocols/local_mediation.toml");
const HR_POST_SELECTION: &str = include_str!("../../fixtures/protocols/hr_post_selection.toml");
const DIRECT_INTERACTION: &str = include_str!("../../fixtures/protocols/direct_interaction.toml");
const MEASURED_MEDIATOR: &str = include_str!("../../fixtures/protocols/measured_mediator.toml");
const CORRELATED_START: &str = include_str!("../../fixtures/protocols/correlated_start.toml");

fn parse(text: &str) -> ProtocolScript {
    ProtocolScript::from_toml(text).expect("fixture scripts parse")
}

/// Product preparation, mediator coupled to each probe, entanglement check.
pub fn local_mediation() -> ProtocolScript {
    parse(LOCAL_MEDIATION)
}

/// Bit-conditioned Bell preparation, readout of the bit, conditional phase flip.
pub fn hr_post_selection() -> ProtocolScript {
    parse(HR_POST_SELECTION)
}

/// Probes coupled directly, switched by the mediator bit.
pub fn direct_interaction() -> ProtocolScript {
    parse(DIRECT_INTERACTION)
}

/// Every bundled script.
pub fn corpus() -> Vec<ProtocolScript> {
    [
        LOCAL_MEDIATION,
        HR_POST_SELECTION,
        DIRECT_INTERACTION,
        MEASURED_MEDIATOR,
        CORRELATED_START,
    ]
    .into_iter()
    .map(parse)
    .collect()
}
