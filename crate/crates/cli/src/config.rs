//! Experiment configuration: TOML file, command-line overrides, validation.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub seed: u64,
    pub grid: GridConfig,
    pub coupling: CouplingConfig,
    pub time: TimeConfig,
    pub initial: InitialConfig,
    pub observables: ObservableConfig,
    pub states: StatesConfig,
    pub k_sensitivity: KSensitivityConfig,
    pub qubit: QubitConfig,
    pub protocol: ProtocolConfig,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub half_width: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CouplingConfig {
    pub g1: f64,
    pub g2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeConfig {
    /// Times for the moment time series and the twin.
    pub times: Vec<f64>,
    /// Times for grid cross-validation, which is much more expensive.
    pub grid_times: Vec<f64>,
    /// Time at which sweeps are evaluated.
    pub sweep_time: f64,
}

/// Product of three Gaussian packets, ordered `(q, q', x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialConfig {
    pub centers: [f64; 3],
    pub widths: [f64; 3],
    pub momenta: [f64; 3],
    pub chirps: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ObservableConfig {
    /// Pairs for the homomorphism check, written `sector:expression`.
    pub pairs: Vec<[String; 2]>,
    /// Probe operators for the separability scan.
    pub probes: Vec<String>,
    /// Mediator functions of `(x, k)` for the separability scan.
    pub mediators: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StatesConfig {
    /// Number of seeded random smooth states.
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KSensitivityConfig {
    pub k_variances: Vec<f64>,
    /// Mediator position variance; minimum-uncertainty partner when absent.
    pub x_variance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QubitConfig {
    pub rho0: hybrid_lab::protocol::NamedState,
    pub rho1: hybrid_lab::protocol::NamedState,
    pub fix_target: hybrid_lab::protocol::Probe,
    pub fix_gate: hybrid_lab::protocol::Gate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProtocolConfig {
    /// Script file; relative paths resolve against the config file. Without it the
    /// bundled post-selection fixture is audited.
    pub script: Option<PathBuf>,
    /// Whether the audited run produced entanglement.
    pub entangled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub bracket: f64,
    pub structural_zero: f64,
    pub agreement: f64,
    pub norm_drift: f64,
    pub designated: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: "default".into(),
            seed: 42,
            grid: GridConfig::default(),
            coupling: CouplingConfig::default(),
            time: TimeConfig::default(),
            initial: InitialConfig::default(),
            observables: ObservableConfig::default(),
            states: StatesConfig::default(),
            k_sensitivity: KSensitivityConfig::default(),
            qubit: QubitConfig::default(),
            protocol: ProtocolConfig::default(),
            tolerances: Tolerances::default(),
        }
    }
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            half_width: 8.0,
            points: 64,
        }
    }
}

impl Default for CouplingConfig {
    fn default() -> Self {
        Self { g1: 1.0, g2: 1.0 }
    }
}

impl Default for TimeConfig {
    fn default() -> Self {
        Self {
            times: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            grid_times: vec![0.25, 0.5, 1.0],
            sweep_time: 1.0,
        }
    }
}

impl Default for InitialConfig {
    fn default() -> Self {
        Self {
            centers: [0.0; 3],
            widths: [1.0; 3],
            momenta: [0.0; 3],
            chirps: [0.0; 3],
        }
    }
}

impl Default for ObservableConfig {
    fn default() -> Self {
        let pair = |a: &str, b: &str| [a.to_string(), b.to_string()];
        Self {
            pairs: vec![
                pair("classical:x", "classical:k"),
                pair("classical:x", "classical:x*k"),
                pair("classical:x^2", "classical:k"),
                pair("quantum:q", "quantum:p"),
                pair("quantum:q'", "quantum:p'"),
                pair("quantum:q", "quantum:q'"),
            ],
            probes: ["q", "p", "p^2", "q*p'"].map(String::from).to_vec(),
            mediators: ["x", "k", "x*k", "k^2"].map(String::from).to_vec(),
        }
    }
}

impl Default for StatesConfig {
    fn default() -> Self {
        Self { count: 5 }
    }
}

impl Default for KSensitivityConfig {
    fn default() -> Self {
        Self {
            k_variances: vec![0.5, 1.0, 2.0],
            x_variance: None,
        }
    }
}

impl Default for QubitConfig {
    fn default() -> Self {
        use hybrid_lab::protocol::{Gate, NamedState, Probe};
        Self {
            rho0: NamedState::PhiPlus,
            rho1: NamedState::PhiMinus,
            fix_target: Probe::QPrime,
            fix_gate: Gate::Z,
        }
    }
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            script: None,
            entangled: true,
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            bracket: 1e-4,
            structural_zero: 1e-6,
            agreement: 1e-3,
            norm_drift: 1e-9,
            designated: 1e-3,
        }
    }
}

/// Parses `value` as a TOML value, falling back to a bare string.
fn parse_value(raw: &str) -> Value {
    let doc = format!("v = {raw}");
    match doc.parse::<Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| Value::String(raw.into())),
        Err(_) => Value::String(raw.into()),
    }
}

/// Sets `dotted.key = value` inside `root`, creating tables on the way.
pub fn apply_override(root: &mut Table, assignment: &str) -> Result<(), CliError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::config("--override", format!("expected key=value, got `{assignment}`")))?;
    let parts: Vec<&str> = key.trim().split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::config(key.trim(), "empty key segment"));
    }
    let mut table = root;
    for part in &parts[..parts.len() - 1] {
        let entry = table
            .entry(part.to_string())
            .or_insert_with(|| Value::Table(Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| CliError::config(key.trim(), format!("`{part}` is not a table")))?;
    }
    table.insert(parts[parts.len() - 1].to_string(), parse_value(raw.trim()));
    Ok(())
}

impl ExperimentConfig {
    /// Reads `path` (or starts from defaults), applies overrides in order and validates.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<(Self, Option<PathBuf>), CliError> {
        let mut table = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::config("--config", format!("{}: {e}", p.display())))?;
                text.parse::<Table>()
                    .map_err(|e| CliError::config("--config", e.to_string()))?
            }
            None => Table::new(),
        };
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let mut cfg: Self = Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::config("config", e.to_string()))?;
        let base = path.and_then(Path::parent).map(Path::to_path_buf);
        if let (Some(script), Some(base)) = (&cfg.protocol.script, &base) {
            if script.is_relative() {
                cfg.protocol.script = Some(base.join(script));
            }
        }
        cfg.validate()?;
        Ok((cfg, base))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.grid.points < 8 {
            return Err(CliError::config("grid.points", "must be at least 8"));
        }
        if !(self.grid.half_width > 0.0) {
            return Err(CliError::config("grid.half_width", "must be positive"));
        }
        for (field, v) in [("coupling.g1", self.coupling.g1), ("coupling.g2", self.coupling.g2)] {
            if !v.is_finite() {
                return Err(CliError::config(field, "must be finite"));
            }
        }
        for (field, ts) in [("time.times", &self.time.times), ("time.grid_times", &self.time.grid_times)] {
            if ts.is_empty() {
                return Err(CliError::config(field, "must not be empty"));
            }
            if ts.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
                return Err(CliError::config(field, "times must be finite and nonnegative"));
            }
            if ts.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(CliError::config(field, "times must be strictly increasing"));
            }
        }
        if !(self.time.sweep_time >= 0.0) {
            return Err(CliError::config("time.sweep_time", "must be nonnegative"));
        }
        if self.initial.widths.iter().any(|w| !(*w > 0.0)) {
            return Err(CliError::config("initial.widths", "widths must be positive"));
        }
        if self.states.count == 0 {
            return Err(CliError::config("states.count", "must be at least 1"));
        }
        if let Some(script) = &self.protocol.script {
            if !script.is_file() {
                return Err(CliError::config(
                    "protocol.script",
                    format!("{} does not exist", script.display()),
                ));
            }
        }
        Ok(())
    }
}
