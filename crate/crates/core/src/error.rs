use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("boundary mass {mass:.3e} exceeds limit {limit:.1e}")]
    BoundaryMass { mass: f64, limit: f64 },
    #[error("packet width must be positive, got {0}")]
    NonPositiveWidth(f64),
    #[error("field not normalized: integral {0:.12}")]
    NotNormalized(f64),
    #[error("shape mismatch: expected {expected} values, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("hbar must be 1 in dimensionless units, got {0}")]
    InvalidHbar(f64),
    #[error("masked (node) region carries mass {0:.3e}")]
    NodeDominated(f64),
    #[error("result leaves the supported observable family: {0}")]
    OutsideFamily(String),
    #[error("quantum observable touches the mediator sector: {0}")]
    SectorMixing(String),
    #[error("classical observable depends on quantum coordinate `{0}`")]
    QuantumCoordinate(String),
    #[error("observable parse error: {0}")]
    Parse(String),
    #[error("time step {dt:.3e} exceeds stability bound {bound:.3e}")]
    StepTooLarge { dt: f64, bound: f64 },
    #[error("invalid interaction parameters: {0}")]
    InvalidParams(String),
    #[error("expected a {expected}-tagged state")]
    WrongTag { expected: &'static str },
    #[error("entanglement quantities are refused for classically tagged data")]
    TagRefusal,
    #[error("variance {variance} violates the uncertainty bound {bound}")]
    UncertaintyViolation { variance: f64, bound: f64 },
    #[error("covariance is not admissible: {0}")]
    Inadmissible(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("covariance is singular")]
    SingularCovariance,
    #[error("branch states are not orthogonal: tr(rho0 rho1) = {0:.3e}")]
    NotOrthogonal(f64),
    #[error("local fix does not map rho1 onto rho0 (deviation {0:.3e})")]
    FixDoesNotMap(f64),
    #[error("malformed protocol script: {0}")]
    MalformedScript(String),
    #[error("snapshot format error: {0}")]
    Snapshot(String),
}
