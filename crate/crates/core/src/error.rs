use thiserror::Error;

/// Everything that can go wrong inside the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("frame does not span a Lagrangian subspace: {0}")]
    InvalidFrame(String),

    #[error("invalid symplectomorphism: {0}")]
    InvalidSymplectomorphism(String),

    #[error("Lagrangian is not transverse to the chart complement")]
    ChartDomainViolation,

    #[error("chart pair is not a Lagrangian decomposition")]
    InvalidChart,

    #[error("no transverse chart found on [{start}, {end}] after maximal refinement")]
    PartitionFailure { start: f64, end: f64 },

    #[error("path samples too coarse between t={start} and t={end} (principal angle {angle:.3} rad >= pi/4)")]
    CoarseSampling { start: f64, end: f64, angle: f64 },

    #[error("direct-sum split not applicable: {0}")]
    SplitInapplicable(String),

    #[error("degenerate metric at {0}")]
    DegenerateMetric(String),

    #[error("curve left the coordinate patch at t={t}")]
    PatchExit { t: f64 },

    #[error("integration failure: {0}")]
    IntegrationFailure(String),

    #[error("grid too coarse for finite differences: {0}")]
    ResolutionError(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("seed vector does not project onto the base field at t0 (mismatch {0:.3e})")]
    IncompatibleSeed(f64),

    #[error("horizontal lift stopped early at t={end}")]
    MaximalLiftShorter { end: f64 },

    #[error("invalid boundary data: {0}")]
    InvalidBoundaryData(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("invalid stationary data: {0}")]
    InvalidStationaryData(String),

    #[error("invalid Kaluza-Klein data: {0}")]
    InvalidKkData(String),

    #[error("submersion axiom violated: {0}")]
    InvalidSubmersion(String),

    #[error("expression error: {0}")]
    Expression(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("config parse error at line {line}, column {column}: {message}")]
    ConfigParse { line: usize, column: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
