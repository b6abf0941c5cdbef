use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not unitary: max |C*C - I| = {defect:e}")]
    NotUnitary { defect: f64 },

    #[error("decay parameters must be positive (c1 = {c1}, eps = {eps})")]
    InvalidDecayParams { c1: f64, eps: f64 },

    #[error("coin at site {site} violates the decay bound: ||C(x) - C0|| = {norm:e} > {bound:e}")]
    DecayBoundViolated { site: i64, norm: f64, bound: f64 },

    #[error("invalid coin field spec: {0}")]
    InvalidFieldSpec(String),

    #[error("walk state has an empty window")]
    EmptyWindow,

    #[error("state is not normalized: squared norm = {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("band structure is degenerate: eigenvalue gap {gap:e} at k = {k}")]
    DegenerateBands { k: f64, gap: f64 },

    #[error("state window of {width} sites does not fit a momentum grid of {grid} points")]
    GridTooCoarse { width: usize, grid: usize },

    #[error("bound states were computed for field {found}, not {expected}")]
    FieldMismatch { expected: String, found: String },

    #[error("state window [{x_min}, {x_max}] lies outside the truncation window [-{half_width}, {half_width}]")]
    OutsideTruncation {
        x_min: i64,
        x_max: i64,
        half_width: usize,
    },

    #[error("truncated evolution is not unitary: max |M*M - I| = {defect:e}")]
    BoundaryNotUnitary { defect: f64 },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("numerical check failed: {0}")]
    NumericalCheck(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line runner.
    ///
    /// Invalid input of any kind maps to 2, failures of numerical filters and
    /// consistency checks to 3, and I/O problems to 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NotUnitary { .. }
            | Error::InvalidDecayParams { .. }
            | Error::DecayBoundViolated { .. }
            | Error::InvalidFieldSpec(_)
            | Error::EmptyWindow
            | Error::NotNormalized { .. }
            | Error::InvalidParameter(_)
            | Error::OutsideTruncation { .. }
            | Error::Config(_)
            | Error::Json(_) => 2,
            Error::DegenerateBands { .. }
            | Error::GridTooCoarse { .. }
            | Error::FieldMismatch { .. }
            | Error::BoundaryNotUnitary { .. }
            | Error::Eigensolver(_)
            | Error::NumericalCheck(_) => 3,
            Error::Io(_) | Error::Csv(_) => 1,
        }
    }
}
