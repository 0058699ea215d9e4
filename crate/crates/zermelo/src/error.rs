use thiserror::Error;

pub type Result<T> = std::result::Result<T, GeomError>;

/// Errors raised by the geometry, verification and CLI layers.
#[derive(Debug, Error)]
pub enum GeomError {
    #[error("point {0:?} is outside the chart domain")]
    OutsideDomain(Vec<f64>),

    #[error("navigation speed ||W||_h = {speed:.6} >= 1 at {point:?}")]
    NavigationDomain { speed: f64, point: Vec<f64> },

    #[error("direction vector must be nonzero")]
    ZeroDirection,

    #[error("matrix is not positive definite (eigenvalue {0:.3e})")]
    NotPositiveDefinite(f64),

    #[error("singular linear system: {0}")]
    SingularMatrix(String),

    #[error("critical point: |df|_h = {0:.3e} is below tolerance")]
    CriticalPoint(f64),

    #[error("covector lies outside the forward dual cone (F* = {0:.3e})")]
    OutsideDualCone(f64),

    #[error("degenerate flag: transverse direction is parallel to the flagpole")]
    DegenerateFlag,

    #[error("immersion differential is rank deficient at parameter {0:?}")]
    RankDeficient(Vec<f64>),

    #[error("unsupported hypothesis: {0}")]
    UnsupportedHypothesis(String),

    #[error("level-set projection failed to converge after {0} iterations")]
    ProjectionDiverged(usize),

    #[error("level t = {level} looks critical: {excluded} of {total} projected points were rejected")]
    CriticalLevel {
        level: f64,
        excluded: usize,
        total: usize,
    },

    #[error("empty sample set: {0}")]
    EmptySample(String),

    #[error("internal consistency check failed: {0}")]
    ConsistencyCheck(String),

    #[error("expression error at column {column}: {message}")]
    Expr { column: usize, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl GeomError {
    pub fn expr(column: usize, message: impl Into<String>) -> Self {
        GeomError::Expr {
            column,
            message: message.into(),
        }
    }
}
