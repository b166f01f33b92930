use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("grid size must be even and at least 8, got {0}")]
    InvalidGridSize(usize),

    #[error("sample count {got} does not match grid size {expected}")]
    SampleCountMismatch { expected: usize, got: usize },

    #[error("profiles live on different grids ({0} vs {1} nodes)")]
    GridMismatch(usize, usize),

    #[error("multiplier symbol is not finite at wavenumber {k} where the input coefficient is nonzero")]
    NonFiniteSymbol { k: i64 },

    #[error("profile mean {mean:.3e} exceeds the zero-mean tolerance {tol:.3e}")]
    NonzeroMean { mean: f64, tol: f64 },

    #[error("wave speed must be positive, got {0}")]
    NonpositiveSpeed(f64),

    #[error("invalid nonlinearity: {0}")]
    InvalidNonlinearity(String),

    #[error("dispersion relation is undefined at wavenumber 0")]
    ZeroWavenumber,

    #[error("no positive bifurcation speed for k = {k} at beta = {beta} (requires 1/k^2 - beta*k^2 > 0)")]
    NoBifurcationSpeed { k: usize, beta: f64 },

    #[error("amplitude parameter must be nonzero")]
    ZeroAmplitude,

    #[error("bordered Jacobian is singular")]
    SingularJacobian,

    #[error("Newton iteration did not converge after {iters} steps (residual {residual:.3e}, tol {tol:.3e})")]
    NewtonDiverged { iters: usize, residual: f64, tol: f64 },

    #[error("Newton iterate left the zero-mean even subspace or became non-finite")]
    CorruptIterate,

    #[error("continuation failed at eps = {eps}: {source}")]
    ContinuationFailed {
        eps: f64,
        #[source]
        source: Box<CoreError>,
    },

    #[error("operation requires beta > 0, got {0}")]
    RequiresPositiveBeta(f64),

    #[error("operation requires beta = 0, got {0}")]
    RequiresZeroBeta(f64),

    #[error("time step {dt:.3e} exceeds the advective stability ceiling {ceiling:.3e}")]
    TimeStepTooLarge { dt: f64, ceiling: f64 },

    #[error("{context}: needed at least {needed} usable points, found {found}")]
    TooFewPoints {
        context: &'static str,
        needed: usize,
        found: usize,
    },

    #[error("profile is identically zero")]
    TrivialProfile,

    #[error("{0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
