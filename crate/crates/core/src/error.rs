//! Error type shared by all modules.

use thiserror::Error;

/// Library-wide error enum. Domain errors (bad parameters, violated frame
/// condition) are kept separate from I/O and format errors so callers can
/// map them to distinct exit codes.
#[derive(Debug, Error)]
pub enum GaborError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("signals live on different grids")]
    GridMismatch,

    #[error("window support [{start}, {end}] exceeds the grid span [{lo}, {hi}]")]
    SupportOutsideGrid {
        start: f64,
        end: f64,
        lo: f64,
        hi: f64,
    },

    #[error("window has zero norm")]
    ZeroWindow,

    #[error("basis size {m} exceeds grid size {n}")]
    BasisTooLarge { m: usize, n: usize },

    #[error("grid span {span:.6} too small for {m} Hermite modes (needs at least {required:.6})")]
    SpanTooSmall { span: f64, required: f64, m: usize },

    #[error("rotation angle {theta} too close to a multiple of pi for kernel quadrature (|sin| = {sin_abs:.3e})")]
    SingularAngle { theta: f64, sin_abs: f64 },

    #[error("frame condition violated: periodization minimum {min:.3e} is not positive (threshold {threshold:.1e})")]
    FrameConditionViolated { min: f64, threshold: f64 },

    #[error("window is not compactly supported inside the grid")]
    SupportTouchesEdge,

    #[error("step {step} is not an integer multiple of the grid spacing {dt}")]
    StepNotAligned { step: f64, dt: f64 },

    #[error("lattice is empty")]
    EmptyLattice,

    #[error("coverage region is empty")]
    EmptyCoverage,

    #[error("frame has no lattice spec; compact synthesis needs tau and T")]
    MissingLatticeSpec,

    #[error("coefficient set does not match the frame lattice")]
    CoefficientMismatch,

    #[error("eigensolver did not converge")]
    EigenFailed,

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, GaborError>;
