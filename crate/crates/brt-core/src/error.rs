use thiserror::Error;

/// Errors produced by the forward model, extension, filtering, and inversion
/// routines.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum BrtError {
    #[error("angle must be finite, got {0}")]
    NonFiniteAngle(f64),

    #[error("scatter directions must satisfy |theta_i . theta_j| < 1 (got {0})")]
    ParallelDirections(f64),

    #[error("phantom has no ellipses")]
    EmptyPhantom,

    #[error("cosine of scatter angle must lie in [-1, 1], got {0}")]
    CosineOutOfRange(f64),

    #[error("beam energy must be positive, got {0}")]
    NonPositiveEnergy(f64),

    #[error("scatter density must be positive at evaluated arguments, got {0}")]
    NonPositiveDensity(f64),

    #[error(
        "differential measurement requires theta_i.theta_k = theta_j.theta_k \
         (got {lhs} vs {rhs})"
    )]
    AngleCondition { lhs: f64, rhs: f64 },

    #[error("spectrum index ({n}, {m}) out of range for {ny}x{nt} grid")]
    IndexOutOfRange { n: usize, m: usize, ny: usize, nt: usize },

    #[error("extension requires lambda > 0, got {0}; flip the data first")]
    NonPositiveLambda(f64),

    #[error("xi_j = 0 makes theta_j = -theta_i, which the transform excludes")]
    DegenerateScatterAngle,

    #[error(
        "data not truncated outside support: corner sample {value} exceeds \
         tolerance {tol}"
    )]
    DataNotTruncated { value: f64, tol: f64 },

    #[error("system function denominator d(w) = 0 at w = ({0}, {1})")]
    SingularFrequency(f64, f64),

    #[error("polar angle phi = {0} is singular for the given scatter angles")]
    SingularPolarAngle(f64),

    #[error(
        "shift lengths too small to unfold the filtered image: need \
         a_i > {need_ai} and a_j > {need_aj}, got ({ai}, {aj})"
    )]
    ShiftTooSmall { need_ai: f64, need_aj: f64, ai: f64, aj: f64 },

    #[error("grids do not match: {0}")]
    GridMismatch(String),

    #[error(
        "shifted field has imaginary residue {residue:.3e} relative to norm; \
         input is not well represented on this lattice"
    )]
    ImaginaryResidue { residue: f64 },

    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, BrtError>;
