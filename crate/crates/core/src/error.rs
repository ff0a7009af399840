use thiserror::Error;

/// Failures raised by the numerical routines.
///
/// Variants that correspond to numerical guards (sampling density, branch
/// continuity) are reported by the CLI under their [`Error::guard_name`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("conjugacy violation: |zeta* - conj(zeta)| = {deviation:.3e} exceeds {tol:.1e}")]
    ConjugacyViolation { deviation: f64, tol: f64 },

    #[error("caustic: |b| = {b:.3e} is below the caustic threshold")]
    CausticSingular { b: f64 },

    #[error("degenerate orbit: the phase-space origin has no Ehrenfest time")]
    DegenerateOrbit,

    #[error("Fock truncation n_max = {n_max} leaves tail weight {tail:.3e}")]
    TruncationTooSmall { n_max: usize, tail: f64 },

    #[error("root search window contains no sign change and no accepted hit")]
    EmptyWindow,

    #[error("sampling too coarse: {zeros} zeros of b inside one step near tau = {tau:.6}")]
    SamplingTooCoarse { tau: f64, zeros: usize },

    #[error("phase jump of {jump:.3} rad near tau = {tau:.6} exceeds the pi/2 step limit")]
    PhaseJumpTooLarge { tau: f64, jump: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Short machine-readable identifier of the failure.
    pub fn guard_name(&self) -> &'static str {
        match self {
            Error::ConjugacyViolation { .. } => "ConjugacyViolation",
            Error::CausticSingular { .. } => "CausticSingular",
            Error::DegenerateOrbit => "DegenerateOrbit",
            Error::TruncationTooSmall { .. } => "TruncationTooSmall",
            Error::EmptyWindow => "EmptyWindow",
            Error::SamplingTooCoarse { .. } => "SamplingTooCoarse",
            Error::PhaseJumpTooLarge { .. } => "PhaseJumpTooLarge",
            Error::GridMismatch(_) => "GridMismatch",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }

    /// Whether the error is a numerical guard rather than bad user input.
    pub fn is_numerical_guard(&self) -> bool {
        !matches!(self, Error::InvalidInput(_) | Error::GridMismatch(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
