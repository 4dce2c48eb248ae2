use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("antidot confinement (lambda1 = 0, lambda2 > 0) has no finite potential minimum in flat space")]
    FlatAntidot,

    #[error("operation requires a finite sphere radius")]
    RequiresSphere,

    #[error("operation requires the flat (infinite radius) geometry")]
    RequiresFlat,

    #[error("{what} = {value} is outside the allowed range {range}")]
    OutOfRange {
        what: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("hybrid frequency omega_m vanishes for m = {m}; the state is degenerate")]
    DegenerateFrequency { m: i32 },

    #[error("effective radius undefined for m = {m}: M = 0")]
    UndefinedEffectiveRadius { m: i32 },

    #[error("hypergeometric series with c' = {c} divides by zero before truncation at degree {n}")]
    ForbiddenHypergeometric { n: u32, c: f64 },

    #[error("radial profile is not normalizable (endpoint exponent {exponent} <= -1/2)")]
    NonNormalizable { exponent: f64 },

    #[error("states with different angular momenta ({m1} vs {m2}) are orthogonal by the angular factor")]
    MixedAngularMomentum { m1: i32, m2: i32 },

    #[error("ensemble needs {required} states but the spectrum holds only {available} (short by {})", required - available)]
    InsufficientStates { required: usize, available: usize },

    #[error("state window too small: occupation at the window edge is {tail:.3e}; {hint}")]
    WindowTooSmall { tail: f64, hint: String },

    #[error("automatic angular-momentum window failed to converge within |m| <= {limit}")]
    WindowDidNotConverge { limit: i32 },

    #[error("requested {requested} eigenvalues but the matrix has dimension {dimension}")]
    TooManyEigenvalues { requested: usize, dimension: usize },

    #[error("grid must have an odd number of points >= {min}, got {points}")]
    InvalidGrid { points: usize, min: usize },

    #[error("mismatched eigenvalue counts: {coarse} vs {fine}")]
    MismatchedCounts { coarse: usize, fine: usize },

    #[error("non-finite evaluation while {context}")]
    NonFinite { context: &'static str },
}

pub type Result<T> = std::result::Result<T, Error>;
