use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter combination violates a documented precondition.
    #[error("invalid parameters: {0}")]
    Invalid(String),

    /// The alternating binomial sums behind every closed form lose roughly
    /// one bit of precision per user; populations past the cap are rejected
    /// instead of returning silently degraded numbers.
    #[error("population {population} exceeds the supported maximum of {cap}")]
    PopulationTooLarge { population: u32, cap: u32 },

    /// A closed-form summand evaluated to a non-finite value. The indices
    /// identify the offending term of the double sum.
    #[error("non-finite summand at p={p}, l={l}: {value}")]
    NonFiniteSummand { p: u32, l: u32, value: f64 },

    /// A closed form strayed outside [0, 1] by more than the asserted
    /// tolerance window, which points at a cancellation bug rather than
    /// ordinary rounding. The raw value is preserved for diagnosis.
    #[error("closed form produced {value:e}, outside [-{tol:e}, 1+{tol:e}]")]
    OutOfUnitRange { value: f64, tol: f64 },

    /// Division by a vanishing channel gain.
    #[error("strong channel gain is zero; the power ratio is undefined")]
    ZeroStrongGain,

    /// A decay-exponent fit was requested on data it cannot be run on.
    #[error("cannot fit a decay exponent: {0}")]
    FitDomain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
