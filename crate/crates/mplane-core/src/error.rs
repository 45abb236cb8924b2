//! Error type shared by every module.

use alloc::string::String;
use core::fmt;

/// Errors raised by constructors, integrators and identity checkers.
///
/// Gamma-function poles are *not* errors: they are values (see
/// [`crate::special::GammaValue`]). `Pole` below is only used when an
/// operation needs a finite normalizing constant and the constant poles.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Matrix dimensions invalid or above the desk-scale cap.
    BadDimensions(String),
    /// Entries not finite, or a frame/rotation failed its orthonormality tolerance.
    InvalidEntries(String),
    /// σ_min/σ_max below the rank threshold where full rank is required.
    RankDeficient,
    /// Triangular factorization met a non-positive pivot.
    NotPositiveDefinite,
    /// Bounded-cone integration over {a < s < b} with b − a not positive definite.
    EmptyRegion,
    /// Metadata declares the integrand divergent.
    NonIntegrable,
    /// Tolerance unreachable within the evaluation budget.
    BudgetExceeded { evals: u64 },
    /// Parameter outside the validity range of a formula.
    ParameterOutOfRange(String),
    /// Zeta-type integral requested outside Re α > m−1.
    OutOfRegularRegion,
    /// Normalized zeta at a complex α not covered by any implemented route.
    UnsupportedAlpha,
    /// α outside the two-sided strip m−1 < Re α < n−m+1.
    StripViolation,
    /// The operation needs a closed-form Fourier transform and the test
    /// function does not carry one.
    MissingFourierForm,
    /// The operation needs a closed-form heat smoothing W_t f.
    MissingHeatForm,
    /// Radon suite parameter outside the injectivity range k ≤ n−m.
    RangeViolation,
    /// Richardson extrapolation diverges: the step cannot be reduced further.
    StepUnderflow,
    /// A normalizing constant hit a gamma pole; carries the factor index.
    Pole { factor: usize },
    /// Finite-difference evaluation refused near the rank-deficient set.
    NearSingularSet,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::BadDimensions(s) => write!(f, "bad dimensions: {s}"),
            Error::InvalidEntries(s) => write!(f, "invalid entries: {s}"),
            Error::RankDeficient => write!(f, "matrix is rank deficient"),
            Error::NotPositiveDefinite => write!(f, "matrix is not positive definite"),
            Error::EmptyRegion => write!(f, "integration region {{a < s < b}} is empty"),
            Error::NonIntegrable => write!(f, "integrand declared non-integrable"),
            Error::BudgetExceeded { evals } => {
                write!(f, "tolerance unreachable within budget ({evals} evaluations)")
            }
            Error::ParameterOutOfRange(s) => write!(f, "parameter out of range: {s}"),
            Error::OutOfRegularRegion => write!(f, "zeta integral outside Re α > m−1"),
            Error::UnsupportedAlpha => write!(f, "α not covered by any implemented zeta route"),
            Error::StripViolation => write!(f, "α outside the strip (m−1, n−m+1)"),
            Error::MissingFourierForm => write!(f, "test function has no closed-form Fourier transform"),
            Error::MissingHeatForm => write!(f, "test function has no closed-form heat smoothing"),
            Error::RangeViolation => write!(f, "k outside the injectivity range k ≤ n−m"),
            Error::StepUnderflow => write!(f, "finite-difference extrapolation diverges"),
            Error::Pole { factor } => write!(f, "gamma pole in factor {factor}"),
            Error::NearSingularSet => {
                write!(f, "evaluation point too close to the rank-deficient set")
            }
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
