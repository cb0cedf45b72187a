use thiserror::Error;

use crate::analytics::DegradationModel;
use crate::statevec::PolarizationBasis;

/// Crate-wide error type. All contract violations surface through here;
/// nothing panics on bad input.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("photon basis mismatch: expected {expected:?}, found {found:?}")]
    BasisMismatch {
        expected: PolarizationBasis,
        found: PolarizationBasis,
    },

    #[error("states live in incompatible factor spaces: {0}")]
    IncompatibleStates(&'static str),

    #[error("zero-norm state has no defined direction in Hilbert space")]
    ZeroNorm,

    #[error("state not normalized: squared norm {norm_sqr} outside tolerance")]
    NotNormalized { norm_sqr: f64 },

    #[error("scattering denominator vanishes for these cavity parameters")]
    SingularParameters,

    #[error("all scattering coefficients are zero; efficiency factors undefined")]
    DegenerateCoefficients,

    #[error("model {model:?} is not valid for {context}")]
    UnsupportedModel {
        model: DegradationModel,
        context: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
