use core::fmt;

/// Unified error type for the simulation crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A scalar parameter is outside its mathematical domain.
    Domain(&'static str),
    /// Matrix/vector dimensions do not agree.
    DimMismatch,
    /// A mode index is out of range or a mode list is invalid.
    IndexError,
    /// Two photons were declared in the same input mode.
    DuplicateInputMode,
    /// Inputs passed to an operation do not match the structure it was built from.
    InconsistentInputs,
    /// A detection pattern is inconsistent with the selected component.
    PatternMismatch(&'static str),
    /// A conditioning or normalization amplitude vanished.
    ZeroNorm,
    /// Adaptive quadrature failed to reach the requested tolerance.
    QuadratureNotConverged,
    /// A brute-force tensor would exceed the configured size cap.
    SizeLimit,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(what) => write!(f, "parameter out of domain: {what}"),
            Error::DimMismatch => write!(f, "dimension mismatch"),
            Error::IndexError => write!(f, "mode index out of range"),
            Error::DuplicateInputMode => write!(f, "duplicate input mode"),
            Error::InconsistentInputs => write!(f, "inputs inconsistent with structure"),
            Error::PatternMismatch(what) => write!(f, "detection pattern mismatch: {what}"),
            Error::ZeroNorm => write!(f, "zero-norm state (conditioning amplitude vanishes)"),
            Error::QuadratureNotConverged => write!(f, "adaptive quadrature did not converge"),
            Error::SizeLimit => write!(f, "brute-force tensor exceeds size limit"),
        }
    }
}

impl core::error::Error for Error {}
