use thiserror::Error;

/// Failure modes shared by every module in the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Result not representable, with a hint on how to get one.
    #[error("range error: {0}")]
    Range(String),

    /// No sign change on the supplied interval.
    #[error("no bracket: f({lo}) = {f_lo:e} and f({hi}) = {f_hi:e} have the same sign")]
    NoBracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    /// Iteration budget exhausted before meeting the tolerance; carries the
    /// best estimate so callers can decide whether it is still usable.
    #[error("accuracy not reached: best estimate {best:e}, residual {residual:e}, target {target:e}")]
    Accuracy { best: f64, residual: f64, target: f64 },

    /// Requested state or fit target cannot be realized inside the validated
    /// parameter envelope.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// Method variant not available for the given arguments.
    #[error("unsupported method: {0}")]
    UnsupportedMethod(String),
}

pub type Result<T> = std::result::Result<T, Error>;
