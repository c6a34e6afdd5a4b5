//! Fourier analysis of boolean functions over the hypercube `{-1,1}^n`.
//!
//! A boolean function is stored as a packed truth table of sign bits and
//! converted to the Walsh basis with a fast Walsh-Hadamard transform. On top
//! of the spectrum sit the spectral entropy, per-coordinate and total
//! influence, and the entropy/influence ratio together with a verdict for a
//! given constant `C`. The [`experiments`] module measures those quantities
//! over whole function families, exactly by exhaustive enumeration at small
//! arity and by seeded Monte Carlo sampling at larger arity.

pub mod experiments;
pub mod families;
pub mod measures;
pub mod spectrum;

pub use experiments::ExperimentRecord;
pub use families::FamilySpec;
pub use measures::FeiReport;
pub use spectrum::{Spectrum, TruthTable};

/// Default upper bound on the arity `n`. `2^24` coefficients is 128 MiB of
/// doubles; anything above is rejected instead of thrashing.
pub const DEFAULT_ARITY_CAP: u32 = 24;

/// Errors shared by every module of the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The requested arity or family size exceeds a configured limit.
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    /// An argument is outside its documented domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// A spectrum does not correspond to a ±1-valued function.
    #[error("not a boolean function: {0}")]
    NotBoolean(String),
    /// A spectrum violates Parseval beyond tolerance.
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),
    /// A textual function or family descriptor failed to parse.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_arity(n: u32, cap: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("arity must be at least 1".into()));
    }
    if n > cap {
        return Err(Error::Capacity(format!(
            "arity {n} exceeds the cap {cap} (override the cap to proceed)"
        )));
    }
    Ok(())
}
