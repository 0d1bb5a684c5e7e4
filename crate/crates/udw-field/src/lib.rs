//! Measurement toolkit for a real scalar quantum field probed by two-level
//! detectors.
//!
//! The crate is organized around three layers:
//!
//! * geometry and coupling profiles ([`spacetime`], [`profiles`],
//!   [`detector`]),
//! * the perturbative measurement machinery: Kraus kernels and POVM
//!   expectations ([`perturbation`]), selective/non-selective n-point update
//!   rules ([`update`]) and causality diagnostics ([`causality`]) evaluated
//!   against Gaussian field states ([`fieldstate`]),
//! * an exact truncated-Fock reference backend ([`oracle`]) plus end-to-end
//!   multi-detector scenarios ([`scenarios`]) used to validate every
//!   perturbative formula.
//!
//! All quantities are in natural units (c = ħ = 1).

pub mod causality;
pub mod detector;
pub mod fieldstate;
pub mod kernels;
pub mod oracle;
pub mod perturbation;
pub mod profiles;
pub mod quad;
pub mod scenarios;
pub mod series;
pub mod spacetime;
pub mod update;

pub use num_complex::Complex64 as C64;

/// Errors surfaced by the library. Variants map onto the failure modes of the
/// individual modules; the CLI translates them into exit codes.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),
    #[error("delta profiles cannot be evaluated pointwise; they are integration-only symbols")]
    DeltaEvaluation,
    #[error("perturbative validity violated: {0}")]
    PerturbativeValidity(String),
    #[error("outcome has vanishing probability: {0}")]
    ZeroProbabilityOutcome(String),
    #[error("time integration failed: {0}")]
    Stiffness(String),
    #[error("geometry violation: {0}")]
    GeometryViolation(String),
    #[error("configuration error: {0}")]
    InvalidConfiguration(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Imaginary unit as a `Complex64`.
pub const IM: C64 = C64::new(0.0, 1.0);

/// Shorthand for a real number promoted to `Complex64`.
#[inline]
pub fn cr(x: f64) -> C64 {
    C64::new(x, 0.0)
}
