//! Crate-wide error type. Variants map to the failure modes the CLI must
//! distinguish: invalid configuration (exit 2) vs simulation divergence
//! (exit 3).

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Layout geometry or role assignment is inconsistent (overlapping
    /// magnets, out-of-range input index, empty array, ...).
    #[error("invalid layout: {0}")]
    InvalidLayout(String),

    /// A config field has an invalid value. Carries the field name so the
    /// CLI can print a field-level diagnostic.
    #[error("invalid value for `{field}`: {reason}")]
    InvalidField { field: String, reason: String },

    /// Failed to parse a structured input file (layout, symbols, model).
    #[error("parse error in {path}: {detail}")]
    Parse { path: String, detail: String },

    /// Magnetization left the unit sphere or went non-finite during
    /// integration; reported with the magnet index and simulation time.
    #[error("simulation diverged at magnet {magnet} (t = {time_s:.3e} s): {detail}")]
    Diverged { magnet: usize, time_s: f64, detail: String },

    /// Drive calibration scanned its whole grid without reaching the
    /// write target on both symbols.
    #[error(
        "drive calibration failed: no (strength, duration) on the grid steered \
         every input to signed m_z >= {target} at pulse completion for both \
         symbols (best {best:.4})"
    )]
    CalibrationFailed { target: f64, best: f64 },

    /// The ridge normal matrix is singular; with lambda = 0 this is a
    /// rank-deficient feature matrix.
    #[error("ridge system is singular (lambda = {lambda:.3e}); regularize with lambda > 0")]
    RankDeficient { lambda: f64 },

    /// Feature/target/index dimensions disagree.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid_field(field: &str, reason: impl Into<String>) -> Self {
        Error::InvalidField { field: field.to_string(), reason: reason.into() }
    }
}
