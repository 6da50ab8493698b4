//! Error type shared by all network operations.

use thiserror::Error;

/// Errors raised by network algebra, circuit construction and optimization.
///
/// Singular-matrix variants carry the estimated condition number of the
/// offending matrix so that resonance-adjacent load sweeps can be diagnosed.
#[derive(Debug, Clone, Error)]
pub enum NetError {
    /// `Z + Z0*I` (or `I - S`) is numerically singular; the requested
    /// representation does not exist for this network.
    #[error("singular representation conversion (condition number {cond:.3e})")]
    SingularConversion { cond: f64 },

    /// The termination system `Z_SS + Phi` (or `I - S_SS*Gamma`) is singular.
    #[error("singular termination (condition number {cond:.3e})")]
    SingularTermination { cond: f64 },

    /// The cascade interface matrix `Z_SS + Z^LC_SS` is singular.
    #[error("singular cascade interface (condition number {cond:.3e})")]
    SingularCascade { cond: f64 },

    /// The node admittance matrix of a load topology is singular.
    #[error("singular node admittance matrix")]
    SingularNodal,

    /// A load impedance value is outside the representable range
    /// (e.g. `theta = -Z0` makes the reflection coefficient infinite).
    #[error("invalid load impedance: {reason}")]
    InvalidLoad { reason: String },

    /// A port index set refers to ports outside the network.
    #[error("port index {index} out of range for {nports}-port network")]
    IndexOutOfRange { index: usize, nports: usize },

    /// A partition does not match the network or operation it is used with.
    #[error("partition mismatch: {reason}")]
    PartitionMismatch { reason: String },

    /// A wiring skeleton is structurally invalid.
    #[error("invalid skeleton: {reason}")]
    InvalidSkeleton { reason: String },

    /// Exhaustive search space exceeds the configured cap.
    #[error("search space of {size} candidates exceeds cap of {cap}")]
    SearchSpaceTooLarge { size: u128, cap: u64 },

    /// A configuration value is inconsistent or out of range.
    #[error("invalid configuration: {reason}")]
    InvalidConfig { reason: String },

    /// Matrix or vector dimensions do not agree.
    #[error("dimension mismatch: {reason}")]
    DimensionMismatch { reason: String },

    /// A matrix contains NaN or infinite entries.
    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize },
}

pub type Result<T> = std::result::Result<T, NetError>;

impl NetError {
    /// True for the singular-matrix family that optimizers score as
    /// negative infinity instead of aborting a sweep.
    pub fn is_singular(&self) -> bool {
        matches!(
            self,
            NetError::SingularConversion { .. }
                | NetError::SingularTermination { .. }
                | NetError::SingularCascade { .. }
                | NetError::SingularNodal
        )
    }
}
