//! Error types shared across the codec.

use thiserror::Error;

/// Errors produced by encoding, detection, and demodulation.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value violates a precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The message or code geometry exceeds what the chosen parameters can carry.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// The spread-spectrum module side is not one of the supported sizes.
    #[error("unsupported module side {0} (supported: 2, 3, 4)")]
    UnsupportedModule(usize),

    /// No symmetry-peak lattice could be extracted from the input.
    #[error("no lattice: {0}")]
    NoLattice(String),

    /// Line detection or perspective estimation failed.
    #[error("synchronization failure: {0}")]
    SyncFailure(String),

    /// The synchronized code could not be located or segmented into units.
    #[error("detection failure: {0}")]
    DetectionFailure(String),

    /// Two parameter hypotheses scored too close to call.
    #[error("ambiguous parameters: {0}")]
    AmbiguousParameters(String),

    /// A channel configuration is not physically realizable.
    #[error("invalid channel config: {0}")]
    InvalidConfig(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
