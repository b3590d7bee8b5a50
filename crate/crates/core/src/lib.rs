//! Discrete-time Hadamard walks on the N-cycle with decoherence on the coin.
//!
//! Two independent routes compute the walker's position distribution:
//!
//! - [`evolution::evolve_direct`] iterates the Kraus-decohered density matrix
//!   on the full `2N`-dimensional walker⊗coin space.
//! - [`evolution::distribution_fourier`] works in momentum space, where each
//!   pair of momenta `(k, k')` contributes through a 4×4 superoperator
//!   ([`fourier::SuperOp`]) acting on Pauli coordinates of the coin.
//!
//! On top of these sit the spectral classification of the superoperators
//! ([`spectral`]) and the limit/mixing-time analysis ([`analysis`]).
//! [`verify`] bundles the whole battery of numerical checks into a
//! deterministic report.

pub mod analysis;
pub mod coin;
pub mod config;
pub mod error;
pub mod evolution;
pub mod fourier;
pub mod kraus;
pub mod linalg;
pub mod pauli;
pub mod spectral;
pub mod verify;

pub use num_complex::Complex64 as C64;

pub use analysis::{LimitKind, LimitSpec, MixingReport, MixingTarget};
pub use coin::CoinMatrix;
pub use config::{CoinState, WalkConfig};
pub use error::{Result, WalkError};
pub use evolution::{DensityOperator, DistributionKind, FourierWalk, PositionDistribution};
pub use fourier::SuperOp;
pub use kraus::KrausFamily;
pub use pauli::PauliVector;
pub use spectral::{PairClass, Quartic, SpectralGap, SpectrumReport};
