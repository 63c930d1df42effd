//! Simulation and analysis library for a two-chip hyperentanglement
//! distribution and purification experiment.
//!
//! Photon pairs carry entanglement in two degrees of freedom at once: a
//! spatial-mode qubit and a polarization qubit, merged into four path modes
//! per photon on chip. The crate models the full pipeline: state preparation
//! ([`qstate`]), reconfigurable interferometer circuits ([`circuit`]),
//! time-distributed bit-flip and phase-flip noise ([`noise`]), purification by
//! post-selection ([`purify`]), tomographic reconstruction and CHSH analysis
//! ([`analysis`]), Monte-Carlo coincidence counting ([`counting`]), and a
//! phase-locked-loop twin for the stabilized interferometer ([`pll`]).

pub mod analysis;
pub mod circuit;
pub mod counting;
pub mod error;
pub mod linalg;
pub mod noise;
pub mod pll;
pub mod purify;
pub mod qstate;

pub use error::{Error, Result};

/// Library version, embedded in emitted reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
