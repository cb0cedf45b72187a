//! Simulation and closed-form analysis of a single-photon entanglement
//! concentration protocol (ECP) for two quantum-dot spins held in optical
//! microcavities.
//!
//! A partially entangled spin pair `α|↑↑⟩ + β|↓↓⟩` is concentrated by
//! scattering a single ancilla photon off one of the cavities, rotating its
//! polarization with a half-wave plate, routing it through a polarizing beam
//! splitter and post-selecting on which detector fires. Failed rounds leave a
//! recyclable pair, so the protocol repeats with exponentially sharpening
//! amplitudes.
//!
//! The crate keeps three mutually checking routes to every probability:
//!
//! * [`protocol`] — exact state-vector branch enumeration of the optical
//!   circuit, round by round;
//! * [`analytics`] — closed-form per-round success probabilities, ideal and
//!   leakage-degraded;
//! * [`protocol::monte_carlo`] — seeded Born-rule sampling of the same
//!   branch process.
//!
//! [`verify`] bundles the crate's invariant suites (unitarity, Born
//! completeness, norm monotonicity under loss, closed-form/simulation
//! agreement) behind a single entry point for the command-line `verify`
//! subcommand.

pub mod analytics;
pub mod optics;
pub mod protocol;
pub mod qdcavity;
pub mod statevec;
pub mod verify;

mod error;

pub use error::{Error, Result};

/// Re-export of the complex scalar used throughout the public API.
pub use num_complex::Complex64;
