//! Linear-optical elements downstream of the cavity: the HWP₄₅ basis change,
//! polarizing-beam-splitter routing and the four single-photon detectors.
//!
//! The wave plate maps `|H⟩ = (|R⟩+|L⟩)/√2` and `|V⟩ = (|R⟩−|L⟩)/√2` on both
//! output paths alike; each PBS then transmits `|H⟩` and reflects `|V⟩`, so
//! every (direction, polarization) pair lands on exactly one detector.

use num_complex::Complex64;
use serde::Serialize;

use crate::statevec::{
    project_photon, Direction, Polarization, PolarizationBasis, PureState, StateKind,
};
use crate::{Error, Result};

/// Detector identity. `D1`/`D2` sit on the upward path, `D3`/`D4` on the
/// downward one; `Loss` absorbs the norm deficit of non-ideal scattering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DetectorId {
    D1,
    D2,
    D3,
    D4,
    Loss,
}

impl DetectorId {
    /// The (direction, polarization) pair this detector monitors.
    pub fn port(self) -> Option<(Direction, Polarization)> {
        match self {
            DetectorId::D1 => Some((Direction::Up, Polarization::H)),
            DetectorId::D2 => Some((Direction::Up, Polarization::V)),
            DetectorId::D3 => Some((Direction::Down, Polarization::H)),
            DetectorId::D4 => Some((Direction::Down, Polarization::V)),
            DetectorId::Loss => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            DetectorId::D1 => "D1",
            DetectorId::D2 => "D2",
            DetectorId::D3 => "D3",
            DetectorId::D4 => "D4",
            DetectorId::Loss => "loss",
        }
    }
}

const FOUR_DETECTORS: [DetectorId; 4] = [
    DetectorId::D1,
    DetectorId::D2,
    DetectorId::D3,
    DetectorId::D4,
];

/// One detection branch: the detector, its Born probability, and the
/// renormalized conditional spin state (`None` for zero-probability branches
/// and for `Loss`).
#[derive(Debug, Clone)]
pub struct DetectionBranch {
    pub detector: DetectorId,
    pub probability: f64,
    pub spins: Option<PureState>,
}

fn hadamard_photon_blocks(amps: &[Complex64], block: usize) -> Vec<Complex64> {
    // index layout keeps the polarization bit highest, so amplitude pairs sit
    // `block` apart: (i, i + block) for i < block
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
    for i in 0..block {
        let first = amps[i];
        let second = amps[i + block];
        out[i] = (first + second) * inv_sqrt2;
        out[i + block] = (first - second) * inv_sqrt2;
    }
    out
}

/// Pass the photon factor through the HWP₄₅, re-expressing it in the linear
/// basis: `a_H = (a_R + a_L)/√2`, `a_V = (a_R − a_L)/√2` per
/// (direction, spins) block. Norm-preserving; errors if the photon is
/// already in the linear basis.
pub fn hwp45(s: &PureState) -> Result<PureState> {
    match s.kind() {
        StateKind::Photon {
            basis: PolarizationBasis::Circular,
            dir,
        } => {
            let amps = hadamard_photon_blocks(s.amplitudes(), 1);
            Ok(PureState::from_parts(
                amps,
                StateKind::Photon {
                    basis: PolarizationBasis::Linear,
                    dir,
                },
            ))
        }
        StateKind::System {
            basis: PolarizationBasis::Circular,
        } => {
            let amps = hadamard_photon_blocks(s.amplitudes(), 8);
            Ok(PureState::from_parts(
                amps,
                StateKind::System {
                    basis: PolarizationBasis::Linear,
                },
            ))
        }
        StateKind::Photon {
            basis: PolarizationBasis::Linear,
            ..
        }
        | StateKind::System {
            basis: PolarizationBasis::Linear,
        } => Err(Error::BasisMismatch {
            expected: PolarizationBasis::Circular,
            found: PolarizationBasis::Linear,
        }),
        StateKind::Spins => Err(Error::DimensionMismatch {
            expected: 16,
            found: 4,
        }),
    }
}

/// Inverse traversal of the wave plate, mapping the linear basis back to the
/// circular one. `hwp45_inverse(hwp45(s)) = s`.
pub fn hwp45_inverse(s: &PureState) -> Result<PureState> {
    match s.kind() {
        StateKind::Photon {
            basis: PolarizationBasis::Linear,
            dir,
        } => {
            let amps = hadamard_photon_blocks(s.amplitudes(), 1);
            Ok(PureState::from_parts(
                amps,
                StateKind::Photon {
                    basis: PolarizationBasis::Circular,
                    dir,
                },
            ))
        }
        StateKind::System {
            basis: PolarizationBasis::Linear,
        } => {
            let amps = hadamard_photon_blocks(s.amplitudes(), 8);
            Ok(PureState::from_parts(
                amps,
                StateKind::System {
                    basis: PolarizationBasis::Circular,
                },
            ))
        }
        StateKind::Photon {
            basis: PolarizationBasis::Circular,
            ..
        }
        | StateKind::System {
            basis: PolarizationBasis::Circular,
        } => Err(Error::BasisMismatch {
            expected: PolarizationBasis::Linear,
            found: PolarizationBasis::Circular,
        }),
        StateKind::Spins => Err(Error::DimensionMismatch {
            expected: 16,
            found: 4,
        }),
    }
}

/// Route a linear-basis system state through the beam splitters onto the
/// four detectors.
///
/// Detector probabilities sum to the state's squared norm; the trailing
/// `Loss` entry carries the deficit `1 − ‖s‖²` with no spin state. Zero
/// branches are reported with probability 0 rather than omitted.
pub fn route_and_detect(s: &PureState) -> Result<Vec<DetectionBranch>> {
    match s.kind() {
        StateKind::System {
            basis: PolarizationBasis::Linear,
        } => {}
        StateKind::System { basis } => {
            return Err(Error::BasisMismatch {
                expected: PolarizationBasis::Linear,
                found: basis,
            });
        }
        other => {
            return Err(Error::DimensionMismatch {
                expected: 16,
                found: other.dim(),
            });
        }
    }

    let mut branches = Vec::with_capacity(5);
    for detector in FOUR_DETECTORS {
        let (dir, pol) = detector.port().expect("real detector");
        let (probability, spins) = project_photon(s, pol, dir)?;
        branches.push(DetectionBranch {
            detector,
            probability,
            spins,
        });
    }
    let detected: f64 = branches.iter().map(|b| b.probability).sum();
    branches.push(DetectionBranch {
        detector: DetectorId::Loss,
        probability: (1.0 - detected).max(0.0),
        spins: None,
    });
    Ok(branches)
}
