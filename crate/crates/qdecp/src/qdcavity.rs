//! Quantum-dot–microcavity physics.
//!
//! A circularly polarized photon entering the cavity either couples to the
//! trion transition ("hot" cavity) or sees an empty cavity ("cold"). Which
//! case applies is fixed by the photon's polarization and direction together
//! with the dot's spin: reflection flips both polarization and direction,
//! transmission preserves both, and the spin is never touched (weak
//! excitation). In the ideal limit a hot combination reflects with unit
//! amplitude and a cold one transmits with a π phase; at finite coupling and
//! leakage the amplitudes come from the cavity's steady-state response.

use num_complex::Complex64;
use serde::Serialize;

use crate::analytics::DegradationModel;
use crate::statevec::{BasisState, Direction, Operator, Polarization, PolarizationBasis, Spin};
use crate::{Error, Result};

/// Cavity field decay rate into the input/output modes. All other rates and
/// detunings are expressed in these units, so it never varies.
pub const KAPPA: f64 = 1.0;

/// Physical rates and detunings of the dot–cavity system, in units of κ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CavityParams {
    /// Side-leakage rate κ_s.
    pub kappa_s: f64,
    /// Trion dipole decay rate γ.
    pub gamma: f64,
    /// Dot–cavity coupling constant g.
    pub g: f64,
    /// Cavity detuning ω_c − ω from the probe.
    pub delta_c: f64,
    /// Trion detuning ω_X − ω from the probe.
    pub delta_x: f64,
}

impl CavityParams {
    pub fn new(
        kappa_s: f64,
        gamma: f64,
        g: f64,
        delta_c: f64,
        delta_x: f64,
    ) -> Result<CavityParams> {
        for (name, v) in [("kappa_s", kappa_s), ("gamma", gamma), ("g", g)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be a finite non-negative rate, got {v}"
                )));
            }
        }
        for (name, v) in [("delta_c", delta_c), ("delta_x", delta_x)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite, got {v}"
                )));
            }
        }
        Ok(CavityParams {
            kappa_s,
            gamma,
            g,
            delta_c,
            delta_x,
        })
    }

    /// Parameters with cavity and trion both resonant with the probe.
    pub fn resonant(kappa_s: f64, gamma: f64, g: f64) -> Result<CavityParams> {
        CavityParams::new(kappa_s, gamma, g, 0.0, 0.0)
    }

    /// Resonant with a common detuning applied to cavity and trion alike.
    pub fn detuned(kappa_s: f64, gamma: f64, g: f64, delta: f64) -> Result<CavityParams> {
        CavityParams::new(kappa_s, gamma, g, delta, delta)
    }
}

/// Frequency-dependent scattering amplitudes of hot (`r`, `t`) and cold
/// (`r0`, `t0`) cavities. `r = 1 + t` and `r0 = 1 + t0` hold identically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringCoeffs {
    pub t: Complex64,
    pub r: Complex64,
    pub t0: Complex64,
    pub r0: Complex64,
}

impl ScatteringCoeffs {
    /// Lossless limit: perfect hot reflection, perfect cold transmission
    /// with a π phase. Feeding these to [`nonideal_scattering`] reproduces
    /// [`ideal_interaction`] exactly.
    pub fn ideal() -> ScatteringCoeffs {
        ScatteringCoeffs {
            t: Complex64::new(0.0, 0.0),
            r: Complex64::new(1.0, 0.0),
            t0: Complex64::new(-1.0, 0.0),
            r0: Complex64::new(0.0, 0.0),
        }
    }
}

/// Steady-state reflection/transmission amplitudes for the given cavity.
///
/// The hot transmission is
/// `t = −κ(iδ_x + γ/2) / [(iδ_x + γ/2)(iδ_c + κ + κ_s/2) + g²]`
/// with `r = 1 + t`; the cold coefficients are the same expressions at
/// `g = 0`.
pub fn scattering_coeffs(p: &CavityParams) -> Result<ScatteringCoeffs> {
    let x = Complex64::new(p.gamma / 2.0, p.delta_x);
    let y = Complex64::new(KAPPA + p.kappa_s / 2.0, p.delta_c);
    let one = Complex64::new(1.0, 0.0);

    let hot_den = x * y + p.g * p.g;
    let cold_den = y;
    if hot_den.norm() <= f64::MIN_POSITIVE || cold_den.norm() <= f64::MIN_POSITIVE {
        return Err(Error::SingularParameters);
    }

    let t = -KAPPA * x / hot_den;
    let t0 = -KAPPA / cold_den;
    Ok(ScatteringCoeffs {
        t,
        r: one + t,
        t0,
        r0: one + t0,
    })
}

/// True when the photon couples to the trion transition ("hot" cavity).
///
/// The hot combinations are exactly those with even parity of
/// (polarization, direction, spin-1) indices: `(R,↑,↑)`, `(L,↓,↑)`,
/// `(R,↓,↓)`, `(L,↑,↓)`. The second spin is a spectator.
fn is_hot(pol: Polarization, dir: Direction, s1: Spin) -> bool {
    (pol.index() + dir.index() + s1.index()) & 1 == 0
}

fn flipped(b: BasisState) -> BasisState {
    let pol = match b.pol {
        Polarization::R => Polarization::L,
        Polarization::L => Polarization::R,
        Polarization::H => Polarization::V,
        Polarization::V => Polarization::H,
    };
    BasisState {
        pol,
        dir: b.dir.flipped(),
        ..b
    }
}

/// The lossless photon–spin interaction: a signed permutation on the
/// 16-dimensional space. Hot combinations reflect (polarization and
/// direction flipped, sign +1); cold combinations pick up a π phase in
/// place. Applying it twice is the identity.
pub fn ideal_interaction() -> Operator {
    let mut op = Operator::from_fn(16, |_, _| Complex64::new(0.0, 0.0));
    for col in 0..16 {
        let b = BasisState::from_index(col, PolarizationBasis::Circular);
        if is_hot(b.pol, b.dir, b.s1) {
            op.set(flipped(b).index(), col, Complex64::new(1.0, 0.0));
        } else {
            op.set(col, col, Complex64::new(-1.0, 0.0));
        }
    }
    op
}

/// The finite-coupling, leaky-cavity scattering map.
///
/// Each hot basis ket `ψ` goes to `r·flip(ψ) + t·ψ`, each cold one to
/// `r0·flip(ψ) + t0·ψ`, where `flip` inverts polarization and direction and
/// spins are untouched. The map is contractive; the norm deficit of the
/// output is the photon-loss probability.
pub fn nonideal_scattering(c: &ScatteringCoeffs) -> Operator {
    let mut op = Operator::from_fn(16, |_, _| Complex64::new(0.0, 0.0));
    for col in 0..16 {
        let b = BasisState::from_index(col, PolarizationBasis::Circular);
        let (refl, trans) = if is_hot(b.pol, b.dir, b.s1) {
            (c.r, c.t)
        } else {
            (c.r0, c.t0)
        };
        op.set(flipped(b).index(), col, refl);
        op.set(col, col, op.get(col, col) + trans);
    }
    op
}

/// Per-pass efficiency factors `(refl_factor, trans_factor)` used to degrade
/// the ideal round probabilities.
///
/// `NormalizedRatio` weighs each amplitude against its wrong-path partner:
/// `(|r|/√(|r0|²+|r|²), |t0|/√(|t0|²+|t|²))`. `SquaredMagnitude` charges the
/// full single-pass survival probability: `(|r|², |t0|²)`.
pub fn efficiency_factors(c: &ScatteringCoeffs, model: DegradationModel) -> Result<(f64, f64)> {
    let (r, t, r0, t0) = (c.r.norm(), c.t.norm(), c.r0.norm(), c.t0.norm());
    if r == 0.0 && t == 0.0 && r0 == 0.0 && t0 == 0.0 {
        return Err(Error::DegenerateCoefficients);
    }
    match model {
        DegradationModel::NormalizedRatio => {
            let refl_den = (r0 * r0 + r * r).sqrt();
            let trans_den = (t0 * t0 + t * t).sqrt();
            if refl_den == 0.0 || trans_den == 0.0 {
                return Err(Error::DegenerateCoefficients);
            }
            Ok((r / refl_den, t0 / trans_den))
        }
        DegradationModel::SquaredMagnitude => Ok((r * r, t0 * t0)),
        other => Err(Error::UnsupportedModel {
            model: other,
            context: "efficiency_factors",
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevec::PureState;

    fn fig3_params() -> CavityParams {
        CavityParams::resonant(0.5, 0.1, 0.5).unwrap()
    }

    #[test]
    fn coefficients_at_reference_parameters() {
        let c = scattering_coeffs(&fig3_params()).unwrap();
        assert!((c.t - Complex64::new(-0.16, 0.0)).norm() < 1e-12);
        assert!((c.r - Complex64::new(0.84, 0.0)).norm() < 1e-12);
        assert!((c.t0 - Complex64::new(-0.8, 0.0)).norm() < 1e-12);
        assert!((c.r0 - Complex64::new(0.2, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn zero_coupling_reduces_hot_to_cold() {
        let p = CavityParams::detuned(0.7, 0.3, 0.0, 0.4).unwrap();
        let c = scattering_coeffs(&p).unwrap();
        assert!((c.t - c.t0).norm() < 1e-12);
        assert!((c.r - c.r0).norm() < 1e-12);
    }

    #[test]
    fn reflection_is_one_plus_transmission() {
        for (ks, g, gamma, d) in [
            (0.0, 0.1, 0.2, 0.0),
            (1.5, 0.9, 0.05, -0.7),
            (0.5, 0.5, 0.1, 1.3),
        ] {
            let c = scattering_coeffs(&CavityParams::detuned(ks, gamma, g, d).unwrap()).unwrap();
            assert!((c.r - c.t - Complex64::new(1.0, 0.0)).norm() < 1e-12);
            assert!((c.r0 - c.t0 - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn degenerate_denominator_is_rejected() {
        // γ = g = 0 on resonance makes the hot response 0/0
        let p = CavityParams::resonant(0.5, 0.0, 0.0).unwrap();
        assert_eq!(scattering_coeffs(&p), Err(Error::SingularParameters));
    }

    #[test]
    fn negative_rates_are_rejected_at_construction() {
        assert!(CavityParams::resonant(-0.1, 0.1, 0.5).is_err());
        assert!(CavityParams::resonant(0.1, -0.1, 0.5).is_err());
        assert!(CavityParams::resonant(0.1, 0.1, -0.5).is_err());
        assert!(CavityParams::new(0.1, 0.1, 0.5, f64::NAN, 0.0).is_err());
    }

    #[test]
    fn ideal_interaction_matches_the_eight_rules() {
        use Direction::{Down, Up};
        use Polarization::{L, R};
        use Spin::{Down as SDown, Up as SUp};
        type Combo = (Polarization, Direction, Spin);
        // (input, output, sign): reflection rules and π-phase rules
        let cases: [(Combo, Combo, f64); 8] = [
            ((R, Up, SUp), (L, Down, SUp), 1.0),
            ((R, Down, SUp), (R, Down, SUp), -1.0),
            ((R, Up, SDown), (R, Up, SDown), -1.0),
            ((R, Down, SDown), (L, Up, SDown), 1.0),
            ((L, Up, SUp), (L, Up, SUp), -1.0),
            ((L, Down, SUp), (R, Up, SUp), 1.0),
            ((L, Up, SDown), (R, Down, SDown), 1.0),
            ((L, Down, SDown), (L, Down, SDown), -1.0),
        ];
        let map = ideal_interaction();
        for ((p_in, d_in, s_in), (p_out, d_out, s_out), sign) in cases {
            for s2 in [SUp, SDown] {
                let input = PureState::system_basis(BasisState {
                    pol: p_in,
                    dir: d_in,
                    s1: s_in,
                    s2,
                });
                let out = map.apply(&input).unwrap();
                let expect = BasisState {
                    pol: p_out,
                    dir: d_out,
                    s1: s_out,
                    s2,
                }
                .index();
                assert!((out.amplitude(expect) - Complex64::new(sign, 0.0)).norm() < 1e-15);
                assert!((out.norm_sqr() - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn ideal_interaction_is_an_involution_and_unitary() {
        let map = ideal_interaction();
        let twice = map.compose(&map).unwrap();
        assert!(twice.max_abs_diff(&Operator::identity(16)).unwrap() < 1e-15);
        assert!(map.unitarity_residual() < 1e-15);
    }

    #[test]
    fn nonideal_scattering_on_hot_and_cold_kets() {
        let c = scattering_coeffs(&fig3_params()).unwrap();
        let map = nonideal_scattering(&c);

        // hot ket: r into the flipped ket, t in place; loss = 1 − (r² + t²)
        let hot = BasisState {
            pol: Polarization::R,
            dir: Direction::Up,
            s1: Spin::Up,
            s2: Spin::Down,
        };
        let out = map.apply(&PureState::system_basis(hot)).unwrap();
        assert!((out.amplitude(flipped(hot).index()) - Complex64::new(0.84, 0.0)).norm() < 1e-12);
        assert!((out.amplitude(hot.index()) - Complex64::new(-0.16, 0.0)).norm() < 1e-12);
        let loss = 1.0 - out.norm_sqr();
        assert!((loss - 0.2688).abs() < 1e-12, "got loss {loss}");

        // cold ket: t0 in place, r0 into the flipped ket
        let cold = BasisState {
            pol: Polarization::R,
            dir: Direction::Down,
            s1: Spin::Up,
            s2: Spin::Up,
        };
        let out = map.apply(&PureState::system_basis(cold)).unwrap();
        assert!((out.amplitude(cold.index()) - Complex64::new(-0.8, 0.0)).norm() < 1e-12);
        assert!((out.amplitude(flipped(cold).index()) - Complex64::new(0.2, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn ideal_limit_coefficients_reproduce_the_ideal_map() {
        let map = nonideal_scattering(&ScatteringCoeffs::ideal());
        assert!(map.max_abs_diff(&ideal_interaction()).unwrap() < 1e-15);
    }

    #[test]
    fn efficiency_factors_at_reference_parameters() {
        let c = scattering_coeffs(&fig3_params()).unwrap();
        let (refl, trans) = efficiency_factors(&c, DegradationModel::NormalizedRatio).unwrap();
        assert!((refl - 0.972806214685367).abs() < 1e-12, "got {refl}");
        assert!((trans - 0.980580675690920).abs() < 1e-12, "got {trans}");

        let (refl, trans) = efficiency_factors(&c, DegradationModel::SquaredMagnitude).unwrap();
        assert!((refl - 0.7056).abs() < 1e-12);
        assert!((trans - 0.64).abs() < 1e-12);
    }

    #[test]
    fn efficiency_factors_are_unity_in_the_ideal_limit() {
        let c = ScatteringCoeffs::ideal();
        for model in [
            DegradationModel::NormalizedRatio,
            DegradationModel::SquaredMagnitude,
        ] {
            let (refl, trans) = efficiency_factors(&c, model).unwrap();
            assert!((refl - 1.0).abs() < 1e-15);
            assert!((trans - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn efficiency_factors_reject_degenerate_and_unsupported_inputs() {
        let zero = Complex64::new(0.0, 0.0);
        let c = ScatteringCoeffs {
            t: zero,
            r: zero,
            t0: zero,
            r0: zero,
        };
        assert_eq!(
            efficiency_factors(&c, DegradationModel::SquaredMagnitude),
            Err(Error::DegenerateCoefficients)
        );
        let c = ScatteringCoeffs::ideal();
        assert!(matches!(
            efficiency_factors(&c, DegradationModel::Ideal),
            Err(Error::UnsupportedModel { .. })
        ));
    }
}
