//! Property tests over random states, pairs and cavity parameters.

use num_complex::Complex64;
use proptest::prelude::*;

use qdecp::analytics::{p_total, DegradationModel};
use qdecp::optics::{hwp45, hwp45_inverse, route_and_detect, DetectorId};
use qdecp::protocol::{branch_tree_exact, run_round, CavityModel, Classification, EntangledPair};
use qdecp::qdcavity::{ideal_interaction, nonideal_scattering, scattering_coeffs, CavityParams};
use qdecp::statevec::{fidelity, PolarizationBasis, PureState};

fn system_state() -> impl Strategy<Value = PureState> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16).prop_filter_map(
        "nonzero state",
        |parts| {
            let amps: Vec<Complex64> = parts
                .into_iter()
                .map(|(re, im)| Complex64::new(re, im))
                .collect();
            let n2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
            if n2 < 1e-6 {
                return None;
            }
            let inv = 1.0 / n2.sqrt();
            PureState::system(
                amps.into_iter().map(|a| a * inv).collect(),
                PolarizationBasis::Circular,
            )
            .ok()
        },
    )
}

fn cavity_params() -> impl Strategy<Value = CavityParams> {
    (
        0.0f64..2.0,
        0.0f64..2.0,
        1e-3f64..2.0,
        -2.0f64..2.0,
        -2.0f64..2.0,
    )
        .prop_map(|(ks, gamma, g, dc, dx)| CavityParams::new(ks, gamma, g, dc, dx).unwrap())
}

proptest! {
    #[test]
    fn ideal_interaction_preserves_norm(s in system_state()) {
        let out = ideal_interaction().apply(&s).unwrap();
        prop_assert!((out.norm_sqr() - s.norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn wave_plate_round_trips(s in system_state()) {
        let there = hwp45(&s).unwrap();
        prop_assert!((there.norm_sqr() - s.norm_sqr()).abs() < 1e-12);
        let back = hwp45_inverse(&there).unwrap();
        prop_assert!(back.max_abs_diff(&s).unwrap() < 1e-12);
    }

    #[test]
    fn detection_is_complete(s in system_state()) {
        let branches = route_and_detect(&hwp45(&s).unwrap()).unwrap();
        let total: f64 = branches.iter().map(|b| b.probability).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        for b in branches.iter().filter(|b| b.detector != DetectorId::Loss) {
            prop_assert!(b.probability >= 0.0);
        }
    }

    #[test]
    fn fidelity_is_symmetric_and_bounded(a in system_state(), b in system_state()) {
        let fab = fidelity(&a, &b).unwrap();
        let fba = fidelity(&b, &a).unwrap();
        prop_assert!((fab - fba).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&fab));
    }

    #[test]
    fn lossy_scattering_never_inflates(s in system_state(), p in cavity_params()) {
        let coeffs = scattering_coeffs(&p).unwrap();
        let out = nonideal_scattering(&coeffs).apply(&s).unwrap();
        prop_assert!(out.norm_sqr() <= s.norm_sqr() + 1e-12);
    }

    #[test]
    fn round_branches_partition_unity(alpha in 0.01f64..0.99, p in cavity_params()) {
        let pair = EntangledPair::from_alpha(alpha).unwrap();
        let coeffs = scattering_coeffs(&p).unwrap();
        for cavity in [CavityModel::Ideal, CavityModel::Scattering(coeffs)] {
            let outcomes = run_round(&pair, &cavity).unwrap();
            let total: f64 = outcomes.iter().map(|o| o.probability).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            for o in &outcomes {
                prop_assert_eq!(o.classification, Classification::from_detector(o.detector));
            }
        }
    }

    #[test]
    fn success_branches_herald_bell_plus(alpha in 0.01f64..0.99) {
        let pair = EntangledPair::from_alpha(alpha).unwrap();
        for outcome in run_round(&pair, &CavityModel::Ideal).unwrap() {
            if outcome.classification == Classification::Success {
                let f = outcome.fidelity_phi_plus().unwrap();
                prop_assert!((f - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn branch_tree_stays_complete(alpha in 0.01f64..0.99, rounds in 1u32..5) {
        let pair = EntangledPair::from_alpha(alpha).unwrap();
        let tree = branch_tree_exact(&pair, rounds, &CavityModel::Ideal).unwrap();
        prop_assert!(tree.completeness_residual() < 1e-12);
    }

    #[test]
    fn totals_are_symmetric_in_alpha(alpha in 0.01f64..0.99) {
        let beta = (1.0 - alpha * alpha).sqrt();
        let t1 = p_total(alpha, 5, None, DegradationModel::Ideal).unwrap();
        let t2 = p_total(beta, 5, None, DegradationModel::Ideal).unwrap();
        prop_assert!((t1 - t2).abs() < 1e-12);
    }
}
