//! Acceptance suite: every release gate in one target, one test per
//! criterion, each printing a pass/fail line.
//!
//! Expected values marked "oracle" below were computed independently of the
//! library: closed forms evaluated by hand-rolled arithmetic in this file,
//! or direct enumeration of the four-branch round amplitudes.

use std::process::Command;
use std::time::Instant;

use qdecp::analytics::{p_k_ideal, p_total, sweep_alpha, DegradationModel};
use qdecp::optics::DetectorId;
use qdecp::protocol::{
    branch_tree_exact, monte_carlo, run_round, CavityModel, Classification, EntangledPair,
};
use qdecp::qdcavity::{scattering_coeffs, CavityParams};
use qdecp::statevec::{fidelity, PureState};
use qdecp::Complex64;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn fig3_params() -> CavityParams {
    CavityParams::resonant(0.5, 0.1, 0.5).unwrap()
}

fn pass(criterion: &str) {
    println!("acceptance {criterion}: PASS");
}

/// Oracle: the per-round closed form evaluated as a literal product,
/// independent of the library's survival recursion.
fn oracle_p_k(alpha: f64, k: u32) -> f64 {
    let a2 = alpha * alpha;
    let b2 = 1.0 - a2;
    let mut num = a2 * b2;
    let mut den = 1.0;
    let (mut x, mut y) = (a2, b2);
    for _ in 2..=k {
        x *= x;
        y *= y;
        den *= x + y;
        num *= num;
    }
    2.0 * num / den
}

#[test]
fn criterion_1_closed_form_matches_branch_enumeration() {
    let start = Instant::now();
    let mut alphas: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
    alphas.push(FRAC_1_SQRT_2);

    for &alpha in &alphas {
        let pair = EntangledPair::from_alpha(alpha).unwrap();
        let tree = branch_tree_exact(&pair, 5, &CavityModel::Ideal).unwrap();
        for k in 1..=5u32 {
            let closed = p_k_ideal(alpha, k).unwrap();
            let enumerated = tree.success_mass(k);
            assert!(
                (closed - enumerated).abs() < 1e-12,
                "alpha {alpha} round {k}: closed {closed} vs tree {enumerated}"
            );
            assert!(
                (closed - oracle_p_k(alpha, k)).abs() < 1e-12,
                "alpha {alpha} round {k} disagrees with the literal product"
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}, budget 1 s");
    pass("1 (closed form vs branch enumeration, 10 alphas x 5 rounds, <1s)");
}

#[test]
fn criterion_2_round_one_success_probability() {
    // 2|αβ|² at α = 0.8: exact in rational arithmetic, 0.4608
    let expect = 2.0 * (0.8f64 * 0.6).powi(2);
    assert!((expect - 0.4608).abs() < 1e-16);

    assert!((p_k_ideal(0.8, 1).unwrap() - 0.4608).abs() < 1e-12);

    let pair = EntangledPair::from_alpha(0.8).unwrap();
    let success: f64 = run_round(&pair, &CavityModel::Ideal)
        .unwrap()
        .iter()
        .filter(|o| o.classification == Classification::Success)
        .map(|o| o.probability)
        .sum();
    assert!((success - 0.4608).abs() < 1e-12, "round success {success}");
    pass("2 (round-1 success = 2|alpha beta|^2 = 0.4608 at alpha 0.8)");
}

#[test]
fn criterion_3_heralded_states_are_bell_plus() {
    for alpha in [0.1, 0.25, 0.4, FRAC_1_SQRT_2, 0.6, 0.8, 0.93] {
        let pair = EntangledPair::from_alpha(alpha).unwrap();
        for outcome in run_round(&pair, &CavityModel::Ideal).unwrap() {
            match outcome.detector {
                DetectorId::D1 | DetectorId::D2 => {
                    let spins = outcome.post_pair.unwrap().to_spins();
                    let f = fidelity(&spins, &PureState::bell_plus()).unwrap();
                    assert!(
                        (f - 1.0).abs() < 1e-12,
                        "alpha {alpha} {:?}: fidelity {f}",
                        outcome.detector
                    );
                }
                _ => {}
            }
        }
    }
    pass("3 (every D1/D2 branch heralds Phi+ after phase correction)");
}

#[test]
fn criterion_4_coefficient_identities_over_a_grid() {
    // deterministic 100-point grid over (κ_s, γ, g, detunings) ∈ [0,2]⁴
    let mut worst_identity: f64 = 0.0;
    let mut worst_limit: f64 = 0.0;
    for i in 0..100 {
        let frac = i as f64 / 99.0;
        let params = CavityParams::new(
            2.0 * frac,
            0.05 + 1.95 * ((i * 37) % 100) as f64 / 99.0,
            0.05 + 1.95 * ((i * 61) % 100) as f64 / 99.0,
            -2.0 + 4.0 * ((i * 13) % 100) as f64 / 99.0,
            -2.0 + 4.0 * ((i * 71) % 100) as f64 / 99.0,
        )
        .unwrap();
        let c = scattering_coeffs(&params).unwrap();
        let one = Complex64::new(1.0, 0.0);
        worst_identity = worst_identity
            .max((c.r - c.t - one).norm())
            .max((c.r0 - c.t0 - one).norm());

        let near_cold = CavityParams { g: 1e-8, ..params };
        let c = scattering_coeffs(&near_cold).unwrap();
        worst_limit = worst_limit.max((c.t - c.t0).norm());
    }
    assert!(worst_identity < 1e-12, "identity residual {worst_identity}");
    assert!(worst_limit < 1e-6, "cold-limit residual {worst_limit}");
    pass("4 (r = 1 + t on 100-point grid; g->0 reduction within 1e-6)");
}

#[test]
fn criterion_5_ideal_sweep_peaks_at_the_symmetric_point() {
    let mut grid: Vec<f64> = (1..100).map(|i| i as f64 / 100.0).collect();
    grid.push(FRAC_1_SQRT_2);
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let reports = sweep_alpha(&grid, 5, None, DegradationModel::Ideal).unwrap();
    let peak = reports
        .iter()
        .max_by(|a, b| a.cumulative.partial_cmp(&b.cumulative).unwrap())
        .unwrap();
    let nearest = grid
        .iter()
        .copied()
        .min_by(|a, b| {
            (a - FRAC_1_SQRT_2)
                .abs()
                .partial_cmp(&(b - FRAC_1_SQRT_2).abs())
                .unwrap()
        })
        .unwrap();
    assert_eq!(
        peak.alpha, nearest,
        "peak sits away from the symmetric point"
    );
    assert!(
        (peak.cumulative - 0.96875).abs() < 1e-12,
        "peak total {} differs from 31/32",
        peak.cumulative
    );
    pass("5 (ideal K=5 curve peaks at alpha nearest 1/sqrt(2) with P_t = 0.96875)");
}

#[test]
fn criterion_6_degraded_totals_at_the_reference_cavity() {
    let coeffs = scattering_coeffs(&fig3_params()).unwrap();
    let squared = p_total(
        FRAC_1_SQRT_2,
        5,
        Some(&coeffs),
        DegradationModel::SquaredMagnitude,
    )
    .unwrap();
    assert!((squared - 0.5171).abs() < 1e-3, "squared total {squared}");
    assert!(
        (squared - 0.5).abs() < 0.05,
        "squared total {squared} strays from ~0.5"
    );

    let ratio = p_total(
        FRAC_1_SQRT_2,
        5,
        Some(&coeffs),
        DegradationModel::NormalizedRatio,
    )
    .unwrap();
    assert!((ratio - 0.9273).abs() < 1e-3, "ratio total {ratio}");

    // the two readings of the degradation disagree by ~0.41; both are
    // emitted, neither is suppressed
    println!(
        "acceptance 6 note: squared-magnitude total {squared:.4}, \
         normalized-ratio total {ratio:.4}, discrepancy {:.4}",
        ratio - squared
    );
    pass("6 (degraded K=5 totals: squared 0.5171 +- 1e-3, ratio 0.9273 +- 1e-3)");
}

#[test]
fn criterion_7_scattering_coefficient_spot_values() {
    let c = scattering_coeffs(&fig3_params()).unwrap();
    for (value, expect, name) in [
        (c.t, -0.16, "t"),
        (c.r, 0.84, "r"),
        (c.t0, -0.8, "t0"),
        (c.r0, 0.2, "r0"),
    ] {
        assert!(
            (value - Complex64::new(expect, 0.0)).norm() < 1e-12,
            "{name} = {value}, expected {expect}"
        );
    }
    pass("7 (t = -0.16, r = 0.84, t0 = -0.8, r0 = 0.2 at the reference cavity)");
}

#[test]
fn criterion_8_monte_carlo_agrees_within_three_sigma() {
    let start = Instant::now();
    let pair = EntangledPair::from_alpha(0.8).unwrap();
    let report = monte_carlo(&pair, 1, &CavityModel::Ideal, 1_000_000, 42).unwrap();
    let elapsed = start.elapsed();

    // binomial 3σ at p = 0.4608, N = 10⁶
    let three_sigma = 3.0 * (0.4608f64 * (1.0 - 0.4608) / 1e6).sqrt();
    assert!((three_sigma - 0.0015).abs() < 1e-4);
    let dev = (report.success_frequency - 0.4608).abs();
    assert!(
        dev <= three_sigma,
        "deviation {dev} exceeds 3 sigma {three_sigma}"
    );
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}, budget 5 s");
    pass("8 (10^6-trial Monte Carlo within 3 sigma of 0.4608, <5s)");
}

#[test]
fn criterion_9_verify_subcommand_exits_clean() {
    let output = Command::new(env!("CARGO_BIN_EXE_qdecp"))
        .arg("verify")
        .output()
        .expect("verify runs");
    assert!(
        output.status.success(),
        "verify exited {:?}\nstdout: {}\nstderr: {}",
        output.status.code(),
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
    let stdout = String::from_utf8_lossy(&output.stdout);
    for suite in [
        "interaction-involution",
        "interaction-unitarity",
        "born-completeness",
        "loss-monotonicity",
        "alpha-symmetry",
    ] {
        assert!(stdout.contains(suite), "verify output lacks suite {suite}");
    }
    pass("9 (cmd_verify runs every invariant suite and exits 0)");
}
