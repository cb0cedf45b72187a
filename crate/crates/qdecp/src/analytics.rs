//! Closed-form success probabilities and parameter sweeps.
//!
//! The ideal per-round probability is
//! `P_1 = 2|αβ|²`, `P_K = 2|αβ|^{2^K} / ∏_{j=2}^{K} (|α|^{2^j} + |β|^{2^j})`.
//! It is evaluated by a survival recursion over the normalized pair
//! populations, which is algebraically identical but free of the 0/0
//! underflow the raw product hits at large K. Leaky cavities degrade each
//! round by per-pass efficiency factors; the exact-simulation model skips
//! the closed forms entirely and sums the branch tree.

use serde::Serialize;

use crate::protocol::{self, CavityModel, EntangledPair};
use crate::qdcavity::{efficiency_factors, scattering_coeffs, CavityParams, ScatteringCoeffs};
use crate::{Error, Result};

/// How cavity imperfection enters the probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DegradationModel {
    /// No leakage; the bare closed form.
    #[serde(rename = "ideal")]
    Ideal,
    /// Per-pass factors `|r|/√(|r0|²+|r|²)` and `|t0|/√(|t0|²+|t|²)`.
    #[serde(rename = "ratio")]
    NormalizedRatio,
    /// Per-pass factors `|r|²` and `|t0|²`.
    #[serde(rename = "squared")]
    SquaredMagnitude,
    /// Exact branch-tree enumeration under the full scattering map.
    #[serde(rename = "exact-sim")]
    ExactSim,
}

impl DegradationModel {
    pub fn label(self) -> &'static str {
        match self {
            DegradationModel::Ideal => "ideal",
            DegradationModel::NormalizedRatio => "ratio",
            DegradationModel::SquaredMagnitude => "squared",
            DegradationModel::ExactSim => "exact-sim",
        }
    }
}

/// Success probability of one round, keyed by round number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoundProbability {
    pub round: u32,
    pub p: f64,
}

/// Per-round and cumulative success probabilities for one `alpha` under one
/// degradation model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolReport {
    pub alpha: f64,
    pub rounds: u32,
    pub per_round: Vec<RoundProbability>,
    pub cumulative: f64,
    pub model: DegradationModel,
    pub params: Option<CavityParams>,
    /// Set when a per-round value underflowed to zero at an interior alpha;
    /// the value is clamped rather than left denormal.
    pub underflow_clamped: bool,
}

impl ProtocolReport {
    pub(crate) fn from_rounds(
        alpha: f64,
        rounds: u32,
        per_round: Vec<RoundProbability>,
        model: DegradationModel,
        params: Option<CavityParams>,
    ) -> ProtocolReport {
        let cumulative = per_round.iter().map(|r| r.p).sum();
        let interior = alpha > 0.0 && alpha < 1.0;
        let underflow_clamped = interior && per_round.iter().any(|r| r.p == 0.0);
        ProtocolReport {
            alpha,
            rounds,
            per_round,
            cumulative,
            model,
            params,
            underflow_clamped,
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in [0, 1], got {alpha}"
        )));
    }
    Ok(())
}

/// Ideal per-round values for rounds `1..=k_max` in a single stable pass.
///
/// The pass tracks the current round's normalized pair populations `(u, v)`
/// with `u + v = 1` and the unconditional survival probability: round `k`
/// succeeds with `survival · 2uv`, survives with factor `u² + v²`, and the
/// populations sharpen to `(u², v²)/(u² + v²)`.
fn ideal_rounds(alpha: f64, k_max: u32) -> Vec<f64> {
    let u0 = alpha * alpha;
    let (mut u, mut v) = (u0, 1.0 - u0);
    let mut survival = 1.0;
    let mut out = Vec::with_capacity(k_max as usize);
    for _ in 0..k_max {
        out.push(survival * 2.0 * u * v);
        let stay = u * u + v * v;
        survival *= stay;
        if stay > 0.0 {
            let (u2, v2) = (u * u, v * v);
            u = u2 / stay;
            v = v2 / stay;
        }
    }
    out
}

/// Ideal success probability of concentration round `k`.
pub fn p_k_ideal(alpha: f64, k: u32) -> Result<f64> {
    check_alpha(alpha)?;
    if k == 0 {
        return Err(Error::InvalidParameter(
            "round index must be at least 1".into(),
        ));
    }
    Ok(*ideal_rounds(alpha, k).last().expect("k >= 1"))
}

/// Degraded success probability of round `k`:
/// `P′_K = trans_factor^{K−1} · refl_factor · P_K`.
pub fn p_k_degraded(
    alpha: f64,
    k: u32,
    coeffs: &ScatteringCoeffs,
    model: DegradationModel,
) -> Result<f64> {
    match model {
        DegradationModel::NormalizedRatio | DegradationModel::SquaredMagnitude => {}
        other => {
            return Err(Error::UnsupportedModel {
                model: other,
                context: "p_k_degraded",
            });
        }
    }
    let (refl, trans) = efficiency_factors(coeffs, model)?;
    Ok(trans.powi(k as i32 - 1) * refl * p_k_ideal(alpha, k)?)
}

fn rounds_for(
    alpha: f64,
    k_max: u32,
    coeffs: Option<&ScatteringCoeffs>,
    model: DegradationModel,
) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    match model {
        DegradationModel::Ideal => Ok(ideal_rounds(alpha, k_max)),
        DegradationModel::NormalizedRatio | DegradationModel::SquaredMagnitude => {
            let coeffs = coeffs.ok_or(Error::InvalidParameter(
                "degraded models need scattering coefficients".into(),
            ))?;
            let (refl, trans) = efficiency_factors(coeffs, model)?;
            Ok(ideal_rounds(alpha, k_max)
                .into_iter()
                .enumerate()
                .map(|(i, p)| trans.powi(i as i32) * refl * p)
                .collect())
        }
        DegradationModel::ExactSim => {
            let coeffs = coeffs.ok_or(Error::InvalidParameter(
                "exact simulation needs scattering coefficients".into(),
            ))?;
            let pair = EntangledPair::from_alpha(alpha)?;
            let tree =
                protocol::branch_tree_exact(&pair, k_max, &CavityModel::Scattering(*coeffs))?;
            Ok((1..=k_max).map(|k| tree.success_mass(k)).collect())
        }
    }
}

/// Total success probability over the first `k_max` rounds.
pub fn p_total(
    alpha: f64,
    k_max: u32,
    coeffs: Option<&ScatteringCoeffs>,
    model: DegradationModel,
) -> Result<f64> {
    if k_max == 0 {
        return Err(Error::InvalidParameter("k_max must be at least 1".into()));
    }
    Ok(rounds_for(alpha, k_max, coeffs, model)?.iter().sum())
}

/// Full report for one grid point.
pub fn report(
    alpha: f64,
    k_max: u32,
    params: Option<&CavityParams>,
    model: DegradationModel,
) -> Result<ProtocolReport> {
    let coeffs = match (model, params) {
        (DegradationModel::Ideal, _) => None,
        (_, Some(p)) => Some(scattering_coeffs(p)?),
        (_, None) => {
            return Err(Error::InvalidParameter(format!(
                "model {} needs cavity parameters",
                model.label()
            )));
        }
    };
    let per_round = rounds_for(alpha, k_max, coeffs.as_ref(), model)?
        .into_iter()
        .zip(1..)
        .map(|(p, round)| RoundProbability { round, p })
        .collect();
    Ok(ProtocolReport::from_rounds(
        alpha,
        k_max,
        per_round,
        model,
        params.copied(),
    ))
}

/// Evaluate the protocol over an alpha grid. Grid values must lie strictly
/// inside (0, 1); an empty grid yields an empty sweep.
pub fn sweep_alpha(
    grid: &[f64],
    k_max: u32,
    params: Option<&CavityParams>,
    model: DegradationModel,
) -> Result<Vec<ProtocolReport>> {
    for &alpha in grid {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "sweep grid values must lie in (0, 1), got {alpha}"
            )));
        }
    }
    grid.iter()
        .map(|&alpha| report(alpha, k_max, params, model))
        .collect()
}
