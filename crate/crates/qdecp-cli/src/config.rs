//! Resolved run configuration, shared by the subcommands and round-trippable
//! through JSON.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

/// Everything a run needs, after flag parsing and defaulting. All rates are
/// in units of the cavity decay rate κ, which never appears explicitly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Scalar evaluation point, exclusive with the range fields.
    pub alpha: Option<f64>,
    pub alpha_min: Option<f64>,
    pub alpha_max: Option<f64>,
    pub steps: u32,
    pub rounds: u32,
    pub kappa_s: f64,
    pub gamma: f64,
    pub g: f64,
    pub delta: f64,
    pub model: String,
    pub trials: Option<u64>,
    pub seed: u64,
    pub format: String,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    /// The alpha grid this config describes: the scalar point, or `steps`
    /// evenly spaced points across `[alpha_min, alpha_max]`.
    pub fn grid(&self) -> Vec<f64> {
        if let Some(alpha) = self.alpha {
            return vec![alpha];
        }
        let (lo, hi) = (
            self.alpha_min.unwrap_or(0.01),
            self.alpha_max.unwrap_or(0.99),
        );
        if self.steps <= 1 {
            return vec![lo];
        }
        let step = (hi - lo) / (self.steps - 1) as f64;
        (0..self.steps).map(|i| lo + i as f64 * step).collect()
    }

    /// Structural checks shared by all subcommands; detailed domain errors
    /// surface from the library.
    pub fn validate(&self) -> Result<(), String> {
        if let Some(alpha) = self.alpha {
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(format!(
                    "--alpha must lie strictly inside (0, 1), got {alpha}"
                ));
            }
        }
        for (name, v) in [
            ("--alpha-min", self.alpha_min),
            ("--alpha-max", self.alpha_max),
        ] {
            if let Some(v) = v {
                if !(v > 0.0 && v < 1.0) {
                    return Err(format!("{name} must lie strictly inside (0, 1), got {v}"));
                }
            }
        }
        if let (Some(lo), Some(hi)) = (self.alpha_min, self.alpha_max) {
            if lo > hi {
                return Err(format!("--alpha-min {lo} exceeds --alpha-max {hi}"));
            }
        }
        if self.alpha.is_some() && (self.alpha_min.is_some() || self.alpha_max.is_some()) {
            return Err("give either --alpha or an --alpha-min/--alpha-max range, not both".into());
        }
        if self.steps < 1 {
            return Err("--steps must be at least 1".into());
        }
        if self.rounds < 1 {
            return Err("--rounds must be at least 1".into());
        }
        for (name, v) in [
            ("--kappa-s", self.kappa_s),
            ("--gamma", self.gamma),
            ("--g", self.g),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(format!(
                    "{name} must be a finite non-negative rate, got {v}"
                ));
            }
        }
        Ok(())
    }
}
