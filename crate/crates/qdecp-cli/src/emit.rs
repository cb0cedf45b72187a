//! Record assembly and byte-stable CSV/JSON emission.

use serde::Serialize;

use qdecp::analytics::ProtocolReport;
use qdecp::protocol::{BranchTree, MonteCarloReport};
use qdecp::qdcavity::{CavityParams, ScatteringCoeffs};

/// Floats in CSV output carry 12 significant digits, always in the same
/// scientific form, so identical configs give identical bytes.
pub fn sig12(x: f64) -> String {
    format!("{:.11e}", x)
}

/// One sweep output row: a single round of a single grid point.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRecord {
    pub alpha: f64,
    pub model: String,
    #[serde(rename = "K")]
    pub k: u32,
    #[serde(rename = "P_K")]
    pub p_k: f64,
    #[serde(rename = "P_cum")]
    pub p_cum: f64,
}

pub const SWEEP_HEADER: &str = "alpha,model,K,P_K,P_cum";

pub fn sweep_records(reports: &[ProtocolReport]) -> Vec<SweepRecord> {
    let mut rows = Vec::new();
    for report in reports {
        let mut cum = 0.0;
        for r in &report.per_round {
            cum += r.p;
            rows.push(SweepRecord {
                alpha: report.alpha,
                model: report.model.label().to_string(),
                k: r.round,
                p_k: r.p,
                p_cum: cum,
            });
        }
    }
    rows
}

pub fn sweep_csv(rows: &[SweepRecord]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            sig12(row.alpha),
            row.model,
            row.k,
            sig12(row.p_k),
            sig12(row.p_cum)
        ));
    }
    out
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("records serialize");
    text.push('\n');
    text
}

/// Per-round block of an exact-simulation report.
#[derive(Debug, Clone, Serialize)]
pub struct SimulateRound {
    pub round: u32,
    pub success: f64,
    pub recycle: f64,
    pub loss: f64,
    /// Probability-weighted fidelity of the heralded pairs with Φ⁺; absent
    /// when the round carries no success mass.
    pub fidelity_phi_plus: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateReport {
    pub alpha: f64,
    pub rounds: u32,
    pub model: String,
    pub params: Option<CavityParams>,
    pub per_round: Vec<SimulateRound>,
    pub total_success: f64,
    pub total_loss: f64,
    /// Recycle mass still live after the final round.
    pub unresolved: f64,
}

pub fn simulate_report(
    tree: &BranchTree,
    model: &str,
    params: Option<CavityParams>,
) -> SimulateReport {
    let per_round: Vec<SimulateRound> = (1..=tree.rounds)
        .map(|round| SimulateRound {
            round,
            success: tree.success_mass(round),
            recycle: tree.recycle_mass(round),
            loss: tree.loss_mass(round),
            fidelity_phi_plus: tree.success_fidelity(round),
        })
        .collect();
    SimulateReport {
        alpha: tree.root.alpha(),
        rounds: tree.rounds,
        model: model.to_string(),
        params,
        per_round,
        total_success: tree.total_success(),
        total_loss: tree.total_loss(),
        unresolved: tree.recycle_mass(tree.rounds),
    }
}

pub fn simulate_csv(report: &SimulateReport) -> String {
    let mut out = format!(
        "# alpha={} model={} rounds={}\n",
        sig12(report.alpha),
        report.model,
        report.rounds
    );
    out.push_str("round,success,recycle,loss,fidelity_phi_plus\n");
    for r in &report.per_round {
        let fid = r.fidelity_phi_plus.map(sig12).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.round,
            sig12(r.success),
            sig12(r.recycle),
            sig12(r.loss),
            fid
        ));
    }
    out
}

pub fn monte_carlo_csv(report: &MonteCarloReport) -> String {
    let mut out = format!(
        "# alpha={} model=monte-carlo rounds={} trials={} seed={}\n",
        sig12(report.alpha),
        report.rounds,
        report.trials,
        report.seed
    );
    out.push_str("round,count,frequency,std_error\n");
    for r in &report.per_round {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.round,
            r.count,
            sig12(r.frequency),
            sig12(r.std_error)
        ));
    }
    out.push_str(&format!(
        "total,,{},{}\n",
        sig12(report.success_frequency),
        sig12(report.success_std_error)
    ));
    out.push_str(&format!("loss,,{},\n", sig12(report.loss_frequency)));
    out.push_str(&format!(
        "unresolved,,{},\n",
        sig12(report.unresolved_frequency)
    ));
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct ComplexParts {
    pub re: f64,
    pub im: f64,
    pub abs: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoeffsReport {
    pub params: CavityParams,
    pub t: ComplexParts,
    pub r: ComplexParts,
    pub t0: ComplexParts,
    pub r0: ComplexParts,
}

pub fn coeffs_report(params: CavityParams, c: &ScatteringCoeffs) -> CoeffsReport {
    let parts = |re: f64, im: f64| ComplexParts {
        re,
        im,
        abs: re.hypot(im),
    };
    CoeffsReport {
        params,
        t: parts(c.t.re, c.t.im),
        r: parts(c.r.re, c.r.im),
        t0: parts(c.t0.re, c.t0.im),
        r0: parts(c.r0.re, c.r0.im),
    }
}

pub fn coeffs_csv(report: &CoeffsReport) -> String {
    let mut out = String::from("coeff,re,im,abs\n");
    for (name, z) in [
        ("t", &report.t),
        ("r", &report.r),
        ("t0", &report.t0),
        ("r0", &report.r0),
    ] {
        out.push_str(&format!(
            "{name},{},{},{}\n",
            sig12(z.re),
            sig12(z.im),
            sig12(z.abs)
        ));
    }
    out
}
