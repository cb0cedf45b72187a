//! The concentration protocol itself: per-round execution (photon
//! preparation → cavity scattering → wave plate → beam splitters →
//! detection), outcome classification, phase correction, and the recursion
//! over rounds as an exact branch tree or a seeded Monte Carlo sampler.
//!
//! An upward detector click (`D1`/`D2`) heralds success and leaves the spins
//! in a Bell state; a downward click (`D3`/`D4`) leaves a sharper
//! less-entangled pair that seeds the next round. The classical message to
//! the remote party is just the outcome tag on each branch — transport is
//! out of scope.

use std::collections::HashMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analytics::{DegradationModel, ProtocolReport, RoundProbability};
use crate::optics::{hwp45, route_and_detect, DetectorId};
use crate::qdcavity::{ideal_interaction, nonideal_scattering, ScatteringCoeffs};
use crate::statevec::{fidelity, tensor, Direction, PureState, Spin, NORM_TOL};
use crate::{Error, Result};

/// Photon–spin interaction model for a round: the lossless signed
/// permutation, or the full scattering map for a given coefficient set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CavityModel {
    Ideal,
    Scattering(ScatteringCoeffs),
}

impl CavityModel {
    fn operator(&self) -> crate::statevec::Operator {
        match self {
            CavityModel::Ideal => ideal_interaction(),
            CavityModel::Scattering(c) => nonideal_scattering(c),
        }
    }
}

/// A two-spin state of the protocol's working form `a|↑↑⟩ + b|↓↓⟩`,
/// normalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntangledPair {
    a: Complex64,
    b: Complex64,
}

impl EntangledPair {
    /// Build from already-normalized amplitudes.
    pub fn new(a: Complex64, b: Complex64) -> Result<EntangledPair> {
        let n2 = a.norm_sqr() + b.norm_sqr();
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sqr: n2 });
        }
        Ok(EntangledPair { a, b })
    }

    /// Normalize arbitrary amplitudes and fix the global phase so the
    /// leading amplitude is real and positive.
    pub fn from_unnormalized(a: Complex64, b: Complex64) -> Result<EntangledPair> {
        let n2 = a.norm_sqr() + b.norm_sqr();
        if n2 <= f64::MIN_POSITIVE {
            return Err(Error::ZeroNorm);
        }
        let inv = 1.0 / n2.sqrt();
        let (mut a, mut b) = (a * inv, b * inv);
        let lead = if a.norm() > 1e-14 { a } else { b };
        if lead.norm() > 1e-14 {
            let phase = lead.conj() / lead.norm();
            a *= phase;
            b *= phase;
        }
        Ok(EntangledPair { a, b })
    }

    /// Pair with real amplitudes `(α, √(1−α²))`.
    pub fn from_alpha(alpha: f64) -> Result<EntangledPair> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in [0, 1], got {alpha}"
            )));
        }
        Ok(EntangledPair {
            a: Complex64::new(alpha, 0.0),
            b: Complex64::new((1.0 - alpha * alpha).sqrt(), 0.0),
        })
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    /// Magnitude of the `|↑↑⟩` amplitude.
    pub fn alpha(&self) -> f64 {
        self.a.norm()
    }

    pub fn to_spins(self) -> PureState {
        PureState::from_parts(
            vec![
                self.a,
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                self.b,
            ],
            crate::statevec::StateKind::Spins,
        )
    }

    /// Overlap probability with `(|↑↑⟩ + |↓↓⟩)/√2`.
    pub fn fidelity_phi_plus(&self) -> f64 {
        fidelity(&self.to_spins(), &PureState::bell_plus()).expect("pair is normalized")
    }

    fn flip_down_sign(self) -> EntangledPair {
        EntangledPair {
            a: self.a,
            b: -self.b,
        }
    }
}

/// How a detection branch feeds back into the protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    /// `D1`/`D2`: the pair is handed out as a Bell state.
    Success,
    /// `D3`/`D4`: the residual pair seeds another round.
    Recycle,
    /// Photon lost to side leakage; the pair is discarded.
    Loss,
}

impl Classification {
    pub fn from_detector(d: DetectorId) -> Classification {
        match d {
            DetectorId::D1 | DetectorId::D2 => Classification::Success,
            DetectorId::D3 | DetectorId::D4 => Classification::Recycle,
            DetectorId::Loss => Classification::Loss,
        }
    }
}

/// One detection branch of a round: detector, Born probability (conditional
/// on the round being played), and the phase-corrected post-measurement
/// pair (`None` for loss).
#[derive(Debug, Clone)]
pub struct RoundOutcome {
    pub detector: DetectorId,
    pub probability: f64,
    pub post_pair: Option<EntangledPair>,
    pub classification: Classification,
}

impl RoundOutcome {
    /// Fidelity of the post-measurement pair with Φ⁺, when one exists.
    pub fn fidelity_phi_plus(&self) -> Option<f64> {
        self.post_pair
            .as_ref()
            .map(EntangledPair::fidelity_phi_plus)
    }
}

/// Ancilla photon for a round: polarization amplitudes proportional to the
/// pair's, travelling down toward the cavity.
pub fn prepare_round_photon(pair: &EntangledPair) -> PureState {
    let n2 = pair.a.norm_sqr() + pair.b.norm_sqr();
    let inv = 1.0 / n2.sqrt();
    PureState::from_parts(
        vec![pair.a * inv, pair.b * inv],
        crate::statevec::StateKind::Photon {
            basis: crate::statevec::PolarizationBasis::Circular,
            dir: Direction::Down,
        },
    )
}

fn pair_from_spins(spins: &PureState) -> Result<EntangledPair> {
    let up_down = spins.amplitude(Spin::Up.index() * 2 + Spin::Down.index());
    let down_up = spins.amplitude(Spin::Down.index() * 2 + Spin::Up.index());
    debug_assert!(up_down.norm() < 1e-10 && down_up.norm() < 1e-10);
    EntangledPair::from_unnormalized(spins.amplitude(0), spins.amplitude(3))
}

/// Flip the sign of the `|↓↓⟩` amplitude on `D2`/`D4` branches so success
/// always yields Φ⁺ and every recycled pair starts with a plus sign. Other
/// branches (including loss) pass through unchanged.
pub fn phase_correct(outcome: RoundOutcome) -> RoundOutcome {
    match outcome.detector {
        DetectorId::D2 | DetectorId::D4 => RoundOutcome {
            post_pair: outcome.post_pair.map(EntangledPair::flip_down_sign),
            ..outcome
        },
        _ => outcome,
    }
}

/// Play one concentration round from `pair`: prepare the ancilla photon,
/// scatter it off the cavity, rotate and route it, and report every
/// detection branch with its phase-corrected conditional pair.
///
/// Branch probabilities are conditional on this round being played; they sum
/// to 1 (the `Loss` entry soaks up any scattering deficit).
pub fn run_round(pair: &EntangledPair, cavity: &CavityModel) -> Result<Vec<RoundOutcome>> {
    let photon = prepare_round_photon(pair);
    let joint = tensor(&photon, &pair.to_spins())?;
    let scattered = cavity.operator().apply(&joint)?;
    let linear = hwp45(&scattered)?;
    let branches = route_and_detect(&linear)?;

    branches
        .into_iter()
        .map(|branch| {
            let post_pair = branch.spins.as_ref().map(pair_from_spins).transpose()?;
            Ok(phase_correct(RoundOutcome {
                detector: branch.detector,
                probability: branch.probability,
                post_pair,
                classification: Classification::from_detector(branch.detector),
            }))
        })
        .collect()
}

/// One node of the exact branch tree: a detection event at `round`, with its
/// unconditional path probability from the root.
#[derive(Debug, Clone)]
pub struct BranchNode {
    pub round: u32,
    pub detector: DetectorId,
    pub classification: Classification,
    pub path_probability: f64,
    pub pair: Option<EntangledPair>,
}

/// Full enumeration of every detector path to a fixed depth.
///
/// Success and loss branches terminate; recycle branches (one per downward
/// detector) are expanded at the next depth, each carrying its own true
/// conditional pair — under leakage the `D3` and `D4` residual pairs differ,
/// and the tree keeps them separate.
#[derive(Debug, Clone)]
pub struct BranchTree {
    pub root: EntangledPair,
    pub rounds: u32,
    /// `levels[d]` holds the outcomes of round `d + 1`.
    pub levels: Vec<Vec<BranchNode>>,
}

impl BranchTree {
    /// Unconditional success probability at a single round.
    pub fn success_mass(&self, round: u32) -> f64 {
        self.mass_at(round, Classification::Success)
    }

    pub fn loss_mass(&self, round: u32) -> f64 {
        self.mass_at(round, Classification::Loss)
    }

    pub fn recycle_mass(&self, round: u32) -> f64 {
        self.mass_at(round, Classification::Recycle)
    }

    fn mass_at(&self, round: u32, class: Classification) -> f64 {
        self.levels
            .get(round as usize - 1)
            .map(|nodes| {
                nodes
                    .iter()
                    .filter(|n| n.classification == class)
                    .map(|n| n.path_probability)
                    .sum()
            })
            .unwrap_or(0.0)
    }

    pub fn total_success(&self) -> f64 {
        (1..=self.rounds).map(|k| self.success_mass(k)).sum()
    }

    pub fn total_loss(&self) -> f64 {
        (1..=self.rounds).map(|k| self.loss_mass(k)).sum()
    }

    /// Probability-weighted mean fidelity of the success branches at `round`
    /// with Φ⁺. `None` when the round carries no success mass.
    pub fn success_fidelity(&self, round: u32) -> Option<f64> {
        let nodes = self.levels.get(round as usize - 1)?;
        let mut mass = 0.0;
        let mut acc = 0.0;
        for n in nodes
            .iter()
            .filter(|n| n.classification == Classification::Success)
        {
            if let Some(pair) = &n.pair {
                mass += n.path_probability;
                acc += n.path_probability * pair.fidelity_phi_plus();
            }
        }
        (mass > 0.0).then(|| acc / mass)
    }

    /// Largest deviation, over all depths, of
    /// (successes and losses so far) + (live recycle paths) from 1.
    pub fn completeness_residual(&self) -> f64 {
        let mut absorbed = 0.0;
        let mut worst: f64 = 0.0;
        for depth in 1..=self.rounds {
            absorbed += self.success_mass(depth) + self.loss_mass(depth);
            let live = self.recycle_mass(depth);
            worst = worst.max((absorbed + live - 1.0).abs());
        }
        worst
    }
}

/// Exhaustively enumerate all detector paths to depth `rounds`.
pub fn branch_tree_exact(
    pair: &EntangledPair,
    rounds: u32,
    cavity: &CavityModel,
) -> Result<BranchTree> {
    let mut levels = Vec::with_capacity(rounds as usize);
    let mut frontier: Vec<(EntangledPair, f64)> = vec![(*pair, 1.0)];

    for round in 1..=rounds {
        let mut level = Vec::new();
        let mut next = Vec::new();
        for (parent_pair, parent_prob) in &frontier {
            for outcome in run_round(parent_pair, cavity)? {
                let path_probability = parent_prob * outcome.probability;
                if outcome.classification == Classification::Recycle
                    && path_probability > f64::MIN_POSITIVE
                {
                    let child = outcome.post_pair.expect("recycle branch has a pair");
                    next.push((child, path_probability));
                }
                level.push(BranchNode {
                    round,
                    detector: outcome.detector,
                    classification: outcome.classification,
                    path_probability,
                    pair: outcome.post_pair,
                });
            }
        }
        levels.push(level);
        frontier = next;
    }

    Ok(BranchTree {
        root: *pair,
        rounds,
        levels,
    })
}

/// Run the protocol for up to `rounds` rounds and report the unconditional
/// per-round and cumulative success probabilities.
///
/// Each failed round's recycled pair (renormalized and phase-corrected)
/// feeds the next round; the report sums over the full branch tree, so
/// non-ideal rounds stay exact. `rounds = 0` yields an empty report.
pub fn run_protocol(
    pair: &EntangledPair,
    rounds: u32,
    cavity: &CavityModel,
) -> Result<ProtocolReport> {
    let model = match cavity {
        CavityModel::Ideal => DegradationModel::Ideal,
        CavityModel::Scattering(_) => DegradationModel::ExactSim,
    };
    let tree = branch_tree_exact(pair, rounds, cavity)?;
    let per_round: Vec<RoundProbability> = (1..=rounds)
        .map(|round| RoundProbability {
            round,
            p: tree.success_mass(round),
        })
        .collect();
    Ok(ProtocolReport::from_rounds(
        pair.alpha(),
        rounds,
        per_round,
        model,
        None,
    ))
}

/// Per-round success tallies of a Monte Carlo run.
#[derive(Debug, Clone, Serialize)]
pub struct RoundFrequency {
    pub round: u32,
    pub count: u64,
    pub frequency: f64,
    pub std_error: f64,
}

/// Outcome frequencies of a seeded sampling run, with binomial standard
/// errors. Identical inputs and seed reproduce identical reports.
#[derive(Debug, Clone, Serialize)]
pub struct MonteCarloReport {
    pub alpha: f64,
    pub rounds: u32,
    pub trials: u64,
    pub seed: u64,
    pub success_frequency: f64,
    pub success_std_error: f64,
    pub loss_frequency: f64,
    /// Fraction of trials still recycling when the round budget ran out.
    pub unresolved_frequency: f64,
    pub per_round: Vec<RoundFrequency>,
}

fn std_error(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Sample the branch process: each trial walks rounds 1..=`rounds`, drawing
/// one detection branch per round by its Born probability, until it succeeds,
/// loses the photon, or runs out of rounds.
///
/// The per-round branch distributions are cached per recycle path, so the
/// sampler visits `run_round` once per distinct history rather than once per
/// trial.
pub fn monte_carlo(
    pair: &EntangledPair,
    rounds: u32,
    cavity: &CavityModel,
    trials: u64,
    seed: u64,
) -> Result<MonteCarloReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    if rounds == 0 {
        return Err(Error::InvalidParameter("rounds must be at least 1".into()));
    }
    if rounds > 62 {
        return Err(Error::InvalidParameter(format!(
            "rounds limited to 62 for path bookkeeping, got {rounds}"
        )));
    }

    // path key: bit k set when round k+1 recycled through D4 (bit clear: D3),
    // plus a depth marker so distinct-length histories never collide
    let mut cache: HashMap<u64, Vec<RoundOutcome>> = HashMap::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut successes_per_round = vec![0u64; rounds as usize];
    let mut losses = 0u64;
    let mut unresolved = 0u64;

    for _ in 0..trials {
        let mut current = *pair;
        let mut path_key: u64 = 1; // leading 1 marks the depth
        let mut resolved = false;

        for round in 1..=rounds {
            let outcomes = match cache.get(&path_key) {
                Some(hit) => hit,
                None => {
                    let fresh = run_round(&current, cavity)?;
                    cache.entry(path_key).or_insert(fresh)
                }
            };

            let draw: f64 = rng.gen();
            let mut cumulative = 0.0;
            let mut chosen = outcomes.last().expect("round has branches");
            for outcome in outcomes {
                cumulative += outcome.probability;
                if draw < cumulative {
                    chosen = outcome;
                    break;
                }
            }

            match chosen.classification {
                Classification::Success => {
                    successes_per_round[round as usize - 1] += 1;
                    resolved = true;
                }
                Classification::Loss => {
                    losses += 1;
                    resolved = true;
                }
                Classification::Recycle => {
                    current = chosen.post_pair.expect("recycle branch has a pair");
                    path_key = (path_key << 1) | u64::from(chosen.detector == DetectorId::D4);
                }
            }
            if resolved {
                break;
            }
        }
        if !resolved {
            unresolved += 1;
        }
    }

    let successes: u64 = successes_per_round.iter().sum();
    let success_frequency = successes as f64 / trials as f64;
    let per_round = successes_per_round
        .iter()
        .enumerate()
        .map(|(i, &count)| {
            let frequency = count as f64 / trials as f64;
            RoundFrequency {
                round: i as u32 + 1,
                count,
                frequency,
                std_error: std_error(frequency, trials),
            }
        })
        .collect();

    Ok(MonteCarloReport {
        alpha: pair.alpha(),
        rounds,
        trials,
        seed,
        success_frequency,
        success_std_error: std_error(success_frequency, trials),
        loss_frequency: losses as f64 / trials as f64,
        unresolved_frequency: unresolved as f64 / trials as f64,
        per_round,
    })
}
