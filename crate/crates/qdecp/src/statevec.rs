//! Pure-state algebra for the photon + two-spin system.
//!
//! The full Hilbert space is 16-dimensional: photon polarization (2) ×
//! propagation direction (2) × spin 1 (2) × spin 2 (2). Two smaller factor
//! spaces appear on their own: a bare photon (dim 2, with a declared
//! propagation direction) and a bare spin pair (dim 4). Amplitudes are stored
//! densely in canonical index order; states are immutable and every operation
//! returns a fresh value.

use num_complex::Complex64;

use crate::{Error, Result};

/// Tolerance for normalization checks on state construction and operation
/// preconditions.
pub const NORM_TOL: f64 = 1e-12;

/// Photon polarization basis tag. A state's photon factor is expressed in
/// exactly one basis at a time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolarizationBasis {
    /// Right/left circular, `|R⟩` and `|L⟩`.
    Circular,
    /// Horizontal/vertical linear, `|H⟩` and `|V⟩`.
    Linear,
}

/// Photon polarization label. `R`/`L` live in the circular basis, `H`/`V`
/// in the linear one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    R,
    L,
    H,
    V,
}

impl Polarization {
    pub fn basis(self) -> PolarizationBasis {
        match self {
            Polarization::R | Polarization::L => PolarizationBasis::Circular,
            Polarization::H | Polarization::V => PolarizationBasis::Linear,
        }
    }

    /// Canonical index within its basis: R/H = 0, L/V = 1.
    pub fn index(self) -> usize {
        match self {
            Polarization::R | Polarization::H => 0,
            Polarization::L | Polarization::V => 1,
        }
    }
}

/// Photon propagation direction along the cavity axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Up,
    Down,
}

impl Direction {
    pub fn index(self) -> usize {
        match self {
            Direction::Up => 0,
            Direction::Down => 1,
        }
    }

    pub fn flipped(self) -> Direction {
        match self {
            Direction::Up => Direction::Down,
            Direction::Down => Direction::Up,
        }
    }
}

/// Electron spin label. Photon scattering never flips a spin; only explicit
/// phase corrections touch the spin factor, and then only by a sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn index(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }
}

/// One basis ket of the 16-dimensional composite space.
///
/// Canonical index = pol·8 + dir·4 + s1·2 + s2, with R(H) = 0, L(V) = 1,
/// Up = 0, Down = 1, ↑ = 0, ↓ = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisState {
    pub pol: Polarization,
    pub dir: Direction,
    pub s1: Spin,
    pub s2: Spin,
}

impl BasisState {
    pub fn index(self) -> usize {
        self.pol.index() * 8 + self.dir.index() * 4 + self.s1.index() * 2 + self.s2.index()
    }

    /// Inverse of [`BasisState::index`] for a given photon basis.
    pub fn from_index(index: usize, basis: PolarizationBasis) -> BasisState {
        assert!(index < 16, "basis index out of range: {index}");
        let pol = match (basis, index / 8) {
            (PolarizationBasis::Circular, 0) => Polarization::R,
            (PolarizationBasis::Circular, _) => Polarization::L,
            (PolarizationBasis::Linear, 0) => Polarization::H,
            (PolarizationBasis::Linear, _) => Polarization::V,
        };
        let dir = if (index / 4) & 1 == 0 {
            Direction::Up
        } else {
            Direction::Down
        };
        let s1 = if (index / 2) & 1 == 0 {
            Spin::Up
        } else {
            Spin::Down
        };
        let s2 = if index & 1 == 0 { Spin::Up } else { Spin::Down };
        BasisState { pol, dir, s1, s2 }
    }
}

/// Which tensor factors a [`PureState`] spans.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    /// Bare photon: polarization amplitudes in `basis`, travelling along `dir`.
    Photon {
        basis: PolarizationBasis,
        dir: Direction,
    },
    /// Bare two-spin state, index = s1·2 + s2.
    Spins,
    /// Full photon ⊗ spins space, photon factor expressed in `basis`.
    System { basis: PolarizationBasis },
}

impl StateKind {
    pub fn dim(self) -> usize {
        match self {
            StateKind::Photon { .. } => 2,
            StateKind::Spins => 4,
            StateKind::System { .. } => 16,
        }
    }

    fn describe(self) -> &'static str {
        match self {
            StateKind::Photon { .. } => "photon",
            StateKind::Spins => "spin pair",
            StateKind::System { .. } => "photon ⊗ spins",
        }
    }
}

/// Dense complex amplitude vector over one of the protocol's factor spaces.
///
/// Squared norm stays in `[0, 1 + NORM_TOL]`; sub-normalization is the
/// signature of lossy scattering or conditioning, never of an ideal
/// operation.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: Vec<Complex64>,
    kind: StateKind,
}

impl PureState {
    fn checked(amps: Vec<Complex64>, kind: StateKind) -> Result<PureState> {
        if amps.len() != kind.dim() {
            return Err(Error::DimensionMismatch {
                expected: kind.dim(),
                found: amps.len(),
            });
        }
        let n2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !n2.is_finite() || n2 > 1.0 + NORM_TOL {
            return Err(Error::NotNormalized { norm_sqr: n2 });
        }
        Ok(PureState { amps, kind })
    }

    /// Internal constructor for amplitudes produced by the crate's own
    /// (contractive or unitary) maps.
    pub(crate) fn from_parts(amps: Vec<Complex64>, kind: StateKind) -> PureState {
        debug_assert_eq!(amps.len(), kind.dim());
        PureState { amps, kind }
    }

    /// Photon state `a_r|R⟩ + a_l|L⟩` travelling along `dir`.
    pub fn photon(a_r: Complex64, a_l: Complex64, dir: Direction) -> Result<PureState> {
        Self::checked(
            vec![a_r, a_l],
            StateKind::Photon {
                basis: PolarizationBasis::Circular,
                dir,
            },
        )
    }

    /// Two-spin state with amplitudes `[↑↑, ↑↓, ↓↑, ↓↓]`.
    pub fn spins(amps: [Complex64; 4]) -> Result<PureState> {
        Self::checked(amps.to_vec(), StateKind::Spins)
    }

    /// Basis ket `|s1 s2⟩`.
    pub fn spin_basis(s1: Spin, s2: Spin) -> PureState {
        let mut amps = vec![Complex64::ZERO; 4];
        amps[s1.index() * 2 + s2.index()] = Complex64::ONE;
        PureState {
            amps,
            kind: StateKind::Spins,
        }
    }

    /// Bell state `(|↑↑⟩ + |↓↓⟩)/√2`.
    pub fn bell_plus() -> PureState {
        let x = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        PureState {
            amps: vec![x, Complex64::ZERO, Complex64::ZERO, x],
            kind: StateKind::Spins,
        }
    }

    /// Bell state `(|↑↑⟩ − |↓↓⟩)/√2`.
    pub fn bell_minus() -> PureState {
        let x = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        PureState {
            amps: vec![x, Complex64::ZERO, Complex64::ZERO, -x],
            kind: StateKind::Spins,
        }
    }

    /// Full 16-amplitude system state in canonical index order.
    pub fn system(amps: Vec<Complex64>, basis: PolarizationBasis) -> Result<PureState> {
        Self::checked(amps, StateKind::System { basis })
    }

    /// System basis ket `|pol, dir, s1, s2⟩`.
    pub fn system_basis(b: BasisState) -> PureState {
        let mut amps = vec![Complex64::ZERO; 16];
        amps[b.index()] = Complex64::ONE;
        PureState {
            amps,
            kind: StateKind::System {
                basis: b.pol.basis(),
            },
        }
    }

    pub fn kind(&self) -> StateKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// Basis tag of the photon factor, if the state has one.
    pub fn photon_basis(&self) -> Option<PolarizationBasis> {
        match self.kind {
            StateKind::Photon { basis, .. } | StateKind::System { basis } => Some(basis),
            StateKind::Spins => None,
        }
    }

    /// Declared propagation direction, for bare photon states.
    pub fn photon_direction(&self) -> Option<Direction> {
        match self.kind {
            StateKind::Photon { dir, .. } => Some(dir),
            _ => None,
        }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOL
    }

    /// Rescale to unit norm. Errors on the zero vector.
    pub fn normalized(&self) -> Result<PureState> {
        let n2 = self.norm_sqr();
        if n2 <= f64::MIN_POSITIVE {
            return Err(Error::ZeroNorm);
        }
        let inv = 1.0 / n2.sqrt();
        Ok(PureState {
            amps: self.amps.iter().map(|a| a * inv).collect(),
            kind: self.kind,
        })
    }

    /// Fix the global phase so the first non-negligible amplitude is real and
    /// positive. Post-measurement states all pass through here, which makes
    /// textual and amplitude-level comparisons deterministic.
    pub fn canonical_phase(mut self) -> PureState {
        let lead = self.amps.iter().find(|a| a.norm() > 1e-14);
        if let Some(&a) = lead {
            let phase = a.conj() / a.norm();
            for amp in &mut self.amps {
                *amp *= phase;
            }
        }
        self
    }

    /// Largest absolute amplitude difference against `other`, for tests and
    /// invariant suites. Errors if the states span different factor spaces.
    pub fn max_abs_diff(&self, other: &PureState) -> Result<f64> {
        if self.kind != other.kind {
            return Err(Error::IncompatibleStates(self.kind.describe()));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// Tensor product of a circular-basis photon with a two-spin state.
///
/// The result's amplitude at `(pol, dir, s1, s2)` is the photon amplitude at
/// `pol` times the spin amplitude at `(s1, s2)` when `dir` matches the
/// photon's declared direction, and zero otherwise.
pub fn tensor(photon: &PureState, spins: &PureState) -> Result<PureState> {
    let (basis, dir) = match photon.kind {
        StateKind::Photon { basis, dir } => (basis, dir),
        other => {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: other.dim(),
            });
        }
    };
    if basis != PolarizationBasis::Circular {
        return Err(Error::BasisMismatch {
            expected: PolarizationBasis::Circular,
            found: basis,
        });
    }
    if spins.kind != StateKind::Spins {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: spins.dim(),
        });
    }
    for s in [photon, spins] {
        if !s.is_normalized() {
            return Err(Error::NotNormalized {
                norm_sqr: s.norm_sqr(),
            });
        }
    }

    let mut amps = vec![Complex64::ZERO; 16];
    for pol in 0..2 {
        for spin in 0..4 {
            amps[pol * 8 + dir.index() * 4 + spin] = photon.amps[pol] * spins.amps[spin];
        }
    }
    Ok(PureState::from_parts(amps, StateKind::System { basis }))
}

/// `|⟨a|b⟩|²`, normalizing sub-normalized inputs first. Invariant under a
/// global phase on either argument; errors on a zero-norm input.
pub fn fidelity(a: &PureState, b: &PureState) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    if a.kind != b.kind {
        return Err(Error::IncompatibleStates(a.kind.describe()));
    }
    let an = a.normalized()?;
    let bn = b.normalized()?;
    let overlap: Complex64 = an
        .amps
        .iter()
        .zip(&bn.amps)
        .map(|(x, y)| x.conj() * y)
        .sum();
    Ok(overlap.norm_sqr().min(1.0))
}

/// Project the photon factor of a system state onto `(pol, dir)`.
///
/// Returns the branch probability (the squared norm of the matching
/// amplitude block, so that a full partition sums to the state's squared
/// norm) and the conditional spin state, renormalized with canonical global
/// phase. A zero-probability branch yields `None` rather than a renormalized
/// garbage state.
pub fn project_photon(
    s: &PureState,
    pol: Polarization,
    dir: Direction,
) -> Result<(f64, Option<PureState>)> {
    let basis = match s.kind {
        StateKind::System { basis } => basis,
        other => {
            return Err(Error::DimensionMismatch {
                expected: 16,
                found: other.dim(),
            });
        }
    };
    if basis != pol.basis() {
        return Err(Error::BasisMismatch {
            expected: pol.basis(),
            found: basis,
        });
    }

    let base = pol.index() * 8 + dir.index() * 4;
    let block: Vec<Complex64> = s.amps[base..base + 4].to_vec();
    let prob: f64 = block.iter().map(|a| a.norm_sqr()).sum();
    if prob <= f64::MIN_POSITIVE {
        return Ok((0.0, None));
    }
    let inv = 1.0 / prob.sqrt();
    let spins = PureState::from_parts(block.iter().map(|a| a * inv).collect(), StateKind::Spins)
        .canonical_phase();
    Ok((prob, Some(spins)))
}

/// Dense complex square matrix acting on [`PureState`] amplitudes, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    elements: Vec<Complex64>,
}

impl Operator {
    pub fn identity(dim: usize) -> Operator {
        let mut op = Operator {
            dim,
            elements: vec![Complex64::ZERO; dim * dim],
        };
        for i in 0..dim {
            op.elements[i * dim + i] = Complex64::ONE;
        }
        op
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Operator {
        let mut elements = Vec::with_capacity(dim * dim);
        for row in 0..dim {
            for col in 0..dim {
                elements.push(f(row, col));
            }
        }
        Operator { dim, elements }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.elements[row * self.dim + col]
    }

    pub(crate) fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.elements[row * self.dim + col] = value;
    }

    /// Apply to a state: plain matrix–vector product, no renormalization.
    pub fn apply(&self, s: &PureState) -> Result<PureState> {
        if s.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: s.dim(),
            });
        }
        let mut out = vec![Complex64::ZERO; self.dim];
        for (row, slot) in out.iter_mut().enumerate() {
            let mut acc = Complex64::ZERO;
            for col in 0..self.dim {
                acc += self.get(row, col) * s.amps[col];
            }
            *slot = acc;
        }
        Ok(PureState::from_parts(out, s.kind))
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &Operator) -> Result<Operator> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let d = self.dim;
        Ok(Operator::from_fn(d, |row, col| {
            (0..d).map(|k| self.get(row, k) * other.get(k, col)).sum()
        }))
    }

    pub fn adjoint(&self) -> Operator {
        Operator::from_fn(self.dim, |row, col| self.get(col, row).conj())
    }

    pub fn scaled(&self, z: Complex64) -> Operator {
        Operator {
            dim: self.dim,
            elements: self.elements.iter().map(|e| e * z).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Operator) -> Result<f64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(self
            .elements
            .iter()
            .zip(&other.elements)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Max-entry residual of `U†U − I`; zero for a unitary.
    pub fn unitarity_residual(&self) -> f64 {
        let gram = self.adjoint().compose(self).expect("same dim");
        gram.max_abs_diff(&Operator::identity(self.dim))
            .expect("same dim")
    }
}
