//! Kraus channels and corruption sampling.
//!
//! Covers the two noise models used throughout: bit flips (both the i.i.d.
//! per-qubit model and the balanced single-error model) and amplitude
//! damping, plus the explicit damping corruption-state constructors and the
//! biased sampler that controls how often each corruption enters a training
//! set.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::qcore::{C64, CMatrix, DensityMatrix, PureState};

/// Which corruption a Kraus operator represents. Qubit numbers are 1-based,
/// matching the usual "bit-flip to qubit 1" phrasing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseLabel {
    /// Identity outcome of a bit-flip channel.
    NoError,
    /// X applied to the given qubit.
    Flip(usize),
    /// Damping event on the given qubit, E0 on the others.
    Damp(usize),
    /// E0 on every qubit of a damping channel.
    E0All,
    /// Several qubits affected at once; the mask bit q-1 marks qubit q.
    Multi(u32),
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseLabel::NoError => write!(f, "no_error"),
            CaseLabel::Flip(q) => write!(f, "flip_q{q}"),
            CaseLabel::Damp(q) => write!(f, "damp_q{q}"),
            CaseLabel::E0All => write!(f, "e0_all"),
            CaseLabel::Multi(mask) => {
                write!(f, "multi")?;
                for q in 0..32 {
                    if mask >> q & 1 == 1 {
                        write!(f, "_q{}", q + 1)?;
                    }
                }
                Ok(())
            }
        }
    }
}

impl CaseLabel {
    /// Parses the labels used in configs and reports.
    pub fn parse(s: &str) -> Result<Self> {
        if s == "no_error" {
            return Ok(CaseLabel::NoError);
        }
        if s == "e0_all" {
            return Ok(CaseLabel::E0All);
        }
        if let Some(q) = s.strip_prefix("flip_q") {
            if let Ok(q) = q.parse::<usize>() {
                return Ok(CaseLabel::Flip(q));
            }
        }
        if let Some(q) = s.strip_prefix("damp_q") {
            if let Ok(q) = q.parse::<usize>() {
                return Ok(CaseLabel::Damp(q));
            }
        }
        if let Some(rest) = s.strip_prefix("multi") {
            let mut mask = 0u32;
            for part in rest.split('_').filter(|p| !p.is_empty()) {
                match part.strip_prefix('q').and_then(|q| q.parse::<u32>().ok()) {
                    Some(q) if (1..=32).contains(&q) => mask |= 1 << (q - 1),
                    _ => return Err(Error::InvalidCaseLabel),
                }
            }
            return Ok(CaseLabel::Multi(mask));
        }
        Err(Error::InvalidCaseLabel)
    }
}

/// The noise model a channel was built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelKind {
    BitflipIid { p: f64 },
    SingleErrorBitflip { p: f64 },
    AmplitudeDamping { gamma: f64 },
    Custom,
}

/// A finite set of Kraus operators with Σ E†E = I.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    n_qubits: usize,
    kind: ChannelKind,
    label: String,
    ops: Vec<CMatrix>,
    cases: Vec<CaseLabel>,
}

/// Completeness tolerance for Σ E†E = I.
pub const COMPLETENESS_TOL: f64 = 1e-10;

impl KrausChannel {
    /// Wraps explicit operators, checking completeness.
    pub fn new(
        ops: Vec<CMatrix>,
        cases: Vec<CaseLabel>,
        kind: ChannelKind,
        label: String,
    ) -> Result<Self> {
        if ops.is_empty() || ops.len() != cases.len() {
            return Err(Error::InvalidKrausIndex(ops.len()));
        }
        let dim = ops[0].dim();
        if !dim.is_power_of_two() || dim < 2 {
            return Err(Error::NotPowerOfTwo(dim));
        }
        for op in &ops {
            if op.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: op.dim() });
            }
        }
        let channel = Self {
            n_qubits: dim.trailing_zeros() as usize,
            kind,
            label,
            ops,
            cases,
        };
        let dev = channel.completeness_deviation();
        if dev > COMPLETENESS_TOL {
            return Err(Error::NotUnitary { max_dev: dev });
        }
        Ok(channel)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn op(&self, k: usize) -> &CMatrix {
        &self.ops[k]
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    pub fn case(&self, k: usize) -> CaseLabel {
        self.cases[k]
    }

    pub fn cases(&self) -> &[CaseLabel] {
        &self.cases
    }

    /// Index of the operator carrying a case label.
    pub fn find_case(&self, label: CaseLabel) -> Option<usize> {
        self.cases.iter().position(|&c| c == label)
    }

    /// Max |Σ E†E − I|.
    pub fn completeness_deviation(&self) -> f64 {
        let dim = self.dim();
        let mut sum = CMatrix::zeros(dim);
        for op in &self.ops {
            sum = sum.add(&op.dagger().mul(op));
        }
        sum.max_abs_diff(&CMatrix::identity(dim))
    }
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    Ok(())
}

/// Label for a flip/damp mask over qubits (bit q-1 set means qubit q hit).
fn mask_label(mask: u32, hit: fn(usize) -> CaseLabel, none: CaseLabel) -> CaseLabel {
    match mask.count_ones() {
        0 => none,
        1 => hit(mask.trailing_zeros() as usize + 1),
        _ => CaseLabel::Multi(mask),
    }
}

/// X applied to a subset of qubits, scaled: entries coef at (c ^ flip, c).
fn scaled_flip_operator(n: usize, qubit_mask: u32, coef: f64) -> CMatrix {
    let dim = 1usize << n;
    let mut index_mask = 0usize;
    for q in 0..n {
        if qubit_mask >> q & 1 == 1 {
            index_mask |= 1 << (n - 1 - q);
        }
    }
    let mut op = CMatrix::zeros(dim);
    for col in 0..dim {
        op[(col ^ index_mask, col)] = C64::new(coef, 0.0);
    }
    op
}

/// The i.i.d. bit-flip channel: a NOT on every qubit independently with
/// probability p. One Kraus operator per flip pattern; zero-weight patterns
/// are dropped so p = 0 leaves exactly the identity.
pub fn bitflip_iid(p: f64, n_qubits: usize) -> Result<KrausChannel> {
    check_probability(p)?;
    let mut ops = Vec::new();
    let mut cases = Vec::new();
    for mask in 0..1u32 << n_qubits {
        let k = mask.count_ones() as usize;
        let weight = p.powi(k as i32) * (1.0 - p).powi((n_qubits - k) as i32);
        if weight == 0.0 {
            continue;
        }
        ops.push(scaled_flip_operator(n_qubits, mask, weight.sqrt()));
        cases.push(mask_label(mask, CaseLabel::Flip, CaseLabel::NoError));
    }
    KrausChannel::new(
        ops,
        cases,
        ChannelKind::BitflipIid { p },
        format!("bitflip_iid(p={p}, n={n_qubits})"),
    )
}

/// The balanced single-error model: identity with probability 1-p, or X on
/// exactly one qubit, each with probability p/n.
pub fn single_error_bitflip(p: f64, n_qubits: usize) -> Result<KrausChannel> {
    check_probability(p)?;
    let mut ops = Vec::new();
    let mut cases = Vec::new();
    if p < 1.0 {
        ops.push(scaled_flip_operator(n_qubits, 0, (1.0 - p).sqrt()));
        cases.push(CaseLabel::NoError);
    }
    if p > 0.0 {
        let coef = (p / n_qubits as f64).sqrt();
        for q in 0..n_qubits {
            ops.push(scaled_flip_operator(n_qubits, 1 << q, coef));
            cases.push(CaseLabel::Flip(q + 1));
        }
    }
    KrausChannel::new(
        ops,
        cases,
        ChannelKind::SingleErrorBitflip { p },
        format!("single_error_bitflip(p={p}, n={n_qubits})"),
    )
}

fn ad_e0(gamma: f64) -> CMatrix {
    let mut e0 = CMatrix::zeros(2);
    e0[(0, 0)] = C64::new(1.0, 0.0);
    e0[(1, 1)] = C64::new((1.0 - gamma).sqrt(), 0.0);
    e0
}

fn ad_e1(gamma: f64) -> CMatrix {
    let mut e1 = CMatrix::zeros(2);
    e1[(0, 1)] = C64::new(gamma.sqrt(), 0.0);
    e1
}

/// Single-qubit amplitude damping: E0 = diag(1, √(1-γ)), E1 = √γ |0⟩⟨1|.
pub fn amplitude_damping(gamma: f64) -> Result<KrausChannel> {
    amplitude_damping_iid(gamma, 1)
}

/// Per-qubit amplitude damping on an n-qubit register, built by tensor
/// composition of the single-qubit pair; one operator per damping pattern.
pub fn amplitude_damping_iid(gamma: f64, n_qubits: usize) -> Result<KrausChannel> {
    check_probability(gamma)?;
    let e0 = ad_e0(gamma);
    let e1 = ad_e1(gamma);
    let mut ops = Vec::new();
    let mut cases = Vec::new();
    for mask in 0..1u32 << n_qubits {
        let mut op = CMatrix::identity(1);
        for q in 0..n_qubits {
            let factor = if mask >> q & 1 == 1 { &e1 } else { &e0 };
            op = op.kron(factor);
        }
        if op.data().iter().all(|e| e.re == 0.0 && e.im == 0.0) {
            continue;
        }
        ops.push(op);
        cases.push(mask_label(mask, CaseLabel::Damp, CaseLabel::E0All));
    }
    KrausChannel::new(
        ops,
        cases,
        ChannelKind::AmplitudeDamping { gamma },
        format!("amplitude_damping(gamma={gamma}, n={n_qubits})"),
    )
}

/// Deterministic CPTP action: ρ → Σ E ρ E†.
pub fn apply_kraus(channel: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dim() != channel.dim() {
        return Err(Error::DimensionMismatch { expected: channel.dim(), got: rho.dim() });
    }
    let mut out = CMatrix::zeros(rho.dim());
    for op in &channel.ops {
        let term = op.mul(rho.matrix()).mul(&op.dagger());
        out = out.add(&term);
    }
    Ok(DensityMatrix::from_parts(rho.n_qubits(), out))
}

/// One sampled corruption: the normalized post-operator state, the
/// probability of that outcome, and its case label.
#[derive(Debug, Clone, PartialEq)]
pub struct CorruptionOutcome {
    pub state: PureState,
    pub probability: f64,
    pub case: CaseLabel,
}

/// Applies one Kraus operator drawn with its Born probability ‖E|ψ⟩‖².
pub fn sample_corruption(
    channel: &KrausChannel,
    psi: &PureState,
    rng: &mut ChaCha12Rng,
) -> Result<CorruptionOutcome> {
    if psi.dim() != channel.dim() {
        return Err(Error::DimensionMismatch { expected: channel.dim(), got: psi.dim() });
    }
    let branches: Vec<Vec<C64>> =
        channel.ops.iter().map(|op| op.matvec(psi.amplitudes())).collect();
    let probs: Vec<f64> = branches
        .iter()
        .map(|b| b.iter().map(|a| a.norm_sqr()).sum())
        .collect();
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut chosen = None;
    for (k, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc && p > 0.0 {
            chosen = Some(k);
            break;
        }
    }
    // Completeness keeps Σp = 1 up to rounding; fall back to the last
    // nonzero branch if u landed in the residual sliver.
    let k = match chosen {
        Some(k) => k,
        None => probs
            .iter()
            .rposition(|&p| p > 0.0)
            .expect("a completeness-valid channel has a nonzero branch"),
    };
    let state = PureState::new(branches[k].clone())?.normalized();
    Ok(CorruptionOutcome { state, probability: probs[k], case: channel.case(k) })
}

/// Builds the damping corruption of the four-qubit code state for logical
/// amplitudes (a, b) directly from the closed-form kets.
///
/// `which` selects either the no-damping outcome or a single damping event;
/// the returned probability is the squared norm of the unnormalized ket and
/// equals the Born probability of the matching Kraus string.
pub fn ad_corruption_state(
    a: C64,
    b: C64,
    which: CaseLabel,
    gamma: f64,
) -> Result<CorruptionOutcome> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidProbability(gamma));
    }
    let norm_dev = (a.norm_sqr() + b.norm_sqr() - 1.0).abs();
    if norm_dev > 1e-10 {
        return Err(Error::NotUnitTrace { deviation: norm_dev });
    }
    let g1 = 1.0 - gamma;
    let sqrt2 = 2.0f64.sqrt();
    let mut amps = vec![C64::new(0.0, 0.0); 16];
    match which {
        CaseLabel::E0All => {
            // a[(|0000⟩ + (1-γ)²|1111⟩)/√2] + b[(1-γ)(|0011⟩ + |1100⟩)/√2]
            amps[0b0000] = a / sqrt2;
            amps[0b1111] = a * (g1 * g1) / sqrt2;
            amps[0b0011] = b * g1 / sqrt2;
            amps[0b1100] = b * g1 / sqrt2;
        }
        CaseLabel::Damp(q @ 1..=4) => {
            let front = (gamma * g1 / 2.0).sqrt();
            let (a_ket, b_ket) = match q {
                1 => (0b0111, 0b0100),
                2 => (0b1011, 0b1000),
                3 => (0b1101, 0b0001),
                _ => (0b1110, 0b0010),
            };
            amps[a_ket] = a * g1 * front;
            amps[b_ket] = b * front;
        }
        _ => return Err(Error::InvalidCaseLabel),
    }
    let raw = PureState::new(amps)?;
    let probability = raw.norm() * raw.norm();
    Ok(CorruptionOutcome { state: raw.normalized(), probability, case: which })
}

/// Draws a damping corruption with a controlled case frequency: with
/// probability 1-p the no-damping outcome, otherwise one of the four single
/// damping events uniformly, independent of γ's natural frequencies.
pub fn biased_ad_sampler(
    p: f64,
    gamma: f64,
    a: C64,
    b: C64,
    rng: &mut ChaCha12Rng,
) -> Result<CorruptionOutcome> {
    check_probability(p)?;
    let u: f64 = rng.random();
    let which = if u < 1.0 - p {
        CaseLabel::E0All
    } else {
        CaseLabel::Damp(rng.random_range(1..=4))
    };
    ad_corruption_state(a, b, which, gamma)
}

#[cfg(test)]
mod tests;
