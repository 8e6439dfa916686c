//! Logical encoders, Bloch parameterization, dataset builders, the
//! classical syndrome-decoder baseline and codeword extraction.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;
use num_complex::Complex;
use rand::Rng;

use crate::channels::{CaseLabel, CorruptionOutcome, KrausChannel, biased_ad_sampler, sample_corruption};
use crate::error::{Error, Result};
use crate::network::{NetworkParams, NetworkSpec, effective_layer_unitary};
use crate::qcore::{C64, PureState};
use crate::rng::{STREAM_DATA, stream};

/// Bloch-sphere angles, θ ∈ [0, π], φ ∈ [0, 2π).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochAngles {
    pub theta: f64,
    pub phi: f64,
}

impl BlochAngles {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=core::f64::consts::PI).contains(&theta)
            || !(0.0..2.0 * core::f64::consts::PI).contains(&phi)
        {
            return Err(Error::InvalidConfig(format!("angles out of range: θ={theta}, φ={phi}")));
        }
        Ok(Self { theta, phi })
    }
}

/// cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩.
pub fn bloch_state(angles: BlochAngles) -> PureState {
    let half = angles.theta / 2.0;
    PureState::qubit(
        C64::new(half.cos(), 0.0),
        Complex::cis(angles.phi) * half.sin(),
    )
}

/// The six Pauli eigenstates used as training targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CardinalState {
    Zero,
    One,
    Plus,
    Minus,
    PlusI,
    MinusI,
}

impl CardinalState {
    pub const ALL: [CardinalState; 6] = [
        CardinalState::Zero,
        CardinalState::One,
        CardinalState::Plus,
        CardinalState::Minus,
        CardinalState::PlusI,
        CardinalState::MinusI,
    ];

    pub fn angles(self) -> BlochAngles {
        use core::f64::consts::{FRAC_PI_2, PI};
        let (theta, phi) = match self {
            CardinalState::Zero => (0.0, 0.0),
            CardinalState::One => (PI, 0.0),
            CardinalState::Plus => (FRAC_PI_2, 0.0),
            CardinalState::Minus => (FRAC_PI_2, PI),
            CardinalState::PlusI => (FRAC_PI_2, FRAC_PI_2),
            CardinalState::MinusI => (FRAC_PI_2, 3.0 * FRAC_PI_2),
        };
        BlochAngles { theta, phi }
    }

    pub fn state(self) -> PureState {
        bloch_state(self.angles())
    }

    pub fn label(self) -> &'static str {
        match self {
            CardinalState::Zero => "zero",
            CardinalState::One => "one",
            CardinalState::Plus => "plus",
            CardinalState::Minus => "minus",
            CardinalState::PlusI => "plus_i",
            CardinalState::MinusI => "minus_i",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.label() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown cardinal state '{s}'")))
    }
}

impl fmt::Display for CardinalState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// a|0⟩ + b|1⟩ → a|000⟩ + b|111⟩.
pub fn encode_bitflip3(psi: &PureState) -> Result<PureState> {
    if psi.n_qubits() != 1 {
        return Err(Error::DimensionMismatch { expected: 2, got: psi.dim() });
    }
    let mut amps = vec![C64::new(0.0, 0.0); 8];
    amps[0b000] = psi.amplitudes()[0];
    amps[0b111] = psi.amplitudes()[1];
    PureState::new(amps)
}

/// a|0⟩ + b|1⟩ → (a/√2)(|0000⟩+|1111⟩) + (b/√2)(|0011⟩+|1100⟩).
pub fn encode_ad4(psi: &PureState) -> Result<PureState> {
    if psi.n_qubits() != 1 {
        return Err(Error::DimensionMismatch { expected: 2, got: psi.dim() });
    }
    let s = 2.0f64.sqrt();
    let a = psi.amplitudes()[0] / s;
    let b = psi.amplitudes()[1] / s;
    let mut amps = vec![C64::new(0.0, 0.0); 16];
    amps[0b0000] = a;
    amps[0b1111] = a;
    amps[0b0011] = b;
    amps[0b1100] = b;
    PureState::new(amps)
}

/// Which logical encoding a dataset uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodeKind {
    /// Bare qubit, no encoding (channel-in-network experiments).
    Qubit,
    /// Three-qubit repetition code.
    Bitflip3,
    /// Four-qubit amplitude-damping code.
    Ad4,
}

impl CodeKind {
    pub fn encode(self, psi: &PureState) -> Result<PureState> {
        match self {
            CodeKind::Qubit => Ok(psi.clone()),
            CodeKind::Bitflip3 => encode_bitflip3(psi),
            CodeKind::Ad4 => encode_ad4(psi),
        }
    }

    pub fn n_physical(self) -> usize {
        match self {
            CodeKind::Qubit => 1,
            CodeKind::Bitflip3 => 3,
            CodeKind::Ad4 => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CodeKind::Qubit => "qubit",
            CodeKind::Bitflip3 => "bitflip3",
            CodeKind::Ad4 => "ad4",
        }
    }
}

/// Provenance of one training pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairMeta {
    pub label: String,
    pub theta: f64,
    pub phi: f64,
    pub case: CaseLabel,
    pub seed: u64,
}

/// One (corrupted input, clean target) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingPair {
    pub input: PureState,
    pub target: PureState,
    pub meta: PairMeta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetKind {
    Train,
    Validation,
}

/// A homogeneous list of training pairs plus its generation config.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub pairs: Vec<TrainingPair>,
    pub kind: DatasetKind,
    pub config: String,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn input_qubits(&self) -> usize {
        self.pairs.first().map(|p| p.input.n_qubits()).unwrap_or(0)
    }

    pub fn target_qubits(&self) -> usize {
        self.pairs.first().map(|p| p.target.n_qubits()).unwrap_or(0)
    }

    /// A view over a subset of pair indices (for batching).
    pub fn select(&self, indices: &[usize]) -> Vec<&TrainingPair> {
        indices.iter().map(|&i| &self.pairs[i]).collect()
    }
}

/// Training set for bit-flip denoising: targets are encoded cardinal
/// states, inputs their sampled single-error corruptions at probability p.
pub fn build_train_bitflip(n_pairs: usize, p: f64, seed: u64) -> Result<Dataset> {
    if n_pairs == 0 {
        return Err(Error::EmptyDataset);
    }
    let channel = crate::channels::single_error_bitflip(p, 3)?;
    let mut rng = stream(seed, STREAM_DATA);
    let mut pairs = Vec::with_capacity(n_pairs);
    for _ in 0..n_pairs {
        let cardinal = CardinalState::ALL[rng.random_range(0..CardinalState::ALL.len())];
        let target = encode_bitflip3(&cardinal.state())?;
        let outcome = sample_corruption(&channel, &target, &mut rng)?;
        let angles = cardinal.angles();
        pairs.push(TrainingPair {
            input: outcome.state,
            target,
            meta: PairMeta {
                label: cardinal.label().to_string(),
                theta: angles.theta,
                phi: angles.phi,
                case: outcome.case,
                seed,
            },
        });
    }
    Ok(Dataset {
        pairs,
        kind: DatasetKind::Train,
        config: format!("train_bitflip n={n_pairs} p={p} seed={seed}"),
    })
}

/// The θ, φ grid of an N×N Bloch mesh: θ_i = iπ/N, φ_j = j2π/N.
pub fn mesh_angles(n: usize) -> Vec<BlochAngles> {
    let dt = core::f64::consts::PI / n as f64;
    let dp = 2.0 * core::f64::consts::PI / n as f64;
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push(BlochAngles { theta: i as f64 * dt, phi: j as f64 * dp });
        }
    }
    out
}

/// Validation set covering the Bloch sphere with an N×N mesh; targets are
/// encoded mesh states, inputs their sampled corruptions (or the clean
/// states when no channel is given).
pub fn build_validation_mesh(
    n: usize,
    code: CodeKind,
    channel: Option<&KrausChannel>,
    seed: u64,
) -> Result<Dataset> {
    if n < 2 {
        return Err(Error::InvalidConfig(String::from("mesh needs N >= 2")));
    }
    if let Some(ch) = channel {
        if ch.n_qubits() != code.n_physical() {
            return Err(Error::DimensionMismatch {
                expected: code.n_physical(),
                got: ch.n_qubits(),
            });
        }
    }
    let mut rng = stream(seed, STREAM_DATA);
    let mut pairs = Vec::with_capacity(n * n);
    for angles in mesh_angles(n) {
        let target = code.encode(&bloch_state(angles))?;
        let (input, case) = match channel {
            Some(ch) => {
                let outcome = sample_corruption(ch, &target, &mut rng)?;
                (outcome.state, outcome.case)
            }
            None => (target.clone(), CaseLabel::NoError),
        };
        pairs.push(TrainingPair {
            input,
            target,
            meta: PairMeta {
                label: String::from("mesh"),
                theta: angles.theta,
                phi: angles.phi,
                case,
                seed,
            },
        });
    }
    Ok(Dataset {
        pairs,
        kind: DatasetKind::Validation,
        config: format!(
            "validation_mesh n={n} code={} channel={} seed={seed}",
            code.name(),
            channel.map(|c| c.label()).unwrap_or("none"),
        ),
    })
}

/// Training set for amplitude-damping correction: targets are the encoded
/// four-qubit states, inputs drawn from the biased corruption sampler.
pub fn build_train_ad(
    n_pairs: usize,
    gamma: f64,
    p_bias: f64,
    state_set: &[CardinalState],
    seed: u64,
) -> Result<Dataset> {
    if n_pairs == 0 || state_set.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut rng = stream(seed, STREAM_DATA);
    let mut pairs = Vec::with_capacity(n_pairs);
    for _ in 0..n_pairs {
        let cardinal = state_set[rng.random_range(0..state_set.len())];
        let logical = cardinal.state();
        let (a, b) = (logical.amplitudes()[0], logical.amplitudes()[1]);
        let target = encode_ad4(&logical)?;
        let outcome: CorruptionOutcome = biased_ad_sampler(p_bias, gamma, a, b, &mut rng)?;
        let angles = cardinal.angles();
        pairs.push(TrainingPair {
            input: outcome.state,
            target,
            meta: PairMeta {
                label: cardinal.label().to_string(),
                theta: angles.theta,
                phi: angles.phi,
                case: outcome.case,
                seed,
            },
        });
    }
    Ok(Dataset {
        pairs,
        kind: DatasetKind::Train,
        config: format!(
            "train_ad n={n_pairs} gamma={gamma} p_bias={p_bias} states={} seed={seed}",
            state_set.len()
        ),
    })
}

/// Identity training pairs (input = target) drawn uniformly from a state
/// set; the corruption happens inside channel-in-network models.
pub fn build_train_selfpairs(
    n_pairs: usize,
    state_set: &[CardinalState],
    seed: u64,
) -> Result<Dataset> {
    if n_pairs == 0 || state_set.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut rng = stream(seed, STREAM_DATA);
    let mut pairs = Vec::with_capacity(n_pairs);
    for _ in 0..n_pairs {
        let cardinal = state_set[rng.random_range(0..state_set.len())];
        let state = cardinal.state();
        let angles = cardinal.angles();
        pairs.push(TrainingPair {
            input: state.clone(),
            target: state,
            meta: PairMeta {
                label: cardinal.label().to_string(),
                theta: angles.theta,
                phi: angles.phi,
                case: CaseLabel::NoError,
                seed,
            },
        });
    }
    Ok(Dataset {
        pairs,
        kind: DatasetKind::Train,
        config: format!("train_selfpairs n={n_pairs} states={} seed={seed}", state_set.len()),
    })
}

/// Majority-vote decoding of a three-qubit code state carrying at most one
/// flip: finds the single-error subspace holding the state and returns the
/// recovered qubit.
pub fn syndrome_decode3(state: &PureState) -> Result<PureState> {
    if state.n_qubits() != 3 {
        return Err(Error::DimensionMismatch { expected: 8, got: state.dim() });
    }
    // Flip masks on the basis index for no error and each single flip.
    for flip in [0b000usize, 0b100, 0b010, 0b001] {
        let c0 = state.amplitudes()[flip];
        let c1 = state.amplitudes()[0b111 ^ flip];
        if c0.norm_sqr() + c1.norm_sqr() >= 1.0 - 1e-9 {
            return Ok(PureState::qubit(c0, c1).normalized());
        }
    }
    Err(Error::DecodeFailure)
}

/// Probability that majority-vote correction fails under i.i.d. flips with
/// probability p, by exact enumeration of all 8 flip patterns against the
/// decoder itself.
pub fn bitflip3_failure_enumerated(p: f64) -> Result<f64> {
    let zero_l = encode_bitflip3(&PureState::basis(1, 0))?;
    let one = PureState::basis(1, 1);
    let mut failure = 0.0;
    for mask in 0..8usize {
        let k = mask.count_ones();
        let weight = p.powi(k as i32) * (1.0 - p).powi(3 - k as i32);
        if weight == 0.0 {
            continue;
        }
        let mut amps = vec![C64::new(0.0, 0.0); 8];
        for (i, a) in zero_l.amplitudes().iter().enumerate() {
            amps[i ^ mask] = *a;
        }
        let corrupted = PureState::new(amps)?;
        let decoded = syndrome_decode3(&corrupted)?;
        // Failure means the decoder lands on the wrong logical state.
        if decoded.inner(&one).norm() > 0.5 {
            failure += weight;
        }
    }
    Ok(failure)
}

/// The learned logical basis of an encoding layer: the images of
/// |0⟩⊗|0..0⟩ and |1⟩⊗|0..0⟩ under the layer's working unitary (full
/// register, source qubit included). Orthonormal by unitarity.
pub fn extract_codeword(
    spec: &NetworkSpec,
    params: &NetworkParams,
    layer: usize,
) -> Result<(PureState, PureState)> {
    if spec.layer_in(layer) != 1 {
        return Err(Error::InvalidLayer(layer));
    }
    let unitary = effective_layer_unitary(spec, params, layer)?;
    let fresh = spec.layer_out(layer);
    let zero = PureState::basis(1, 0).tensor(&PureState::basis(fresh, 0));
    let one = PureState::basis(1, 1).tensor(&PureState::basis(fresh, 0));
    Ok((zero.apply(&unitary)?, one.apply(&unitary)?))
}

/// The largest-|amplitude| computational ket of a state.
pub fn dominant_ket(state: &PureState) -> (usize, C64) {
    let mut best = 0usize;
    let mut best_norm = -1.0;
    for (i, a) in state.amplitudes().iter().enumerate() {
        if a.norm_sqr() > best_norm {
            best_norm = a.norm_sqr();
            best = i;
        }
    }
    (best, state.amplitudes()[best])
}

#[cfg(test)]
mod tests;
