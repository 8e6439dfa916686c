//! Cost function, finite-difference gradients, gradient-ascent optimizers,
//! training sessions and the shot-based swap-test estimator.
//!
//! The cost is the mean fidelity between each clean target and the network
//! output for the corrupted input; training maximizes it by gradient
//! ascent. Gradients are central finite differences per trainable
//! coefficient. A coefficient shared through a conjugate binding gets one
//! gradient entry, with the perturbation moving both the source layer and
//! its bound adjoint together.

mod optim;

#[cfg(test)]
mod tests;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand::seq::SliceRandom;
use rand_chacha::ChaCha12Rng;

pub use optim::{OptimizerConfig, OptimizerKind, OptimizerState};

use crate::codes::{Dataset, TrainingPair};
use crate::error::{Error, Result};
use crate::network::cache::{NetworkCache, build_cache, perturbed_layer_mat};
use crate::network::ensemble::{Ensemble, pair_fidelity, propagate};
use crate::network::{ChannelMode, NetworkParams, NetworkSpec, mirror_adjoint};
use crate::pauli::add_pauli_scaled;
use crate::qcore::{C64, CMatrix, DensityMatrix, PureState, embed_on_qubits, fidelity_pure};
use crate::rng::{STREAM_BATCH, STREAM_INIT, STREAM_MEASURE, stream};

/// Default finite-difference step.
pub const DEFAULT_FD_EPSILON: f64 = 1e-3;

/// How the per-epoch costs are evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CostMode {
    /// Exact fidelity.
    Exact,
    /// Shot-based swap-test estimate with the given shot count.
    SwapTest { shots: u64 },
}

/// Validation-plateau stopping rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EarlyStopping {
    pub patience: usize,
    pub min_delta: f64,
}

/// How an embedded channel enters the training cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbeddedTrainMode {
    /// Full Kraus map, the default: the cost is the deterministic mixture
    /// over corruption cases.
    Deterministic,
    /// One corruption case drawn per pair when the session starts, fixed
    /// for the whole session.
    SampledFixed,
    /// One corruption case drawn per pair at the start of every epoch.
    SampledPerEpoch,
}

/// Fixed hyperparameters of one training session.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: Option<usize>,
    pub optimizer: OptimizerConfig,
    pub early_stopping: Option<EarlyStopping>,
    pub cost_mode: CostMode,
    /// Stop once the validation cost reaches this value.
    pub stop_when_val_at_least: Option<f64>,
    /// Central-difference step for the gradient.
    pub fd_epsilon: f64,
    pub embedded_mode: EmbeddedTrainMode,
}

impl SessionConfig {
    pub fn new(learning_rate: f64, epochs: usize) -> Self {
        Self {
            learning_rate,
            epochs,
            batch_size: None,
            optimizer: OptimizerConfig::sgd(),
            early_stopping: None,
            cost_mode: CostMode::Exact,
            stop_when_val_at_least: None,
            fd_epsilon: DEFAULT_FD_EPSILON,
            embedded_mode: EmbeddedTrainMode::Deterministic,
        }
    }

    pub fn validate(&self) -> Result<()> {
        // Zero is allowed as a degenerate no-op (useful for evaluation-only
        // sessions); negative or non-finite rates are not.
        if !(self.learning_rate >= 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "learning rate must be a finite non-negative number, got {}",
                self.learning_rate
            )));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be at least 1".into()));
        }
        if let CostMode::SwapTest { shots } = self.cost_mode {
            if shots == 0 {
                return Err(Error::InvalidConfig("swap test needs at least one shot".into()));
            }
        }
        if !(self.fd_epsilon > 0.0) {
            return Err(Error::InvalidConfig("fd_epsilon must be positive".into()));
        }
        if let Some(b) = self.batch_size {
            if b == 0 {
                return Err(Error::InvalidConfig("batch size must be at least 1".into()));
            }
        }
        Ok(())
    }
}

/// One epoch of bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochStat {
    pub epoch: usize,
    pub session: usize,
    pub train_cost: f64,
    pub val_cost: f64,
    pub wall_ms: u64,
}

/// Per-epoch costs across one or more sessions.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainRecord {
    pub epochs: Vec<EpochStat>,
}

impl TrainRecord {
    pub fn last_val_cost(&self) -> Option<f64> {
        self.epochs.last().map(|e| e.val_cost)
    }

    /// Improvement of the validation cost over the trailing `window`
    /// epochs: max(window) - value at the window start.
    pub fn trailing_improvement(&self, window: usize) -> Option<f64> {
        if self.epochs.len() < window + 1 {
            return None;
        }
        let start = self.epochs.len() - window - 1;
        let base = self.epochs[start].val_cost;
        let peak = self.epochs[start + 1..]
            .iter()
            .map(|e| e.val_cost)
            .fold(f64::NEG_INFINITY, f64::max);
        Some(peak - base)
    }
}

/// Parameter-initialization schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitScheme {
    /// Every coefficient i.i.d. uniform in [0, 1) (avoids the plateaued
    /// all-zero start).
    Uniform01,
    Zeros,
}

/// Fresh parameters for a network.
pub fn init_params(spec: &NetworkSpec, scheme: InitScheme, seed: u64) -> NetworkParams {
    let mut params = NetworkParams::zeros(spec);
    if matches!(scheme, InitScheme::Uniform01) {
        let mut rng = stream(seed, STREAM_INIT);
        let mut flat = params.to_flat();
        for v in flat.iter_mut() {
            *v = rng.random::<f64>();
        }
        params.assign_flat(&flat).expect("matching length");
    }
    params
}

fn mean_fidelity_over(
    spec: &NetworkSpec,
    layer_mats: &[CMatrix],
    overrides: &[(usize, &CMatrix)],
    pairs: &[&TrainingPair],
    modes: &[ChannelMode],
) -> Result<f64> {
    let mut total = 0.0;
    for (pair, mode) in pairs.iter().zip(modes) {
        total += pair_fidelity(spec, layer_mats, overrides, &pair.input, &pair.target, *mode)?;
    }
    Ok(total / pairs.len() as f64)
}

/// Mean fidelity of the dataset under the current parameters (the training
/// cost, in [0, 1]).
pub fn cost(spec: &NetworkSpec, params: &NetworkParams, dataset: &Dataset) -> Result<f64> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let cache = build_cache(spec, params)?;
    let pairs: Vec<&TrainingPair> = dataset.pairs.iter().collect();
    let modes = vec![ChannelMode::Deterministic; pairs.len()];
    mean_fidelity_over(spec, &cache.layer_mats, &[], &pairs, &modes)
}

/// Flat index map: (layer, perceptron, coefficient count) per segment, in
/// the order of `NetworkParams::to_flat`.
fn perceptron_segments(spec: &NetworkSpec) -> Vec<(usize, usize, usize)> {
    let mut segments = Vec::new();
    for l in 1..=spec.n_layers() {
        if spec.is_bound(l) {
            continue;
        }
        let count = 1usize << (2 * (spec.layer_in(l) + 1));
        for j in 0..spec.layer_out(l) {
            segments.push((l, j, count));
        }
    }
    segments
}

struct GradientWorkspace<'a> {
    spec: &'a NetworkSpec,
    cache: NetworkCache,
    /// For each pair, the ensemble entering each layer (index l-1) under
    /// the unperturbed parameters.
    entering: Vec<Vec<Ensemble>>,
    pairs: Vec<&'a TrainingPair>,
    modes: Vec<ChannelMode>,
    /// bound partner of each layer (source -> bound), if any.
    bound_partner: Vec<Option<usize>>,
}

impl<'a> GradientWorkspace<'a> {
    fn new(
        spec: &'a NetworkSpec,
        params: &NetworkParams,
        pairs: Vec<&'a TrainingPair>,
        modes: Vec<ChannelMode>,
    ) -> Result<Self> {
        let cache = build_cache(spec, params)?;
        let mut entering = Vec::with_capacity(pairs.len());
        for (pair, mode) in pairs.iter().zip(&modes) {
            let mut per_layer = Vec::with_capacity(spec.n_layers());
            let mut ens = Ensemble::from_pure(&pair.input);
            for l in 1..=spec.n_layers() {
                per_layer.push(ens.clone());
                ens = step_one_layer(spec, &cache.layer_mats, &ens, l, *mode)?;
            }
            entering.push(per_layer);
        }
        let bound_partner = (0..=spec.n_layers())
            .map(|l| {
                spec.bindings()
                    .iter()
                    .find(|b| b.source == l)
                    .map(|b| b.bound)
            })
            .collect();
        Ok(Self { spec, cache, entering, pairs, modes, bound_partner })
    }

    /// Cost with layer `l` (and its bound partner) replaced, restarting
    /// each pair from the earliest affected layer.
    fn perturbed_cost(&self, l: usize, new_mat: &CMatrix) -> Result<f64> {
        let spec = self.spec;
        let partner = self.bound_partner[l];
        let mirrored = partner.map(|_| {
            mirror_adjoint(new_mat, spec.layer_in(l), spec.layer_out(l))
        });
        let mut overrides: Vec<(usize, &CMatrix)> = vec![(l, new_mat)];
        if let (Some(b), Some(m)) = (partner, mirrored.as_ref()) {
            overrides.push((b, m));
        }
        let start = overrides.iter().map(|(ol, _)| *ol).min().expect("nonempty");
        let mut total = 0.0;
        for (i, (pair, mode)) in self.pairs.iter().zip(&self.modes).enumerate() {
            let ens = propagate(
                spec,
                &self.cache.layer_mats,
                &overrides,
                &self.entering[i][start - 1],
                start,
                *mode,
            )?;
            total += ens.fidelity_against(&pair.target);
        }
        Ok(total / self.pairs.len() as f64)
    }
}

fn step_one_layer(
    spec: &NetworkSpec,
    layer_mats: &[CMatrix],
    state: &Ensemble,
    l: usize,
    mode: ChannelMode,
) -> Result<Ensemble> {
    let mut ens = state.clone();
    ens.append_zeros(spec.layer_out(l));
    ens.apply(&layer_mats[l - 1]);
    ens.trace_out_first(spec.layer_in(l));
    ens.consolidate()?;
    if let Some(slot) = spec.channel_slot() {
        if slot.after_layer == l {
            ens.apply_channel(&slot.channel, mode)?;
        }
    }
    Ok(ens)
}

/// Central finite-difference gradient of the mean fidelity over `pairs`,
/// one entry per trainable coefficient in flat order.
pub fn gradient_pairs(
    spec: &NetworkSpec,
    params: &NetworkParams,
    pairs: Vec<&TrainingPair>,
    modes: Vec<ChannelMode>,
    epsilon: f64,
) -> Result<Vec<f64>> {
    if pairs.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidConfig("epsilon must be positive".into()));
    }
    let ws = GradientWorkspace::new(spec, params, pairs, modes)?;
    let segments = perceptron_segments(spec);
    let mut grad = Vec::with_capacity(params.flat_len());
    for (l, j, count) in segments {
        let pc = ws.cache.perceptrons[l - 1].as_ref().expect("source layer");
        let string_len = spec.layer_in(l) + 1;
        for s in 0..count {
            let mut plus = pc.generators[j].clone();
            add_pauli_scaled(&mut plus, s, string_len, epsilon)?;
            let mat_plus = perturbed_layer_mat(spec, &ws.cache, l, j, &plus)?;
            let c_plus = ws.perturbed_cost(l, &mat_plus)?;

            let mut minus = pc.generators[j].clone();
            add_pauli_scaled(&mut minus, s, string_len, -epsilon)?;
            let mat_minus = perturbed_layer_mat(spec, &ws.cache, l, j, &minus)?;
            let c_minus = ws.perturbed_cost(l, &mat_minus)?;

            grad.push((c_plus - c_minus) / (2.0 * epsilon));
        }
    }
    Ok(grad)
}

/// Central finite-difference gradient of the dataset cost.
pub fn gradient(
    spec: &NetworkSpec,
    params: &NetworkParams,
    dataset: &Dataset,
    epsilon: f64,
) -> Result<Vec<f64>> {
    let pairs: Vec<&TrainingPair> = dataset.pairs.iter().collect();
    let modes = vec![ChannelMode::Deterministic; pairs.len()];
    gradient_pairs(spec, params, pairs, modes, epsilon)
}

/// Draws the per-pair corruption cases for the sampled embedded-channel
/// training modes, using the channel's Born probabilities at the slot.
fn assign_embedded_cases(
    spec: &NetworkSpec,
    params: &NetworkParams,
    dataset: &Dataset,
    rng: &mut ChaCha12Rng,
) -> Result<Vec<ChannelMode>> {
    let slot = match spec.channel_slot() {
        Some(slot) => slot,
        None => return Ok(vec![ChannelMode::Deterministic; dataset.len()]),
    };
    let cache = build_cache(spec, params)?;
    let mut modes = Vec::with_capacity(dataset.len());
    for pair in &dataset.pairs {
        // State entering the slot boundary.
        let mut ens = Ensemble::from_pure(&pair.input);
        for l in 1..=slot.after_layer {
            ens.append_zeros(spec.layer_out(l));
            ens.apply(&cache.layer_mats[l - 1]);
            ens.trace_out_first(spec.layer_in(l));
            ens.consolidate()?;
        }
        let rho = ens.to_density();
        let channel = &slot.channel;
        let probs: Vec<f64> = (0..channel.len())
            .map(|k| {
                let op = channel.op(k);
                op.mul(rho.matrix()).mul(&op.dagger()).trace().re.max(0.0)
            })
            .collect();
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut pick = probs.len() - 1;
        for (k, &p) in probs.iter().enumerate() {
            acc += p;
            if u < acc && p > 0.0 {
                pick = k;
                break;
            }
        }
        modes.push(ChannelMode::Fixed(channel.case(pick)));
    }
    Ok(modes)
}

fn record_cost(
    spec: &NetworkSpec,
    cache_mats: &[CMatrix],
    dataset: &Dataset,
    cost_mode: CostMode,
    rng: &mut ChaCha12Rng,
) -> Result<f64> {
    let pairs: Vec<&TrainingPair> = dataset.pairs.iter().collect();
    match cost_mode {
        CostMode::Exact => {
            let modes = vec![ChannelMode::Deterministic; pairs.len()];
            mean_fidelity_over(spec, cache_mats, &[], &pairs, &modes)
        }
        CostMode::SwapTest { shots } => {
            let mut total = 0.0;
            for pair in &pairs {
                let ens = propagate(
                    spec,
                    cache_mats,
                    &[],
                    &Ensemble::from_pure(&pair.input),
                    1,
                    ChannelMode::Deterministic,
                )?;
                let est = swap_test_fidelity(&ens.to_density(), &pair.target, shots, rng)?;
                total += est.fidelity;
            }
            Ok(total / pairs.len() as f64)
        }
    }
}

/// Runs one fixed-hyperparameter session: epochs of (batched) gradient
/// ascent, recording train and validation cost each epoch.
///
/// Early stopping watches the validation cost and restores the
/// best-validation snapshot. `session_index` and `epoch_offset` only label
/// the record; `clock` supplies wall-clock milliseconds (pass a counter or
/// `|| 0` where timing is unavailable).
#[allow(clippy::too_many_arguments)]
pub fn run_session(
    spec: &NetworkSpec,
    params: NetworkParams,
    train: &Dataset,
    val: &Dataset,
    cfg: &SessionConfig,
    seed: u64,
    session_index: usize,
    epoch_offset: usize,
    clock: &mut dyn FnMut() -> u64,
) -> Result<(NetworkParams, TrainRecord)> {
    cfg.validate()?;
    if train.is_empty() || val.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut params = params;
    let mut flat = params.to_flat();
    let mut optimizer = OptimizerState::new(cfg.optimizer, flat.len());
    let mut record = TrainRecord::default();
    let mut shuffle_rng = stream(seed, STREAM_BATCH);
    let mut measure_rng = stream(seed, STREAM_MEASURE);
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut stale_epochs = 0usize;

    let mut fixed_modes: Option<Vec<ChannelMode>> = None;
    if cfg.embedded_mode == EmbeddedTrainMode::SampledFixed {
        fixed_modes = Some(assign_embedded_cases(spec, &params, train, &mut shuffle_rng)?);
    }

    let start_ms = clock();
    for epoch in 1..=cfg.epochs {
        let epoch_modes = match cfg.embedded_mode {
            EmbeddedTrainMode::Deterministic => vec![ChannelMode::Deterministic; train.len()],
            EmbeddedTrainMode::SampledFixed => fixed_modes.clone().expect("assigned above"),
            EmbeddedTrainMode::SampledPerEpoch => {
                assign_embedded_cases(spec, &params, train, &mut shuffle_rng)?
            }
        };

        let mut order: Vec<usize> = (0..train.len()).collect();
        let batch = cfg.batch_size.unwrap_or(train.len()).min(train.len());
        if cfg.batch_size.is_some() {
            order.shuffle(&mut shuffle_rng);
        }
        for chunk in order.chunks(batch) {
            let pairs: Vec<&TrainingPair> = chunk.iter().map(|&i| &train.pairs[i]).collect();
            let modes: Vec<ChannelMode> = chunk.iter().map(|&i| epoch_modes[i]).collect();
            let grad = gradient_pairs(spec, &params, pairs, modes, cfg.fd_epsilon)?;
            optimizer.step(&mut flat, &grad, cfg.learning_rate);
            params.assign_flat(&flat)?;
        }

        let cache = build_cache(spec, &params)?;
        let train_cost =
            record_cost(spec, &cache.layer_mats, train, cfg.cost_mode, &mut measure_rng)?;
        let val_cost = record_cost(spec, &cache.layer_mats, val, cfg.cost_mode, &mut measure_rng)?;
        if !train_cost.is_finite() || !val_cost.is_finite() {
            return Err(Error::NonFiniteCost { epoch: epoch_offset + epoch });
        }
        record.epochs.push(EpochStat {
            epoch: epoch_offset + epoch,
            session: session_index,
            train_cost,
            val_cost,
            wall_ms: clock().saturating_sub(start_ms),
        });

        if let Some(es) = cfg.early_stopping {
            match &mut best {
                Some((best_val, snapshot)) => {
                    if val_cost > *best_val + es.min_delta {
                        *best_val = val_cost;
                        snapshot.clone_from(&flat);
                        stale_epochs = 0;
                    } else {
                        stale_epochs += 1;
                        if stale_epochs >= es.patience {
                            params.assign_flat(snapshot)?;
                            return Ok((params, record));
                        }
                    }
                }
                None => best = Some((val_cost, flat.clone())),
            }
        }
        if let Some(threshold) = cfg.stop_when_val_at_least {
            if val_cost >= threshold {
                return Ok((params, record));
            }
        }
    }
    if let Some((best_val, snapshot)) = best {
        if record.last_val_cost().map(|v| v < best_val).unwrap_or(false) {
            params.assign_flat(&snapshot)?;
        }
    }
    Ok((params, record))
}

/// Chains sessions, each continuing from the previous parameters, with
/// cumulative epoch numbering. Per-session seeds derive from `seed`.
pub fn run_schedule(
    spec: &NetworkSpec,
    params: NetworkParams,
    train: &Dataset,
    val: &Dataset,
    sessions: &[SessionConfig],
    seed: u64,
    clock: &mut dyn FnMut() -> u64,
) -> Result<(NetworkParams, TrainRecord)> {
    let mut params = params;
    let mut record = TrainRecord::default();
    for (i, cfg) in sessions.iter().enumerate() {
        let session_seed = seed.wrapping_add(1 + i as u64);
        let offset = record.epochs.last().map(|e| e.epoch).unwrap_or(0);
        let (next, session_record) =
            run_session(spec, params, train, val, cfg, session_seed, i, offset, clock)?;
        params = next;
        record.epochs.extend(session_record.epochs);
    }
    Ok((params, record))
}

/// A swap-test fidelity estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapTestEstimate {
    /// 2 P̂₀ - 1, clamped to [0, 1].
    pub fidelity: f64,
    /// 2 P̂₀ - 1 before clamping (the unbiased estimator).
    pub raw: f64,
    /// Fraction of shots measuring the ancilla in |0⟩.
    pub p0_hat: f64,
    pub shots: u64,
}

/// Estimates F(ρ, |ψ⟩) from S simulated swap-test shots: the ancilla
/// measures 0 with probability P₀ = (1 + F)/2, and F̂ = 2·count₀/S - 1.
pub fn swap_test_fidelity(
    rho_out: &DensityMatrix,
    target: &PureState,
    shots: u64,
    rng: &mut ChaCha12Rng,
) -> Result<SwapTestEstimate> {
    if shots == 0 {
        return Err(Error::InvalidConfig("swap test needs at least one shot".into()));
    }
    let f = fidelity_pure(target, rho_out)?;
    let p0 = 0.5 + 0.5 * f;
    let mut count0 = 0u64;
    for _ in 0..shots {
        if rng.random::<f64>() < p0 {
            count0 += 1;
        }
    }
    let p0_hat = count0 as f64 / shots as f64;
    let raw = 2.0 * p0_hat - 1.0;
    Ok(SwapTestEstimate { fidelity: raw.clamp(0.0, 1.0), raw, p0_hat, shots })
}

/// The ancilla-zero probability of the literal swap-test circuit
/// (Hadamard, controlled swaps, Hadamard, measure), simulated densely on
/// the (1 + 2n)-qubit register. Agrees with (1 + F)/2; the estimator above
/// relies on that identity and tests pin the two together.
pub fn swap_test_p0_circuit(rho_out: &DensityMatrix, target: &PureState) -> Result<f64> {
    if rho_out.dim() != target.dim() {
        return Err(Error::DimensionMismatch { expected: target.dim(), got: rho_out.dim() });
    }
    let n = rho_out.n_qubits();
    let total = 1 + 2 * n;
    let dim = 1usize << total;

    // ancilla ⊗ target ⊗ output
    let anc = PureState::basis(1, 0).to_density();
    let full = anc
        .matrix()
        .kron(target.to_density().matrix())
        .kron(rho_out.matrix());

    let h = {
        let s = 1.0 / 2.0f64.sqrt();
        CMatrix::from_real_rows(&[&[s, s], &[s, -s]])
    };
    let h_anc = embed_on_qubits(&h, &[0], total)?;

    // Product of the controlled swaps: with the ancilla set, swap target
    // qubit i with output qubit i.
    let cswaps = CMatrix::from_fn(dim, |r, c| {
        let anc_bit = c >> (total - 1) & 1;
        let image = if anc_bit == 1 {
            let targ = (c >> n) & ((1 << n) - 1);
            let out = c & ((1 << n) - 1);
            (1 << (total - 1)) | (out << n) | targ
        } else {
            c
        };
        C64::new(if r == image { 1.0 } else { 0.0 }, 0.0)
    });

    let circuit = h_anc.mul(&cswaps).mul(&h_anc);
    let final_rho = circuit.mul(&full).mul(&circuit.dagger());
    let mut p0 = 0.0;
    for idx in 0..dim {
        if idx >> (total - 1) & 1 == 0 {
            p0 += final_rho[(idx, idx)].re;
        }
    }
    Ok(p0)
}
