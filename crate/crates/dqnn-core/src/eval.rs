//! Bloch-mesh fidelity reports, per-corruption conditional fidelities and
//! the comparison against the classical syndrome-decoder baseline.
//!
//! The mesh mean is the sin-weighted Riemann sum
//! F̄ = (1/4π) Σ_ij F(θ_i, φ_j) sin(θ_i) Δθ Δφ over the N×N grid. Those
//! weights sum to slightly less than one at finite N, so a perfect pipeline
//! scores the weight total rather than exactly one; the weight-normalized
//! mean is reported alongside.


use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::channels::{CaseLabel, KrausChannel, bitflip_iid};
use crate::codes::{CodeKind, bitflip3_failure_enumerated, bloch_state, mesh_angles};
use crate::error::{Error, Result};
use crate::network::cache::build_cache;
use crate::network::ensemble::{Ensemble, propagate};
use crate::network::{ChannelMode, NetworkParams, NetworkSpec};
use crate::qcore::{C64, CMatrix, PureState};
use crate::rng::{STREAM_DATA, stream};

/// How mesh inputs are corrupted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CorruptionMode {
    /// Full Kraus map (noise-free report, the default).
    DeterministicKraus,
    /// One sampled trajectory per cell, seeded.
    Sampled { seed: u64 },
    /// Every cell forced to one corruption case.
    FixedCase(CaseLabel),
    /// No corruption.
    Clean,
}

/// What a mesh evaluation runs over: the logical encoding, an optional
/// external channel corrupting the encoded inputs, and the corruption
/// mode. Networks with an embedded channel take `channel: None`; the mode
/// then steers the embedded channel instead.
#[derive(Debug, Clone)]
pub struct EvalScenario {
    pub code: CodeKind,
    pub channel: Option<KrausChannel>,
    pub mode: CorruptionMode,
}

/// Fidelity over an N×N Bloch mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshReport {
    pub n: usize,
    /// Row-major grid; cell (i, j) at index i·n + j.
    pub grid: Vec<f64>,
    /// The sin-weighted Riemann mean.
    pub mean_fidelity: f64,
    /// The same mean with the weights normalized to sum to one.
    pub normalized_mean: f64,
    pub scenario: String,
}

impl MeshReport {
    pub fn theta(&self, i: usize) -> f64 {
        i as f64 * core::f64::consts::PI / self.n as f64
    }

    pub fn phi(&self, j: usize) -> f64 {
        j as f64 * 2.0 * core::f64::consts::PI / self.n as f64
    }

    pub fn cell(&self, i: usize, j: usize) -> f64 {
        self.grid[i * self.n + j]
    }
}

/// Σ_ij sin(θ_i) Δθ Δφ / 4π: the total Riemann weight of the N×N mesh.
pub fn mesh_weight_sum(n: usize) -> f64 {
    let dt = core::f64::consts::PI / n as f64;
    let dp = 2.0 * core::f64::consts::PI / n as f64;
    (0..n)
        .map(|i| (i as f64 * dt).sin() * dt * dp / (4.0 * core::f64::consts::PI))
        .sum::<f64>()
        * n as f64
}

fn weighted_means(n: usize, grid: &[f64]) -> (f64, f64) {
    let dt = core::f64::consts::PI / n as f64;
    let dp = 2.0 * core::f64::consts::PI / n as f64;
    let mut mean = 0.0;
    let mut weight_total = 0.0;
    for i in 0..n {
        let w = (i as f64 * dt).sin() * dt * dp / (4.0 * core::f64::consts::PI);
        for j in 0..n {
            mean += grid[i * n + j] * w;
            weight_total += w;
        }
    }
    (mean, mean / weight_total)
}

/// Builds the input ensemble for one mesh cell under an external channel.
fn external_input(
    channel: Option<&KrausChannel>,
    encoded: &PureState,
    mode: CorruptionMode,
    rng: &mut rand_chacha::ChaCha12Rng,
) -> Result<Ensemble> {
    let channel = match (channel, mode) {
        (None, _) | (Some(_), CorruptionMode::Clean) => {
            return Ok(Ensemble::from_pure(encoded));
        }
        (Some(ch), _) => ch,
    };
    match mode {
        CorruptionMode::Clean => unreachable!("handled above"),
        CorruptionMode::DeterministicKraus => {
            // One member per Kraus branch is exactly Σ E ρ E†.
            let members: Vec<Vec<C64>> = channel
                .ops()
                .iter()
                .map(|op| op.matvec(encoded.amplitudes()))
                .collect();
            Ok(Ensemble::from_members(encoded.n_qubits(), members))
        }
        CorruptionMode::Sampled { .. } => {
            let outcome = crate::channels::sample_corruption(channel, encoded, rng)?;
            Ok(Ensemble::from_pure(&outcome.state))
        }
        CorruptionMode::FixedCase(label) => {
            let k = channel.find_case(label).ok_or(Error::InvalidCaseLabel)?;
            let branch = channel.op(k).matvec(encoded.amplitudes());
            let state = PureState::new(branch)?.normalized();
            Ok(Ensemble::from_pure(&state))
        }
    }
}

/// The embedded-channel mode corresponding to a corruption mode; sampling
/// is resolved per cell from the channel's case probabilities.
fn embedded_mode(
    spec: &NetworkSpec,
    mode: CorruptionMode,
    layer_mats: &[CMatrix],
    input: &PureState,
    rng: &mut rand_chacha::ChaCha12Rng,
) -> Result<ChannelMode> {
    let slot = spec.channel_slot().expect("embedded channel present");
    Ok(match mode {
        CorruptionMode::DeterministicKraus => ChannelMode::Deterministic,
        CorruptionMode::Clean => ChannelMode::Off,
        CorruptionMode::FixedCase(label) => ChannelMode::Fixed(label),
        CorruptionMode::Sampled { .. } => {
            // Born probabilities of each case at the slot boundary.
            let mut ens = Ensemble::from_pure(input);
            for l in 1..=slot.after_layer {
                ens.append_zeros(spec.layer_out(l));
                ens.apply(&layer_mats[l - 1]);
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
            ChannelMode::Fixed(channel.case(pick))
        }
    })
}

/// Evaluates the mean fidelity over the Eq.-12 mesh grid under the given
/// scenario.
pub fn mesh_fidelity(
    spec: &NetworkSpec,
    params: &NetworkParams,
    n: usize,
    scenario: &EvalScenario,
) -> Result<MeshReport> {
    if n < 2 {
        return Err(Error::InvalidConfig(String::from("mesh needs N >= 2")));
    }
    if scenario.code.n_physical() != spec.input_qubits() && spec.channel_slot().is_none() {
        return Err(Error::DimensionMismatch {
            expected: spec.input_qubits(),
            got: scenario.code.n_physical(),
        });
    }
    if scenario.channel.is_some() && spec.channel_slot().is_some() {
        return Err(Error::InvalidConfig(String::from(
            "pick either an external channel or the embedded one",
        )));
    }
    let cache = build_cache(spec, params)?;
    let seed = match scenario.mode {
        CorruptionMode::Sampled { seed } => seed,
        _ => 0,
    };
    let mut rng = stream(seed, STREAM_DATA);
    let mut grid = Vec::with_capacity(n * n);
    for angles in mesh_angles(n) {
        let logical = bloch_state(angles);
        let encoded = scenario.code.encode(&logical)?;
        // The target is the clean encoded state on the network's output
        // width; for channel-in-network models that is the logical qubit.
        let target = if spec.output_qubits() == encoded.n_qubits() {
            encoded.clone()
        } else if spec.output_qubits() == 1 {
            logical.clone()
        } else {
            return Err(Error::DimensionMismatch {
                expected: spec.output_qubits(),
                got: encoded.n_qubits(),
            });
        };
        let (input, mode) = if spec.channel_slot().is_some() {
            let mode =
                embedded_mode(spec, scenario.mode, &cache.layer_mats, &encoded, &mut rng)?;
            (Ensemble::from_pure(&encoded), mode)
        } else {
            (
                external_input(scenario.channel.as_ref(), &encoded, scenario.mode, &mut rng)?,
                ChannelMode::Deterministic,
            )
        };
        let out = propagate(spec, &cache.layer_mats, &[], &input, 1, mode)?;
        grid.push(out.fidelity_against(&target));
    }
    let (mean_fidelity, normalized_mean) = weighted_means(n, &grid);
    Ok(MeshReport {
        n,
        grid,
        mean_fidelity,
        normalized_mean,
        scenario: format!(
            "code={} channel={} mode={:?}",
            scenario.code.name(),
            scenario.channel.as_ref().map(|c| c.label()).unwrap_or("embedded/none"),
            scenario.mode,
        ),
    })
}

/// Per-corruption-case mesh fidelities.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalReport {
    pub per_case: Vec<(CaseLabel, MeshReport)>,
}

impl ConditionalReport {
    pub fn mean_of(&self, case: CaseLabel) -> Option<f64> {
        self.per_case
            .iter()
            .find(|(c, _)| *c == case)
            .map(|(_, r)| r.mean_fidelity)
    }

    /// Plain average of the per-case means.
    pub fn grand_mean(&self) -> f64 {
        if self.per_case.is_empty() {
            return 0.0;
        }
        self.per_case.iter().map(|(_, r)| r.mean_fidelity).sum::<f64>()
            / self.per_case.len() as f64
    }
}

/// One mesh per case with the corruption forced to that case.
pub fn conditional_fidelity(
    spec: &NetworkSpec,
    params: &NetworkParams,
    n: usize,
    cases: &[CaseLabel],
    scenario: &EvalScenario,
) -> Result<ConditionalReport> {
    let mut per_case = Vec::with_capacity(cases.len());
    for &case in cases {
        let conditioned = EvalScenario {
            code: scenario.code,
            channel: scenario.channel.clone(),
            mode: CorruptionMode::FixedCase(case),
        };
        per_case.push((case, mesh_fidelity(spec, params, n, &conditioned)?));
    }
    Ok(ConditionalReport { per_case })
}

/// One row of the decoder-baseline comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleRow {
    pub p: f64,
    /// Mean mesh fidelity of the network under i.i.d. flips at p.
    pub qae_mean_fidelity: f64,
    /// 1 - enumerated failure probability of majority-vote decoding.
    pub oracle_success: f64,
    /// The enumerated failure probability itself (= 3(1-p)p² + p³).
    pub failure_probability: f64,
}

/// Sweeps p, comparing the network's mean mesh fidelity under i.i.d. bit
/// flips against the classical syndrome decoder's success probability.
pub fn compare_to_oracle(
    spec: &NetworkSpec,
    params: &NetworkParams,
    n: usize,
    p_values: &[f64],
) -> Result<Vec<OracleRow>> {
    let mut rows = Vec::with_capacity(p_values.len());
    for &p in p_values {
        let channel = bitflip_iid(p, 3)?;
        let scenario = EvalScenario {
            code: CodeKind::Bitflip3,
            channel: Some(channel),
            mode: CorruptionMode::DeterministicKraus,
        };
        let report = mesh_fidelity(spec, params, n, &scenario)?;
        let failure = bitflip3_failure_enumerated(p)?;
        rows.push(OracleRow {
            p,
            qae_mean_fidelity: report.mean_fidelity,
            oracle_success: 1.0 - failure,
            failure_probability: failure,
        });
    }
    Ok(rows)
}
