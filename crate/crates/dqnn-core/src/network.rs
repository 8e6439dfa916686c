//! Network topology, per-layer channel maps and forward propagation.
//!
//! A network `[m_in, m_1, ..., m_out]` has one layer per width transition.
//! Layer `l` (1-based) couples the `widths[l-1]` qubits of the previous
//! layer to `widths[l]` fresh qubits through one perceptron unitary per
//! fresh qubit, then traces the previous layer out. A layer may instead be
//! conjugate-bound to another layer, applying the adjoint of that layer's
//! unitary with the qubit roles mirrored and sharing its parameters. A
//! Kraus channel can be embedded at an inter-layer boundary, which is how
//! the codeword-discovery networks carry their noise inside the model.

pub(crate) mod cache;
pub(crate) mod ensemble;


use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand_chacha::ChaCha12Rng;

use crate::channels::{CaseLabel, KrausChannel, apply_kraus};
use crate::error::{Error, Result};
use crate::pauli::{PauliCoefficients, build_generator, parameter_count};
use crate::qcore::{C64, CMatrix, DensityMatrix, UnitaryMatrix, embed_on_qubits, expi_hermitian};

/// A conjugate-layer binding: `bound` applies the mirrored adjoint of
/// `source` and carries no parameters of its own. Layers are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Binding {
    pub source: usize,
    pub bound: usize,
}

/// A noise channel placed at an inter-layer boundary: it acts on the
/// intermediate state after `after_layer` layers have been applied.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSlot {
    pub after_layer: usize,
    pub channel: KrausChannel,
}

/// Topology, conjugate bindings and optional embedded channel.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSpec {
    widths: Vec<usize>,
    bindings: Vec<Binding>,
    channel_slot: Option<ChannelSlot>,
}

impl NetworkSpec {
    pub fn new(widths: Vec<usize>) -> Result<Self> {
        if widths.len() < 2 {
            return Err(Error::InvalidTopology(String::from("need at least two widths")));
        }
        if widths.iter().any(|&w| w == 0) {
            return Err(Error::InvalidTopology(String::from("every width must be at least 1")));
        }
        Ok(Self { widths, bindings: Vec::new(), channel_slot: None })
    }

    /// Adds a conjugate binding; the widths must mirror: if the source maps
    /// m to n qubits, the bound layer must map n to m.
    pub fn with_binding(mut self, source: usize, bound: usize) -> Result<Self> {
        let layers = self.n_layers();
        if source == 0 || source > layers {
            return Err(Error::InvalidLayer(source));
        }
        if bound == 0 || bound > layers {
            return Err(Error::InvalidLayer(bound));
        }
        if source == bound {
            return Err(Error::InvalidTopology(String::from("layer cannot bind to itself")));
        }
        for b in &self.bindings {
            if b.bound == bound || b.source == bound || b.bound == source {
                return Err(Error::InvalidTopology(format!(
                    "layers {source} and {bound} overlap an existing binding"
                )));
            }
        }
        if self.layer_in(source) != self.layer_out(bound)
            || self.layer_out(source) != self.layer_in(bound)
        {
            return Err(Error::InvalidTopology(format!(
                "binding {source}->{bound} violates the mirror condition"
            )));
        }
        self.bindings.push(Binding { source, bound });
        Ok(self)
    }

    /// Embeds a channel after `after_layer` (a boundary strictly between
    /// layers). The channel must act on that boundary's qubit count.
    pub fn with_channel(mut self, after_layer: usize, channel: KrausChannel) -> Result<Self> {
        if after_layer == 0 || after_layer >= self.n_layers() {
            return Err(Error::InvalidLayer(after_layer));
        }
        if channel.n_qubits() != self.widths[after_layer] {
            return Err(Error::DimensionMismatch {
                expected: self.widths[after_layer],
                got: channel.n_qubits(),
            });
        }
        self.channel_slot = Some(ChannelSlot { after_layer, channel });
        Ok(self)
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    pub fn n_layers(&self) -> usize {
        self.widths.len() - 1
    }

    /// Input qubit count of layer `l`.
    pub fn layer_in(&self, l: usize) -> usize {
        self.widths[l - 1]
    }

    /// Output qubit count of layer `l`.
    pub fn layer_out(&self, l: usize) -> usize {
        self.widths[l]
    }

    pub fn input_qubits(&self) -> usize {
        self.widths[0]
    }

    pub fn output_qubits(&self) -> usize {
        *self.widths.last().expect("non-empty widths")
    }

    pub fn bindings(&self) -> &[Binding] {
        &self.bindings
    }

    pub fn channel_slot(&self) -> Option<&ChannelSlot> {
        self.channel_slot.as_ref()
    }

    /// The source layer a bound layer mirrors, if any.
    pub fn binding_source(&self, l: usize) -> Option<usize> {
        self.bindings.iter().find(|b| b.bound == l).map(|b| b.source)
    }

    pub fn is_bound(&self, l: usize) -> bool {
        self.binding_source(l).is_some()
    }

    fn check_layer(&self, l: usize) -> Result<()> {
        if l == 0 || l > self.n_layers() {
            return Err(Error::InvalidLayer(l));
        }
        Ok(())
    }

    /// Trainable coefficients: the full parameter count restricted to
    /// layers that actually carry parameters.
    pub fn trainable_parameter_count(&self) -> u64 {
        (1..=self.n_layers())
            .filter(|&l| !self.is_bound(l))
            .map(|l| parameter_count(&[self.layer_in(l), self.layer_out(l)]))
            .sum()
    }
}

/// Per-layer, per-perceptron Pauli coefficients; bound layers hold none.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams {
    layers: Vec<Option<Vec<PauliCoefficients>>>,
}

impl NetworkParams {
    /// All-zero coefficients (every layer unitary is the identity).
    pub fn zeros(spec: &NetworkSpec) -> Self {
        let layers = (1..=spec.n_layers())
            .map(|l| {
                if spec.is_bound(l) {
                    None
                } else {
                    Some(
                        (0..spec.layer_out(l))
                            .map(|_| PauliCoefficients::zeros(spec.layer_in(l) + 1))
                            .collect(),
                    )
                }
            })
            .collect();
        Self { layers }
    }

    /// Coefficients of layer `l`, one entry per perceptron; `None` for
    /// bound layers.
    pub fn layer(&self, l: usize) -> Option<&[PauliCoefficients]> {
        self.layers.get(l - 1).and_then(|p| p.as_deref())
    }

    pub fn layer_mut(&mut self, l: usize) -> Option<&mut Vec<PauliCoefficients>> {
        self.layers.get_mut(l - 1).and_then(|p| p.as_mut())
    }

    /// Checks shapes against a spec.
    pub fn validate(&self, spec: &NetworkSpec) -> Result<()> {
        if self.layers.len() != spec.n_layers() {
            return Err(Error::InvalidTopology(String::from("layer count mismatch")));
        }
        for l in 1..=spec.n_layers() {
            match (&self.layers[l - 1], spec.is_bound(l)) {
                (None, true) => {}
                (Some(percs), false) => {
                    if percs.len() != spec.layer_out(l) {
                        return Err(Error::InvalidTopology(format!(
                            "layer {l} needs {} perceptrons",
                            spec.layer_out(l)
                        )));
                    }
                    for p in percs {
                        if p.string_len() != spec.layer_in(l) + 1 {
                            return Err(Error::InvalidCoefficientCount(p.len()));
                        }
                    }
                }
                _ => return Err(Error::LayerIsBound(l)),
            }
        }
        Ok(())
    }

    /// Flattens trainable coefficients: layers ascending, perceptrons
    /// ascending, strings in index order.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for layer in self.layers.iter().flatten() {
            for perc in layer {
                out.extend_from_slice(perc.values());
            }
        }
        out
    }

    pub fn flat_len(&self) -> usize {
        self.layers
            .iter()
            .flatten()
            .map(|layer| layer.iter().map(|p| p.len()).sum::<usize>())
            .sum()
    }

    /// Inverse of [`Self::to_flat`] for the same spec.
    pub fn from_flat(spec: &NetworkSpec, flat: &[f64]) -> Result<Self> {
        let mut params = Self::zeros(spec);
        params.assign_flat(flat)?;
        Ok(params)
    }

    /// Writes a flat coefficient vector back into this structure.
    pub fn assign_flat(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.flat_len() {
            return Err(Error::DimensionMismatch { expected: self.flat_len(), got: flat.len() });
        }
        let mut offset = 0;
        for layer in self.layers.iter_mut().flatten() {
            for perc in layer.iter_mut() {
                let n = perc.len();
                perc.values_mut().copy_from_slice(&flat[offset..offset + n]);
                offset += n;
            }
        }
        Ok(())
    }
}

/// How an embedded channel is treated during propagation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelMode {
    /// Full Kraus map (deterministic CPTP mixture).
    Deterministic,
    /// Force one corruption case, renormalizing.
    Fixed(CaseLabel),
    /// Skip the channel entirely.
    Off,
}

/// The unitary of a parameterized layer: the ascending product of its
/// perceptron unitaries, each acting on all source qubits plus its own
/// target qubit, on the `layer_in + layer_out` working register.
pub fn layer_unitary(
    spec: &NetworkSpec,
    params: &NetworkParams,
    l: usize,
) -> Result<UnitaryMatrix> {
    spec.check_layer(l)?;
    if spec.is_bound(l) {
        return Err(Error::LayerIsBound(l));
    }
    let percs = params.layer(l).ok_or(Error::LayerIsBound(l))?;
    let mat = layer_unitary_matrix(spec, percs, l)?;
    UnitaryMatrix::new_unchecked(mat)
}

pub(crate) fn layer_unitary_matrix(
    spec: &NetworkSpec,
    percs: &[PauliCoefficients],
    l: usize,
) -> Result<CMatrix> {
    let m = spec.layer_in(l);
    let n_targets = spec.layer_out(l);
    if percs.len() != n_targets {
        return Err(Error::InvalidTopology(format!(
            "layer {l} needs {n_targets} perceptrons, got {}",
            percs.len()
        )));
    }
    let working = m + n_targets;
    let mut acc = CMatrix::identity(1 << working);
    for (j, coeffs) in percs.iter().enumerate() {
        let small = expi_hermitian(&build_generator(coeffs))?;
        let embedded = embed_perceptron(small.matrix(), m, j, working)?;
        // ascending application order: U_j multiplies from the left
        acc = embedded.mul(&acc);
    }
    Ok(acc)
}

/// Embeds a perceptron unitary on the source qubits `0..m` plus target
/// qubit `m + j` of the working register.
pub(crate) fn embed_perceptron(
    small: &CMatrix,
    m: usize,
    j: usize,
    working: usize,
) -> Result<CMatrix> {
    let mut targets: Vec<usize> = (0..m).collect();
    targets.push(m + j);
    embed_on_qubits(small, &targets, working)
}

/// The unitary of a conjugate-bound layer: the adjoint of its source
/// layer's unitary with the register roles mirrored, so the bound layer's
/// input qubits take the place of the source layer's fresh qubits.
pub fn conjugate_layer_unitary(
    spec: &NetworkSpec,
    params: &NetworkParams,
    l_bound: usize,
) -> Result<UnitaryMatrix> {
    spec.check_layer(l_bound)?;
    let source = spec.binding_source(l_bound).ok_or(Error::LayerNotBound(l_bound))?;
    let percs = params.layer(source).ok_or(Error::LayerIsBound(source))?;
    let src = layer_unitary_matrix(spec, percs, source)?;
    let mat = mirror_adjoint(&src, spec.layer_in(source), spec.layer_out(source));
    UnitaryMatrix::new_unchecked(mat)
}

/// Mirrored adjoint: for a source register of (m source, n fresh) qubits,
/// the operator on an (n, m) register applying U† with the blocks swapped.
pub(crate) fn mirror_adjoint(u_src: &CMatrix, m: usize, n: usize) -> CMatrix {
    let dim = 1usize << (m + n);
    debug_assert_eq!(u_src.dim(), dim);
    let low_mask = (1usize << m) - 1;
    // bound index (x: n bits, y: m bits) -> source index (y: m bits, x: n bits)
    let map = |i: usize| ((i & low_mask) << n) | (i >> m);
    CMatrix::from_fn(dim, |r, c| u_src[(map(c), map(r))].conj())
}

/// Effective unitary of any layer, bound or not.
pub fn effective_layer_unitary(
    spec: &NetworkSpec,
    params: &NetworkParams,
    l: usize,
) -> Result<UnitaryMatrix> {
    if spec.is_bound(l) {
        conjugate_layer_unitary(spec, params, l)
    } else {
        layer_unitary(spec, params, l)
    }
}

/// One layer map: append fresh |0..0⟩ qubits, conjugate by the layer
/// unitary, trace out the previous layer.
pub fn apply_layer(
    spec: &NetworkSpec,
    params: &NetworkParams,
    l: usize,
    rho_prev: &DensityMatrix,
) -> Result<DensityMatrix> {
    let unitary = effective_layer_unitary(spec, params, l)?;
    apply_layer_matrix(spec, unitary.matrix(), l, rho_prev)
}

pub(crate) fn apply_layer_matrix(
    spec: &NetworkSpec,
    unitary: &CMatrix,
    l: usize,
    rho_prev: &DensityMatrix,
) -> Result<DensityMatrix> {
    let m = spec.layer_in(l);
    let n_new = spec.layer_out(l);
    if rho_prev.n_qubits() != m {
        return Err(Error::DimensionMismatch { expected: 1 << m, got: rho_prev.dim() });
    }
    let fresh = crate::qcore::PureState::basis(n_new, 0).to_density();
    let extended = rho_prev.matrix().kron(fresh.matrix());
    let conjugated = unitary.mul(&extended).mul(&unitary.dagger());
    let full = DensityMatrix::from_parts(m + n_new, conjugated);
    let discard: Vec<usize> = (0..m).collect();
    crate::qcore::partial_trace(&full, &discard)
}

fn apply_embedded_channel(
    channel: &KrausChannel,
    rho: &DensityMatrix,
    mode: ChannelMode,
) -> Result<DensityMatrix> {
    match mode {
        ChannelMode::Deterministic => apply_kraus(channel, rho),
        ChannelMode::Off => Ok(rho.clone()),
        ChannelMode::Fixed(label) => {
            let k = channel.find_case(label).ok_or(Error::InvalidCaseLabel)?;
            let op = channel.op(k);
            let raw = op.mul(rho.matrix()).mul(&op.dagger());
            let tr = raw.trace().re;
            if tr <= 0.0 {
                return Err(Error::InvalidProbability(tr));
            }
            Ok(DensityMatrix::from_parts(rho.n_qubits(), raw.scale(C64::new(1.0 / tr, 0.0))))
        }
    }
}

/// Full forward propagation with the embedded channel (if any) applied as
/// its deterministic Kraus map.
pub fn forward(
    spec: &NetworkSpec,
    params: &NetworkParams,
    rho_in: &DensityMatrix,
) -> Result<DensityMatrix> {
    forward_with_mode(spec, params, rho_in, ChannelMode::Deterministic)
}

/// Forward propagation with explicit treatment of the embedded channel.
pub fn forward_with_mode(
    spec: &NetworkSpec,
    params: &NetworkParams,
    rho_in: &DensityMatrix,
    mode: ChannelMode,
) -> Result<DensityMatrix> {
    if rho_in.n_qubits() != spec.input_qubits() {
        return Err(Error::DimensionMismatch {
            expected: 1 << spec.input_qubits(),
            got: rho_in.dim(),
        });
    }
    let mut rho = rho_in.clone();
    for l in 1..=spec.n_layers() {
        rho = apply_layer(spec, params, l, &rho)?;
        if let Some(slot) = spec.channel_slot() {
            if slot.after_layer == l {
                rho = apply_embedded_channel(&slot.channel, &rho, mode)?;
            }
        }
    }
    Ok(rho)
}

/// Forward propagation sampling one trajectory of the embedded channel;
/// returns the traversed case if a channel is present.
pub fn forward_sampled(
    spec: &NetworkSpec,
    params: &NetworkParams,
    rho_in: &DensityMatrix,
    rng: &mut ChaCha12Rng,
) -> Result<(DensityMatrix, Option<CaseLabel>)> {
    use rand::Rng;
    if rho_in.n_qubits() != spec.input_qubits() {
        return Err(Error::DimensionMismatch {
            expected: 1 << spec.input_qubits(),
            got: rho_in.dim(),
        });
    }
    let mut rho = rho_in.clone();
    let mut case = None;
    for l in 1..=spec.n_layers() {
        rho = apply_layer(spec, params, l, &rho)?;
        if let Some(slot) = spec.channel_slot() {
            if slot.after_layer == l {
                let channel = &slot.channel;
                let branches: Vec<CMatrix> = (0..channel.len())
                    .map(|k| {
                        let op = channel.op(k);
                        op.mul(rho.matrix()).mul(&op.dagger())
                    })
                    .collect();
                let probs: Vec<f64> = branches.iter().map(|b| b.trace().re.max(0.0)).collect();
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut pick = None;
                for (k, &p) in probs.iter().enumerate() {
                    acc += p;
                    if u < acc && p > 0.0 {
                        pick = Some(k);
                        break;
                    }
                }
                let k = pick.unwrap_or_else(|| {
                    probs.iter().rposition(|&p| p > 0.0).expect("nonzero branch")
                });
                case = Some(channel.case(k));
                rho = DensityMatrix::from_parts(
                    rho.n_qubits(),
                    branches[k].scale(C64::new(1.0 / probs[k], 0.0)),
                );
            }
        }
    }
    Ok((rho, case))
}
