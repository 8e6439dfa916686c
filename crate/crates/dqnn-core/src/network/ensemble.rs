//! Pure-state ensemble propagation.
//!
//! Training inputs are pure and the networks are narrow, so every
//! intermediate mixed state has low rank. Carrying an unnormalized vector
//! ensemble (the state is Σ_k |v_k⟩⟨v_k|) through the layers replaces dense
//! conjugations with matrix-vector products; tracing a pure vector is just
//! slicing it. The dense path in the parent module stays the reference
//! semantics and tests pin the two paths together.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::qcore::{C64, CMatrix, DensityMatrix, PureState, hermitian_eigen};

use super::{ChannelMode, NetworkSpec};

/// Members with squared norm below this are dropped; the represented state
/// changes by less than the crate's numeric tolerances.
const MEMBER_EPS: f64 = 1e-28;

#[derive(Debug, Clone)]
pub(crate) struct Ensemble {
    n_qubits: usize,
    members: Vec<Vec<C64>>,
}

impl Ensemble {
    pub fn from_pure(psi: &PureState) -> Self {
        Self { n_qubits: psi.n_qubits(), members: vec![psi.amplitudes().to_vec()] }
    }

    /// Wraps explicit unnormalized members (the state is Σ |v⟩⟨v|).
    pub fn from_members(n_qubits: usize, members: Vec<Vec<C64>>) -> Self {
        Self { n_qubits, members }
    }

    /// Spectral decomposition of a density matrix into √λ-scaled
    /// eigenvectors; eigenvalues at or below zero are dropped.
    pub fn from_density(rho: &DensityMatrix) -> Result<Self> {
        let eig = hermitian_eigen(rho.matrix())?;
        let dim = rho.dim();
        let mut members = Vec::new();
        for (j, &lambda) in eig.values.iter().enumerate() {
            if lambda <= MEMBER_EPS {
                continue;
            }
            let scale = lambda.sqrt();
            let v: Vec<C64> = (0..dim).map(|r| eig.vectors[(r, j)] * scale).collect();
            members.push(v);
        }
        Ok(Self { n_qubits: rho.n_qubits(), members })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    /// Σ ‖v‖², the trace of the represented state.
    pub fn total_weight(&self) -> f64 {
        self.members
            .iter()
            .map(|v| v.iter().map(|a| a.norm_sqr()).sum::<f64>())
            .sum()
    }

    /// v → v ⊗ |0..0⟩ on `n_new` fresh least significant qubits.
    pub fn append_zeros(&mut self, n_new: usize) {
        let old_dim = self.dim();
        let stride = 1usize << n_new;
        for v in self.members.iter_mut() {
            let mut new_v = vec![C64::new(0.0, 0.0); old_dim * stride];
            for (i, a) in v.iter().enumerate() {
                new_v[i * stride] = *a;
            }
            *v = new_v;
        }
        self.n_qubits += n_new;
    }

    pub fn apply(&mut self, u: &CMatrix) {
        for v in self.members.iter_mut() {
            *v = u.matvec(v);
        }
    }

    /// Traces out the first `t` qubits: each member splits into its 2^t
    /// contiguous slices.
    pub fn trace_out_first(&mut self, t: usize) {
        let keep_dim = 1usize << (self.n_qubits - t);
        let mut new_members = Vec::with_capacity(self.members.len() << t);
        for v in self.members.drain(..) {
            for s in 0..1usize << t {
                let slice = v[s * keep_dim..(s + 1) * keep_dim].to_vec();
                let w: f64 = slice.iter().map(|a| a.norm_sqr()).sum();
                if w > MEMBER_EPS {
                    new_members.push(slice);
                }
            }
        }
        self.members = new_members;
        self.n_qubits -= t;
    }

    /// Re-expresses the ensemble through the eigenvectors of its density
    /// matrix when it carries more members than the dimension supports.
    pub fn consolidate(&mut self) -> Result<()> {
        if self.members.len() <= self.dim() {
            return Ok(());
        }
        let rho = self.to_density();
        *self = Self::from_density(&rho)?;
        Ok(())
    }

    /// Applies the channel per the given mode. In `Fixed` mode the ensemble
    /// is renormalized to the conditional state.
    pub fn apply_channel(&mut self, channel: &KrausChannel, mode: ChannelMode) -> Result<()> {
        match mode {
            ChannelMode::Off => Ok(()),
            ChannelMode::Deterministic => {
                let mut new_members = Vec::with_capacity(self.members.len() * channel.len());
                for v in self.members.drain(..) {
                    for op in channel.ops() {
                        let branch = op.matvec(&v);
                        let w: f64 = branch.iter().map(|a| a.norm_sqr()).sum();
                        if w > MEMBER_EPS {
                            new_members.push(branch);
                        }
                    }
                }
                self.members = new_members;
                self.consolidate()
            }
            ChannelMode::Fixed(label) => {
                let k = channel.find_case(label).ok_or(Error::InvalidCaseLabel)?;
                let op = channel.op(k);
                for v in self.members.iter_mut() {
                    *v = op.matvec(v);
                }
                let total = self.total_weight();
                if total <= 0.0 {
                    return Err(Error::InvalidProbability(total));
                }
                let scale = 1.0 / total.sqrt();
                for v in self.members.iter_mut() {
                    for a in v.iter_mut() {
                        *a *= scale;
                    }
                }
                Ok(())
            }
        }
    }

    pub fn to_density(&self) -> DensityMatrix {
        let dim = self.dim();
        let mut mat = CMatrix::zeros(dim);
        for v in &self.members {
            for r in 0..dim {
                if v[r].re == 0.0 && v[r].im == 0.0 {
                    continue;
                }
                for c in 0..dim {
                    mat[(r, c)] += v[r] * v[c].conj();
                }
            }
        }
        DensityMatrix::from_parts(self.n_qubits, mat)
    }

    /// ⟨target| ρ |target⟩ without materializing ρ.
    pub fn fidelity_against(&self, target: &PureState) -> f64 {
        let mut f = 0.0;
        for v in &self.members {
            let overlap: C64 = target
                .amplitudes()
                .iter()
                .zip(v)
                .map(|(t, a)| t.conj() * a)
                .sum();
            f += overlap.norm_sqr();
        }
        f.clamp(0.0, 1.0)
    }
}

/// Propagates an ensemble from `start_layer` (1-based) to the output.
/// `layer_mats[l-1]` is the effective working unitary of layer `l`;
/// `overrides` substitutes perturbed layers without touching the cache.
pub(crate) fn propagate(
    spec: &NetworkSpec,
    layer_mats: &[CMatrix],
    overrides: &[(usize, &CMatrix)],
    state: &Ensemble,
    start_layer: usize,
    mode: ChannelMode,
) -> Result<Ensemble> {
    let mut ens = state.clone();
    for l in start_layer..=spec.n_layers() {
        let mat = overrides
            .iter()
            .find(|(ol, _)| *ol == l)
            .map(|(_, m)| *m)
            .unwrap_or(&layer_mats[l - 1]);
        ens.append_zeros(spec.layer_out(l));
        ens.apply(mat);
        ens.trace_out_first(spec.layer_in(l));
        ens.consolidate()?;
        if let Some(slot) = spec.channel_slot() {
            if slot.after_layer == l {
                ens.apply_channel(&slot.channel, mode)?;
            }
        }
    }
    Ok(ens)
}

/// Fast-path fidelity of one training pair, numerically identical to
/// `fidelity_pure(target, forward(input))` (pinned by tests).
pub(crate) fn pair_fidelity(
    spec: &NetworkSpec,
    layer_mats: &[CMatrix],
    overrides: &[(usize, &CMatrix)],
    input: &PureState,
    target: &PureState,
    mode: ChannelMode,
) -> Result<f64> {
    if input.n_qubits() != spec.input_qubits() {
        return Err(Error::DimensionMismatch {
            expected: 1 << spec.input_qubits(),
            got: input.dim(),
        });
    }
    let ens = propagate(spec, layer_mats, overrides, &Ensemble::from_pure(input), 1, mode)?;
    if target.n_qubits() != ens.n_qubits() {
        return Err(Error::DimensionMismatch { expected: ens.dim(), got: target.dim() });
    }
    Ok(ens.fidelity_against(target))
}

/// Dense-path fidelity used as the reference in equivalence tests.
#[cfg(test)]
pub(crate) fn pair_fidelity_dense(
    spec: &NetworkSpec,
    params: &super::NetworkParams,
    input: &PureState,
    target: &PureState,
    mode: ChannelMode,
) -> Result<f64> {
    let rho = super::forward_with_mode(spec, params, &input.to_density(), mode)?;
    crate::qcore::fidelity_pure(target, &rho)
}
