//! Cached layer decompositions for the finite-difference gradient.
//!
//! A gradient step perturbs one Pauli coefficient of one perceptron at a
//! time, so everything else is computed once per gradient call: the
//! generator matrices, the embedded prefix/suffix products around each
//! perceptron, every effective layer unitary, and the per-pair states
//! entering each layer.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::pauli::build_generator;
use crate::qcore::{CMatrix, expi_hermitian};

use super::{NetworkParams, NetworkSpec, embed_perceptron, mirror_adjoint};

pub(crate) struct PerceptronCache {
    /// Generator K per perceptron, on the small (fan-in + 1)-qubit space.
    pub generators: Vec<CMatrix>,
    /// pre[j]: embedded product of perceptrons before j (applied first).
    pub pre: Vec<CMatrix>,
    /// post[j]: embedded product of perceptrons after j.
    pub post: Vec<CMatrix>,
}

pub(crate) struct NetworkCache {
    /// Effective working unitary of each layer, index l-1.
    pub layer_mats: Vec<CMatrix>,
    /// Perceptron decompositions for layers that carry parameters.
    pub perceptrons: Vec<Option<PerceptronCache>>,
}

pub(crate) fn build_cache(spec: &NetworkSpec, params: &NetworkParams) -> Result<NetworkCache> {
    params.validate(spec)?;
    let n_layers = spec.n_layers();
    let mut layer_mats: Vec<Option<CMatrix>> = alloc::vec![None; n_layers];
    let mut perceptrons: Vec<Option<PerceptronCache>> = Vec::with_capacity(n_layers);

    for l in 1..=n_layers {
        if spec.is_bound(l) {
            perceptrons.push(None);
            continue;
        }
        let percs = params.layer(l).ok_or(Error::LayerIsBound(l))?;
        let m = spec.layer_in(l);
        let working = m + spec.layer_out(l);
        let n_percs = percs.len();

        let generators: Vec<CMatrix> = percs.iter().map(build_generator).collect();
        let embedded: Vec<CMatrix> = generators
            .iter()
            .enumerate()
            .map(|(j, k)| {
                let small = expi_hermitian(k)?;
                embed_perceptron(small.matrix(), m, j, working)
            })
            .collect::<Result<_>>()?;

        let mut pre = Vec::with_capacity(n_percs);
        let mut acc = CMatrix::identity(1 << working);
        for e in &embedded {
            pre.push(acc.clone());
            acc = e.mul(&acc);
        }
        let full = acc;
        let mut post = alloc::vec![CMatrix::identity(1 << working); n_percs];
        let mut acc = CMatrix::identity(1 << working);
        for j in (0..n_percs).rev() {
            post[j] = acc.clone();
            acc = acc.mul(&embedded[j]);
        }
        layer_mats[l - 1] = Some(full);
        perceptrons.push(Some(PerceptronCache { generators, pre, post }));
    }

    // Bound layers mirror their source, which is now available.
    for l in 1..=n_layers {
        if let Some(source) = spec.binding_source(l) {
            let src = layer_mats[source - 1]
                .as_ref()
                .ok_or(Error::LayerNotBound(l))?
                .clone();
            layer_mats[l - 1] =
                Some(mirror_adjoint(&src, spec.layer_in(source), spec.layer_out(source)));
        }
    }

    let layer_mats = layer_mats
        .into_iter()
        .map(|m| m.ok_or(Error::EigenNoConvergence))
        .collect::<Result<Vec<_>>>()?;
    Ok(NetworkCache { layer_mats, perceptrons })
}

/// Rebuilds one layer's working unitary with perceptron `j` replaced by the
/// unitary of the given perturbed generator.
pub(crate) fn perturbed_layer_mat(
    spec: &NetworkSpec,
    cache: &NetworkCache,
    l: usize,
    j: usize,
    perturbed_generator: &CMatrix,
) -> Result<CMatrix> {
    let pc = cache.perceptrons[l - 1].as_ref().ok_or(Error::LayerIsBound(l))?;
    let m = spec.layer_in(l);
    let working = m + spec.layer_out(l);
    let small = expi_hermitian(perturbed_generator)?;
    let embedded = embed_perceptron(small.matrix(), m, j, working)?;
    Ok(pc.post[j].mul(&embedded).mul(&pc.pre[j]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::add_pauli_scaled;
    use crate::testutil::small_random_net;

    #[test]
    fn perturbed_layer_matches_full_rebuild() {
        let (spec, mut params) = small_random_net(41, &[2, 2], &[]);
        let cache = build_cache(&spec, &params).unwrap();
        let (l, j, s) = (1usize, 1usize, 7usize);
        let mut k = cache.perceptrons[l - 1].as_ref().unwrap().generators[j].clone();
        add_pauli_scaled(&mut k, s, 3, 0.37).unwrap();
        let fast = perturbed_layer_mat(&spec, &cache, l, j, &k).unwrap();

        params.layer_mut(l).unwrap()[j].values_mut()[s] += 0.37;
        let slow =
            crate::network::layer_unitary_matrix(&spec, params.layer(l).unwrap(), l).unwrap();
        assert!(fast.max_abs_diff(&slow) < 1e-12);
    }
}
