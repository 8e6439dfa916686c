//! Shared helpers for unit tests.

use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha12Rng;

use crate::qcore::{C64, CMatrix, PureState, expi_hermitian};

pub fn rng(seed: u64) -> ChaCha12Rng {
    crate::rng::seeded(seed)
}

pub fn random_state(rng: &mut ChaCha12Rng, n_qubits: usize) -> PureState {
    let dim = 1usize << n_qubits;
    let amps: Vec<C64> = (0..dim)
        .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    PureState::new(amps).unwrap().normalized()
}

pub fn random_hermitian(rng: &mut ChaCha12Rng, dim: usize, scale: f64) -> CMatrix {
    let mut m = CMatrix::zeros(dim);
    for r in 0..dim {
        m[(r, r)] = C64::new(scale * (rng.random::<f64>() - 0.5), 0.0);
        for c in r + 1..dim {
            let v = C64::new(
                scale * (rng.random::<f64>() - 0.5),
                scale * (rng.random::<f64>() - 0.5),
            );
            m[(r, c)] = v;
            m[(c, r)] = v.conj();
        }
    }
    m
}

pub fn random_unitary(rng: &mut ChaCha12Rng, dim: usize) -> CMatrix {
    expi_hermitian(&random_hermitian(rng, dim, 2.0))
        .unwrap()
        .into_matrix()
}

/// A network with the given widths and bindings, parameters uniform in
/// [-0.5, 0.5].
pub fn small_random_net(
    seed: u64,
    widths: &[usize],
    bindings: &[(usize, usize)],
) -> (crate::network::NetworkSpec, crate::network::NetworkParams) {
    let mut spec = crate::network::NetworkSpec::new(widths.to_vec()).unwrap();
    for &(source, bound) in bindings {
        spec = spec.with_binding(source, bound).unwrap();
    }
    let mut params = crate::network::NetworkParams::zeros(&spec);
    let mut r = rng(seed);
    for l in 1..=spec.n_layers() {
        if let Some(percs) = params.layer_mut(l) {
            for p in percs.iter_mut() {
                for v in p.values_mut() {
                    *v = r.random::<f64>() - 0.5;
                }
            }
        }
    }
    (spec, params)
}

/// Hand-built [3,1,3] network that decodes any at-most-one-flip corruption
/// of the three-qubit code and re-encodes it perfectly.
///
/// Layer 1 is the involution that maps (abc, 0) to (junk, majority(abc))
/// with the junk register independent of the logical amplitude; layer 2 is
/// CNOT, CNOT, SWAP. Every piece P is an involution, so K = (π/2)(I - P)
/// gives exp(iK) = P exactly and the Pauli coefficients follow by trace
/// decomposition.
pub fn perfect_qae_313() -> (crate::network::NetworkSpec, crate::network::NetworkParams) {
    use crate::network::{NetworkParams, NetworkSpec};
    use crate::pauli::decompose_hermitian;
    use crate::qcore::CMatrix;

    let spec = NetworkSpec::new(alloc::vec![3, 1, 3]).unwrap();
    let mut params = NetworkParams::zeros(&spec);

    // Layer 1: on (abc, d), fixed when majority(abc) == d, otherwise map to
    // (~abc, 1-d). Sends (a|000⟩+b|111⟩)|0⟩ to |000⟩(a|0⟩+b|1⟩), and the
    // single-flip corruptions likewise with the flipped junk register.
    let mut p1 = CMatrix::zeros(16);
    for abc in 0usize..8 {
        let maj = usize::from(abc.count_ones() >= 2);
        for d in 0..2 {
            let idx = abc * 2 + d;
            let image = if maj == d { idx } else { (!abc & 7) * 2 + (1 - d) };
            p1[(image, idx)] = C64::new(1.0, 0.0);
        }
    }
    params.layer_mut(1).unwrap()[0] = decompose_hermitian(&involution_generator(&p1)).unwrap();

    // Layer 2: CNOT onto qubits 1 and 2, then SWAP with qubit 3, so
    // |d,000⟩ ends as |0,ddd⟩.
    let mut cnot = CMatrix::zeros(4);
    for (col, row) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
        cnot[(row, col)] = C64::new(1.0, 0.0);
    }
    let mut swap = CMatrix::zeros(4);
    for (col, row) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        swap[(row, col)] = C64::new(1.0, 0.0);
    }
    let percs = params.layer_mut(2).unwrap();
    percs[0] = decompose_hermitian(&involution_generator(&cnot)).unwrap();
    percs[1] = decompose_hermitian(&involution_generator(&cnot)).unwrap();
    percs[2] = decompose_hermitian(&involution_generator(&swap)).unwrap();

    (spec, params)
}

/// K = (π/2)(I - P) for a Hermitian involution P, so that exp(iK) = P.
pub fn involution_generator(p: &CMatrix) -> CMatrix {
    let eye = CMatrix::identity(p.dim());
    eye.sub(p).scale(C64::new(core::f64::consts::FRAC_PI_2, 0.0))
}
