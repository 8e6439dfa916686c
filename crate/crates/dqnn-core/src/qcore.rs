//! Complex dense linear algebra for multi-qubit registers: tensor products,
//! partial trace, Hermitian matrix exponential, fidelity and embedding of
//! small unitaries into larger registers.

mod eigen;
mod matrix;
mod state;


use alloc::vec::Vec;

use num_complex::Complex;
#[allow(unused_imports)]
use num_traits::Float;

pub use eigen::{Eigen, hermitian_eigen, hermitian_eigenvalues};
pub use matrix::{C64, CMatrix};
pub use state::{
    DensityMatrix, HERMITIAN_TOL, PSD_TOL, PureState, TRACE_TOL, UNITARY_TOL, UnitaryMatrix,
};

use crate::error::{Error, Result};

/// Largest imaginary residue tolerated when a quadratic form must be real.
pub const IM_RESIDUE_TOL: f64 = 1e-9;

/// Traces out the given qubits, returning the reduced state on the rest.
///
/// Trace and Hermiticity are preserved exactly up to rounding. It is an
/// error to discard every qubit or to name one twice.
pub fn partial_trace(rho: &DensityMatrix, discard: &[usize]) -> Result<DensityMatrix> {
    let n = rho.n_qubits();
    let mut is_discarded = alloc::vec![false; n];
    for &q in discard {
        if q >= n {
            return Err(Error::QubitOutOfRange { qubit: q, n_qubits: n });
        }
        if is_discarded[q] {
            return Err(Error::DuplicateQubit(q));
        }
        is_discarded[q] = true;
    }
    let kept: Vec<usize> = (0..n).filter(|&q| !is_discarded[q]).collect();
    if kept.is_empty() {
        return Err(Error::InvalidTopology(alloc::string::String::from(
            "cannot trace out every qubit",
        )));
    }
    let traced: Vec<usize> = (0..n).filter(|&q| is_discarded[q]).collect();
    let kept_dim = 1usize << kept.len();
    let traced_dim = 1usize << traced.len();

    let mut out = CMatrix::zeros(kept_dim);
    for t in 0..traced_dim {
        let t_bits = scatter_bits(t, &traced, n);
        for r in 0..kept_dim {
            let r_full = scatter_bits(r, &kept, n) | t_bits;
            for c in 0..kept_dim {
                let c_full = scatter_bits(c, &kept, n) | t_bits;
                out[(r, c)] += rho.matrix()[(r_full, c_full)];
            }
        }
    }
    Ok(DensityMatrix::from_parts(kept.len(), out))
}

/// exp(iK) for Hermitian K, via eigendecomposition K = VDV†.
pub fn expi_hermitian(k: &CMatrix) -> Result<UnitaryMatrix> {
    let dev = k.hermiticity_deviation();
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian { max_dev: dev });
    }
    let eig = hermitian_eigen(k)?;
    Ok(UnitaryMatrix::new_unchecked(unitary_from_eigen(&eig))?)
}

/// Rebuilds V · diag(e^{iλ}) · V† from an eigendecomposition.
pub(crate) fn unitary_from_eigen(eig: &Eigen) -> CMatrix {
    let n = eig.vectors.dim();
    let phases: Vec<C64> = eig.values.iter().map(|&l| Complex::cis(l)).collect();
    let mut scaled = eig.vectors.clone();
    for j in 0..n {
        for r in 0..n {
            scaled[(r, j)] *= phases[j];
        }
    }
    scaled.mul(&eig.vectors.dagger())
}

/// ⟨ψ|ρ|ψ⟩ for a normalized pure target, clamped to [0, 1].
pub fn fidelity_pure(target: &PureState, rho: &DensityMatrix) -> Result<f64> {
    if target.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: target.dim(), got: rho.dim() });
    }
    let amps = target.amplitudes();
    let mut form = C64::new(0.0, 0.0);
    for (r, ar) in amps.iter().enumerate() {
        let mut row_acc = C64::new(0.0, 0.0);
        for (c, ac) in amps.iter().enumerate() {
            row_acc += rho.matrix()[(r, c)] * ac;
        }
        form += ar.conj() * row_acc;
    }
    if form.im.abs() > IM_RESIDUE_TOL {
        return Err(Error::ImaginaryResidue { residue: form.im });
    }
    Ok(form.re.clamp(0.0, 1.0))
}

/// Extends `op` to an `n_total`-qubit operator acting on `targets` (op
/// qubit `i` lands on `targets[i]`) and as identity elsewhere.
pub fn embed_on_qubits(op: &CMatrix, targets: &[usize], n_total: usize) -> Result<CMatrix> {
    let t = targets.len();
    if op.dim() != 1 << t {
        return Err(Error::DimensionMismatch { expected: 1 << t, got: op.dim() });
    }
    let mut seen = alloc::vec![false; n_total];
    for &q in targets {
        if q >= n_total {
            return Err(Error::QubitOutOfRange { qubit: q, n_qubits: n_total });
        }
        if seen[q] {
            return Err(Error::DuplicateQubit(q));
        }
        seen[q] = true;
    }
    let dim = 1usize << n_total;
    let target_mask: usize = targets.iter().map(|&q| 1usize << (n_total - 1 - q)).sum();
    let mut out = CMatrix::zeros(dim);
    for col in 0..dim {
        let local_col = gather_bits(col, targets, n_total);
        let base = col & !target_mask;
        for local_row in 0..(1 << t) {
            let amp = op[(local_row, local_col)];
            if amp.re == 0.0 && amp.im == 0.0 {
                continue;
            }
            let row = base | scatter_bits(local_row, targets, n_total);
            out[(row, col)] = amp;
        }
    }
    Ok(out)
}

/// Spreads the bits of `local` (MSB first across `qubits`) into an
/// `n`-qubit basis index. Qubit `q` occupies index bit `n - 1 - q`.
pub(crate) fn scatter_bits(local: usize, qubits: &[usize], n: usize) -> usize {
    let t = qubits.len();
    let mut idx = 0usize;
    for (i, &q) in qubits.iter().enumerate() {
        if local >> (t - 1 - i) & 1 == 1 {
            idx |= 1 << (n - 1 - q);
        }
    }
    idx
}

/// Inverse of [`scatter_bits`]: collects the bits of `index` at `qubits`.
pub(crate) fn gather_bits(index: usize, qubits: &[usize], n: usize) -> usize {
    let t = qubits.len();
    let mut local = 0usize;
    for (i, &q) in qubits.iter().enumerate() {
        if index >> (n - 1 - q) & 1 == 1 {
            local |= 1 << (t - 1 - i);
        }
    }
    local
}
