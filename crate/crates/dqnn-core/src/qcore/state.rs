//! Pure states, density matrices and unitaries over qubit registers.
//!
//! Qubit 0 is the most significant bit of the computational-basis index, so
//! `|011⟩` on three qubits is basis index 3 and tensor products read left to
//! right like the kets in the usual notation.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::eigen::hermitian_eigenvalues;
use super::matrix::{C64, CMatrix};
use crate::error::{Error, Result};

/// Max |A - A†| accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Max trace deviation accepted for a density matrix.
pub const TRACE_TOL: f64 = 1e-12;
/// Most negative eigenvalue accepted as positive semidefinite.
pub const PSD_TOL: f64 = 1e-9;
/// Max |U†U - I| accepted as unitary.
pub const UNITARY_TOL: f64 = 1e-10;

fn qubit_count(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// A normalized state vector over `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let n_qubits = qubit_count(amplitudes.len())?;
        Ok(Self { n_qubits, amplitudes })
    }

    /// Computational-basis state `|index⟩` on `n_qubits`.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amplitudes = vec![C64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[index] = C64::new(1.0, 0.0);
        Self { n_qubits, amplitudes }
    }

    pub fn qubit(alpha: C64, beta: C64) -> Self {
        Self { n_qubits: 1, amplitudes: vec![alpha, beta] }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Rescales to unit norm.
    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for a in self.amplitudes.iter_mut() {
                *a /= n;
            }
        }
    }

    pub fn normalized(mut self) -> Self {
        self.normalize();
        self
    }

    /// Inner product ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Tensor product with `self` on the most significant qubits.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Self { n_qubits: self.n_qubits + other.n_qubits, amplitudes }
    }

    pub fn apply(&self, u: &UnitaryMatrix) -> Result<Self> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: u.dim() });
        }
        Ok(Self { n_qubits: self.n_qubits, amplitudes: u.matrix().matvec(&self.amplitudes) })
    }

    pub fn to_density(&self) -> DensityMatrix {
        let dim = self.dim();
        let mat = CMatrix::from_fn(dim, |r, c| self.amplitudes[r] * self.amplitudes[c].conj());
        DensityMatrix { n_qubits: self.n_qubits, mat }
    }
}

/// A Hermitian, positive semidefinite, unit-trace matrix over `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    mat: CMatrix,
}

impl DensityMatrix {
    /// Wraps a matrix without numeric validation; use [`Self::validate`]
    /// where the invariants need checking.
    pub fn from_matrix(mat: CMatrix) -> Result<Self> {
        let n_qubits = qubit_count(mat.dim())?;
        Ok(Self { n_qubits, mat })
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1 << n_qubits;
        let mat = CMatrix::identity(dim).scale(C64::new(1.0 / dim as f64, 0.0));
        Self { n_qubits, mat }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    /// Checks Hermiticity, unit trace and positive semidefiniteness against
    /// the crate tolerances.
    pub fn validate(&self) -> Result<()> {
        let herm = self.mat.hermiticity_deviation();
        if herm > HERMITIAN_TOL {
            return Err(Error::NotHermitian { max_dev: herm });
        }
        let tr = self.trace();
        let dev = (tr - C64::new(1.0, 0.0)).norm();
        if dev > TRACE_TOL {
            return Err(Error::NotUnitTrace { deviation: dev });
        }
        let eigs = hermitian_eigenvalues(&self.mat)?;
        if let Some(&min) = eigs.first() {
            if min < -PSD_TOL {
                return Err(Error::NotPositive { min_eigenvalue: min });
            }
        }
        Ok(())
    }
}

/// A unitary over `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    n_qubits: usize,
    mat: CMatrix,
}

impl UnitaryMatrix {
    /// Wraps a matrix checked against [`UNITARY_TOL`].
    pub fn new(mat: CMatrix) -> Result<Self> {
        let dev = mat.unitarity_deviation();
        if dev > UNITARY_TOL {
            return Err(Error::NotUnitary { max_dev: dev });
        }
        Self::new_unchecked(mat)
    }

    /// Wraps a matrix known unitary by construction.
    pub fn new_unchecked(mat: CMatrix) -> Result<Self> {
        let n_qubits = qubit_count(mat.dim())?;
        Ok(Self { n_qubits, mat })
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self { n_qubits, mat: CMatrix::identity(1 << n_qubits) }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn dagger(&self) -> Self {
        Self { n_qubits: self.n_qubits, mat: self.mat.dagger() }
    }

    /// U ρ U†.
    pub fn conjugate(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: rho.dim() });
        }
        let mat = self.mat.mul(rho.matrix()).mul(&self.mat.dagger());
        Ok(DensityMatrix { n_qubits: self.n_qubits, mat })
    }
}

impl DensityMatrix {
    /// Internal constructor for matrices produced by CPTP machinery.
    pub(crate) fn from_parts(n_qubits: usize, mat: CMatrix) -> Self {
        Self { n_qubits, mat }
    }
}
