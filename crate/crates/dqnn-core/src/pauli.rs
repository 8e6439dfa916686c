//! Pauli strings, the perceptron generators built from them, and parameter
//! counting for network topologies.
//!
//! A perceptron generator is K = Σ_σ k_σ σ over all Pauli strings σ on the
//! perceptron's qubits; the real coefficients k_σ are the trainable
//! parameters. Strings are ordered by base-4 encoding with I=0, X=1, Y=2,
//! Z=3 and the first letter most significant.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::qcore::{C64, CMatrix};

/// One single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn code(self) -> usize {
        match self {
            Pauli::I => 0,
            Pauli::X => 1,
            Pauli::Y => 2,
            Pauli::Z => 3,
        }
    }

    pub fn from_code(code: usize) -> Option<Self> {
        Self::ALL.get(code).copied()
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// The single-qubit matrix.
    pub fn matrix(self) -> CMatrix {
        let mut m = CMatrix::zeros(2);
        match self {
            Pauli::I => {
                m[(0, 0)] = C64::new(1.0, 0.0);
                m[(1, 1)] = C64::new(1.0, 0.0);
            }
            Pauli::X => {
                m[(0, 1)] = C64::new(1.0, 0.0);
                m[(1, 0)] = C64::new(1.0, 0.0);
            }
            Pauli::Y => {
                m[(0, 1)] = C64::new(0.0, -1.0);
                m[(1, 0)] = C64::new(0.0, 1.0);
            }
            Pauli::Z => {
                m[(0, 0)] = C64::new(1.0, 0.0);
                m[(1, 1)] = C64::new(-1.0, 0.0);
            }
        }
        m
    }
}

/// An ordered word over {I, X, Y, Z}, one letter per qubit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PauliString(Vec<Pauli>);

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::InvalidCoefficientCount(0));
        }
        Ok(Self(letters))
    }

    /// Parses a word like `"IXZ"`.
    pub fn parse(word: &str) -> Result<Self> {
        let letters = word
            .chars()
            .map(|ch| match ch {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                _ => Err(Error::InvalidCaseLabel),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(letters)
    }

    /// Inverse of [`string_index`] for the given word length.
    pub fn from_index(index: usize, len: usize) -> Result<Self> {
        if len == 0 || index >= 1 << (2 * len) {
            return Err(Error::InvalidCoefficientCount(len));
        }
        let mut letters = vec![Pauli::I; len];
        for (i, letter) in letters.iter_mut().enumerate() {
            let code = index >> (2 * (len - 1 - i)) & 3;
            *letter = Pauli::from_code(code).expect("two-bit code");
        }
        Ok(Self(letters))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.0
    }
}

/// Base-4 position of a string in the canonical ordering.
pub fn string_index(s: &PauliString) -> usize {
    s.letters().iter().fold(0, |acc, p| acc * 4 + p.code())
}

/// Visits the single nonzero entry per column of a Pauli string's matrix.
fn visit_entries(s: &PauliString, mut f: impl FnMut(usize, usize, C64)) {
    let n = s.len();
    let dim = 1usize << n;
    let mut flip_mask = 0usize;
    for (i, p) in s.letters().iter().enumerate() {
        if matches!(p, Pauli::X | Pauli::Y) {
            flip_mask |= 1 << (n - 1 - i);
        }
    }
    for col in 0..dim {
        let row = col ^ flip_mask;
        let mut amp = C64::new(1.0, 0.0);
        for (i, p) in s.letters().iter().enumerate() {
            let bit = col >> (n - 1 - i) & 1;
            match p {
                Pauli::I | Pauli::X => {}
                // ⟨1|Y|0⟩ = i, ⟨0|Y|1⟩ = -i
                Pauli::Y => {
                    amp *= if bit == 0 { C64::new(0.0, 1.0) } else { C64::new(0.0, -1.0) }
                }
                Pauli::Z => {
                    if bit == 1 {
                        amp = -amp;
                    }
                }
            }
        }
        f(row, col, amp);
    }
}

/// Dense matrix of a Pauli string: the Kronecker product of its letters.
///
/// Built column-wise from the single nonzero entry per column rather than by
/// repeated Kronecker products.
pub fn pauli_matrix(s: &PauliString) -> CMatrix {
    let mut out = CMatrix::zeros(1 << s.len());
    visit_entries(s, |row, col, amp| out[(row, col)] = amp);
    out
}

/// In-place `target += factor · σ` for the string with the given index,
/// touching only σ's 2^len nonzero entries.
pub fn add_pauli_scaled(target: &mut CMatrix, index: usize, len: usize, factor: f64) -> Result<()> {
    if target.dim() != 1 << len {
        return Err(Error::DimensionMismatch { expected: 1 << len, got: target.dim() });
    }
    let s = PauliString::from_index(index, len)?;
    let scale = C64::new(factor, 0.0);
    visit_entries(&s, |row, col, amp| target[(row, col)] += amp * scale);
    Ok(())
}

/// Real coefficients k_σ over all 4^(m+1) Pauli strings of one perceptron,
/// where m is the fan-in qubit count.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliCoefficients {
    string_len: usize,
    values: Vec<f64>,
}

impl PauliCoefficients {
    /// Wraps a coefficient vector; the length must be 4^k for the string
    /// length k = m + 1 ≥ 1.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        let mut string_len = 0usize;
        let mut size = 1usize;
        while size < n {
            size *= 4;
            string_len += 1;
        }
        if size != n || string_len == 0 {
            return Err(Error::InvalidCoefficientCount(n));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidCoefficientCount(n));
        }
        Ok(Self { string_len, values })
    }

    pub fn zeros(string_len: usize) -> Self {
        Self { string_len, values: vec![0.0; 1 << (2 * string_len)] }
    }

    /// Letters per string (= fan-in + 1).
    pub fn string_len(&self) -> usize {
        self.string_len
    }

    /// Fan-in qubit count m.
    pub fn fan_in(&self) -> usize {
        self.string_len - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}

/// Assembles K = Σ_σ k_σ σ. Hermitian by construction.
///
/// Uses the block recursion over the first letter, K = I⊗(K_I + K_Z) shaped
/// into quadrants, which costs O(n 4^n) instead of summing 4^n dense terms.
pub fn build_generator(coeffs: &PauliCoefficients) -> CMatrix {
    build_recursive(coeffs.values(), coeffs.string_len())
}

fn build_recursive(values: &[f64], len: usize) -> CMatrix {
    if len == 0 {
        let mut m = CMatrix::zeros(1);
        m[(0, 0)] = C64::new(values[0], 0.0);
        return m;
    }
    let quarter = values.len() / 4;
    let si = build_recursive(&values[0..quarter], len - 1);
    let sx = build_recursive(&values[quarter..2 * quarter], len - 1);
    let sy = build_recursive(&values[2 * quarter..3 * quarter], len - 1);
    let sz = build_recursive(&values[3 * quarter..], len - 1);
    let half = 1usize << (len - 1);
    let mut out = CMatrix::zeros(2 * half);
    let i_unit = C64::new(0.0, 1.0);
    for r in 0..half {
        for c in 0..half {
            let (vi, vx, vy, vz) = (si[(r, c)], sx[(r, c)], sy[(r, c)], sz[(r, c)]);
            out[(r, c)] = vi + vz;
            out[(r, c + half)] = vx - i_unit * vy;
            out[(r + half, c)] = vx + i_unit * vy;
            out[(r + half, c + half)] = vi - vz;
        }
    }
    out
}

/// Recovers k_σ = Tr(σK)/2^n from a Hermitian matrix; inverse of
/// [`build_generator`] by the trace orthogonality of the Pauli basis.
pub fn decompose_hermitian(k: &CMatrix) -> Result<PauliCoefficients> {
    let dim = k.dim();
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    let n = dim.trailing_zeros() as usize;
    let count = 1usize << (2 * n);
    let mut values = vec![0.0; count];
    for (idx, v) in values.iter_mut().enumerate() {
        let s = PauliString::from_index(idx, n)?;
        let sigma = pauli_matrix(&s);
        // Tr(σK) via the single nonzero per row of σ.
        let mut tr = C64::new(0.0, 0.0);
        for col in 0..dim {
            for row in 0..dim {
                let e = sigma[(col, row)];
                if e.re != 0.0 || e.im != 0.0 {
                    tr += e * k[(row, col)];
                }
            }
        }
        if tr.im.abs() > 1e-9 {
            return Err(Error::ImaginaryResidue { residue: tr.im });
        }
        *v = tr.re / dim as f64;
    }
    PauliCoefficients::new(values)
}

/// Trainable-coefficient count of a fully parameterized topology: between
/// widths m and n every one of the n perceptrons carries 4^(m+1)
/// coefficients. Conjugate-bound layers are excluded by the caller.
pub fn parameter_count(widths: &[usize]) -> u64 {
    widths
        .windows(2)
        .map(|w| w[1] as u64 * 4u64.pow(w[0] as u32 + 1))
        .sum()
}
