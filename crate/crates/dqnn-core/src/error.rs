use alloc::string::String;
use core::fmt;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors surfaced by the simulator and training engine.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Operand dimensions are incompatible.
    DimensionMismatch { expected: usize, got: usize },
    /// A state or matrix dimension is not a power of two.
    NotPowerOfTwo(usize),
    /// Input violated the Hermiticity tolerance.
    NotHermitian { max_dev: f64 },
    /// Input violated the unitarity tolerance.
    NotUnitary { max_dev: f64 },
    /// Trace differs from one beyond tolerance.
    NotUnitTrace { deviation: f64 },
    /// An eigenvalue fell below the positive-semidefiniteness tolerance.
    NotPositive { min_eigenvalue: f64 },
    /// A quadratic form kept a non-negligible imaginary part.
    ImaginaryResidue { residue: f64 },
    /// Qubit index outside the register.
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    /// The same qubit was named twice.
    DuplicateQubit(usize),
    /// A probability argument outside [0, 1].
    InvalidProbability(f64),
    /// Coefficient vector length is not 4^(m+1).
    InvalidCoefficientCount(usize),
    /// Network topology or binding violates its invariants.
    InvalidTopology(String),
    /// A parameterized operation was requested for a conjugate-bound layer.
    LayerIsBound(usize),
    /// A conjugate operation was requested for a layer without a binding.
    LayerNotBound(usize),
    /// Layer index outside the network.
    InvalidLayer(usize),
    /// Kraus operator index outside the channel.
    InvalidKrausIndex(usize),
    /// Corruption case label not valid for the operation.
    InvalidCaseLabel,
    /// The state does not lie in any correctable subspace.
    DecodeFailure,
    /// A dataset operation needs at least one pair.
    EmptyDataset,
    /// Session configuration is unusable.
    InvalidConfig(String),
    /// The cost became non-finite during training (parameter blow-up).
    NonFiniteCost { epoch: usize },
    /// The eigensolver failed to converge (should not happen for
    /// well-formed Hermitian input).
    EigenNoConvergence,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::NotPowerOfTwo(d) => write!(f, "dimension {d} is not a power of two"),
            Error::NotHermitian { max_dev } => {
                write!(f, "matrix is not Hermitian (max deviation {max_dev:.3e})")
            }
            Error::NotUnitary { max_dev } => {
                write!(f, "matrix is not unitary (max |U†U - I| = {max_dev:.3e})")
            }
            Error::NotUnitTrace { deviation } => {
                write!(f, "trace deviates from one by {deviation:.3e}")
            }
            Error::NotPositive { min_eigenvalue } => {
                write!(f, "matrix has eigenvalue {min_eigenvalue:.3e} below the PSD tolerance")
            }
            Error::ImaginaryResidue { residue } => {
                write!(f, "imaginary residue {residue:.3e} exceeds tolerance")
            }
            Error::QubitOutOfRange { qubit, n_qubits } => {
                write!(f, "qubit {qubit} out of range for {n_qubits}-qubit register")
            }
            Error::DuplicateQubit(q) => write!(f, "duplicate qubit index {q}"),
            Error::InvalidProbability(p) => write!(f, "probability {p} outside [0, 1]"),
            Error::InvalidCoefficientCount(n) => {
                write!(f, "coefficient count {n} is not 4^(m+1) for any m")
            }
            Error::InvalidTopology(msg) => write!(f, "invalid topology: {msg}"),
            Error::LayerIsBound(l) => write!(f, "layer {l} is conjugate-bound and carries no parameters"),
            Error::LayerNotBound(l) => write!(f, "layer {l} has no conjugate binding"),
            Error::InvalidLayer(l) => write!(f, "layer index {l} out of range"),
            Error::InvalidKrausIndex(k) => write!(f, "Kraus operator index {k} out of range"),
            Error::InvalidCaseLabel => write!(f, "corruption case label not valid here"),
            Error::DecodeFailure => write!(f, "state lies outside the correctable subspaces"),
            Error::EmptyDataset => write!(f, "dataset is empty"),
            Error::InvalidConfig(msg) => write!(f, "invalid config: {msg}"),
            Error::NonFiniteCost { epoch } => {
                write!(f, "cost became non-finite at epoch {epoch} (parameter blow-up)")
            }
            Error::EigenNoConvergence => write!(f, "eigensolver did not converge"),
        }
    }
}

impl core::error::Error for Error {}
