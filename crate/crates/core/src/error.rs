use thiserror::Error;

/// Errors produced by the symbolic and numerical engines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count mismatch: {left} vs {right}")]
    QubitCountMismatch { left: usize, right: usize },
    #[error("site {site} out of range for {n_qubits} qubits")]
    SiteOutOfRange { site: usize, n_qubits: usize },
    #[error("invalid stabilizer frame: {reason}")]
    InvalidFrame { reason: String },
    #[error("field commutes with the consumed generator; no dragging possible")]
    FieldCommutesWithConsumed,
    #[error("operator {which} still anticommutes with the field after one multiplication")]
    UnrepairableOperator { which: String },
    #[error("operator anticommutes with generator {index}; not in the normalizer")]
    AnticommutesWithGenerator { index: usize },
    #[error("restricted site {site} carries a Z or Y factor")]
    RestrictedSiteNotX { site: usize },
    #[error("recursion step past the end of the chain (site {site} of {n_qubits})")]
    SiteOverflow { site: usize, n_qubits: usize },
    #[error("rotation profile invalid: {reason}")]
    InvalidProfile { reason: String },
    #[error("Hamiltonian is not Hermitian: {reason}")]
    NonHermitian { reason: String },
    #[error("dense path refused: {n_qubits} qubits exceeds cap {cap} (set ACSQC_DENSE_CAP to override)")]
    DenseCapExceeded { n_qubits: usize, cap: usize },
    #[error("requested {requested} eigenvalues from a {dim}-dimensional space")]
    TooManyEigenvalues { requested: usize, dim: usize },
    #[error("ground-space degeneracy mismatch: expected {expected}, found {found}")]
    DegeneracyMismatch { expected: usize, found: usize },
    #[error("symmetry does not commute with every Hamiltonian term")]
    SymmetryDoesNotCommute,
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("invalid dragging plan: {reason}")]
    InvalidPlan { reason: String },
    #[error("norm drift {drift:.3e} exceeded budget {budget:.3e}; integration too coarse")]
    NormDriftExceeded { drift: f64, budget: f64 },
    #[error("plan is not symbolically replayable: {reason}")]
    NotSymbolic { reason: String },
    #[error("circuit parse error at line {line}: {reason}")]
    ParseError { line: usize, reason: String },
    #[error("layout needs {needed} physical qubits, over the verification budget {cap}")]
    SizeBudgetExceeded { needed: usize, cap: usize },
    #[error("chain length must be at least 2, got {n}")]
    ChainTooShort { n: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
