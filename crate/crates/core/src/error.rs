use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid permutation of {rank} legs: {order:?}")]
    InvalidPermutation { rank: usize, order: Vec<usize> },
    #[error("leg {0} out of range for a rank-{1} tensor")]
    LegOutOfRange(usize, usize),
    #[error("generator count mismatch: {0} vs {1}")]
    GeneratorMismatch(u32, u32),
    #[error("contracted legs must be a dual pair (one conjugated, one not)")]
    ConjugationMismatch,
    #[error("coefficient shape {got:?} does not match leg dimensions {expected:?}")]
    ShapeMismatch { expected: Vec<usize>, got: Vec<usize> },
    #[error("legs in a join group must share a conjugation type")]
    MixedConjugation,
    #[error("inconsistent split plan: {0}")]
    InconsistentPlan(String),
    #[error("tensor is not Grassmann-even")]
    NotEven,
    #[error("row legs must be a nonempty proper subset of the legs")]
    BadRowLegs,
    #[error("singular spectrum is empty")]
    EmptySpectrum,
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("no Pauli pair matches the conjugated operator (residual {0:e})")]
    NotClifford(f64),
    #[error("gate enumeration: {0}")]
    Enumeration(String),
    #[error("Hamiltonian term {index} is not Hermitian")]
    NonHermitian { index: usize },
    #[error("every Hamiltonian term must have even parity (term {0} is odd)")]
    OddTerm(usize),
    #[error("imaginary part {0:e} of an expectation value is too large")]
    ComplexExpectation(f64),
    #[error("spectrum is not normalized (sum of squares {0})")]
    Unnormalized(f64),
    #[error("environment for cut {0} is not built")]
    StaleEnvironment(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("linear algebra failure: {0}")]
    Linalg(String),
    #[error("checkpoint format: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        Error::Linalg(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
