use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("qubit layout mismatch: {left} vs {right}")]
    LayoutMismatch { left: String, right: String },

    #[error("invalid layout n={n}, c={c}: {reason}")]
    InvalidLayout { n: usize, c: usize, reason: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("generator set is not in standard form: {0}")]
    NotStandardForm(String),

    #[error("Bob-side Z support of {0} cannot be cleared by the word stabilizers")]
    NotClearable(String),

    #[error("operator {0} acts on Bob's qubits")]
    BobSupport(String),

    #[error("{qubits} qubits exceeds the dense state-vector bound of {limit}")]
    SizeBound { qubits: usize, limit: usize },

    #[error("codewords {first} and {second} give non-orthogonal states (overlap {overlap:.3e})")]
    NotOrthogonal {
        first: usize,
        second: usize,
        overlap: f64,
    },

    #[error("invalid check matrix: {0}")]
    InvalidCheckMatrix(String),

    #[error("requested ebit columns host only {achievable} of {requested} symplectic pairs")]
    EbitColumns { requested: usize, achievable: usize },

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn parse(input: &str, reason: impl Into<String>) -> Self {
        Error::Parse {
            input: input.to_string(),
            reason: reason.into(),
        }
    }
}
