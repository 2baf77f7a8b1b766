use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid mode label: {0}")]
    InvalidLabel(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("transmission matrix is not a contraction (largest singular value {0})")]
    NotAContraction(f64),

    #[error("matrix is not unitary (residual {0:e})")]
    NotUnitary(f64),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("resource cap exceeded: {what} is {value}, cap {cap}")]
    Resource {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    #[error("unsupported input: {0}")]
    UnsupportedInput(String),

    #[error("expected an input of {expected} polaritons, found {found}")]
    WrongCount { expected: usize, found: String },

    #[error("singular transmission: det(X_s) = {0:e}")]
    SingularTransmission(f64),

    #[error("integrity check failed: {0}")]
    Integrity(String),

    #[error("invalid state: {0}")]
    State(String),
}

pub type Result<T> = std::result::Result<T, Error>;
