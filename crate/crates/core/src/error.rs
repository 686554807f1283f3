use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown impurity function `{0}`")]
    UnknownFunction(String),

    #[error("invalid parameter for `{name}`: {detail}")]
    InvalidParameter { name: String, detail: String },

    #[error("malformed function spec `{spec}`: {detail}")]
    MalformedSpec { spec: String, detail: String },

    #[error("`{name}` is not a preimpurity function: f''({p}) = {value} is not negative")]
    NotPreimpurity { name: String, p: f64, value: f64 },

    #[error("second derivative of `{name}` vanishes or changes sign at p = {p}")]
    SecondDerivativeVanishes { name: String, p: f64 },

    #[error("`{name}` is not proper (not concave); pass the override to grow anyway")]
    Improper { name: String },

    #[error("weight factor must be positive and finite, got {0}")]
    InvalidWeight(f64),

    #[error("invalid node: {0}")]
    InvalidNode(String),

    #[error("split ({a}, {b}) is not valid for a node of prevalence {c}")]
    InvalidSplit { a: f64, b: f64, c: f64 },

    #[error("split ({a}, {b}) is degenerate; a < c < b is required")]
    DegenerateSplit { a: f64, b: f64 },

    #[error("candidate split set is empty")]
    EmptyCandidates,

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
