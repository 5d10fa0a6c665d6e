use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid generator `{name}`: {reason}")]
    InvalidGenerator { name: String, reason: String },

    #[error("duplicate generator name `{0}`")]
    DuplicateGenerator(String),

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("element `{element}` is not homogeneous of degree {expected}")]
    DegreeMismatch { element: String, expected: u32 },

    #[error("differential squares to a nonzero element on `{generator}`: {value}")]
    DSquaredNonzero { generator: String, value: String },

    #[error("differential of base generator `{0}` must vanish")]
    BaseNotClosed(String),

    #[error("KS condition fails on `{generator}`: D - d = {difference} is not in the ideal of the base")]
    KsConditionFails { generator: String, difference: String },

    #[error("the model is not minimal: d({generator}) has a linear part")]
    NotMinimal { generator: String },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("basis in degree {degree} has {size} monomials, above the cap {cap}")]
    BasisTooLarge { degree: u32, size: usize, cap: usize },

    #[error("Groebner basis exceeded the cap of {cap} polynomials")]
    GroebnerCapExceeded { cap: usize },

    #[error("witness `{witness}` is rejected: {reason}")]
    WitnessRejected { witness: String, reason: String },

    #[error("rank of witness `{witness}` is not certified: lower bound {lower}, upper bound {upper}")]
    Uncertified {
        witness: String,
        lower: usize,
        upper: usize,
    },

    #[error("inconsistent data: {0}")]
    Inconsistent(String),

    #[error("io error on `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("manifest error in `{path}`: {message}")]
    Manifest { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
