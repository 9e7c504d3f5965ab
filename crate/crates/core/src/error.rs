use thiserror::Error;

use crate::action::LatticeVector;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("points belong to different systems: {0}")]
    MismatchedSystems(String),

    #[error("{what}: {requested} exceeds cap {cap}")]
    CapExceeded {
        what: String,
        requested: String,
        cap: String,
    },

    /// No lattice vector in the search ball pushes the pair past the separation floor.
    #[error("no witness within radius {radius}{}: best vector {best_vector} reached {achieved}", pair_suffix(.pair))]
    NoWitness {
        pair: Option<(usize, usize)>,
        radius: u32,
        best_vector: LatticeVector,
        achieved: String,
    },

    #[error("bad format at line {line}: {message}")]
    BadFormat { line: usize, message: String },

    #[error("checksum mismatch: file says {stated}, content hashes to {computed}")]
    ChecksumMismatch { stated: String, computed: String },

    #[error("unknown color index {0}")]
    UnknownColor(u32),

    #[error("need at least 3 sample points, got {0}")]
    RangeTooSmall(usize),

    #[error("certificate does not re-verify: {0}")]
    InconsistentCertificate(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

fn pair_suffix(pair: &Option<(usize, usize)>) -> String {
    match pair {
        Some((i, j)) => format!(" for edge ({i}, {j})"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn cap(what: &str, requested: impl ToString, cap: impl ToString) -> Self {
        Error::CapExceeded {
            what: what.to_string(),
            requested: requested.to_string(),
            cap: cap.to_string(),
        }
    }

    pub(crate) fn bad_format(line: usize, message: impl Into<String>) -> Self {
        Error::BadFormat {
            line,
            message: message.into(),
        }
    }
}
