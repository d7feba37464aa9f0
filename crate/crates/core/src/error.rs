use std::fmt;

use thiserror::Error;

/// Which agent an error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Agent {
    /// Pursuer by zero-based index.
    Pursuer(usize),
    Evader,
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Agent::Pursuer(i) => write!(f, "pursuer {i}"),
            Agent::Evader => write!(f, "evader"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("state space of {states} states exceeds the cap of {cap}")]
    Capacity { states: u128, cap: u128 },

    #[error("step count {0} does not fit the 16-bit table encoding")]
    StepOverflow(u32),

    #[error("unsupported mode: {0}")]
    UnsupportedMode(String),

    #[error("illegal move by {agent}: {from} -> {to}")]
    IllegalMove { agent: Agent, from: usize, to: usize },

    #[error("invalid query: {0}")]
    Query(String),

    #[error("graph has diameter 0; distance features are undefined")]
    DegenerateGraph,

    #[error("malformed feature: {0}")]
    MalformedFeature(String),

    #[error("infeasible spec: {0}")]
    Infeasible(String),

    #[error("table fingerprint {found:016x} does not match spec fingerprint {expected:016x}")]
    FingerprintMismatch { expected: u64, found: u64 },

    #[error("corrupt table file: {0}")]
    CorruptTable(String),

    #[error("policy protocol: {0}")]
    Protocol(String),

    #[error("policy timed out after {0:?}")]
    Timeout(std::time::Duration),

    #[error("episode {episode}: {source}")]
    Episode {
        episode: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Coarse error classes, used for process exit codes and C status codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Input,
    Capacity,
    Unsupported,
    Rules,
    Protocol,
    Validation,
    Io,
}

impl Error {
    pub fn category(&self) -> Category {
        match self {
            Error::Parse { .. }
            | Error::Argument(_)
            | Error::Json(_)
            | Error::DegenerateGraph
            | Error::MalformedFeature(_)
            | Error::Infeasible(_)
            | Error::FingerprintMismatch { .. }
            | Error::CorruptTable(_) => Category::Input,
            Error::Capacity { .. } | Error::StepOverflow(_) => Category::Capacity,
            Error::UnsupportedMode(_) => Category::Unsupported,
            Error::IllegalMove { .. } | Error::Query(_) => Category::Rules,
            Error::Protocol(_) | Error::Timeout(_) => Category::Protocol,
            Error::Validation(_) => Category::Validation,
            Error::Io(_) => Category::Io,
            Error::Episode { source, .. } => source.category(),
        }
    }

    /// Process exit code for the CLI. Zero is reserved for success and 2 for
    /// usage errors reported by the argument parser.
    pub fn exit_code(&self) -> i32 {
        match self.category() {
            Category::Input => 3,
            Category::Capacity => 4,
            Category::Unsupported => 5,
            Category::Rules => 6,
            Category::Protocol => 7,
            Category::Validation => 8,
            Category::Io => 9,
        }
    }

    pub(crate) fn in_episode(self, episode: u64) -> Error {
        match self {
            e @ Error::Episode { .. } => e,
            e => Error::Episode { episode, source: Box::new(e) },
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
