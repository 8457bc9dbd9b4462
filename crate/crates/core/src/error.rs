use thiserror::Error;

/// Source position attached to frontend diagnostics (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Location {
    pub line: u32,
    pub col: u32,
}

impl std::fmt::Display for Location {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{loc}: syntax error: expected {}, found {found}", expected.join(" | "))]
    Syntax {
        loc: Location,
        expected: Vec<String>,
        found: String,
    },
    #[error("{loc}: {message}")]
    Semantic { loc: Location, message: String },
    #[error("{loc}: {message}")]
    Compile { loc: Location, message: String },
    #[error("{0}")]
    Domain(String),
    #[error("unknown tree node: {0}")]
    UnknownNode(u32),
    #[error("qubit {qubit} out of range (circuit has {count} qubits)")]
    QubitOutOfRange { qubit: u32, count: u32 },
    #[error("invalid theme: {0}")]
    Theme(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Source location for frontend errors, if any.
    pub fn location(&self) -> Option<Location> {
        match self {
            Error::Syntax { loc, .. } | Error::Semantic { loc, .. } | Error::Compile { loc, .. } => Some(*loc),
            _ => None,
        }
    }

    /// Human message without the location prefix.
    pub fn message(&self) -> String {
        match self {
            Error::Syntax { expected, found, .. } => {
                format!("syntax error: expected {}, found {found}", expected.join(" | "))
            }
            Error::Semantic { message, .. } | Error::Compile { message, .. } => message.clone(),
            other => other.to_string(),
        }
    }

    /// `file:line:col: message` form used by the CLI.
    pub fn diagnostic(&self, file: &str) -> String {
        match self.location() {
            Some(loc) => format!("{file}:{}:{}: {}", loc.line, loc.col, self.message()),
            None => format!("{file}: {}", self.message()),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
