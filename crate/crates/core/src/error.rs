use thiserror::Error;

/// One named-field constraint violation found during validation.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown application '{0}'")]
    UnknownApplication(String),

    #[error("validation failed: {}", format_violations(.0))]
    Validation(Vec<Violation>),

    #[error("domain error in {context}: {message}")]
    Domain { context: String, message: String },

    #[error("placement error: {0}")]
    Placement(String),

    #[error("netlist build error: {0}")]
    Build(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("singular system: {0}")]
    Singular(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("missing PT baseline for application '{0}'")]
    MissingBaseline(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
