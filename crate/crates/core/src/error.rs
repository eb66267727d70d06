use thiserror::Error;

/// Errors produced while loading plans, evaluating the model or running a solver.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A model function was called outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Caller broke a structural contract (mismatched lengths, unevaluated individuals, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A plan document failed validation. `key` names the offending field.
    #[error("invalid plan: `{key}`: {message}")]
    Schema { key: String, message: String },

    #[error("operation {operation} references unknown tool {tool}")]
    DanglingTool { operation: u32, tool: u32 },

    #[error("could not parse plan document: {0}")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    /// Dinkelbach iteration did not settle; `trace` holds every λ visited.
    #[error("oracle did not converge after {iterations} iterations (last step {last_step:e})")]
    NonConvergence {
        iterations: usize,
        last_step: f64,
        trace: Vec<f64>,
    },

    #[error("report serialization failed: {0}")]
    Serialize(String),
}

impl Error {
    pub(crate) fn schema(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            key: key.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
