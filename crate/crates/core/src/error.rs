//! Crate-wide error type. Configuration errors always carry the offending
//! config key so CLI users can locate the problem in their file.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration value. `key` is the dotted config path.
    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },

    /// The communication graph does not connect all players.
    #[error("communication graph is not connected")]
    Disconnected,

    /// A vector or matrix had the wrong size for its slot.
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    Dimension {
        context: String,
        expected: usize,
        actual: usize,
    },

    /// The equilibrium solver ran out of iterations before reaching its
    /// residual target.
    #[error("equilibrium solver stalled: residual {residual:.3e} after {iterations} iterations")]
    SolverStalled { residual: f64, iterations: usize },

    /// The game map failed the strong-monotonicity precheck, so the damped
    /// fixed-point solver has no valid step size.
    #[error("pseudo-gradient is not strongly monotone (estimate {estimate:.3e})")]
    NotMonotone { estimate: f64 },

    /// A named game or nonlinearity was not found in its registry.
    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },

    /// A simulation state entry became non-finite.
    #[error("state diverged at t = {time:.6}: non-finite value in `{segment}`")]
    Diverged { time: f64, segment: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("failed to serialize output: {0}")]
    Serialize(#[from] serde_json::Error),
}

impl Error {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
