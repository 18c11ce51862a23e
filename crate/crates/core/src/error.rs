use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: u32, found: u32 },

    #[error("{what}: requested n = {requested}, limit is n <= {limit}")]
    Capacity {
        what: &'static str,
        requested: u32,
        limit: u32,
    },

    #[error("qubit index {index} out of range for a {qubits}-qubit register")]
    QubitOutOfRange { index: u32, qubits: u32 },

    #[error("state is not normalized (squared norm {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("contract violation: {0}")]
    Contract(&'static str),

    #[error("epsilon must lie in [0, 0.5], got {0}")]
    Epsilon(f64),

    #[error("invalid truth-table encoding: {0}")]
    Encoding(&'static str),

    #[error("counter tallies differ between causal branches")]
    CounterInconsistency,
}

pub(crate) fn check_arity(expected: u32, found: u32) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::ArityMismatch { expected, found })
    }
}
