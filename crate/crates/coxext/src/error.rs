use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Descriptor text does not conform to the grammar. `pos` is a byte
    /// offset into the input.
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    /// A factor parameter is outside its admissible range (e.g. A0, I2(2)).
    #[error("parameter out of range: {0}")]
    Parameter(String),

    /// A configured size cap was exceeded (group order, rank, support size).
    #[error("cap exceeded: {0}")]
    CapExceeded(String),

    /// Root isolation did not converge or found an inconsistent root count.
    #[error("root isolation failed: {0}")]
    RootFinding(String),

    /// Invalid argument to a numeric routine.
    #[error("invalid input: {0}")]
    Domain(String),

    /// A hard internal invariant was violated (oracle mismatch, BFS
    /// inconsistency, broken palindromicity). Never ignored.
    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
