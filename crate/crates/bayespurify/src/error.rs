use thiserror::Error;

/// Errors surfaced by game construction, verification and purification.
#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch in {what}: expected {expected}, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("index out of range in {what}: {index} >= {bound}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        bound: usize,
    },

    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error("player {player}, fine cell {cell}: empty support under support_eps")]
    EmptySupport { player: usize, cell: usize },

    #[error("zero transition-probability denominator at type profile {profile:?}")]
    ZeroNuDenominator { profile: Vec<usize> },

    #[error("payoff for player {player} in state {state} is not measurable w.r.t. the coarse partitions (spread {spread:.3e})")]
    NonMeasurableStatePayoff {
        player: usize,
        state: usize,
        spread: f64,
    },

    #[error("game requires a DCPI decomposition but none was supplied")]
    MissingDecomposition,

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
