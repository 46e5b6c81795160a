use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("player {player} strategy {strategy} has zero marginal probability")]
    ZeroMarginal { player: usize, strategy: usize },

    #[error("distribution is not of product form (max deviation {deviation:.3e})")]
    NotProductForm { deviation: f64 },

    #[error("game is trivial: no player has two strategies with distinct outcome profiles")]
    TrivialGame,

    #[error("distribution is not completely mixed")]
    NotCompletelyMixed,

    #[error("payoff pair does not have the crossing sign pattern (x0>y0, x1<y1) or (x0<y0, x1>y1)")]
    WrongSignPattern,

    #[error("region masks are defined on different grids")]
    GridMismatch,

    #[error("l-coordinates are not a monotone chain ending at 1: {0}")]
    NonMonotoneChain(String),

    #[error("operation requires a 2x2 game")]
    NotTwoByTwo,
}

pub type Result<T> = std::result::Result<T, Error>;
