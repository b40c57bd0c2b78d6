use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// ECC alignment needs a template with nonzero intensity variance.
    #[error("degenerate template: intensity variance is zero")]
    DegenerateTemplate,

    /// Appearance vectors must be normalizable to unit length.
    #[error("degenerate embedding: zero vector cannot be normalized")]
    DegenerateEmbedding,

    /// Tracker frames must be presented in strictly increasing order.
    #[error("non-monotonic frame: got {got} after {last}")]
    NonMonotonicFrame { got: u32, last: u32 },

    /// Camera motion compensation was requested without background images.
    #[error("motion inputs required: cmc is enabled but no backgrounds were supplied")]
    MotionInputsRequired,

    #[error("overcrowded scenario: {n_tracks} tracks cannot fit a {length}x{width} m pitch")]
    OvercrowdedScenario {
        n_tracks: usize,
        length: f64,
        width: f64,
    },

    /// MOTA is undefined when the ground truth contains no boxes.
    #[error("empty ground truth")]
    EmptyGroundTruth,

    #[error("{msg} (line {line})")]
    MotParse { line: usize, msg: String },

    #[error("infeasible target: {0}")]
    InfeasibleTarget(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
