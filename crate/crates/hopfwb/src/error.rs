use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("length is undefined on the formal zero word")]
    ZeroLength,

    #[error("letter {letter} out of range 1..={d}")]
    LetterOutOfRange { letter: u32, d: u32 },

    #[error("relation ({u}, {v}) is not homogeneous: lengths {lu} != {lv}")]
    InhomogeneousRelation {
        u: String,
        v: String,
        lu: usize,
        lv: usize,
    },

    #[error("relation words must be nonempty and distinct: ({u}, {v})")]
    DegenerateRelation { u: String, v: String },

    #[error("zero word must have length >= 1")]
    EmptyZeroWord,

    #[error("generator count must be >= 1, got {0}")]
    BadGeneratorCount(u32),

    #[error("invalid word {text:?}: {reason}")]
    WordSyntax { text: String, reason: String },

    #[error("invalid rational {text:?}")]
    RationalSyntax { text: String },

    #[error("level {requested} exceeds table truncation level {max}")]
    LevelOverflow { requested: usize, max: usize },

    #[error("resource limit exceeded: {words} words at level {level} (limit {limit})")]
    ResourceLimit {
        words: u64,
        level: usize,
        limit: u64,
    },

    #[error("operands belong to different class tables")]
    TableMismatch,

    #[error("class id {0} does not exist in this table")]
    UnknownClass(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("singular value iteration did not converge")]
    SvdNonConvergence,

    #[error("point must lie in the open unit ball, got norm {0}")]
    PointOutsideBall(f64),

    #[error("operation requires exact coefficient functionals, got a rank-one functional")]
    RankOneFunctional,

    #[error("generator classes are degenerate (collapsed or zero at level 1)")]
    DegenerateGenerators,

    #[error("multiplier symbol has no value for class {0}")]
    MissingSymbolValue(String),

    #[error("ideal generator is not homogeneous")]
    InhomogeneousGenerator,

    #[error("scan over {0} classes exceeds the exhaustive-search bound")]
    ScanTooLarge(usize),

    #[error("table was not built from the commutator presentation: {0}")]
    NotCommutator(String),

    #[error("semicharacter is missing a value for class {0}")]
    MissingCharacterValue(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
