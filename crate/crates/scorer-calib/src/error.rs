//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("line {line}: malformed record: {message}")]
    MalformedLine { line: usize, message: String },

    #[error("line {line}: inconsistent dimension: expected {expected}, found {found}")]
    InconsistentDimension {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("line {line}: score out of range: {score} not in [{min}, {max}]")]
    ScoreOutOfRange {
        line: usize,
        score: i64,
        min: i64,
        max: i64,
    },

    #[error("line {line}: duplicate pair {pair_id:?} for scorer {scorer_id:?}")]
    DuplicatePair {
        line: usize,
        pair_id: String,
        scorer_id: String,
    },

    #[error("no scorers survive filter (min_count = {min_count})")]
    NoScorersSurvive { min_count: usize },

    #[error("scorer {scorer_id:?} has only {count} points; at least 3 are required for a fold plan")]
    TooFewPointsForFolds { scorer_id: String, count: usize },

    #[error("fold count must be at least 3, got {k}")]
    TooFewFolds { k: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("scorer index {index} out of range (scorer count {count})")]
    ScorerOutOfRange { index: usize, count: usize },

    #[error("empty batch")]
    EmptyBatch,

    #[error("degenerate evaluation batch: no score category has both positives and negatives")]
    DegenerateEvalBatch,

    #[error("undefined kappa: expected disagreement is zero with imperfect agreement")]
    UndefinedKappa,

    #[error("mixture needs at least as many points as components: {points} points, {components} components")]
    TooFewPointsForMixture { points: usize, components: usize },

    #[error("mixture component {component} collapsed twice; data cannot support {components} components")]
    CollapsedComponent { component: usize, components: usize },

    #[error("correlation needs at least 3 observations per column, got {n}")]
    TooFewObservations { n: usize },

    #[error("columns have unequal lengths")]
    UnequalColumns,

    #[error("pair {pair_id:?} not scored by scorer {scorer_id:?}")]
    UnknownPair { pair_id: String, scorer_id: String },

    #[error("unknown scorer id {scorer_id:?}")]
    UnknownScorer { scorer_id: String },

    #[error("default archetypes are defined for 5 score categories, got {c}")]
    ArchetypesNeedFiveCategories { c: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid checkpoint: {0}")]
    InvalidCheckpoint(String),

    #[error("invalid probability vector: {0}")]
    InvalidProbability(String),
}
