use crate::imaging::CodecError;
use crate::metrics::Metric;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Codec(#[from] CodecError),

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("window {window_w}x{window_h} does not fit a {image_w}x{image_h} image")]
    WindowTooLarge {
        window_w: usize,
        window_h: usize,
        image_w: usize,
        image_h: usize,
    },

    #[error("window dimensions must be at least 1x1, got {0}x{1}")]
    ZeroWindow(usize, usize),

    #[error("quantization width {0} does not divide 256")]
    InvalidQuantization(usize),

    #[error("histograms are empty or disagree on pixel totals")]
    EmptyHistogram,

    #[error("vector length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("range entry {index} must be positive, got {value}")]
    NonPositiveRange { index: usize, value: f64 },

    #[error("vector entry {index} is out of range: {value}")]
    InvalidEntry { index: usize, value: f64 },

    #[error("bhattacharyya distance needs vectors with positive mass")]
    ZeroMass,

    #[error("soergel distance is undefined for two all-zero vectors")]
    ZeroDenominator,

    #[error("metric `{0}` needs a range vector")]
    MissingRanges(Metric),

    #[error("metric `{0}` does not take a range vector")]
    UnexpectedRanges(Metric),

    #[error("unknown metric `{0}` (expected gower, bhattacharyya, city_block, soergel or euclidean)")]
    UnknownMetric(String),

    #[error("{0} must not be empty")]
    EmptyInput(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("training window {window} of class `{class}` has a non-finite distance to the centroid")]
    NonFiniteDistance { class: String, window: usize },

    #[error("duplicate class name `{0}`")]
    DuplicateClass(String),

    #[error("{0} classes cannot be encoded in an 8-bit mask (at most 255)")]
    TooManyClasses(usize),

    #[error("dimension mismatch: expected {expected_w}x{expected_h}, got {actual_w}x{actual_h}")]
    DimensionMismatch {
        expected_w: usize,
        expected_h: usize,
        actual_w: usize,
        actual_h: usize,
    },

    #[error("cannot score an empty window grid")]
    EmptyGrid,

    #[error("unsupported model schema version {0} (expected 1)")]
    SchemaVersion(u64),

    #[error("model file: invalid field `{field}`: {reason}")]
    ModelField { field: String, reason: String },

    #[error("model file is not valid JSON: {0}")]
    ModelSyntax(String),

    #[error("synth spec line {line}: {message}")]
    SynthSpec { line: usize, message: String },

    #[error("patches {0} and {1} overlap")]
    OverlappingPatches(usize, usize),
}
