use num_complex::Complex64;
use thiserror::Error;

/// Errors surfaced by frame validation, loop construction, and the
/// cocycle/holonomy pipelines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("half-dimension must be at least 1")]
    ZeroDimension,

    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },

    #[error("field mismatch between operands")]
    FieldMismatch,

    #[error("operation requires a real symplectic space")]
    ComplexFieldUnsupported,

    #[error("matrix entries must be real for a real space (max imaginary part {max_imag:.3e})")]
    NotReal { max_imag: f64 },

    #[error("frame is rank deficient: numerical rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("frame is not isotropic: max |Z^T J Z| = {defect:.3e}")]
    NotIsotropic { defect: f64 },

    #[error("loop endpoints span different subspaces (principal angle {angle:.3e})")]
    NotClosed { angle: f64 },

    #[error(
        "consecutive samples {index} -> {} too far apart: principal angle {angle:.4} exceeds {bound}",
        index + 1
    )]
    StepBound { index: usize, angle: f64, bound: f64 },

    #[error("too few samples: need at least {need}, got {got}")]
    TooFewSamples { need: usize, got: usize },

    #[error("aliasing at {location}: argument increment {increment:.4} too close to pi")]
    Aliasing { location: String, increment: f64 },

    #[error("winding sum {value:.6} is not within {tol:.1e} of an integer")]
    NonIntegerWinding { value: f64, tol: f64 },

    #[error("unexpected zero value: {context}")]
    ZeroValue { context: String },

    #[error("invalid reference data: {0}")]
    InvalidReference(String),

    #[error("unknown set id {0:?}")]
    UnknownSet(String),

    #[error("nerve structure invalid: {0}")]
    InvalidNerve(String),

    #[error("missing transition samples for keys: {keys:?}")]
    MissingKeys { keys: Vec<String> },

    #[error("cocycle identity violated at {key}: |r_ij r_jk r_ki - 1| = {deviation:.3e}")]
    CocycleViolation { key: String, deviation: f64 },

    #[error("Cech sum {value} at {key} is not an integer within {tol:.1e}")]
    NonIntegerSum { key: String, value: Complex64, tol: f64 },

    #[error("cocycle value not constant on component {key}: saw {a} and {b}")]
    NonConstant { key: String, a: String, b: String },

    #[error("value {value} is not a root of unity of order {order} within tolerance")]
    SnapFailed { value: Complex64, order: u32 },

    #[error("nerve has no fundamental cycle: oriented face list is empty")]
    NoFundamentalCycle,

    #[error("square-root data does not square to the underlying bundle at {key}: |s^2 - r| = {deviation:.3e}")]
    NotASquareRoot { key: String, deviation: f64 },

    #[error("object not defined at equator step {step}: {detail}")]
    ObjectUndefined { step: usize, detail: String },

    #[error("sample {index} is not valid in any chart")]
    NoValidChart { index: usize },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
