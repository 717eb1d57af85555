use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong in the library.
///
/// The variants split into two groups: bad input (out-of-range base, point
/// outside the admissible interval, caps exceeded) and broken invariants.
/// The second group means a containment or counting statement that should
/// hold for the given base failed numerically; see
/// [`Error::is_invariant_violation`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("base {beta} is outside (1, 2)")]
    InvalidBeta { beta: String },

    #[error("precision of {bits} bits is unsupported (expected {min}..={max})")]
    InvalidPrecision { bits: u32, min: u32, max: u32 },

    #[error("invalid tolerance {0}")]
    InvalidTolerance(String),

    #[error("point {x} is outside [0, {upper}]")]
    InvalidPoint { x: String, upper: String },

    #[error("could not parse {input:?} as a number: {reason}")]
    Parse { input: String, reason: String },

    #[error("no sign change of {poly} found in (1, 2)")]
    NoRootFound { poly: String },

    #[error("{what} = {value} exceeds the cap of {cap}")]
    CapExceeded { what: &'static str, value: u64, cap: u64 },

    #[error("frontier of {survivors} words at depth {depth} exceeds the survivor cap {cap}")]
    MemoryGuard { depth: usize, survivors: usize, cap: usize },

    #[error("visited more than {budget} orbit nodes")]
    WorkBudget { budget: u64 },

    #[error("{quantity} is undefined for {value}")]
    OutOfDomain { quantity: &'static str, value: String },

    #[error("base {beta} exceeds the threshold {threshold} required for m = {m}")]
    BaseAboveThreshold { beta: String, threshold: String, m: u32 },

    #[error("no admissible word of length <= {cap} maps {x} into the steering interval")]
    Unreachable { x: String, cap: usize },

    #[error("extension {word} left the steering interval: {value} not in [{lo}, {hi}]")]
    ContainmentViolation {
        word: String,
        value: String,
        lo: String,
        hi: String,
    },

    #[error("no steering word of length {length} returns {value} to the steering interval")]
    NoSteeringWord { length: usize, value: String },

    #[error("forced run of {steps} steps exceeds the limit {limit}")]
    ForcedRunTooLong { steps: usize, limit: usize },

    #[error("recursion depth {depth} exceeds the limit {limit}")]
    DepthExceeded { depth: usize, limit: usize },

    #[error("measure estimate at radius {radius} is unresolved (value {value}, half-width {half_width})")]
    Unstable {
        radius: String,
        value: f64,
        half_width: f64,
    },

    #[error("{0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for failures that falsify a mathematical guarantee rather than
    /// reject an input.
    pub fn is_invariant_violation(&self) -> bool {
        matches!(
            self,
            Error::NoRootFound { .. }
                | Error::Unreachable { .. }
                | Error::ContainmentViolation { .. }
                | Error::NoSteeringWord { .. }
                | Error::ForcedRunTooLong { .. }
        )
    }

    /// Short machine-readable tag for diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidBeta { .. } => "invalid_beta",
            Error::InvalidPrecision { .. } => "invalid_precision",
            Error::InvalidTolerance(_) => "invalid_tolerance",
            Error::InvalidPoint { .. } => "invalid_point",
            Error::Parse { .. } => "parse",
            Error::NoRootFound { .. } => "no_root_found",
            Error::CapExceeded { .. } => "cap_exceeded",
            Error::MemoryGuard { .. } => "memory_guard",
            Error::WorkBudget { .. } => "work_budget",
            Error::OutOfDomain { .. } => "out_of_domain",
            Error::BaseAboveThreshold { .. } => "base_above_threshold",
            Error::Unreachable { .. } => "unreachable",
            Error::ContainmentViolation { .. } => "containment_violation",
            Error::NoSteeringWord { .. } => "no_steering_word",
            Error::ForcedRunTooLong { .. } => "forced_run_too_long",
            Error::DepthExceeded { .. } => "depth_exceeded",
            Error::Unstable { .. } => "unstable",
            Error::InvalidArgument(_) => "invalid_argument",
        }
    }
}
