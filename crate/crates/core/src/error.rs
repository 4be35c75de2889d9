use thiserror::Error;

/// Errors produced anywhere in the lab.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("descriptor mismatch: expected {expected}, found {found}")]
    DescriptorMismatch { expected: String, found: String },

    #[error("invalid group descriptor: {0}")]
    InvalidDescriptor(String),

    #[error("requested rank {requested} exceeds declared rank {declared}")]
    RankExceeded { requested: usize, declared: usize },

    #[error("coordinate overflow in {0}")]
    Overflow(&'static str),

    #[error("operation requires a nonempty set")]
    EmptySet,

    #[error("operation requires an abelian group, got {0}")]
    NotAbelian(String),

    #[error("operation requires finite declared rank, got {0}")]
    InfiniteRank(String),

    #[error("index {index} out of range (max {max})")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("family {family} is incompatible with group {group}")]
    IncompatibleFamily { family: String, group: String },

    #[error("search exhausted at index {max_index} after finding {} of {requested} indices", found.len())]
    Exhausted {
        found: Vec<usize>,
        requested: usize,
        max_index: usize,
    },

    #[error("element {0} is not in the embedded subgroup")]
    NotInSubgroup(String),

    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),

    #[error("enumeration guard exceeded: {pairs} pairs > limit {limit}")]
    GuardExceeded { pairs: u128, limit: u128 },

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("invalid cylinder function: {0}")]
    InvalidWindow(String),

    #[error("probability {0} outside (0, 1)")]
    InvalidProbability(f64),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl LabError {
    /// Short machine-readable tag used in structured error records.
    pub fn kind(&self) -> &'static str {
        match self {
            LabError::DescriptorMismatch { .. } => "descriptor_mismatch",
            LabError::InvalidDescriptor(_) => "invalid_descriptor",
            LabError::RankExceeded { .. } => "rank_exceeded",
            LabError::Overflow(_) => "overflow",
            LabError::EmptySet => "empty_set",
            LabError::NotAbelian(_) => "not_abelian",
            LabError::InfiniteRank(_) => "infinite_rank",
            LabError::IndexOutOfRange { .. } => "index_out_of_range",
            LabError::IncompatibleFamily { .. } => "incompatible_family",
            LabError::Exhausted { .. } => "exhausted",
            LabError::NotInSubgroup(_) => "not_in_subgroup",
            LabError::InvalidEmbedding(_) => "invalid_embedding",
            LabError::GuardExceeded { .. } => "guard_exceeded",
            LabError::Parse { .. } => "parse",
            LabError::InvalidWindow(_) => "invalid_window",
            LabError::InvalidProbability(_) => "invalid_probability",
            LabError::InsufficientData(_) => "insufficient_data",
            LabError::InvalidArgument(_) => "invalid_argument",
            LabError::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
