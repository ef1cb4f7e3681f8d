use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("generator `{letter}` is outside rank {rank}")]
    InvalidGenerator { letter: char, rank: usize },
    #[error("rank {0} is not supported (expected 1..=26)")]
    InvalidRank(usize),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("graph is not a precover: {0}")]
    NotAPrecover(String),
    #[error("graph is not a cover: {0}")]
    NotACover(String),
    #[error("no covering map between the two graphs")]
    NotACoveringPair,
    #[error("condition has {vertices} vertices, more than the target degree {n}")]
    ConditionTooLarge { vertices: usize, n: usize },
    #[error("{count} completions exceed the enumeration guard {guard}")]
    TooManyCompletions { count: f64, guard: u64 },
    #[error("{vertices} vertices exceed the quotient enumeration guard {guard}")]
    TooManyQuotients { vertices: usize, guard: usize },
    #[error("action is not transitive")]
    NotTransitive,
    #[error("prime {p} exceeds the enumeration guard: {reason}")]
    PrimeTooLarge { p: u32, reason: String },
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("prime {0} does not give a sound conjugacy certificate (only 2 is supported)")]
    UnsoundPrime(u32),
    #[error("pullback grew past {guard} vertices")]
    PullbackTooLarge { guard: usize },
    #[error("element {0} lies in the subgroup")]
    NotSeparable(String),
    #[error("search budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("degree {m} exceeds the brute-force limit {limit}")]
    DegreeTooLarge { m: usize, limit: usize },
    #[error("subgroup does not have finite index")]
    NotFiniteIndex,
    #[error("json: {0}")]
    Json(String),
}

impl Error {
    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidGenerator { .. } => "InvalidGenerator",
            Error::InvalidRank(_) => "InvalidRank",
            Error::DegenerateInput(_) => "DegenerateInput",
            Error::InvalidInput(_) => "InvalidInput",
            Error::NotAPrecover(_) => "NotAPrecover",
            Error::NotACover(_) => "NotACover",
            Error::NotACoveringPair => "NotACoveringPair",
            Error::ConditionTooLarge { .. } => "ConditionTooLarge",
            Error::TooManyCompletions { .. } => "TooManyCompletions",
            Error::TooManyQuotients { .. } => "TooManyQuotients",
            Error::NotTransitive => "NotTransitive",
            Error::PrimeTooLarge { .. } => "PrimeTooLarge",
            Error::NotPrime(_) => "NotPrime",
            Error::UnsoundPrime(_) => "UnsoundPrime",
            Error::PullbackTooLarge { .. } => "PullbackTooLarge",
            Error::NotSeparable(_) => "NotSeparable",
            Error::BudgetExhausted(_) => "BudgetExhausted",
            Error::DegreeTooLarge { .. } => "DegreeTooLarge",
            Error::NotFiniteIndex => "NotFiniteIndex",
            Error::Json(_) => "Json",
        }
    }

    /// True for errors caused by an enumeration or size guard.
    pub fn is_guard(&self) -> bool {
        matches!(
            self,
            Error::TooManyCompletions { .. }
                | Error::TooManyQuotients { .. }
                | Error::PrimeTooLarge { .. }
                | Error::PullbackTooLarge { .. }
                | Error::DegreeTooLarge { .. }
        )
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
