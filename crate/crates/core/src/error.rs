use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// One or more structural problems with a graph description.
    #[error("invalid graph: {}", .0.join("; "))]
    InvalidGraph(Vec<String>),

    #[error("traced subsystem {0} is not in 1..={1}")]
    TraceOutOfRange(usize, usize),

    #[error("order p={p} exceeds the enumeration cap {cap}")]
    OrderTooLarge { p: usize, cap: usize },

    #[error("{what}: estimated cost {estimated} exceeds budget {budget}")]
    BudgetExceeded {
        what: &'static str,
        estimated: u128,
        budget: u128,
    },

    #[error("Weingarten function is not defined at dimension {n} for order {p}")]
    WeingartenSingular { p: usize, n: u64 },

    #[error("mismatched orders: {0} vs {1}")]
    OrderMismatch(usize, usize),

    #[error("constraint poset has a cycle through node {0}")]
    CyclicPoset(usize),

    #[error("constraint poset pins are inconsistent: node {0} is pinned above node {1}")]
    InconsistentPins(usize, usize),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("pinned minimum of F_beta is {found}, max flow predicts {expected}")]
    FlowMismatch { found: u64, expected: u64 },

    #[error("dimension {dim} exceeds the memory cap {cap}")]
    DimensionTooLarge { dim: u128, cap: u128 },
}
