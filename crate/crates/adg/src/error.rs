use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("p must be an odd prime, got {0}")]
    NotOddPrime(u64),
    #[error("extension degree must be at least 1")]
    BadExtensionDegree,
    #[error("field order {p}^{e} does not fit the supported integer width")]
    FieldTooLarge { p: u64, e: u32 },
    #[error("division by zero in F_{q}")]
    DivisionByZero { q: u32 },
    #[error("element value {value} out of range for F_{q}")]
    ElemOutOfRange { value: u64, q: u32 },
    #[error("expected a polynomial in {expected} variables, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("vertex id {id} out of range (graph has {count} vertices)")]
    IdOutOfRange { id: u64, count: u64 },
    #[error("graph is too large to build: {vertices} vertices exceeds limit {limit}")]
    GraphTooLarge { vertices: u64, limit: u64 },
    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("graph contains no cycle")]
    Acyclic,
    #[error("vertex map is not a bijection")]
    NotBijective,
    #[error("search exceeded the node limit of {limit}")]
    ResourceLimit { limit: u64 },
    #[error("graph too large for exhaustive search: {vertices} vertices (limit {limit})")]
    SizeLimit { vertices: usize, limit: usize },
    #[error("claim {claim} is not admissible at q = {q}: {constraint}")]
    Inadmissible {
        claim: String,
        q: u32,
        constraint: String,
    },
    #[error("unknown claim id: {0}")]
    UnknownClaim(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
