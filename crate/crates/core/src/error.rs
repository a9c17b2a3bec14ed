use thiserror::Error;

/// Broad classification used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Precondition,
    ResourceCap,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),

    #[error("malformed document at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("cover does not cover vertex {vertex}")]
    NotACover { vertex: String },

    #[error("cover element {index} is empty")]
    EmptyCoverElement { index: usize },

    #[error("vertex sets differ between the two covers")]
    VertexSetMismatch,

    #[error("choice {choice} does not lie in cover element {index}")]
    ChoiceOutsideElement { index: usize, choice: usize },

    #[error("cover is not a star refinement of the target cover")]
    NotStarRefinement,

    #[error("cover does not refine the required cover: {0}")]
    NotRefinement(String),

    #[error("arc {index} contains no sample point")]
    EmptyArcSample { index: usize },

    #[error("boundary of a 0-chain is undefined")]
    ZeroDimensionalBoundary,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("chain is not small for the scale cover: simplex {simplex:?}")]
    NotSmall { simplex: Vec<usize> },

    #[error("chain is not a cycle")]
    NotACycle,

    #[error("cochain is not a cocycle at its scale")]
    NotACocycle,

    #[error("absolute value needs a real embedding of the coefficient field")]
    NoEmbedding,

    #[error("integral over homology generator {generator} is nonzero")]
    NonvanishingIntegral { generator: usize },

    #[error("cycle is a boundary at this scale")]
    IsBoundary,

    #[error("bonding map between the scales is not invertible")]
    NonInvertibleBonding,

    #[error("walk is not elementary: {0}")]
    NotElementary(String),

    #[error("cover element {element} is disconnected at the finer scale")]
    DisconnectedElement { element: usize },

    #[error("polynomial of degree {degree} exceeds the factorization cap {cap}")]
    DegreeCap { degree: usize, cap: usize },

    #[error("polynomial does not divide the minimal polynomial")]
    NotADivisor,

    #[error("seed vector does not have the requested minimal annihilator")]
    SeedMismatch,

    #[error("model has no self-map")]
    MissingMap,

    #[error("simplex count {count} exceeds the cap {cap}")]
    SimplexCap { count: usize, cap: usize },

    #[error("arc count {count} exceeds the cap {cap}")]
    ArcCap { count: usize, cap: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Input(_) | Error::Parse { .. } => ErrorKind::Input,
            Error::SimplexCap { .. } | Error::ArcCap { .. } | Error::DegreeCap { .. } => ErrorKind::ResourceCap,
            _ => ErrorKind::Precondition,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
