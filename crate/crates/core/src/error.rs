use thiserror::Error;

/// Every failure the library can report.
///
/// Variants are grouped roughly by the module that raises them; several are
/// shared (for instance `Degenerate` is raised both by vertex construction and
/// by the simplex engine).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    // exact arithmetic
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid rational literal {0:?}")]
    ParseRational(String),

    // polytopes
    #[error("basis {0:?} is infeasible")]
    Infeasible(Vec<usize>),
    #[error("degenerate (non-simple) configuration: {0}")]
    Degenerate(String),
    #[error("edge leaving facet {leaving} at vertex {vertex:?} is unbounded")]
    UnboundedEdge { vertex: Vec<usize>, leaving: usize },
    #[error("{what} exceeded the configured cap of {cap}")]
    LimitExceeded { what: &'static str, cap: usize },
    #[error("invalid polytope: {0}")]
    InvalidPolytope(String),

    // pivoting
    #[error("pivot rule tie: {0}")]
    Tie(String),
    #[error("could not separate two normalized ratios within {bits} bits")]
    UncertifiableComparison { bits: u32 },
    #[error("simplex run exceeded the step cap of {cap}")]
    StepCapExceeded { cap: usize },
    #[error("normalization is not regular: {0}")]
    NotRegular(String),
    #[error("invalid normalization: {0}")]
    InvalidNorm(String),
    #[error("invalid pivot rule: {0}")]
    InvalidRule(String),

    // constructions
    #[error("direction is not in the interior of the normal cone at vertex {0:?}")]
    NotInterior(Vec<usize>),
    #[error("cut depth {eps} is not below the neighbor gap {gap}")]
    EpsTooLarge { eps: String, gap: String },
    #[error("ball is not contained in the interior of the normal cone at vertex {0:?}")]
    BallNotInterior(Vec<usize>),
    #[error("delta halving did not land inside the ball at stage {stage}")]
    DeltaUnderflow { stage: usize },
    #[error("instance generation failed: {0}")]
    GenerationFailed(String),
    #[error("degenerate shadow path: {0}")]
    DegeneratePath(String),
    #[error("no compression factor up to 2^64 reproduces the shadow path")]
    KSearchExhausted,

    // analysis
    #[error("non-generic parametric event: {0}")]
    NonGeneric(String),
    #[error("projection is degenerate (all projected vertices are collinear)")]
    DegenerateProjection,
    #[error("objective values are not distinct: {0}")]
    DuplicateValues(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
