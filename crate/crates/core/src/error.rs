use thiserror::Error;

/// Errors raised by the computational modules.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension guard: {what} has dimension {dim}, limit is {limit}")]
    DimensionGuard {
        what: &'static str,
        dim: usize,
        limit: usize,
    },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("polyhedra have different recession cones")]
    MismatchedRecessionCone,
    #[error("linear form is unbounded below on the polyhedron")]
    Unbounded,
    #[error("cone is not strongly convex")]
    NotStronglyConvex,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("duplicate point {0} on P^1")]
    DuplicatePoint(String),
    #[error("tail cone is not full-dimensional")]
    NonFullDimensionalCone,
    #[error("polyhedral divisor is not proper")]
    NotProper,
    #[error("polyhedral divisor is not klt")]
    NotKlt,
    #[error("log pair on P^1 is not log Fano")]
    NotLogFano,
    #[error("branch data mismatch: {0}")]
    BranchMismatch(String),
    #[error("coset enumeration exceeded {limit} cosets")]
    CosetOverflow { limit: usize },
    #[error("group too large to materialize ({0})")]
    SizeGuard(String),
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("subgroup is not abelian")]
    NotAbelian,
    #[error("fundamental group of the pulled-back divisor is not abelian")]
    CoverPi1NotAbelian,
}

pub type Result<T> = std::result::Result<T, Error>;
