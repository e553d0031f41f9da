use thiserror::Error;

/// Position of a diagnostic inside DSL source text (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourcePos {
    pub line: usize,
    pub column: usize,
}

impl std::fmt::Display for SourcePos {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    // jets
    #[error("division by a jet whose constant term is zero")]
    DivisionByZeroConstantTerm,
    #[error("square root of a jet with non-positive constant term {0}")]
    NegativeSqrtConstantTerm(f64),
    #[error("logarithm or real power of a jet with non-positive constant term {0}")]
    NonPositiveBase(f64),
    #[error("jet order exhausted: needed {needed} more derivative orders, jet has order {order}")]
    OrderExhausted { needed: usize, order: usize },

    // surface dsl
    #[error("syntax error at {pos}: expected {}", expected.join(" or "))]
    SyntaxError { pos: SourcePos, expected: Vec<String> },
    #[error("unknown identifier `{name}` at {pos}")]
    UnknownIdentifier { name: String, pos: SourcePos },
    #[error("function `{name}` at {pos} is not smooth and is not allowed")]
    NonSmoothFunction { name: String, pos: SourcePos },
    #[error("surface file line {line}: {message}")]
    SurfaceFile { line: usize, message: String },
    #[error("evaluation domain error: {0}")]
    EvaluationDomainError(String),
    #[error("supplied normal field is invalid at ({u}, {v}): {message}")]
    InvalidNormal { u: f64, v: f64, message: String },

    // minkowski
    #[error("vector is not unit timelike: (x, x) = {0}")]
    NotUnitTimelike(f64),
    #[error("Gram-Schmidt breakdown: candidate vectors became numerically null")]
    GramSchmidtBreakdown,
    #[error("vector is not lightlike: (x, x) = {0}")]
    NotLightlike(f64),
    #[error("zero vector")]
    ZeroVector,
    #[error("matrix file: {0}")]
    MatrixFormat(String),

    // legendre
    #[error("normal is not a unit vector: |t| = {0}")]
    NotUnitNormal(f64),
    #[error("normal is not orthogonal to df: residual {0}")]
    NotIsotropic(f64),
    #[error("surface is rank deficient at this point; supply an explicit normal with nx/ny/nz")]
    RankDeficient,
    #[error("projection singular: |det B| = {det} (relative to |B| = {norm})")]
    ProjectionSingular { det: f64, norm: f64 },

    // curvature
    #[error("surface is not immersed at this point")]
    NotImmersed,
    #[error("principal directions are undefined at an umbilic point")]
    UmbilicDirectionUndefined,
    #[error("curvature sphere index is ambiguous at an umbilic point")]
    UmbilicAmbiguity,
    #[error("point is not umbilic (|k1 - k2| = {0})")]
    NotUmbilic(f64),

    // transform
    #[error("matrix is not in O(4,2): residual {0}")]
    NotOrthogonal(f64),
    #[error("no timelike vector in the constructed subspace")]
    NoTimelikeVector,

    // classify
    #[error("point is not singular: lambda = {0}")]
    NotSingular(f64),
    #[error("rank of df is {0}, expected 1")]
    NotRank1(u8),
    #[error("rank of df is {0}, expected 0")]
    NotRank0(u8),
    #[error("map is not a front at this point: (f, t) is not immersive")]
    NotFront,
    #[error("point is umbilic")]
    Umbilic,
    #[error("curvature sphere is not orthogonal to p here: (sigma1, p) = {0}")]
    NotSingularHere(f64),
    #[error("requested class is incompatible with the surface type at this point: {0}")]
    TypeIncompatible(String),
    #[error("no class transition in the parameter range")]
    NoTransition,
    #[error("steering failed: {0}")]
    SteeringFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
