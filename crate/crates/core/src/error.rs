use thiserror::Error;

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// The input violates a documented precondition.
    Validation,
    /// The input was acceptable but the numerics did not deliver.
    Numerical,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grid size {0} must be a power of two and at least 64")]
    InvalidGridSize(usize),
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("grid size mismatch: {left} vs {right}")]
    GridMismatch { left: usize, right: usize },
    #[error("expected a real-valued function, found imaginary part {0:e}")]
    NotReal(f64),
    #[error("coefficient vanishes at node {0}")]
    SingularCoefficient(usize),
    #[error("argument step {step:.4} rad at node {index} is not resolved by the grid")]
    UnderResolved { index: usize, step: f64 },
    #[error("coefficient closes onto its negative but half-integer winding was not allowed")]
    HalfWindingNotAllowed,
    #[error("Hoelder fit radius must be at least 8 nodes, got {0}")]
    RadiusTooSmall(usize),
    #[error("exponent p must satisfy p >= 1, got {0}")]
    InvalidExponent(f64),
    #[error("invalid fiber grid: {0}")]
    InvalidFiberGrid(String),
    #[error("the defining function is not defined at w = 0")]
    ZeroArgument,
    #[error("point is off the fiber: |rho| = {0:e}")]
    OffFiber(f64),
    #[error("parameter {0} is outside [0, 1]")]
    ParameterOutOfRange(f64),
    #[error("fiber parameter theta = {0} is outside [0, pi]")]
    ThetaOutOfRange(f64),
    #[error("arc endpoints coincide")]
    DegenerateArc,
    #[error("point {0} is not on the unit circle")]
    NotUnimodular(String),
    #[error("symbol vanishes on the linear arc (|a| = {0:e})")]
    SingularSymbol(f64),
    #[error("symbol extension has doubled winding {0}, expected 0")]
    SymbolWinding(i64),
    #[error("tangential intersection at corner {0}")]
    Nontransversal(i8),
    #[error("endpoint pinning violated at corner {corner}: |f - w| = {mismatch:e}")]
    PinningViolation { corner: i8, mismatch: f64 },
    #[error("point lies outside the upper arc")]
    LowerArc,
    #[error("doubled winding {0} is below -1: the linear problem is over-determined")]
    OverDetermined(i64),
    #[error("right-hand side violates the half-integer compatibility condition ({0:e})")]
    IncompatibleRhs(f64),
    #[error("linear solve residual {residual:e} exceeds tolerance {tolerance:e}")]
    LinearResidual { residual: f64, tolerance: f64 },
    #[error("linearized coefficient has doubled winding {0}")]
    LinearizationDegenerate(i64),
    #[error("iterate vanishes on the upper arc at node {0}")]
    IterateVanishes(usize),
    #[error("Newton step stalled at residual {0:e}")]
    NewtonStall(f64),
    #[error("Newton did not converge in {iterations} iterations (residual {residual:e})")]
    NewtonMaxIterations { iterations: usize, residual: f64 },
    #[error("continuation failed at t = {last_good_t}: {reason}")]
    ContinuationFailure { last_good_t: f64, reason: String },
    #[error("angle condition violated: endpoint angle {angle:.4} rad is not below pi/10")]
    AngleCondition { angle: f64 },
    #[error("zero {0} is not inside the open unit disk")]
    ZeroOutsideDisk(String),
    #[error("zero multiplicity must be at least 1")]
    InvalidMultiplicity,
    #[error("oracle requires phi-independent fibers, found variation {0:e}")]
    OracleInapplicable(f64),
    #[error("Zygmund hypothesis violated: p * sup|u| = {0} >= pi/2")]
    ZygmundHypothesis(f64),
    #[error("solution vanishes on the boundary at node {0}")]
    BoundaryZero(usize),
    #[error("final residual {residual:e} exceeds {tolerance:e}")]
    ResidualCheck { residual: f64, tolerance: f64 },
    #[error("zero count {found} differs from the prescribed {expected}")]
    ZeroCountMismatch { expected: usize, found: i64 },
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            LinearResidual { .. }
            | LinearizationDegenerate(_)
            | IterateVanishes(_)
            | NewtonStall(_)
            | NewtonMaxIterations { .. }
            | ContinuationFailure { .. }
            | ResidualCheck { .. }
            | ZeroCountMismatch { .. }
            | BoundaryZero(_)
            | UnderResolved { .. } => ErrorClass::Numerical,
            _ => ErrorClass::Validation,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
