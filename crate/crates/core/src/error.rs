use thiserror::Error;

/// Everything that can go wrong inside the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value produced in {0}")]
    NonFinite(&'static str),
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
    #[error("leading coefficient is zero within tolerance")]
    DegenerateLeadingCoefficient,
    #[error("input {0} is not real within tolerance")]
    NonRealInput(String),
    #[error("polynomial has no real root")]
    NoRealRoot,

    #[error("loop value {0} is not admissible")]
    InadmissibleDelta(f64),
    #[error("chirality +1 requires the depth-3 loop value, got {0}")]
    ChiralityMismatch(f64),
    #[error("chirality +1 is infeasible for delta = {0} > 9/4")]
    ChiralityInfeasible(f64),
    #[error("no positive root for the trace ratio")]
    NoPositiveRoot,
    #[error("box spaces of different shading combined")]
    SideMismatch,
    #[error("cap pair {0} out of range 0..4")]
    BadCapPair(usize),
    #[error("braid parameters do not match the model: {0}")]
    ParameterMismatch(String),
    #[error("degenerate BMW parameters: {0}")]
    DegenerateParameters(String),
    #[error("no sign candidate satisfies the twist closure")]
    NoSolution,
    #[error("{0} sign candidates satisfy the twist closure")]
    MultipleSolutions(usize),
    #[error("denominator vanishes in q,r recovery")]
    DegenerateDenominator,
    #[error("no canonical representative in the parameter orbit")]
    NoCanonicalRepresentative,
    #[error("support coefficient {0} is too close to zero to decide")]
    SupportAmbiguous(String),

    #[error("malformed pairing: {0}")]
    MalformedPairing(String),
    #[error("diagram is not planar: {0}")]
    NonPlanar(String),
    #[error("shading inconsistent: {0}")]
    ShadingInconsistent(String),
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
    #[error("a triangle face needs a triangle table")]
    TriangleTableRequired,
    #[error("diagram has open boundary; expected closed")]
    NotClosed,

    #[error("enumeration produced counts {0:?}, expected (5, 6, 3)")]
    InternalEnumerationMismatch((usize, usize, usize)),
    #[error("Gram matrix rank {0} is below 14")]
    GramRankDeficient(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
