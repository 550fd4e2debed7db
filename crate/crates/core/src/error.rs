use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeomError {
    #[error("empty bisector: one site dominates the other")]
    EmptyBisector,
    #[error("bisector of coincident sites")]
    CoincidentSites,
    #[error("no tangent: point is inside the chain's hull")]
    NoTangent,
    #[error("empty chain")]
    EmptyChain,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidationError {
    #[error("{ring} has fewer than 3 vertices")]
    TooFewVertices { ring: String },
    #[error("non-finite coordinate in {ring}")]
    NonFinite { ring: String },
    #[error("{ring} has zero area")]
    DegenerateRing { ring: String },
    #[error("{ring} repeats a vertex")]
    RepeatedVertex { ring: String },
    #[error("self-intersection in {ring}")]
    SelfIntersection { ring: String },
    #[error("holes intersect: hole {a} and hole {b}")]
    HolesIntersect { a: usize, b: usize },
    #[error("hole {hole} is not strictly inside the outer boundary")]
    HoleOutsideOuter { hole: usize },
    #[error("source not in free space")]
    SourceNotInFreeSpace,
    #[error("target not in free space")]
    TargetNotInFreeSpace,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {msg}")]
    Syntax { line: usize, column: usize, msg: String },
    #[error("invalid instance: {0}")]
    Invalid(#[from] ValidationError),
    #[error("could not place {what} after {tries} attempts")]
    CouldNotPlace { what: String, tries: usize },
    #[error("point outside free space")]
    OutsideFreeSpace,
    #[error("no path exists between source and target")]
    Disconnected,
    #[error("triangulation failed: {0}")]
    Triangulation(String),
    #[error("index {index} out of range (len {len})")]
    OutOfRange { index: usize, len: usize },
    #[error("order violation: key {key} does not fit between its neighbours")]
    OrderViolation { key: f64 },
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
