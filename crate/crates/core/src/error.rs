use thiserror::Error;

/// Errors raised by window, ray, sector and endgame computations.
///
/// Variants that signal an inadequate horizon carry enough context for the
/// caller to widen the window and retry.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("vertex {vertex} has {degree} neighbors, exceeding the degree bound {bound}")]
    DegreeBoundViolated {
        vertex: String,
        degree: usize,
        bound: usize,
    },
    #[error("neighbor relation is not symmetric: {from} lists {to} but not conversely")]
    OracleAsymmetry { from: String, to: String },
    #[error("oracle reports a self-loop or repeated edge at {0}")]
    NotSimple(String),
    #[error("distance between {0} and {1} is not certified by the window (widen it)")]
    Uncertified(String, String),
    #[error("vertex {0} lies outside the window")]
    OutsideWindow(String),
    #[error("consecutive vertices {0} and {1} are not adjacent")]
    NotAPath(String, String),
    #[error("operation needs a Cayley graph with generator labels")]
    NotCayley,
    #[error("operation needs a hyperbolicity constant; this family has none")]
    NotHyperbolic,
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("calibration failed: {0}")]
    CalibrationFailed(String),
    #[error("family has no enumerable boundary points")]
    NotEnumerable,
    #[error("no closed-form oracle for this construction")]
    NoExactOracle,
    #[error("reference ray is not geodesic at step {0}")]
    NotGeodesic(usize),
    #[error("horizon too small: {0}")]
    HorizonTooSmall(String),
    #[error("no stabilization within the horizon: {0} (increase H or R)")]
    Unstable(String),
    #[error("{found} horofunction classes exceed the ball bound {bound}")]
    TooManyClasses { found: usize, bound: usize },
    #[error("more than {0} geodesic prefixes; window too large for enumeration")]
    TooManyPrefixes(usize),
    #[error("no ray from {0} converges to the requested class")]
    NoConvergentRay(String),
    #[error("vertex {0} is outside the observation set")]
    OutsideObservationSet(String),
    #[error("no special vertex of the requested class within the window around {0}")]
    NotFoundWithinWindow(String),
    #[error("no type string of length {0} meets the infinitude proxy")]
    NoCandidate(usize),
    #[error("invalid horizon: {0}")]
    InvalidHorizon(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported export format `{0}`")]
    UnsupportedFormat(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
