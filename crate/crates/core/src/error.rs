use alloc::boxed::Box;
use alloc::string::String;

use crate::geodesics::RelaxationReport;

/// Errors raised by surface, path, transport and curvature computations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeomError {
    #[error("unknown surface `{0}`")]
    UnknownSurface(String),
    #[error("surface `{surface}` expects {expected} parameter(s), got {got}")]
    ParameterCount {
        surface: String,
        expected: &'static str,
        got: usize,
    },
    #[error("parameter `{name}` must be positive and finite, got {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },
    #[error("torus requires major radius > minor radius (got R={major}, r={minor})")]
    TorusRadii { major: f64, minor: f64 },
    #[error("point ({u}, {v}) lies outside the chart domain")]
    OutsideDomain { u: f64, v: f64 },
    #[error("metric is degenerate at ({u}, {v})")]
    DegenerateMetric { u: f64, v: f64 },
    #[error("region boundary is self-intersecting")]
    SelfIntersecting,
    #[error("region leaves the chart domain")]
    RegionOutsideDomain,
    #[error("a path needs at least 2 samples, got {0}")]
    PathTooShort(usize),
    #[error("samples {index} and {next} coincide", next = .index + 1)]
    RepeatedSample { index: usize },
    #[error("segment {index} has chart length {length} above the step bound {max_step}")]
    StepTooLong {
        index: usize,
        length: f64,
        max_step: f64,
    },
    #[error("loop is not closed: first and last samples differ")]
    NotClosed,
    #[error("loops have different base points")]
    BaseMismatch,
    #[error("index {index} out of range for {len} samples")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("spur does not start at the loop sample it is attached to")]
    SpurStartMismatch,
    #[error("chord endpoints do not lie on the region boundary")]
    ChordNotOnBoundary,
    #[error("chord leaves the region")]
    ChordExitsRegion,
    #[error("loop winds around a periodic chart axis and bounds no chart region")]
    NonContractible,
    #[error("tangent vector has zero length")]
    ZeroVector,
    #[error("trajectory left the chart domain after length {traversed}")]
    DomainExit { traversed: f64 },
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("endpoints are (nearly) antipodal; the connecting great circle is not unique")]
    NearAntipodal,
    #[error("chariot width {width} too large: wheel track folds at sample {index}")]
    WidthTooLarge { width: f64, index: usize },
    #[error("relaxation stopped at the iteration cap with max rotation rate {:e}", .0.final_max_rotation_rate)]
    RelaxationIncomplete(Box<RelaxationReport>),
    #[error("path degenerated: samples {index} and {next} merged", next = .index + 1)]
    PathDegenerate { index: usize },
    #[error("surface `{0}` has no embedding")]
    NoEmbedding(String),
    #[error("quadratic fit is rank deficient")]
    RankDeficient,
    #[error("unknown projection `{0}`")]
    UnknownProjection(String),
    #[error("projection `{0}` needs a sphere")]
    NotASphere(String),
    #[error("scale {scale} is below the integration noise floor {floor}")]
    ScaleBelowNoiseFloor { scale: f64, floor: f64 },
    #[error("enclosed area {area:e} is below the noise floor")]
    AreaBelowNoiseFloor { area: f64 },
    #[error("a polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("grid must have at least {min} cells per axis, got {got}")]
    GridTooCoarse { min: usize, got: usize },
    #[error("need at least {min} sample pairs, got {got}")]
    TooFewPairs { min: usize, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

pub type Result<T, E = GeomError> = core::result::Result<T, E>;
