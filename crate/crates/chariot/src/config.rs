//! Scenario file schema (TOML).
//!
//! ```toml
//! [surface]
//! kind = "sphere"
//! params = [1.0]
//!
//! [loops.octant]
//! generator = "geodesic_polygon"
//! vertices = [[1.5708, 0.9553], [0.7854, -0.6155], [2.3562, -0.6155]]
//!
//! [regions.octant]
//! boundary = "octant"
//!
//! [command]
//! kind = "gaussbonnet"
//! region = "octant"
//! grids = [32, 64]
//!
//! [output]
//! directory = "out/octant"
//! formats = ["csv", "svg"]
//! ```
//!
//! Chart points are `[u, v]` pairs; angles are radians.

use std::collections::BTreeMap;

use serde::Deserialize;

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub surface: SurfaceSpec,
    #[serde(default)]
    pub paths: BTreeMap<String, PathSpec>,
    #[serde(default)]
    pub loops: BTreeMap<String, PathSpec>,
    #[serde(default)]
    pub regions: BTreeMap<String, RegionSpec>,
    pub command: CommandSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSpec {
    pub kind: String,
    #[serde(default)]
    pub params: Vec<f64>,
    pub pole_margin: Option<f64>,
}

pub type Point = [f64; 2];

/// Generators for paths and loops. Every generated path is refined to the
/// surface's step bound.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(tag = "generator", rename_all = "snake_case", deny_unknown_fields)]
pub enum PathSpec {
    Line {
        from: Point,
        to: Point,
        #[serde(default = "one")]
        segments: usize,
    },
    Waypoints {
        points: Vec<Point>,
        /// Repeat the first point at the end.
        #[serde(default)]
        closed: bool,
    },
    /// Counterclockwise chart rectangle.
    ChartRectangle {
        u: [f64; 2],
        v: [f64; 2],
        #[serde(default = "one")]
        per_side: usize,
    },
    /// `u = const`, once around in increasing `v`.
    LatitudeCircle {
        u: f64,
        #[serde(default)]
        v0: f64,
        #[serde(default = "many")]
        segments: usize,
    },
    /// Geodesic sides through the vertices, closed.
    GeodesicPolygon { vertices: Vec<Point> },
    /// Chart circle arc from `angles[0]` to `angles[1]`.
    Arc {
        center: Point,
        radius: f64,
        angles: [f64; 2],
        #[serde(default = "many")]
        segments: usize,
    },
    /// The geodesic joining two points.
    Geodesic { from: Point, to: Point },
}

fn one() -> usize {
    1
}

fn many() -> usize {
    400
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RegionSpec {
    /// Name of a loop (or closed path) bounding the region.
    pub boundary: String,
}

/// Evaluation points: an explicit list, or an inclusive `n[0] × n[1]` grid.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub u: [f64; 2],
    pub v: [f64; 2],
    pub n: [usize; 2],
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CommandSpec {
    /// Transport along a path, or holonomy of a loop.
    Transport {
        path: Option<String>,
        #[serde(rename = "loop")]
        loop_name: Option<String>,
        /// Initial vector in chart components; defaults to the unit `∂u` direction.
        initial: Option<Point>,
    },
    Chariot {
        path: String,
        width: f64,
        step: Option<f64>,
        /// Also compare against continuum transport for these widths.
        #[serde(default)]
        convergence_widths: Vec<f64>,
    },
    /// Either `from`/`to`, or `start`/`direction`/`length`.
    Geodesic {
        from: Option<Point>,
        to: Option<Point>,
        start: Option<Point>,
        direction: Option<Point>,
        length: Option<f64>,
        /// Frame angle of the first try for `from`/`to`.
        initial_angle: Option<f64>,
    },
    Relax {
        path: String,
        #[serde(default = "relax_tol")]
        tol: f64,
        #[serde(default = "relax_cap")]
        max_iterations: usize,
        step_gain: Option<f64>,
    },
    Curvature {
        #[serde(default)]
        points: Vec<Point>,
        grid: Option<GridSpec>,
        /// Loop half-sizes; defaults to `[0.1, 0.05, 0.025]` × feature scale.
        scales: Option<Vec<f64>>,
    },
    Gaussbonnet {
        region: String,
        #[serde(default = "gb_grids")]
        grids: Vec<usize>,
    },
    Polygon {
        vertices: Vec<Point>,
    },
    Mapcheck {
        projection: String,
        #[serde(default = "pairs")]
        pairs: usize,
        #[serde(default)]
        seed: u64,
        #[serde(default = "unit")]
        nominal_scale: f64,
        /// Region whose holonomy is tested as an obstruction.
        region: Option<String>,
    },
    Egregium {
        #[serde(default)]
        points: Vec<Point>,
        grid: Option<GridSpec>,
    },
}

fn relax_tol() -> f64 {
    1e-6
}

fn relax_cap() -> usize {
    200_000
}

fn gb_grids() -> Vec<usize> {
    vec![32, 64]
}

fn pairs() -> usize {
    200
}

fn unit() -> f64 {
    1.0
}

impl CommandSpec {
    pub fn name(&self) -> &'static str {
        match self {
            CommandSpec::Transport { .. } => "transport",
            CommandSpec::Chariot { .. } => "chariot",
            CommandSpec::Geodesic { .. } => "geodesic",
            CommandSpec::Relax { .. } => "relax",
            CommandSpec::Curvature { .. } => "curvature",
            CommandSpec::Gaussbonnet { .. } => "gaussbonnet",
            CommandSpec::Polygon { .. } => "polygon",
            CommandSpec::Mapcheck { .. } => "mapcheck",
            CommandSpec::Egregium { .. } => "egregium",
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub directory: Option<String>,
    #[serde(default = "csv_only")]
    pub formats: Vec<String>,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            directory: None,
            formats: csv_only(),
        }
    }
}

fn csv_only() -> Vec<String> {
    vec!["csv".into()]
}

/// Where a parse error happened.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseFailure {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Parses a scenario, reporting 1-based line and column on failure.
pub fn parse(text: &str) -> Result<ScenarioConfig, ParseFailure> {
    toml::from_str(text).map_err(|e| {
        let (line, column) = match e.span() {
            Some(span) => {
                let before = &text[..span.start.min(text.len())];
                let line = before.matches('\n').count() + 1;
                let column = before.len() - before.rfind('\n').map_or(0, |k| k + 1) + 1;
                (line, column)
            }
            None => (0, 0),
        };
        ParseFailure {
            line,
            column,
            message: e.message().to_string(),
        }
    })
}
